"""
gauge

Improper integrals over R^d of the gauge functions
f_gamma(x) = int e^{-|x| Psi(xi)} ||xi||^{-gamma} dxi and
g_{gamma,+-}(x) = int (Re chi_xi(x))_{+-} ||xi||^{-gamma} dxi.

Every integrand handled here is even in xi (Re Psi is even, Im Psi odd) and,
in d >= 2, isotropic, so integrals reduce to
s_{d-1} int_0^inf F(r) r^{d-1-gamma} dr. The half line is cut into a core
panel [0, 1], where the substitution u = r^{d-gamma} removes the algebraic
singularity, and dyadic rings [2^m, 2^(m+1)]. Rings are summed until the tail
is negligible (Finite) or the partial sums are shown not to converge
(Divergent, with the partial sums as witness).
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Optional, Tuple, Union

import numpy as np
from scipy.special import roots_legendre

from levycap.errors import (
    ConfigurationError,
    DomainError,
    PreconditionError,
    UnsupportedConfigurationError,
)
from levycap.levy_model import (
    LevyTriplet,
    exponent_profile,
    has_bounded_real_part,
    imag_bound,
    imag_slope_bound,
    is_isotropic,
    max_jump,
    symmetry_witness,
    window_average,
    window_average_parts,
)
from levycap.utils import dyadic_ring, negative_part, positive_part, sphere_area

logger = logging.getLogger(__name__)

_NODES_HI, _WEIGHTS_HI = roots_legendre(16)
_NODES_LO, _WEIGHTS_LO = roots_legendre(8)
_PANEL_BLOCK = 1 << 14


@dataclass(frozen=True)
class GaugeControls:
    """
    Numerical controls shared by every improper integral.

    r_max: outer radius (the last ring ends at 2^rings <= r_max)
    rings: number of dyadic rings, defaults to log2(r_max)
    rel_tol: per-panel relative tolerance of the adaptive quadrature
    threshold: partial sums above this are declared divergent
    tail_tol: two consecutive rings below tail_tol * partial sum end the sum
    trend_length, trend_slack: non-summability test on the last rings
    max_depth: bisection depth of the adaptive panels
    """

    r_max: float = 2.0**20
    rings: Optional[int] = None
    rel_tol: float = 1e-9
    threshold: float = 1e6
    tail_tol: float = 1e-6
    trend_length: int = 8
    trend_slack: float = 1e-3
    max_depth: int = 8

    def __post_init__(self) -> None:
        if not self.r_max >= 2.0**10:
            raise ConfigurationError("must be at least 2^10", "r_max")
        if not 0 < self.rel_tol < 1e-3:
            raise ConfigurationError("must lie in (0, 1e-3)", "rel_tol")
        if not self.threshold > 0:
            raise ConfigurationError("must be positive", "threshold")
        if not 0 < self.tail_tol < 1:
            raise ConfigurationError("must lie in (0, 1)", "tail_tol")
        if self.trend_length < 2:
            raise ConfigurationError("must be at least 2", "trend_length")
        if self.rings is not None and not 1 <= self.rings <= math.log2(self.r_max):
            raise ConfigurationError("rings must fit inside r_max", "rings")

    @property
    def ring_count(self) -> int:
        if self.rings is not None:
            return int(self.rings)
        return int(math.floor(math.log2(self.r_max)))


class Sign(str, Enum):
    """Which part of Re chi a gauge integrates."""

    PLUS = "plus"
    MINUS = "minus"
    FULL = "full"


@dataclass(frozen=True)
class Finite:
    """A convergent integral: value >= 0 with an absolute error estimate."""

    value: float
    err: float
    core: float = 0.0
    rings: Tuple[float, ...] = ()

    kind = "finite"
    is_finite = True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "value": self.value,
            "err": self.err,
            "core": self.core,
            "rings": list(self.rings),
        }


@dataclass(frozen=True)
class Divergent:
    """
    A divergence verdict. witness[m] is the partial integral up to the end
    of ring m (witness[0] is the core panel [0, 1]).
    """

    witness: Tuple[float, ...]
    note: str
    core: float = 0.0
    rings: Tuple[float, ...] = field(default=())

    kind = "divergent"
    is_finite = False
    value = math.inf

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "witness": list(self.witness),
            "note": self.note,
            "core": self.core,
            "rings": list(self.rings),
        }


GaugeValue = Union[Finite, Divergent]


def gauge_value_from_dict(data: Dict[str, Any]) -> GaugeValue:
    """
    Rebuilds a GaugeValue from its JSON form
    """
    kind = data.get("kind")
    rings = tuple(float(i) for i in data.get("rings", ()))
    if kind == "finite":
        return Finite(float(data["value"]), float(data["err"]), float(data.get("core", 0.0)), rings)
    if kind == "divergent":
        return Divergent(
            tuple(float(i) for i in data["witness"]),
            str(data.get("note", "")),
            float(data.get("core", 0.0)),
            rings,
        )
    raise ConfigurationError(f"unknown kind {kind!r}", "kind")


def _gauss(func: Callable, a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    "16 and 8 point Gauss-Legendre sums on each panel [a_i, b_i]"
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    points = np.concatenate(
        [
            mid[:, None] + half[:, None] * _NODES_HI[None, :],
            mid[:, None] + half[:, None] * _NODES_LO[None, :],
        ],
        axis=1,
    )
    values = np.asarray(func(points.reshape(-1)), dtype=float).reshape(points.shape)
    high = values[:, :16] @ _WEIGHTS_HI * half
    low = values[:, 16:] @ _WEIGHTS_LO * half
    return high, low


def _adaptive_panels(
    func: Callable, edges: np.ndarray, controls: GaugeControls, density: float = 0.0
) -> Tuple[float, float]:
    """
    Integrates func over consecutive panels of edges, bisecting panels whose
    two Gauss rules disagree by more than rel_tol relative to the panel, or
    by more than density times the panel width. Panels are visited in a
    fixed order.
    """
    a, b = edges[:-1], edges[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    total = 0.0
    err = 0.0
    for depth in range(controls.max_depth + 1):
        if a.size == 0:
            break
        high, low = _gauss(func, a, b)
        diff = np.abs(high - low)
        scale = np.abs(high).sum()
        tolerance = np.maximum(controls.rel_tol * np.abs(high), density * (b - a))
        done = (diff <= tolerance) | (diff <= 1e-15 * scale)
        if depth == controls.max_depth:
            done[:] = True
        total += float(high[done].sum())
        err += float(diff[done].sum())
        mid = 0.5 * (a + b)[~done]
        a, b = np.concatenate([a[~done], mid]), np.concatenate([mid, b[~done]])
    return total, err


def _bracket_roots(sign_fn: Callable, grid: np.ndarray) -> np.ndarray:
    "bisected sign changes of sign_fn between consecutive grid points"
    values = sign_fn(grid)
    index = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)
    if index.size == 0:
        return index.astype(float)
    a, b = grid[index], grid[index + 1]
    fa = values[index]
    for _ in range(60):
        mid = 0.5 * (a + b)
        fm = sign_fn(mid)
        left = np.sign(fm) == np.sign(fa)
        a = np.where(left, mid, a)
        fa = np.where(left, fm, fa)
        b = np.where(left, b, mid)
    return 0.5 * (a + b)


def _interval_integral(
    func: Callable,
    lo: float,
    hi: float,
    step: float,
    controls: GaugeControls,
    sign_fn: Optional[Callable] = None,
    transform: Optional[Callable] = None,
    atol: float = 0.0,
) -> Tuple[float, float]:
    """
    Integral of func over [lo, hi] on panels of width <= step, with extra
    panel edges at the sign changes of sign_fn. transform maps panel edges
    (in r) into the integration variable. atol is an absolute error budget
    for the whole interval, shared among panels by width.
    """
    steps = max(1, int(math.ceil((hi - lo) / step)))
    ends = np.array([lo, hi], dtype=float)
    if transform is not None:
        ends = transform(ends)
    density = atol / float(ends[1] - ends[0]) if atol > 0 else 0.0
    total = 0.0
    err = 0.0
    for start in range(0, steps, _PANEL_BLOCK):
        stop = min(steps, start + _PANEL_BLOCK)
        edges = lo + (hi - lo) * np.arange(start, stop + 1) / steps
        if sign_fn is not None:
            edges = np.union1d(edges, _bracket_roots(sign_fn, edges))
        if transform is not None:
            edges = transform(edges)
        value, e = _adaptive_panels(func, edges, controls, density)
        total += value
        err += e
    return total, err


def _non_summable(rings: list, controls: GaugeControls) -> bool:
    recent = np.asarray(rings[-(controls.trend_length + 1) :])
    if recent.size < controls.trend_length + 1 or np.any(recent <= 0):
        return False
    return bool(np.all(recent[1:] >= (1.0 - controls.trend_slack) * recent[:-1]))


def _geometric_tail(rings: list) -> float:
    if len(rings) < 2 or rings[-2] <= 0:
        return rings[-1] if rings else 0.0
    ratio = rings[-1] / rings[-2]
    if ratio >= 1:
        return rings[-1]
    return rings[-1] * ratio / (1.0 - ratio)


def radial_reduce(
    func: Callable,
    gamma: float,
    d: int,
    controls: Optional[GaugeControls] = None,
    step: float = math.pi / 8,
    sign_fn: Optional[Callable] = None,
    trend: bool = True,
) -> GaugeValue:
    """
    Returns s_{d-1} int_0^inf F(r) r^{d-1-gamma} dr for a nonnegative radial
    integrand F (vectorised over r), i.e. the integral over R^d of
    F(||xi||) ||xi||^{-gamma}.

    step bounds the panel width (it should resolve the oscillations of F)
    and sign_fn, when given, has sign changes where F has kinks.

    Rings are added until the partial sum passes controls.threshold, two
    rings fall below tail_tol of the total, or r_max is reached. With trend
    set, a run of trend_length non-decreasing rings also ends the sum as
    divergent; callers turn it off when F may decay only past a large radius
    (Gaussian or stable parts).
    Each ring is integrated to an absolute accuracy of rel_tol times the
    partial sum so far.
    """
    controls = controls or GaugeControls()
    if int(d) != d or d < 1:
        raise DomainError("dimension must be an integer >= 1", "d")
    power = d - gamma
    if not power > 0:
        raise DomainError("the integral diverges at the origin unless gamma < d", "gamma")
    area = sphere_area(int(d))

    def core_func(u):
        return func(u ** (1.0 / power)) / power

    core, err = _interval_integral(
        core_func, 0.0, 1.0, step, controls, sign_fn, lambda r: r**power
    )
    core *= area
    err *= area
    total = core
    rings: list = []
    witness = [total]

    def ring_func(r):
        return func(r) * r ** (power - 1.0)

    for m in range(controls.ring_count):
        lo, hi = dyadic_ring(m)
        value, e = _interval_integral(
            ring_func, lo, hi, step, controls, sign_fn, atol=controls.rel_tol * abs(total) / area
        )
        value *= area
        rings.append(value)
        total += value
        err += e * area
        witness.append(total)
        logger.debug("ring %d [%g, %g]: %.6g (partial sum %.6g)", m, lo, hi, value, total)
        if total > controls.threshold:
            return Divergent(tuple(witness), "partial integral exceeds threshold", core, tuple(rings))
        if trend and _non_summable(rings, controls):
            return Divergent(
                tuple(witness),
                f"last {controls.trend_length} ring contributions do not decrease",
                core,
                tuple(rings),
            )
        if (
            total > 0
            and len(rings) >= 2
            and rings[-1] <= controls.tail_tol * total
            and rings[-2] <= controls.tail_tol * total
        ):
            tail = _geometric_tail(rings)
            return Finite(total + tail, err + tail, core, tuple(rings))
    if total == 0:
        return Finite(0.0, err, core, tuple(rings))
    if len(rings) >= 2 and 0 < rings[-1] < rings[-2]:
        tail = _geometric_tail(rings)
        logger.info("r_max reached before the tail settled, tail estimate %.3g", tail)
        return Finite(total + tail, err + tail, core, tuple(rings))
    return Divergent(tuple(witness), "no decay before r_max", core, tuple(rings))


def check_gamma(spec: LevyTriplet, gamma: float) -> None:
    if not 0 < gamma < spec.d:
        raise DomainError(f"must lie in (0, {spec.d})", "gamma")


def check_radial(spec: LevyTriplet) -> None:
    """d = 1 integrands are even; in d >= 2 only isotropic exponents reduce."""
    if spec.d >= 2 and not is_isotropic(spec):
        raise UnsupportedConfigurationError(
            "anisotropic exponents in d >= 2 are not integrated"
        )


def radial_points(spec: LevyTriplet, r: np.ndarray) -> np.ndarray:
    "points r * e_1 of R^d"
    r = np.asarray(r, dtype=float).reshape(-1)
    if spec.d == 1:
        return r
    points = np.zeros((r.size, spec.d))
    points[:, 0] = r
    return points


def psi_on_ray(spec: LevyTriplet, r: np.ndarray) -> np.ndarray:
    "Psi(r e_1) as complex values"
    re, im = exponent_profile(spec, radial_points(spec, r))
    return re + 1j * im


def scan_step(spec: LevyTriplet, span: float) -> float:
    """
    Panel width resolving the oscillations of chi_xi(u) for |u| <= span
    """
    return math.pi / (8.0 * (1.0 + span * imag_slope_bound(spec) + span * max_jump(spec)))


def _divergent_at_origin(spec: LevyTriplet, gamma: float, controls: GaugeControls) -> GaugeValue:
    # at x = 0 the integrand is ||xi||^{-gamma}, which is not integrable at infinity
    return radial_reduce(lambda r: np.ones_like(r), gamma, spec.d, controls)


@dataclass(frozen=True)
class GaugeQuery:
    """One evaluation of g_{gamma,sign}(x) for a process."""

    spec: LevyTriplet
    gamma: float
    x: float
    sign: Sign = Sign.PLUS
    controls: GaugeControls = field(default_factory=GaugeControls)

    def __post_init__(self) -> None:
        check_gamma(self.spec, self.gamma)
        if not math.isfinite(self.x):
            raise ConfigurationError("must be finite", "x")
        object.__setattr__(self, "sign", Sign(self.sign))


def negative_part_vanishes(spec: LevyTriplet, span: float) -> bool:
    """
    True when (Re chi_xi(u))_- = 0 for all xi and |u| <= span: either Psi
    is real, or |Im Psi| <= B and span * B <= pi / 2.
    """
    if span == 0:
        return True
    bound = imag_bound(spec)
    if bound is not None and span * bound <= math.pi / 2:
        return True
    return symmetry_witness(spec) is None


def f_gamma(
    spec: LevyTriplet, gamma: float, x: float, controls: Optional[GaugeControls] = None
) -> GaugeValue:
    """
    f_gamma(x) = int_{R^d} e^{-|x| Psi(xi)} ||xi||^{-gamma} dxi for a
    symmetric process.
    """
    controls = controls or GaugeControls()
    check_gamma(spec, gamma)
    witness = symmetry_witness(spec)
    if witness is not None:
        raise PreconditionError(
            f"Psi is not real (Im Psi({witness.tolist()}) != 0); use g_gamma instead",
            "spec",
        )
    check_radial(spec)
    if x == 0:
        return _divergent_at_origin(spec, gamma, controls)

    def integrand(r):
        return np.exp(-abs(x) * psi_on_ray(spec, r).real)

    return radial_reduce(
        integrand, gamma, spec.d, controls, scan_step(spec, abs(x)), trend=has_bounded_real_part(spec)
    )


def g_gamma(query: GaugeQuery) -> GaugeValue:
    """
    g_{gamma,+-}(x) = int_{R^d} (Re chi_xi(x))_{+-} ||xi||^{-gamma} dxi.

    sign=full integrates Re chi itself: for symmetric processes this is
    f_gamma; otherwise it is plus - minus when both converge.
    """
    spec, gamma, x, controls = query.spec, query.gamma, abs(query.x), query.controls
    check_radial(spec)
    if query.sign is Sign.FULL:
        if symmetry_witness(spec) is None:
            return g_gamma(GaugeQuery(spec, gamma, x, Sign.PLUS, controls))
        plus = g_gamma(GaugeQuery(spec, gamma, x, Sign.PLUS, controls))
        minus = g_gamma(GaugeQuery(spec, gamma, x, Sign.MINUS, controls))
        if plus.is_finite and minus.is_finite:
            return Finite(plus.value - minus.value, plus.err + minus.err)
        raise UnsupportedConfigurationError(
            "the signed integral of Re chi is undefined when a part diverges"
        )
    if query.sign is Sign.MINUS and negative_part_vanishes(spec, x):
        return Finite(0.0, 0.0)
    if x == 0:
        return _divergent_at_origin(spec, gamma, controls)
    part = positive_part if query.sign is Sign.PLUS else negative_part

    def integrand(r):
        psi = psi_on_ray(spec, r)
        return part(np.exp(-x * psi.real) * np.cos(x * psi.imag))

    def sign_fn(r):
        return np.cos(x * psi_on_ray(spec, r).imag)

    return radial_reduce(
        integrand, gamma, spec.d, controls, scan_step(spec, x), sign_fn, has_bounded_real_part(spec)
    )


def g_gamma_cell(
    spec: LevyTriplet,
    gamma: float,
    offset: float,
    width: float,
    sign: Sign = Sign.PLUS,
    controls: Optional[GaugeControls] = None,
) -> GaugeValue:
    """
    Average of g_{gamma,sign} over two cells of the given width whose
    centres are `offset` apart: the integral of the cell-pair averaged
    signed parts of Re chi against ||xi||^{-gamma}.
    """
    controls = controls or GaugeControls()
    check_gamma(spec, gamma)
    check_radial(spec)
    if not width > 0:
        raise ConfigurationError("cell width must be positive", "width")
    sign = Sign(sign)
    span = abs(offset) + width
    if sign is Sign.MINUS and negative_part_vanishes(spec, span):
        return Finite(0.0, 0.0)
    if sign is Sign.FULL and symmetry_witness(spec) is not None:
        plus = g_gamma_cell(spec, gamma, offset, width, Sign.PLUS, controls)
        minus = g_gamma_cell(spec, gamma, offset, width, Sign.MINUS, controls)
        if plus.is_finite and minus.is_finite:
            return Finite(plus.value - minus.value, plus.err + minus.err)
        raise UnsupportedConfigurationError(
            "the signed integral of Re chi is undefined when a part diverges"
        )

    def integrand(r):
        psi = psi_on_ray(spec, r)
        if sign is Sign.FULL:
            return window_average(psi, abs(offset), width)
        plus, minus = window_average_parts(psi, abs(offset), width)
        return plus if sign is Sign.PLUS else minus

    return radial_reduce(
        integrand, gamma, spec.d, controls, scan_step(spec, span), trend=has_bounded_real_part(spec)
    )
