"""
levy_model

Levy processes described by their triplets (b, A, L) and the objects built
from the Levy-Khinchine exponent: Psi itself, the kernel
chi_xi(x) = exp(-|x| Psi(sign(x) xi)) and the signed parts of its real part.

The Levy measure is a finite sum of atoms, optionally completed by an
isotropic stable part contributing c ||xi||^alpha. The compensator uses the
cut-off 1{||y|| <= 1}, so atoms outside the unit ball carry no
compensating drift.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from levycap._wrappers import Vector, as_vector, cast_arrays, integer, read_field
from levycap.errors import ConfigurationError, DimensionError
from levycap.utils import negative_part, positive_part

logger = logging.getLogger(__name__)

PSD_TOLERANCE = 1e-12
SYMMETRY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class JumpAtom:
    """A single atom lam * delta_y of the Levy measure."""

    y: np.ndarray
    lam: float


@dataclass(frozen=True)
class StablePart:
    """Isotropic stable component, adds c ||xi||^alpha to Psi."""

    alpha: float
    c: float


@dataclass(frozen=True, eq=False)
class LevyTriplet:
    """
    A Levy process in R^d given by drift b, Gaussian covariance A,
    finitely many jump atoms and an optional isotropic stable part.

    Construction validates every field and raises ConfigurationError
    naming the offending one.
    """

    d: int
    b: np.ndarray
    A: np.ndarray
    jumps: Tuple[JumpAtom, ...] = ()
    stable: Optional[StablePart] = None
    name: str = field(default="levy")

    def __post_init__(self) -> None:
        if int(self.d) != self.d or self.d < 1:
            raise ConfigurationError("dimension must be a positive integer", "d")
        b = as_vector(self.b)
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        if b.shape != (self.d,):
            raise DimensionError(f"expected {self.d} components, got {b.size}", "b")
        if A.shape != (self.d, self.d):
            raise DimensionError(f"expected a {self.d}x{self.d} matrix", "A")
        if not np.all(np.isfinite(A)) or not np.all(np.isfinite(b)):
            raise ConfigurationError("entries must be finite", "A")
        if np.max(np.abs(A - A.T), initial=0.0) > PSD_TOLERANCE:
            raise ConfigurationError("matrix is not symmetric", "A")
        if np.min(np.linalg.eigvalsh(A)) < -PSD_TOLERANCE:
            raise ConfigurationError("matrix is not positive semidefinite", "A")
        jumps = []
        for k, atom in enumerate(self.jumps):
            y = as_vector(atom.y)
            if y.shape != (self.d,):
                raise DimensionError(f"expected {self.d} components", f"jumps[{k}].y")
            if not np.any(y != 0):
                raise ConfigurationError("jump atom at the origin", f"jumps[{k}].y")
            if not atom.lam > 0 or not np.isfinite(atom.lam):
                raise ConfigurationError("mass must be positive", f"jumps[{k}].lambda")
            jumps.append(JumpAtom(y, float(atom.lam)))
        if self.stable is not None:
            if not 0 < self.stable.alpha < 2:
                raise ConfigurationError("index must lie in (0, 2)", "stable.alpha")
            if not self.stable.c > 0:
                raise ConfigurationError("intensity must be positive", "stable.c")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "A", 0.5 * (A + A.T))
        object.__setattr__(self, "jumps", tuple(jumps))

    @classmethod
    def brownian(cls, d: int = 1, variance: float = 1.0) -> "LevyTriplet":
        """Brownian motion with covariance variance * I."""
        return cls(d, np.zeros(d), variance * np.eye(d), name="brownian")

    @classmethod
    def poisson(cls, rate: float = 1.0) -> "LevyTriplet":
        """Poisson process: triplet (rate, 0, rate * delta_1)."""
        return cls(1, [rate], [[0.0]], (JumpAtom(np.ones(1), rate),), name="poisson")

    @classmethod
    def drift(cls, velocity: float = 1.0) -> "LevyTriplet":
        """Deterministic motion X(t) = velocity * t."""
        return cls(1, [velocity], [[0.0]], name="drift")

    @classmethod
    def symmetric_compound_poisson(
        cls, jump: float = 1.0, rate: float = 1.0
    ) -> "LevyTriplet":
        """Jumps of size +-jump, each with mass rate / 2."""
        atoms = (
            JumpAtom(np.array([jump]), rate / 2.0),
            JumpAtom(np.array([-jump]), rate / 2.0),
        )
        return cls(1, [0.0], [[0.0]], atoms, name="compound_poisson")

    @classmethod
    def stable_process(cls, alpha: float, c: float = 1.0, d: int = 1) -> "LevyTriplet":
        """Isotropic alpha-stable process with Psi(xi) = c ||xi||^alpha."""
        return cls(d, np.zeros(d), np.zeros((d, d)), (), StablePart(alpha, c), name="stable")

    @classmethod
    def from_dict(cls, data: Dict[str, Any], name: str = "levy") -> "LevyTriplet":
        """
        Builds a triplet from the process file schema:
        {"d":1, "b":[1.0], "A":[[0.0]], "jumps":[{"y":[1.0],"lambda":1.0}],
        "stable":{"alpha":1.5,"c":1.0}}
        """
        if not isinstance(data, dict):
            raise ConfigurationError("expected a JSON object", "spec")
        for key in ("d", "b", "A"):
            if key not in data:
                raise ConfigurationError("missing field", key)
        if not isinstance(data.get("jumps") or [], list):
            raise ConfigurationError("expected a list of atoms", "jumps")
        jumps = []
        for k, atom in enumerate(data.get("jumps") or []):
            if not isinstance(atom, dict) or "y" not in atom or "lambda" not in atom:
                raise ConfigurationError("needs 'y' and 'lambda'", f"jumps[{k}]")
            jumps.append(
                JumpAtom(
                    read_field(as_vector, atom["y"], f"jumps[{k}].y"),
                    read_field(float, atom["lambda"], f"jumps[{k}].lambda"),
                )
            )
        stable = data.get("stable")
        if stable is not None:
            if not isinstance(stable, dict) or "alpha" not in stable or "c" not in stable:
                raise ConfigurationError("needs 'alpha' and 'c'", "stable")
            stable = StablePart(
                read_field(float, stable["alpha"], "stable.alpha"),
                read_field(float, stable["c"], "stable.c"),
            )
        return cls(
            read_field(integer, data["d"], "d"),
            read_field(as_vector, data["b"], "b"),
            read_field(lambda a: np.asarray(a, dtype=float), data["A"], "A"),
            tuple(jumps),
            stable,
            name=str(data.get("name", name)),
        )

    @classmethod
    def load(cls, path: str) -> "LevyTriplet":
        """
        Reads a process spec file. Parse failures name the file and line.
        """
        with open(path) as handle:
            text = handle.read()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as error:
            raise ConfigurationError(
                f"{path}, line {error.lineno}: {error.msg}", "spec"
            ) from error
        try:
            return cls.from_dict(data, name=path)
        except ConfigurationError as error:
            raise ConfigurationError(f"{path}: {error}", error.field) from error

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "d": self.d,
            "b": self.b.tolist(),
            "A": self.A.tolist(),
            "jumps": [{"y": i.y.tolist(), "lambda": i.lam} for i in self.jumps],
        }
        if self.stable is not None:
            data["stable"] = {"alpha": self.stable.alpha, "c": self.stable.c}
        return data


@dataclass(frozen=True)
class ExponentValue:
    """Psi(xi) split into its (nonnegative, even) real and (odd) imaginary parts."""

    re: float
    im: float

    def to_dict(self) -> Dict[str, float]:
        return {"re": self.re, "im": self.im}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExponentValue":
        return cls(float(data["re"]), float(data["im"]))


def _as_points(spec: LevyTriplet, xis: np.ndarray) -> np.ndarray:
    """
    Reads xis as an (N, d) array; a flat array is N points when d = 1
    """
    xis = np.asarray(xis, dtype=float)
    if spec.d == 1 and xis.ndim <= 1:
        return xis.reshape(-1, 1)
    xis = np.atleast_2d(xis)
    if xis.shape[-1] != spec.d:
        raise DimensionError(f"points must have {spec.d} components", "xi")
    return xis


def exponent_profile(spec: LevyTriplet, xis: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorised Levy-Khinchine formula: returns (Re Psi, Im Psi) at every
    point of xis, evaluated in closed form.
    """
    points = _as_points(spec, xis)
    re = 0.5 * np.einsum("ni,ij,nj->n", points, spec.A, points)
    im = -points @ spec.b
    for atom in spec.jumps:
        phase = points @ atom.y
        re = re + atom.lam * (1.0 - np.cos(phase))
        compensator = phase if np.linalg.norm(atom.y) <= 1.0 else 0.0
        im = im - atom.lam * (np.sin(phase) - compensator)
    if spec.stable is not None:
        re = re + spec.stable.c * np.linalg.norm(points, axis=1) ** spec.stable.alpha
    return re, im


@cast_arrays
def evaluate_exponent(spec: LevyTriplet, xi: Vector) -> ExponentValue:
    """
    Returns Psi(xi) = -i<b,xi> + 1/2<A xi,xi>
    - sum_k lam_k (e^{i<y_k,xi>} - 1 - i<y_k,xi> 1{||y_k|| <= 1}) + c ||xi||^alpha.

    Psi(0) is exactly 0.
    """
    if xi.size != spec.d:
        raise DimensionError(f"xi must have {spec.d} components", "xi")
    if not np.all(np.isfinite(xi)):
        raise ConfigurationError("xi must be finite", "xi")
    re, im = exponent_profile(spec, xi.reshape(1, -1))
    return ExponentValue(float(re[0]), float(im[0]))


def _sign(x: float) -> float:
    # sign(0) = +1; irrelevant since |x| = 0 forces chi = 1
    return -1.0 if x < 0 else 1.0


@cast_arrays
def chi(spec: LevyTriplet, xi: Vector, x: float) -> complex:
    """
    Returns chi_xi(x) = exp(-|x| Psi(sign(x) xi)).

    Uses Psi(-xi) = conj(Psi(xi)), so the result is
    e^{-|x| Re Psi(xi)} (cos(|x| Im Psi(xi)) - i sign(x) sin(|x| Im Psi(xi))).
    """
    value = evaluate_exponent(spec, xi)
    modulus = np.exp(-abs(x) * value.re)
    angle = abs(x) * value.im
    return complex(modulus * np.cos(angle), -_sign(x) * modulus * np.sin(angle))


@cast_arrays
def re_chi_parts(spec: LevyTriplet, xi: Vector, x: float) -> Tuple[float, float]:
    """
    Returns ((Re chi_xi(x))_+, (Re chi_xi(x))_-), using
    Re chi_xi(x) = e^{-|x| Re Psi(xi)} cos(|x| Im Psi(xi)).
    """
    real = np.real(chi(spec, xi, x))
    return float(positive_part(real)), float(negative_part(real))


def re_chi_profile(spec: LevyTriplet, xis: np.ndarray, x: float) -> np.ndarray:
    """
    Vectorised Re chi_xi(x) over the points xis (even in both xi and x)
    """
    re, im = exponent_profile(spec, xis)
    return np.exp(-abs(x) * re) * np.cos(abs(x) * im)


def _witness_points(spec: LevyTriplet, count: int = 257) -> np.ndarray:
    radii = np.concatenate([[0.0], np.geomspace(1e-3, 1e4, count - 1)])
    if spec.d == 1:
        return np.concatenate([radii, -radii[1:]]).reshape(-1, 1)
    rng = np.random.default_rng(20061)
    directions = rng.standard_normal((count, spec.d))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    return directions * radii[:, None]


def symmetry_witness(spec: LevyTriplet) -> Optional[np.ndarray]:
    """
    Samples Psi and returns a point xi with |Im Psi(xi)| > 1e-12, or None
    when Psi looks real-valued (the process is symmetric).
    """
    points = _witness_points(spec)
    _, im = exponent_profile(spec, points)
    offending = np.flatnonzero(np.abs(im) > SYMMETRY_TOLERANCE)
    if offending.size == 0:
        return None
    return points[offending[0]]


def is_symmetric(spec: LevyTriplet) -> bool:
    return symmetry_witness(spec) is None


def is_isotropic(spec: LevyTriplet) -> bool:
    """
    True when Psi depends on ||xi|| only. Every real-valued exponent on the
    line qualifies; in d >= 2 this needs b = 0, no jump atoms and A = a * I.
    """
    if spec.d == 1:
        return is_symmetric(spec)
    if np.any(spec.b != 0) or spec.jumps:
        return False
    scale = spec.A[0, 0]
    return bool(np.allclose(spec.A, scale * np.eye(spec.d), atol=PSD_TOLERANCE))


def effective_drift(spec: LevyTriplet) -> np.ndarray:
    """
    b - sum of lam_k y_k over the compensated atoms (||y_k|| <= 1): the
    coefficient of the linear part of Im Psi.
    """
    drift = spec.b.copy()
    for atom in spec.jumps:
        if np.linalg.norm(atom.y) <= 1.0:
            drift = drift - atom.lam * atom.y
    return drift


def imag_bound(spec: LevyTriplet) -> Optional[float]:
    """
    Returns sup |Im Psi| when it is finite (no effective linear drift),
    otherwise None. Then |Im Psi| <= sum_k lam_k.
    """
    if np.linalg.norm(effective_drift(spec)) > SYMMETRY_TOLERANCE:
        return None
    return float(sum(atom.lam for atom in spec.jumps))


def has_bounded_real_part(spec: LevyTriplet) -> bool:
    """
    True when Re Psi is bounded (by 2 sum_k lam_k): no Gaussian part and no
    stable part, so e^{-|x| Re Psi} stays away from 0 at large ||xi||.
    """
    return spec.stable is None and not np.any(spec.A)


def imag_slope_bound(spec: LevyTriplet) -> float:
    """
    Upper bound on the Lipschitz constant of Im Psi, used to size scan grids.
    """
    slope = float(np.linalg.norm(spec.b))
    for atom in spec.jumps:
        size = float(np.linalg.norm(atom.y))
        slope += atom.lam * size * (2.0 if size <= 1.0 else 1.0)
    return slope


def max_jump(spec: LevyTriplet) -> float:
    return max((float(np.linalg.norm(i.y)) for i in spec.jumps), default=0.0)


# Time-window averages of Re chi. A cell measure spreads each atom over a
# cell of width h; the double integral of chi over two cells at distance c
# is an average of chi_xi(u) against a triangular density supported on
# [c - h, c + h]. On every piece where cos(u Im Psi) keeps its sign the
# average has a closed form, so the signed parts are exact too.

MAX_WINDOW_PIECES = 1 << 21


def _phi1(w: np.ndarray) -> np.ndarray:
    "(1 - e^{-w}) / w, with its series near 0"
    out = np.empty_like(w)
    small = np.abs(w) < 0.05
    ws = w[small]
    term = np.ones_like(ws)
    total = term.copy()
    for k in range(1, 10):
        term = term * (-ws) / (k + 1)
        total = total + term
    out[small] = total
    wl = w[~small]
    out[~small] = (1.0 - np.exp(-wl)) / wl
    return out


def _phi2(w: np.ndarray) -> np.ndarray:
    "(1 - e^{-w}(1 + w)) / w^2, with its series near 0"
    out = np.empty_like(w)
    small = np.abs(w) < 0.05
    ws = w[small]
    power = np.ones_like(ws)
    total = power / 2.0
    for k in range(1, 10):
        power = power * (-ws) / k
        total = total + power / (k + 2)
    out[small] = total
    wl = w[~small]
    out[~small] = (1.0 - np.exp(-wl) * (1.0 + wl)) / wl**2
    return out


def _linear_exp_integral(
    z: np.ndarray, lo: np.ndarray, hi: np.ndarray, alpha: float, beta: float
) -> np.ndarray:
    """
    Integral over [lo, hi] of (alpha + beta u) e^{-u z} du, elementwise
    """
    length = hi - lo
    w = z * length
    return np.exp(-lo * z) * (
        (alpha + beta * lo) * length * _phi1(w) + beta * length**2 * _phi2(w)
    )


def _signed_window_integrals(
    z: np.ndarray, lo: float, hi: float, alpha: float, beta: float
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Positive and negative parts of the integral over [lo, hi] (lo >= 0) of
    (alpha + beta u) Re e^{-u z}, split at the zeros of cos(u Im z).
    The linear weight must be nonnegative on [lo, hi].
    """
    z = np.asarray(z, dtype=complex).reshape(-1)
    plus = np.zeros(z.size)
    minus = np.zeros(z.size)
    if hi <= lo:
        return plus, minus
    freq = np.abs(z.imag)
    with np.errstate(divide="ignore", invalid="ignore"):
        first = np.where(freq > 0, np.ceil((lo * freq - np.pi / 2) / np.pi), 0.0)
        last = np.where(freq > 0, np.floor((hi * freq - np.pi / 2) / np.pi), -1.0)
    counts = np.maximum(last - first + 1, 0).astype(np.int64)
    pieces = counts + 1
    ends = np.cumsum(pieces)
    start = 0
    while start < z.size:
        base = ends[start - 1] if start else 0
        stop = max(start + 1, int(np.searchsorted(ends, base + MAX_WINDOW_PIECES, "right")))
        chunk = pieces[start:stop]
        node = np.repeat(np.arange(start, stop), chunk)
        offsets = np.repeat(np.cumsum(chunk) - chunk, chunk)
        j = np.arange(node.size) - offsets
        f = freq[node]
        with np.errstate(divide="ignore", invalid="ignore"):
            left = np.where(j == 0, lo, (np.pi / 2 + (first[node] + j - 1) * np.pi) / f)
            right = np.where(
                j == counts[node], hi, (np.pi / 2 + (first[node] + j) * np.pi) / f
            )
        values = np.real(_linear_exp_integral(z[node], left, right, alpha, beta))
        positive = np.cos(0.5 * (left + right) * f) >= 0
        local = node - start
        plus[start:stop] = np.bincount(
            local, np.where(positive, positive_part(values), 0.0), stop - start
        )
        minus[start:stop] = np.bincount(
            local, np.where(positive, 0.0, negative_part(values)), stop - start
        )
        start = stop
    return plus, minus


def _window_pieces(offset: float, width: float):
    "linear pieces (lo, hi, alpha, beta) of the triangular cell-pair density"
    h = width
    if offset <= 0:
        return [(0.0, h, 2.0 / h, -2.0 / h**2)]
    return [
        (max(offset - h, 0.0), offset, (h - offset) / h**2, 1.0 / h**2),
        (offset, offset + h, (offset + h) / h**2, -1.0 / h**2),
    ]


def window_average(z: np.ndarray, offset: float, width: float) -> np.ndarray:
    """
    Average of Re chi over two cells of the given width whose centres are
    `offset` apart, for Psi values z (one per xi).
    """
    z = np.asarray(z, dtype=complex).reshape(-1)
    total = np.zeros(z.size)
    for lo, hi, alpha, beta in _window_pieces(offset, width):
        lo_arr = np.full(z.size, lo)
        hi_arr = np.full(z.size, hi)
        total += np.real(_linear_exp_integral(z, lo_arr, hi_arr, alpha, beta))
    return total


def window_average_parts(
    z: np.ndarray, offset: float, width: float
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cell-pair averages of (Re chi)_+ and (Re chi)_-, see window_average.
    """
    z = np.asarray(z, dtype=complex).reshape(-1)
    plus = np.zeros(z.size)
    minus = np.zeros(z.size)
    for lo, hi, alpha, beta in _window_pieces(offset, width):
        piece_plus, piece_minus = _signed_window_integrals(z, lo, hi, alpha, beta)
        plus += piece_plus
        minus += piece_minus
    return plus, minus
