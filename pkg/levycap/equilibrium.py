"""
equilibrium

Grid estimates of f-capacities C_f(G) = [inf_mu E_f(mu)]^{-1} (with
1/inf = 0): the quadratic form w -> w^T K w is minimised over the
probability simplex by Frank-Wolfe with away steps, then grids are refined
and the minimal energies judged for stabilisation or growth.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from levycap.errors import ConfigurationError
from levycap.measure_energy import DiscreteMeasure, KernelMatrix, SetGrid

logger = logging.getLogger(__name__)

JOINT_SUPPORT_TOLERANCE = 1e-8
MAX_LATTICE_POINTS = 5 * 10**7


@dataclass(frozen=True)
class SolverControls:
    """
    max_iterations: Frank-Wolfe iterations per start
    gap_tol: stop once the stationarity gap is below gap_tol * max(1, energy)
    restarts: Dirichlet(1) starts used when the kernel is not certified PSD
    seed: seed of the restart streams
    big_m: stand-in for +inf off-diagonal entries
    """

    max_iterations: int = 50_000
    gap_tol: float = 1e-8
    restarts: int = 8
    seed: int = 0
    big_m: float = 1e12

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ConfigurationError("must be positive", "max_iterations")
        if not self.gap_tol > 0:
            raise ConfigurationError("must be positive", "gap_tol")
        if self.restarts < 0:
            raise ConfigurationError("must be nonnegative", "restarts")
        if not self.big_m > 0:
            raise ConfigurationError("must be positive", "big_m")


def capacity_of(energy: float) -> float:
    "1/energy with 1/inf = 0 and 1/0 = inf"
    if energy == 0:
        return math.inf
    return 1.0 / energy


def _trace(rows: Sequence[Sequence[float]]) -> Tuple[Tuple[int, float], ...]:
    return tuple((int(n), float(e)) for n, e in rows)


@dataclass(frozen=True)
class EquilibriumResult:
    weights: np.ndarray
    energy: float
    iterations: int
    gap: float
    certified: bool
    trace: Tuple[Tuple[int, float], ...] = ()

    @property
    def capacity(self) -> float:
        return capacity_of(self.energy)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "weights": self.weights.tolist(),
            "energy": self.energy,
            "capacity": self.capacity,
            "iterations": self.iterations,
            "gap": self.gap,
            "certified": self.certified,
            "trace": [list(i) for i in self.trace],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EquilibriumResult":
        "inverse of to_dict; capacity is derived from the energy"
        return cls(
            np.asarray(data["weights"], dtype=float),
            float(data["energy"]),
            int(data["iterations"]),
            float(data["gap"]),
            bool(data["certified"]),
            _trace(data.get("trace", ())),
        )


def stationarity_gap(K: np.ndarray, w: np.ndarray) -> float:
    """
    max(w.Kw - min_i (Kw)_i, max_{w_i > 0} (Kw)_i - w.Kw), clipped at 0.
    Zero exactly at a KKT point of the simplex problem.
    """
    Kw = K @ w
    value = float(w @ Kw)
    support = w > 0
    gap = max(value - Kw.min(), Kw[support].max() - value)
    return max(gap, 0.0)


def _frank_wolfe(K: np.ndarray, w: np.ndarray, controls: SolverControls) -> Tuple[np.ndarray, int]:
    """
    Frank-Wolfe with away steps and exact line search on w^T K w,
    keeping Kw up to date with one kernel column per iteration.
    """
    w = w.copy()
    Kw = K @ w
    diag = np.diag(K)
    iteration = 0
    for iteration in range(1, controls.max_iterations + 1):
        value = float(w @ Kw)
        s = int(np.argmin(Kw))
        support = np.flatnonzero(w > 0)
        a = int(support[np.argmax(Kw[support])])
        forward_gap = value - Kw[s]
        away_gap = Kw[a] - value
        if max(forward_gap, away_gap) <= controls.gap_tol * max(1.0, abs(value)):
            break
        if forward_gap >= away_gap:
            slope = Kw[s] - value
            curvature = diag[s] - 2.0 * Kw[s] + value
            max_step = 1.0
        else:
            slope = value - Kw[a]
            curvature = value - 2.0 * Kw[a] + diag[a]
            max_step = w[a] / (1.0 - w[a]) if w[a] < 1 else math.inf
        step = max_step if curvature <= 0 else min(-slope / curvature, max_step)
        if not math.isfinite(step):
            break
        if forward_gap >= away_gap:
            w *= 1.0 - step
            w[s] += step
            Kw += step * (K[:, s] - Kw)
        else:
            w *= 1.0 + step
            w[a] -= step
            Kw += step * (Kw - K[:, a])
            if step == max_step:
                w[a] = 0.0
        w[w < 1e-300] = 0.0
    w /= w.sum()
    return w, iteration


def _is_psd(K: np.ndarray) -> bool:
    scale = max(1.0, float(np.abs(K).max()))
    return bool(np.linalg.eigvalsh(K).min() >= -1e-10 * scale)


def min_energy(K: KernelMatrix, controls: Optional[SolverControls] = None) -> EquilibriumResult:
    """
    Minimises w^T K w over the probability simplex.

    Coordinates with an infinite diagonal are excluded; if none remain the
    energy is +inf. Infinite off-diagonal entries are replaced by big_m and
    the optimum is checked to put (almost) no weight on such pairs. The
    result is certified when the finite kernel is positive semidefinite and
    the stationarity gap is within tolerance; otherwise the best of several
    starts is returned.
    """
    controls = controls or SolverControls()
    entries = K.entries
    n = K.size
    active = np.flatnonzero(np.isfinite(np.diag(entries)))
    if active.size == 0:
        logger.info("every atom has infinite self-energy: energy +inf")
        return EquilibriumResult(np.full(n, 1.0 / n), math.inf, 0, 0.0, True)

    sub = entries[np.ix_(active, active)]
    forbidden = ~np.isfinite(sub)
    M = np.where(forbidden, controls.big_m, sub)
    psd = not forbidden.any() and _is_psd(M)

    starts: List[np.ndarray] = [np.full(active.size, 1.0 / active.size)]
    if not psd:
        vertex = np.zeros(active.size)
        vertex[int(np.argmin(np.diag(M)))] = 1.0
        starts.append(vertex)
        for stream in np.random.SeedSequence(controls.seed).spawn(controls.restarts):
            starts.append(np.random.default_rng(stream).dirichlet(np.ones(active.size)))

    best: Optional[Tuple[float, np.ndarray, int]] = None
    for index, start in enumerate(starts):
        w, iterations = _frank_wolfe(M, start, controls)
        value = float(w @ M @ w)
        logger.debug("start %d: energy %.12g after %d iterations", index, value, iterations)
        if best is None or value < best[0]:
            best = (value, w, iterations)
    assert best is not None
    value, w, iterations = best
    gap = stationarity_gap(M, w)

    if forbidden.any():
        product = np.outer(w, w)[forbidden]
        if product.max() > JOINT_SUPPORT_TOLERANCE:
            value = math.inf
        else:
            value = float(w @ np.where(forbidden, 0.0, sub) @ w)

    weights = np.zeros(n)
    weights[active] = w
    certified = psd and gap <= controls.gap_tol * max(1.0, abs(value))
    if not certified:
        logger.warning("minimal energy %.6g not certified (gap %.3g)", value, gap)
    return EquilibriumResult(weights, value, iterations, gap, certified)


def brute_force_simplex(K: KernelMatrix, step: float) -> Tuple[np.ndarray, float]:
    """
    Scans the simplex lattice with spacing `step` and returns the lattice
    minimiser of w^T K w. Only for kernels with at most four atoms.
    """
    n = K.size
    if n > 4:
        raise ConfigurationError("brute force is limited to 4 atoms", "kernel")
    if not 0 < step <= 1e-2:
        raise ConfigurationError("must lie in (0, 0.01]", "step")
    m = int(round(1.0 / step))
    if (m + 1) ** (n - 1) > MAX_LATTICE_POINTS:
        raise ConfigurationError("lattice too large for this many atoms", "step")
    axes = np.meshgrid(*[np.arange(m + 1)] * (n - 1), indexing="ij")
    counts = np.stack([axis.reshape(-1) for axis in axes], axis=1) if n > 1 else np.zeros((1, 0))
    counts = counts[counts.sum(axis=1) <= m]
    W = np.column_stack([counts, m - counts.sum(axis=1)]) / m

    finite = np.isfinite(K.entries)
    values = np.einsum("pi,ij,pj->p", W, np.where(finite, K.entries, 0.0), W)
    positive = (W > 0).astype(float)
    infinite = np.einsum("pi,ij,pj->p", positive, (~finite).astype(float), positive) > 0
    values = np.where(infinite, np.inf, values)
    best = int(np.argmin(values))
    return W[best], float(values[best])


@dataclass(frozen=True)
class CapacityControls:
    """
    stabilisation: relative change of the last two minimal energies below
    which capacity is judged positive
    growth: fitted exponent of energy against grid size above which it is
    judged zero
    threshold: minimal energies above this are judged infinite
    """

    stabilisation: float = 0.01
    growth: float = 0.05
    threshold: float = 1e6
    solver: SolverControls = field(default_factory=SolverControls)

    def __post_init__(self) -> None:
        for name in ("stabilisation", "growth", "threshold"):
            if not getattr(self, name) > 0:
                raise ConfigurationError("must be positive", name)


@dataclass(frozen=True)
class CapacityVerdict:
    """kind is "positive", "zero" or "inconclusive"; trace is (grid size, minimal energy)."""

    kind: str
    trace: Tuple[Tuple[int, float], ...]
    growth_exponent: float
    note: str

    @property
    def energy(self) -> float:
        return self.trace[-1][1]

    @property
    def capacity(self) -> float:
        return 0.0 if self.kind == "zero" else capacity_of(self.energy)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "capacity": self.capacity,
            "energy": self.energy,
            "growth_exponent": self.growth_exponent,
            "note": self.note,
            "trace": [list(i) for i in self.trace],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CapacityVerdict":
        return cls(
            str(data["kind"]),
            _trace(data["trace"]),
            float(data["growth_exponent"]),
            str(data.get("note", "")),
        )


def growth_exponent(trace: Sequence[Tuple[int, float]]) -> float:
    "least-squares slope of log(energy) against log(grid size)"
    points = [(n, e) for n, e in trace if 0 < e < math.inf]
    if len(points) < 2:
        return 0.0
    sizes, energies = zip(*points)
    return float(np.polyfit(np.log(sizes), np.log(energies), 1)[0])


def capacity_estimate(
    kernel_family: Callable[[DiscreteMeasure], KernelMatrix],
    schedule: Sequence[SetGrid],
    controls: Optional[CapacityControls] = None,
) -> CapacityVerdict:
    """
    Minimal energies along a refinement schedule and a heuristic verdict on
    the continuum capacity: zero if an energy is infinite or above the
    threshold, positive if the last two energies agree within the
    stabilisation tolerance, zero if they keep growing, else inconclusive.
    """
    controls = controls or CapacityControls()
    if len(schedule) < 3:
        raise ConfigurationError("need at least 3 grids", "schedule")
    trace: List[Tuple[int, float]] = []
    for grid in schedule:
        mu = grid.measure()
        result = min_energy(kernel_family(mu), controls.solver)
        trace.append((grid.size, result.energy))
        logger.info("grid of %d atoms: minimal energy %.6g", grid.size, result.energy)

    exponent = growth_exponent(trace)
    energies = [e for _, e in trace]
    last, previous = energies[-1], energies[-2]
    if any(math.isinf(e) for e in energies):
        kind, note = "zero", "infinite minimal energy on a grid"
    elif last > controls.threshold:
        kind, note = "zero", "minimal energy above threshold"
    elif abs(last - previous) <= controls.stabilisation * max(abs(last), abs(previous)):
        kind, note = "positive", "minimal energies stabilised"
    elif exponent > controls.growth:
        kind, note = "zero", f"minimal energies grow like n^{exponent:.3f}"
    else:
        kind, note = "inconclusive", "minimal energies neither stabilised nor grew"
    verdict = CapacityVerdict(kind, tuple(trace), exponent, note)
    logger.info("capacity verdict: %s (%s)", kind, note)
    return verdict
