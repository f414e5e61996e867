"""
montecarlo

Exact simulation of Levy paths at finitely many times and empirical checks
of E e^{i<xi, X(t) - X(s)>} = chi_xi(t - s) and
E_{chi_xi}(mu) = E |sum_j w_j e^{i<xi, X(t_j)>}|^2.

Paths come in blocks of BLOCK_SIZE. Block b of stream s is drawn from the
generator seeded with (seed, s, b), so results never depend on the batch
size used for statistics.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Tuple

import numpy as np
from scipy.stats import levy_stable

from levycap._wrappers import Vector, as_vector, cast_arrays
from levycap.errors import ConfigurationError, DomainError, UnsupportedConfigurationError
from levycap.levy_model import LevyTriplet, chi
from levycap.measure_energy import DiscreteMeasure, chi_energy

logger = logging.getLogger(__name__)

BLOCK_SIZE = 1000
RIESZ_CAP = 1e12
INSTABILITY_LIMIT = 2.0
ACCEPTANCE_ERRORS = 4.0


@dataclass(frozen=True)
class McConfig:
    """
    n_paths: number of simulated paths N (at least 100)
    seed: master seed
    antithetic: pair every path with its Gaussian/stable mirror image
    batch_size: paths per batch mean, must divide N
    """

    n_paths: int = 100_000
    seed: int = 0
    antithetic: bool = False
    batch_size: int = 10_000

    def __post_init__(self) -> None:
        if self.n_paths < 100:
            raise ConfigurationError("need at least 100 paths", "n_paths")
        if self.batch_size < 1 or self.n_paths % self.batch_size:
            raise ConfigurationError("must divide n_paths", "batch_size")
        if self.antithetic and self.n_paths % 2:
            raise ConfigurationError("antithetic sampling needs an even path count", "n_paths")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n: int
    seed: int
    batch_means: Tuple[float, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "n": self.n,
            "seed": self.seed,
            "batch_means": list(self.batch_means),
        }

    def batch_rows(self) -> List[Tuple[int, float]]:
        "(batch index, batch mean) rows for plotting"
        return list(enumerate(self.batch_means))


@dataclass(frozen=True)
class ChiCheck:
    real: McEstimate
    imag: McEstimate
    analytic: complex

    @property
    def accepted(self) -> bool:
        return _within(self.real, self.analytic.real) and _within(self.imag, self.analytic.imag)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "real": self.real.to_dict(),
            "imag": self.imag.to_dict(),
            "analytic": {"re": self.analytic.real, "im": self.analytic.imag},
            "accepted": self.accepted,
        }


@dataclass(frozen=True)
class EnergyCheck:
    estimate: McEstimate
    analytic: float

    @property
    def accepted(self) -> bool:
        return _within(self.estimate, self.analytic)

    def to_dict(self) -> Dict[str, Any]:
        return {"estimate": self.estimate.to_dict(), "analytic": self.analytic, "accepted": self.accepted}


@dataclass(frozen=True)
class ImageEnergyEstimate:
    """
    Riesz energy of the image measure mu o X^{-1}, pair terms capped at
    RIESZ_CAP. instability is the largest batch mean over the median one.
    """

    estimate: McEstimate
    capped_fraction: float
    instability: float

    @property
    def heavy_tail(self) -> bool:
        return self.capped_fraction > 0 or self.instability > INSTABILITY_LIMIT

    def to_dict(self) -> Dict[str, Any]:
        return {
            "estimate": self.estimate.to_dict(),
            "capped_fraction": self.capped_fraction,
            "instability": self.instability,
            "heavy_tail": self.heavy_tail,
        }


def _within(estimate: McEstimate, target: float) -> bool:
    return abs(estimate.mean - target) <= ACCEPTANCE_ERRORS * estimate.std_error + 1e-12


def _check_sampleable(spec: LevyTriplet) -> None:
    if spec.stable is not None and spec.d >= 2:
        raise UnsupportedConfigurationError("stable increments are only sampled in d = 1")


def _check_times(times: np.ndarray) -> None:
    if times.size == 0:
        raise ConfigurationError("need at least one time", "times")
    if np.any(times < 0) or np.any(np.diff(times) <= 0):
        raise ConfigurationError("times must be nonnegative and increasing", "times")


def _gaussian_root(A: np.ndarray) -> np.ndarray:
    values, vectors = np.linalg.eigh(A)
    return vectors * np.sqrt(np.clip(values, 0.0, None))


def _block_increments(
    spec: LevyTriplet,
    dt: np.ndarray,
    count: int,
    rng: np.random.Generator,
    antithetic: bool,
) -> np.ndarray:
    """
    Increments over the intervals dt for `count` paths, shape (count, m, d).
    With antithetic sampling the second half mirrors the symmetric parts of
    the first.
    """
    drawn = count // 2 if antithetic else count
    m, d = dt.size, spec.d
    increments = np.broadcast_to(dt[:, None] * spec.b, (drawn, m, d)).copy()
    symmetric = np.zeros((drawn, m, d))
    if np.any(spec.A):
        normals = rng.standard_normal((drawn, m, d))
        symmetric += np.sqrt(dt)[None, :, None] * normals @ _gaussian_root(spec.A).T
    for atom in spec.jumps:
        counts = rng.poisson(atom.lam * dt, size=(drawn, m))
        increments += counts[:, :, None] * atom.y
        if np.linalg.norm(atom.y) <= 1:
            increments -= (atom.lam * dt)[None, :, None] * atom.y
    if spec.stable is not None:
        scale = (spec.stable.c * dt) ** (1.0 / spec.stable.alpha)
        draws = levy_stable.rvs(spec.stable.alpha, 0.0, size=(drawn, m), random_state=rng)
        symmetric[:, :, 0] += draws * scale
    if not antithetic:
        return increments + symmetric
    paired = np.empty((count, m, d))
    paired[0::2] = increments + symmetric
    paired[1::2] = increments - symmetric
    return paired


def _path_blocks(
    spec: LevyTriplet, times: np.ndarray, config: McConfig, stream: int
) -> Iterator[np.ndarray]:
    """
    Yields X at `times` for consecutive blocks of paths, shape (k, m, d),
    until config.n_paths paths have been produced.
    """
    _check_sampleable(spec)
    _check_times(times)
    dt = np.diff(np.concatenate([[0.0], times]))
    for block in range(math.ceil(config.n_paths / BLOCK_SIZE)):
        sequence = np.random.SeedSequence(config.seed, spawn_key=(stream, block))
        rng = np.random.default_rng(sequence)
        paths = np.cumsum(_block_increments(spec, dt, BLOCK_SIZE, rng, config.antithetic), axis=1)
        remaining = config.n_paths - block * BLOCK_SIZE
        logger.debug("stream %d block %d: %d paths", stream, block, min(remaining, BLOCK_SIZE))
        yield paths[:remaining]


def sample_paths(
    spec: LevyTriplet, times: Vector, config: McConfig, stream: int = 0
) -> np.ndarray:
    """
    Returns X(t) at every time for config.n_paths paths, shape (N, m, d).
    """
    return np.concatenate(list(_path_blocks(spec, as_vector(times), config, stream)))


@cast_arrays
def sample_path(spec: LevyTriplet, times: Vector, seed: int, stream: int = 0) -> np.ndarray:
    """
    One path of X at the given increasing times, shape (m, d); X(0) = 0.

    Drawn alone from the generator of (seed, stream, block 0), so it is
    reproducible but is not row 0 of sample_paths for the same seed.
    """
    _check_sampleable(spec)
    _check_times(times)
    dt = np.diff(np.concatenate([[0.0], times]))
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, 0)))
    return np.cumsum(_block_increments(spec, dt, 1, rng, False), axis=1)[0]


def _estimate(values: np.ndarray, config: McConfig) -> McEstimate:
    batch_means = values.reshape(-1, config.batch_size).mean(axis=1)
    units = values.reshape(-1, 2).mean(axis=1) if config.antithetic else values
    std_error = float(units.std(ddof=1) / math.sqrt(units.size))
    return McEstimate(
        float(batch_means.mean()),
        std_error,
        config.n_paths,
        config.seed,
        tuple(float(i) for i in batch_means),
    )


def _exact(value: float, config: McConfig) -> McEstimate:
    return McEstimate(value, 0.0, config.n_paths, config.seed, (value,) * (config.n_paths // config.batch_size))


@cast_arrays
def mc_chi_check(
    spec: LevyTriplet, xi: Vector, t: float, s: float, config: McConfig, stream: int = 0
) -> ChiCheck:
    """
    Empirical E e^{i<xi, X(t) - X(s)>} against chi_xi(t - s), componentwise.
    """
    if not t >= s >= 0:
        raise DomainError("need t >= s >= 0", "t")
    analytic = chi(spec, xi, t - s)
    if not np.any(xi) or t == s:
        return ChiCheck(_exact(1.0, config), _exact(0.0, config), analytic)
    times = np.array([t]) if s == 0 else np.array([s, t])
    real: List[np.ndarray] = []
    imag: List[np.ndarray] = []
    for paths in _path_blocks(spec, times, config, stream):
        increment = paths[:, -1] - (paths[:, 0] if s > 0 else 0.0)
        phase = increment @ xi
        real.append(np.cos(phase))
        imag.append(np.sin(phase))
    return ChiCheck(
        _estimate(np.concatenate(real), config), _estimate(np.concatenate(imag), config), analytic
    )


def _dirac_atoms(mu: DiscreteMeasure) -> DiscreteMeasure:
    if mu.cell is None:
        return mu
    logger.debug("sampling at the atoms of a cell measure")
    return DiscreteMeasure(mu.atoms, mu.weights)


@cast_arrays
def mc_chi_energy(
    spec: LevyTriplet, xi: Vector, mu: DiscreteMeasure, config: McConfig, stream: int = 0
) -> EnergyCheck:
    """
    Mean over paths of |sum_j w_j e^{i<xi, X(t_j)>}|^2 against the analytic
    chi-energy of mu's atoms.
    """
    mu = _dirac_atoms(mu)
    analytic = chi_energy(spec, xi, mu)
    if not np.any(xi):
        return EnergyCheck(_exact(1.0, config), analytic)
    values: List[np.ndarray] = []
    for paths in _path_blocks(spec, mu.atoms, config, stream):
        transform = np.exp(1j * (paths @ xi)) @ mu.weights
        values.append(np.minimum(np.abs(transform) ** 2, 1.0))
    return EnergyCheck(_estimate(np.concatenate(values), config), analytic)


def mc_image_riesz_energy(
    spec: LevyTriplet, mu: DiscreteMeasure, beta: float, config: McConfig, stream: int = 0
) -> ImageEnergyEstimate:
    """
    Mean over paths of sum_{i != j} w_i w_j ||X(t_i) - X(t_j)||^{-beta},
    with coincident points contributing RIESZ_CAP.
    """
    if not 0 < beta < spec.d:
        raise DomainError(f"must lie in (0, {spec.d})", "beta")
    mu = _dirac_atoms(mu)
    pair = np.outer(mu.weights, mu.weights)
    np.fill_diagonal(pair, 0.0)
    off_diagonal = ~np.eye(mu.size, dtype=bool)
    values: List[np.ndarray] = []
    capped = 0
    for paths in _path_blocks(spec, mu.atoms, config, stream):
        distances = np.linalg.norm(paths[:, :, None, :] - paths[:, None, :, :], axis=-1)
        with np.errstate(divide="ignore"):
            terms = np.minimum(distances**-beta, RIESZ_CAP)
        capped += int(np.count_nonzero((terms >= RIESZ_CAP) & off_diagonal))
        values.append(np.einsum("kij,ij->k", terms, pair))
    estimate = _estimate(np.concatenate(values), config)
    pairs = config.n_paths * mu.size * (mu.size - 1)
    capped_fraction = capped / pairs if pairs else 0.0
    batches = np.asarray(estimate.batch_means)
    median = float(np.median(batches))
    instability = float(batches.max() / median) if median > 0 else math.inf
    result = ImageEnergyEstimate(estimate, capped_fraction, instability)
    if result.heavy_tail:
        logger.warning(
            "image energy heavy-tailed: %.3g of pair terms capped, instability %.3g",
            capped_fraction,
            instability,
        )
    return result
