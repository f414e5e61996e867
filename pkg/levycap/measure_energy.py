"""
measure_energy

Probability measures on Borel sets G of R_+ and their f-energies
E_f(mu) = sum_i sum_j w_i w_j f(t_i - t_j).

A measure either consists of Dirac atoms or, when it carries a cell width h,
stands for the piecewise uniform measure spreading each atom's weight over
[t_i - h/2, t_i + h/2]. Grids of intervals and Cantor prefixes produce cell
measures; their energies use exact cell-pair averages of the kernel, so the
non-integrable diagonal of Riesz and gauge kernels stays finite.
"""

import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from levycap._wrappers import Vector, as_vector, cast_arrays, integer, read_field
from levycap.errors import (
    ConfigurationError,
    DimensionError,
    DomainError,
    UnsupportedConfigurationError,
)
from levycap.gauge import GaugeControls, GaugeQuery, Sign, g_gamma, g_gamma_cell
from levycap.levy_model import (
    LevyTriplet,
    exponent_profile,
    window_average,
    window_average_parts,
)
from levycap.utils import negative_part, positive_part

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """
    Atoms t_1 < ... < t_n in R_+ with positive weights summing to one.

    cell: width of the cell around every atom, None for Dirac atoms. Cells
    may not overlap.
    """

    atoms: np.ndarray
    weights: np.ndarray
    cell: Optional[float] = None

    def __post_init__(self) -> None:
        atoms = as_vector(self.atoms)
        weights = as_vector(self.weights)
        if atoms.size == 0:
            raise ConfigurationError("a measure needs at least one atom", "atoms")
        if atoms.shape != weights.shape:
            raise DimensionError("atoms and weights differ in length", "weights")
        if not np.all(np.isfinite(atoms)) or np.any(atoms < 0):
            raise ConfigurationError("atoms must be finite and nonnegative", "atoms")
        if np.any(np.diff(atoms) <= 0):
            raise ConfigurationError("atoms must be strictly increasing", "atoms")
        if np.any(weights <= 0):
            raise ConfigurationError("weights must be positive", "weights")
        if abs(weights.sum() - 1.0) > 1e-9:
            raise ConfigurationError("weights must sum to one", "weights")
        weights = weights / weights.sum()
        if self.cell is not None:
            if not self.cell > 0:
                raise ConfigurationError("cell width must be positive", "cell")
            if atoms.size > 1 and np.min(np.diff(atoms)) < self.cell * (1 - 1e-9):
                raise ConfigurationError("cells overlap", "cell")
            object.__setattr__(self, "cell", float(self.cell))
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return int(self.atoms.size)

    @classmethod
    def dirac(cls, t: float) -> "DiscreteMeasure":
        return cls(np.array([t]), np.ones(1))

    @classmethod
    def uniform(cls, atoms: Vector, cell: Optional[float] = None) -> "DiscreteMeasure":
        atoms = as_vector(atoms)
        return cls(atoms, np.full(atoms.size, 1.0 / atoms.size), cell)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DiscreteMeasure":
        """
        Measure file schema: {"atoms":[...], "weights":[...]} or
        {"uniform":{"a":0,"b":1,"n":256}} or {"cantor":{"depth":8}}
        """
        if not isinstance(data, dict):
            raise ConfigurationError("expected a JSON object", "measure")
        if "uniform" in data:
            grid = data["uniform"]
            for key in ("a", "b", "n"):
                if not isinstance(grid, dict) or key not in grid:
                    raise ConfigurationError("missing field", f"uniform.{key}")
            return SetGrid.interval(
                read_field(float, grid["a"], "uniform.a"),
                read_field(float, grid["b"], "uniform.b"),
                read_field(integer, grid["n"], "uniform.n"),
            ).measure()
        if "cantor" in data:
            if not isinstance(data["cantor"], dict) or "depth" not in data["cantor"]:
                raise ConfigurationError("missing field", "cantor.depth")
            depth = read_field(integer, data["cantor"]["depth"], "cantor.depth")
            return SetGrid.cantor(depth).measure()
        if "atoms" not in data:
            raise ConfigurationError("expected 'atoms', 'uniform' or 'cantor'", "atoms")
        atoms = read_field(as_vector, data["atoms"], "atoms")
        if atoms.size == 0:
            raise ConfigurationError("needs at least one atom", "atoms")
        weights = data.get("weights")
        if weights is None:
            weights = np.full(atoms.size, 1.0 / atoms.size)
        cell = data.get("cell")
        return cls(
            atoms,
            read_field(as_vector, weights, "weights"),
            None if cell is None else read_field(float, cell, "cell"),
        )

    @classmethod
    def load(cls, path: str) -> "DiscreteMeasure":
        with open(path) as handle:
            text = handle.read()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as error:
            raise ConfigurationError(
                f"{path}, line {error.lineno}: {error.msg}", "measure"
            ) from error
        try:
            return cls.from_dict(data)
        except ConfigurationError as error:
            raise ConfigurationError(f"{path}: {error}", error.field) from error

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"atoms": self.atoms.tolist(), "weights": self.weights.tolist()}
        if self.cell is not None:
            data["cell"] = self.cell
        return data


class GridKind(str, Enum):
    INTERVAL = "interval"
    CANTOR = "cantor"


@dataclass(frozen=True)
class SetGrid:
    """
    Discretisation of G: n equal cells of [a, b], or the 2^depth intervals of
    the middle-thirds Cantor construction, each carrying equal mass.
    """

    kind: GridKind
    a: float = 0.0
    b: float = 1.0
    n: int = 1
    depth: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", GridKind(self.kind))
        if self.kind is GridKind.INTERVAL:
            if not 0 <= self.a < self.b:
                raise ConfigurationError("need 0 <= a < b", "a")
            if self.n < 1:
                raise ConfigurationError("need at least one cell", "n")
        elif self.depth < 0:
            raise ConfigurationError("depth must be nonnegative", "depth")

    @classmethod
    def interval(cls, a: float, b: float, n: int) -> "SetGrid":
        return cls(GridKind.INTERVAL, a=a, b=b, n=n)

    @classmethod
    def cantor(cls, depth: int) -> "SetGrid":
        return cls(GridKind.CANTOR, depth=depth)

    @property
    def size(self) -> int:
        return self.n if self.kind is GridKind.INTERVAL else 2**self.depth

    @property
    def cell(self) -> float:
        if self.kind is GridKind.INTERVAL:
            return (self.b - self.a) / self.n
        return 3.0**-self.depth

    def measure(self) -> DiscreteMeasure:
        """Midpoint atoms with uniform weights and the grid's cell width."""
        h = self.cell
        if self.kind is GridKind.INTERVAL:
            atoms = self.a + h * (np.arange(self.n) + 0.5)
        else:
            lefts = np.zeros(1)
            for _ in range(self.depth):
                lefts = np.concatenate([lefts / 3.0, lefts / 3.0 + 2.0 / 3.0])
            atoms = lefts + h / 2.0
        return DiscreteMeasure.uniform(atoms, cell=h)


class DiagonalPolicy(str, Enum):
    """raw: kernel values at the atoms; cell_averaged: averages over cells."""

    RAW = "raw"
    CELL_AVERAGED = "cell_averaged"


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Symmetric matrix of kernel values in [0, +inf] between atoms."""

    entries: np.ndarray
    policy: DiagonalPolicy = DiagonalPolicy.RAW
    cell: Optional[float] = None

    def __post_init__(self) -> None:
        entries = np.atleast_2d(np.asarray(self.entries, dtype=float))
        if entries.shape[0] != entries.shape[1]:
            raise DimensionError("kernel must be square", "entries")
        if np.any(np.isnan(entries)) or np.any(entries < 0):
            raise ConfigurationError("entries must lie in [0, +inf]", "entries")
        finite = np.isfinite(entries)
        if not np.array_equal(finite, finite.T) or not np.allclose(
            np.where(finite, entries, 0), np.where(finite, entries, 0).T, rtol=1e-12, atol=0
        ):
            raise ConfigurationError("kernel must be symmetric", "entries")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "policy", DiagonalPolicy(self.policy))

    @property
    def size(self) -> int:
        return int(self.entries.shape[0])

    def to_dict(self) -> Dict[str, Any]:
        return {"policy": self.policy.value, "cell": self.cell, "entries": self.entries.tolist()}


def kernel_policy(mu: DiscreteMeasure) -> Tuple[DiagonalPolicy, Optional[float]]:
    "the policy matching a measure: cell averages for cell measures"
    if mu.cell is None:
        return DiagonalPolicy.RAW, None
    return DiagonalPolicy.CELL_AVERAGED, mu.cell


def energy(K: KernelMatrix, mu: DiscreteMeasure) -> float:
    """
    E_f(mu) = sum_ij w_i w_j K_ij; +inf as soon as an infinite entry meets
    two (necessarily positive) weights.
    """
    if K.size != mu.size:
        raise DimensionError(f"kernel has size {K.size}, measure {mu.size}", "kernel")
    if not np.all(np.isfinite(K.entries)):
        return float("inf")
    return float(mu.weights @ K.entries @ mu.weights)


def offset_weights(mu: DiscreteMeasure) -> Tuple[np.ndarray, np.ndarray]:
    """
    Distinct distances c = |t_i - t_j| (c = 0 first) and the total weight
    sum w_i w_j of the ordered pairs at each distance.
    """
    distances = np.abs(mu.atoms[:, None] - mu.atoms[None, :])
    keys = np.round(distances, 12)
    offsets, inverse = np.unique(keys.reshape(-1), return_inverse=True)
    pair = np.outer(mu.weights, mu.weights).reshape(-1)
    return offsets, np.bincount(inverse.reshape(-1), pair, offsets.size)


def chi_energy_profile(spec: LevyTriplet, xis: np.ndarray, mu: DiscreteMeasure) -> np.ndarray:
    """
    E_{chi_xi}(mu) for every point of xis. Only Re chi contributes, since
    the double sum is symmetric and chi_xi(-u) is the conjugate of chi_xi(u).
    """
    re, im = exponent_profile(spec, xis)
    offsets, pair = offset_weights(mu)
    total = np.zeros(re.size)
    for c, weight in zip(offsets, pair):
        if mu.cell is None:
            total += weight * np.exp(-c * re) * np.cos(c * im)
        else:
            total += weight * window_average(re + 1j * im, c, mu.cell)
    return total


def signed_chi_profile(
    spec: LevyTriplet, xis: np.ndarray, mu: DiscreteMeasure
) -> Tuple[np.ndarray, np.ndarray]:
    """
    (E_{(Re chi_xi)+}(mu), E_{(Re chi_xi)-}(mu)) for every point of xis
    """
    re, im = exponent_profile(spec, xis)
    offsets, pair = offset_weights(mu)
    plus = np.zeros(re.size)
    minus = np.zeros(re.size)
    for c, weight in zip(offsets, pair):
        if mu.cell is None:
            real = np.exp(-c * re) * np.cos(c * im)
            plus += weight * positive_part(real)
            minus += weight * negative_part(real)
        else:
            part_plus, part_minus = window_average_parts(re + 1j * im, c, mu.cell)
            plus += weight * part_plus
            minus += weight * part_minus
    return plus, minus


@cast_arrays
def chi_energy(spec: LevyTriplet, xi: Vector, mu: DiscreteMeasure) -> float:
    """
    E_{chi_xi}(mu) = E |int e^{i<xi, X(t)>} mu(dt)|^2, a number in [0, 1]
    """
    return float(chi_energy_profile(spec, xi.reshape(1, -1), mu)[0])


@cast_arrays
def signed_chi_energies(spec: LevyTriplet, xi: Vector, mu: DiscreteMeasure) -> Tuple[float, float]:
    """
    (E_{(Re chi_xi)+}(mu), E_{(Re chi_xi)-}(mu)); their difference is
    chi_energy(spec, xi, mu).
    """
    plus, minus = signed_chi_profile(spec, xi.reshape(1, -1), mu)
    return float(plus[0]), float(minus[0])


def _riesz_cell_average(distances: np.ndarray, beta: float, h: float) -> np.ndarray:
    scale = 1.0 / ((1.0 - beta) * (2.0 - beta))

    def antiderivative(u):
        return np.abs(u) ** (2.0 - beta) * scale

    return (
        antiderivative(distances + h) - 2.0 * antiderivative(distances) + antiderivative(distances - h)
    ) / h**2


def riesz_kernel(
    beta: float,
    atoms: Vector,
    policy: DiagonalPolicy = DiagonalPolicy.RAW,
    cell: Optional[float] = None,
) -> KernelMatrix:
    """
    Riesz kernel |t_i - t_j|^{-beta}.

    raw: +inf on the diagonal. cell_averaged(h): exact averages over pairs
    of cells, (F(D + h) - 2 F(D) + F(D - h)) / h^2 with
    F(u) = |u|^{2-beta} / ((1 - beta)(2 - beta)); the diagonal is
    h^{-beta} 2 / ((1 - beta)(2 - beta)).
    """
    atoms = as_vector(atoms)
    policy = DiagonalPolicy(policy)
    if not beta > 0:
        raise DomainError("must be positive", "beta")
    if np.any(np.diff(np.sort(atoms)) <= 0):
        raise ConfigurationError("atoms must be distinct", "atoms")
    distances = np.abs(atoms[:, None] - atoms[None, :])
    if policy is DiagonalPolicy.RAW:
        with np.errstate(divide="ignore"):
            return KernelMatrix(distances**-beta, policy)
    if beta >= 1:
        raise UnsupportedConfigurationError("cell averages of |t|^-beta diverge for beta >= 1")
    if cell is None or not cell > 0:
        raise ConfigurationError("cell-averaged kernels need a cell width", "cell")
    h = float(cell)
    return KernelMatrix(_riesz_cell_average(distances, beta, h), policy, h)


def riesz_kernel_for(beta: float, mu: DiscreteMeasure) -> KernelMatrix:
    "Riesz kernel with the policy matching mu"
    policy, cell = kernel_policy(mu)
    return riesz_kernel(beta, mu.atoms, policy, cell)


def gauge_kernel(
    spec: LevyTriplet,
    gamma: float,
    sign: Sign,
    mu: DiscreteMeasure,
    controls: Optional[GaugeControls] = None,
    skip_if_diagonal_diverges: bool = False,
) -> KernelMatrix:
    """
    K_ij = g_{gamma,sign}(t_i - t_j), divergent entries recorded as +inf.

    Dirac measures use raw values (the diagonal is g(0)); cell measures use
    cell-pair averages of g. One gauge integral is computed per distinct
    distance. With skip_if_diagonal_diverges, a divergent diagonal fills the
    whole matrix with +inf; min_energy returns +inf for it either way.
    """
    controls = controls or GaugeControls()
    sign = Sign(sign)
    policy, cell = kernel_policy(mu)
    distances = np.abs(mu.atoms[:, None] - mu.atoms[None, :])
    keys = np.round(distances, 12)
    offsets, inverse = np.unique(keys.reshape(-1), return_inverse=True)

    def entry(c: float) -> float:
        if cell is None:
            value = g_gamma(GaugeQuery(spec, gamma, c, sign, controls))
        else:
            value = g_gamma_cell(spec, gamma, c, cell, sign, controls)
        return value.value if value.is_finite else np.inf

    diagonal = entry(float(offsets[0]))
    if skip_if_diagonal_diverges and math.isinf(diagonal):
        logger.debug("gauge kernel: infinite diagonal, off-diagonal entries skipped")
        return KernelMatrix(np.full(distances.shape, np.inf), policy, cell)
    values = np.empty(offsets.size)
    values[0] = diagonal
    for k in range(1, offsets.size):
        values[k] = entry(float(offsets[k]))
    logger.debug("gauge kernel: %d distinct distances, %d infinite", offsets.size, np.sum(np.isinf(values)))
    return KernelMatrix(values[inverse].reshape(distances.shape), policy, cell)


def gauge_energy(
    spec: LevyTriplet,
    gamma: float,
    sign: Sign,
    mu: DiscreteMeasure,
    controls: Optional[GaugeControls] = None,
) -> float:
    """
    E_{g_{gamma,sign}}(mu) without assembling the matrix; stops at the
    first divergent distance, since every pair weight is positive.
    """
    controls = controls or GaugeControls()
    sign = Sign(sign)
    offsets, pair = offset_weights(mu)
    total = 0.0
    for c, weight in zip(offsets, pair):
        if mu.cell is None:
            value = g_gamma(GaugeQuery(spec, gamma, float(c), sign, controls))
        else:
            value = g_gamma_cell(spec, gamma, float(c), mu.cell, sign, controls)
        if not value.is_finite:
            logger.debug("gauge energy infinite: g diverges at distance %g", c)
            return float("inf")
        total += weight * value.value
    return total


def interval_riesz_energy(beta: float, grid: SetGrid) -> float:
    """
    Cell-averaged Riesz energy of an interval grid's uniform measure, summed
    over the n distinct distances k h instead of the n x n matrix.
    """
    if grid.kind is not GridKind.INTERVAL:
        raise ConfigurationError("needs an interval grid", "grid")
    if not 0 < beta < 1:
        raise UnsupportedConfigurationError("cell averages of |t|^-beta diverge for beta >= 1")
    n, h = grid.n, grid.cell
    k = np.arange(n)
    multiplicity = np.where(k == 0, n, 2 * (n - k)) / float(n) ** 2
    return float(multiplicity @ _riesz_cell_average(k * h, beta, h))
