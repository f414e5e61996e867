"""
criterion

The capacity criterion integral int E_{chi_xi}(mu) ||xi||^{beta-d} dxi for a
fixed measure mu, the integrability condition on the negative part of
Re chi, and the Fubini-Tonelli swap between iterated integrals and gauge
energies.

Integrals are evaluated per supplied mu. A finite criterion integral for one
mu shows that the image set has positive beta-capacity; a divergent one
shows nothing on its own, since the criterion asks for divergence for every
probability measure on G.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Optional

import numpy as np

from levycap.errors import DomainError, NumericalError
from levycap.gauge import (
    Finite,
    GaugeControls,
    GaugeValue,
    Sign,
    check_gamma,
    check_radial,
    gauge_value_from_dict,
    negative_part_vanishes,
    radial_points,
    radial_reduce,
    scan_step,
)
from levycap.levy_model import LevyTriplet, exponent_profile, has_bounded_real_part
from levycap.measure_energy import (
    DiscreteMeasure,
    chi_energy_profile,
    gauge_energy,
    offset_weights,
    signed_chi_profile,
)
from levycap.utils import relative_gap

logger = logging.getLogger(__name__)

ENERGY_SLACK = 1e-10


class Interpretation(str, Enum):
    """What a criterion integral says about the capacity of X(G)."""

    POSITIVE = "positive_capacity_for_this_G"
    INCONCLUSIVE = "inconclusive_alone_criterion_requires_divergence_for_all_mu"


@dataclass(frozen=True)
class CriterionReport:
    spec_name: str
    atoms: int
    beta: float
    value: GaugeValue
    interpretation: Interpretation

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spec": self.spec_name,
            "atoms": self.atoms,
            "beta": self.beta,
            "value": self.value.to_dict(),
            "interpretation": self.interpretation.value,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CriterionReport":
        return cls(
            str(data["spec"]),
            int(data["atoms"]),
            float(data["beta"]),
            gauge_value_from_dict(data["value"]),
            Interpretation(data["interpretation"]),
        )


@dataclass(frozen=True)
class FubiniReport:
    """
    Both sides of int E_{(Re chi_xi)sign}(mu) ||xi||^{-gamma} dxi
    = E_{g_{gamma,sign}}(mu).
    """

    sign: Sign
    gamma: float
    iterated: GaugeValue
    energy_of_gauge: float
    relative_gap: Optional[float]
    kinds_agree: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sign": self.sign.value,
            "gamma": self.gamma,
            "iterated": self.iterated.to_dict(),
            "energy_of_gauge": self.energy_of_gauge,
            "relative_gap": self.relative_gap,
            "kinds_agree": self.kinds_agree,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FubiniReport":
        gap = data.get("relative_gap")
        return cls(
            Sign(data["sign"]),
            float(data["gamma"]),
            gauge_value_from_dict(data["iterated"]),
            float(data["energy_of_gauge"]),
            None if gap is None else float(gap),
            bool(data["kinds_agree"]),
        )


@dataclass(frozen=True)
class ConditionEReport:
    beta: float
    plus_energy: float
    minus_integral: GaugeValue

    @property
    def minus_finite(self) -> bool:
        return self.minus_integral.is_finite

    @property
    def plus_infinite(self) -> bool:
        return self.plus_energy == np.inf

    @property
    def verdict(self) -> str:
        if self.minus_finite and self.plus_infinite:
            return "minus integral finite and plus energy infinite for this mu"
        if self.minus_finite:
            return "minus integral finite, plus energy finite for this mu"
        return "minus integral divergent for this mu"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "beta": self.beta,
            "plus_energy": self.plus_energy,
            "minus_integral": self.minus_integral.to_dict(),
            "minus_finite": self.minus_finite,
            "plus_infinite": self.plus_infinite,
            "verdict": self.verdict,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ConditionEReport":
        "verdict and the two flags are derived, so they are not read back"
        return cls(
            float(data["beta"]),
            float(data["plus_energy"]),
            gauge_value_from_dict(data["minus_integral"]),
        )


def measure_span(mu: DiscreteMeasure) -> float:
    "largest distance between two points of the support of mu"
    return float(mu.atoms[-1] - mu.atoms[0]) + (mu.cell or 0.0)


def _check_beta(spec: LevyTriplet, beta: float) -> float:
    if not 0 < beta < spec.d:
        raise DomainError(f"must lie in (0, {spec.d})", "beta")
    return spec.d - beta


def _kink_fn(spec: LevyTriplet, mu: DiscreteMeasure) -> Optional[Callable]:
    # signed parts of Dirac energies have kinks where some cos(c Im Psi) vanishes
    if mu.cell is not None:
        return None
    offsets, _ = offset_weights(mu)
    offsets = offsets[offsets > 0]
    if offsets.size == 0:
        return None

    def sign_fn(r):
        im = exponent_profile(spec, radial_points(spec, r))[1]
        return np.prod(np.sign(np.cos(np.outer(im, offsets))), axis=1)

    return sign_fn


def _trend_applies(spec: LevyTriplet, mu: DiscreteMeasure, sign: Sign) -> bool:
    # Dirac diagonal terms keep plus and full integrands above sum w_i^2
    if has_bounded_real_part(spec):
        return True
    return mu.cell is None and sign is not Sign.MINUS


def criterion_integral(
    spec: LevyTriplet,
    mu: DiscreteMeasure,
    beta: float,
    controls: Optional[GaugeControls] = None,
) -> CriterionReport:
    """
    int_{R^d} E_{chi_xi}(mu) ||xi||^{beta - d} dxi, with the integrand
    checked to lie in [0, 1] at every quadrature node.
    """
    controls = controls or GaugeControls()
    gamma = _check_beta(spec, beta)
    check_radial(spec)

    def integrand(r):
        values = chi_energy_profile(spec, radial_points(spec, r), mu)
        if np.any(values < -ENERGY_SLACK) or np.any(values > 1 + ENERGY_SLACK):
            raise NumericalError(
                f"chi-energy left [0, 1]: range [{values.min():.3g}, {values.max():.3g}]"
            )
        return np.clip(values, 0.0, 1.0)

    value = radial_reduce(
        integrand,
        gamma,
        spec.d,
        controls,
        scan_step(spec, measure_span(mu)),
        trend=_trend_applies(spec, mu, Sign.FULL),
    )
    interpretation = Interpretation.POSITIVE if value.is_finite else Interpretation.INCONCLUSIVE
    logger.info("criterion integral for %s, beta=%g: %s", spec.name, beta, value.kind)
    return CriterionReport(spec.name, mu.size, float(beta), value, interpretation)


def iterated_integral(
    spec: LevyTriplet,
    mu: DiscreteMeasure,
    gamma: float,
    sign: Sign,
    controls: Optional[GaugeControls] = None,
) -> GaugeValue:
    """
    int_{R^d} E_{(Re chi_xi)sign}(mu) ||xi||^{-gamma} dxi, where sign=full
    integrates E_{chi_xi}(mu) itself.
    """
    controls = controls or GaugeControls()
    sign = Sign(sign)
    check_gamma(spec, gamma)
    check_radial(spec)
    span = measure_span(mu)
    if sign is Sign.MINUS and negative_part_vanishes(spec, span):
        return Finite(0.0, 0.0)

    def integrand(r):
        points = radial_points(spec, r)
        if sign is Sign.FULL:
            return np.maximum(chi_energy_profile(spec, points, mu), 0.0)
        plus, minus = signed_chi_profile(spec, points, mu)
        return plus if sign is Sign.PLUS else minus

    return radial_reduce(
        integrand,
        gamma,
        spec.d,
        controls,
        scan_step(spec, span),
        _kink_fn(spec, mu),
        _trend_applies(spec, mu, sign),
    )


def fubini_check(
    spec: LevyTriplet,
    mu: DiscreteMeasure,
    gamma: float,
    sign: Sign = Sign.PLUS,
    controls: Optional[GaugeControls] = None,
) -> FubiniReport:
    """
    Integrates the signed chi-energies over xi and, independently, takes
    the energy of mu under the gauge kernel g_{gamma,sign}.
    """
    controls = controls or GaugeControls()
    sign = Sign(sign)
    iterated = iterated_integral(spec, mu, gamma, sign, controls)
    energy_value = gauge_energy(spec, gamma, sign, mu, controls)
    both_finite = iterated.is_finite and np.isfinite(energy_value)
    gap = relative_gap(iterated.value, energy_value) if both_finite else None
    kinds_agree = iterated.is_finite == bool(np.isfinite(energy_value))
    if not kinds_agree:
        logger.warning(
            "iterated integral is %s but gauge energy is %g", iterated.kind, energy_value
        )
    return FubiniReport(sign, float(gamma), iterated, energy_value, gap, kinds_agree)


def condition_e_check(
    spec: LevyTriplet,
    mu: DiscreteMeasure,
    beta: float,
    controls: Optional[GaugeControls] = None,
) -> ConditionEReport:
    """
    plus_energy = E_{g_{d-beta,+}}(mu) and
    minus_integral = int E_{(Re chi_xi)-}(mu) ||xi||^{beta-d} dxi.

    The capacity statement quantifies over all mu; the report only says
    which of the two hold for this one.
    """
    controls = controls or GaugeControls()
    gamma = _check_beta(spec, beta)
    minus = iterated_integral(spec, mu, gamma, Sign.MINUS, controls)
    plus = gauge_energy(spec, gamma, Sign.PLUS, mu, controls)
    report = ConditionEReport(float(beta), plus, minus)
    logger.info("condition check for %s, beta=%g: %s", spec.name, beta, report.verdict)
    return report
