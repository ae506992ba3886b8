"""
Normalized correlation degrees, interference visibility, squeezing classification and entanglement verdicts.
"""
from dataclasses import dataclass, asdict
from enum import Enum
from typing import Mapping, Optional
import cmath
import logging
import math
from gaussduet import core, presets
from gaussduet.analytic import envelopes, check_kind
from gaussduet.model import Kind, SystemConfig, validate, derived_params
from gaussduet.types import ConfigError, ScenarioMismatch, UndefinedDegree, MomentSet, VarianceSet
from gaussduet.utils.dispatch import kinddispatch

logger = logging.getLogger(__name__)

SHOT_NOISE = 0.5
SQUEEZING_TOLERANCE = 1e-12


@dataclass(frozen=True)
class CorrelationDegrees:
    """
    Normalized correlations. A degree whose normalizing population vanishes is ``None`` (undefined).
    """
    eta_aa: Optional[float]
    eta_bb: Optional[float]
    gamma_ab: Optional[float]
    eta_ab: Optional[float]
    visibility: Optional[float]

    def require(self, *names):
        """
        Returns the named degrees, raising UndefinedDegree if any of them is undefined.
        """
        values = []
        for name in names:
            value = getattr(self, name)
            if value is None:
                raise UndefinedDegree(f"{name} is undefined because a normalizing population vanishes")
            values.append(value)
        return values[0] if len(values) == 1 else tuple(values)

    def to_dict(self):
        return asdict(self)


class SqueezingClass(str, Enum):
    NONE = "none"
    CLASSICAL = "classical"
    QUANTUM = "quantum"


@dataclass(frozen=True)
class Verdicts:
    squeezing: Optional[Mapping[str, SqueezingClass]] = None
    entanglement_simple: Optional[bool] = None
    entanglement_cs: Optional[bool] = None
    entanglement_cs_b: Optional[bool] = None

    @property
    def entangled(self):
        return bool(self.entanglement_simple or self.entanglement_cs or self.entanglement_cs_b)

    def merge(self, other):
        return Verdicts(
            squeezing=self.squeezing if self.squeezing is not None else other.squeezing,
            entanglement_simple=_first(self.entanglement_simple, other.entanglement_simple),
            entanglement_cs=_first(self.entanglement_cs, other.entanglement_cs),
            entanglement_cs_b=_first(self.entanglement_cs_b, other.entanglement_cs_b),
        )

    def to_dict(self):
        result = asdict(self)
        if self.squeezing is not None:
            result["squeezing"] = {k: v.value for k, v in self.squeezing.items()}
        return result


def _first(value, fallback):
    return value if value is not None else fallback


@dataclass(frozen=True)
class DegreeLimits:
    scenario: presets.Scenario
    eta_aa: float
    eta_bb: float
    gamma_ab: float
    eta_ab: float

    def to_dict(self):
        return asdict(self)


def _ratio(numerator, denominator, floor):
    if denominator < floor:
        return None
    return numerator / denominator


def degrees(ms: MomentSet, strict=False, floor=None) -> CorrelationDegrees:
    """
    Normalizes the correlations of a MomentSet:
    η_aa = |⟨aa⟩|/⟨a†a⟩, η_bb = |⟨bb⟩|/⟨b†b⟩, γ_ab = |⟨a†b⟩|/sqrt(⟨a†a⟩⟨b†b⟩),
    η_ab = |⟨ab⟩|/sqrt(⟨a†a⟩⟨b†b⟩) and V = 2|⟨a†b⟩|/(⟨a†a⟩ + ⟨b†b⟩).

    :param ms: The moments
    :param strict: Raise UndefinedDegree instead of reporting an undefined degree as None
    :param floor: Populations below this value make the dependent degrees undefined
    :return: CorrelationDegrees
    """
    floor = core.setting("population_floor", floor)
    pop_a, pop_b = ms.pop_a, ms.pop_b
    joint = math.sqrt(pop_a * pop_b) if pop_a >= floor and pop_b >= floor else 0.0
    result = CorrelationDegrees(
        eta_aa=_ratio(abs(ms.c_aa), pop_a, floor),
        eta_bb=_ratio(abs(ms.c_bb), pop_b, floor),
        gamma_ab=_ratio(abs(ms.c_adagb), joint, floor) if joint else None,
        eta_ab=_ratio(abs(ms.c_ab), joint, floor) if joint else None,
        visibility=_ratio(2 * abs(ms.c_adagb), pop_a + pop_b, floor),
    )
    if strict:
        result.require("eta_aa", "eta_bb", "gamma_ab", "eta_ab", "visibility")
    return result


def entanglement_check(deg: CorrelationDegrees) -> Verdicts:
    """
    Evaluates η_ab > 1 and the Cauchy-Schwarz type inequality η_ab² > 1 + η_ii² − γ_ab², the latter once with
    η_aa and once with η_bb. Without populations in both modes there are no correlations to certify and every
    verdict is False.
    """
    if deg.eta_ab is None or deg.gamma_ab is None:
        return Verdicts(entanglement_simple=False, entanglement_cs=False, entanglement_cs_b=False)
    eta_ab, gamma_ab = deg.eta_ab, deg.gamma_ab
    lhs = eta_ab * eta_ab
    return Verdicts(
        entanglement_simple=eta_ab > 1,
        entanglement_cs=deg.eta_aa is not None and lhs > 1 + deg.eta_aa ** 2 - gamma_ab ** 2,
        entanglement_cs_b=deg.eta_bb is not None and lhs > 1 + deg.eta_bb ** 2 - gamma_ab ** 2,
    )


def classify_quadrature(variance, conjugate):
    if variance < SHOT_NOISE - SQUEEZING_TOLERANCE:
        return SqueezingClass.QUANTUM
    if variance < conjugate - SQUEEZING_TOLERANCE:
        return SqueezingClass.CLASSICAL
    return SqueezingClass.NONE


def squeezing_report(vs: VarianceSet) -> Verdicts:
    """
    Classifies every quadrature: *quantum* below the vacuum level ½, *classical* when only below the
    conjugate quadrature of the same mode, *none* otherwise.
    """
    return Verdicts(squeezing={
        "xx_a": classify_quadrature(vs.xx_a, vs.yy_a),
        "yy_a": classify_quadrature(vs.yy_a, vs.xx_a),
        "xx_b": classify_quadrature(vs.xx_b, vs.yy_b),
        "yy_b": classify_quadrature(vs.yy_b, vs.xx_b),
    })


def verdicts(ms: MomentSet, vs: VarianceSet) -> Verdicts:
    return squeezing_report(vs).merge(entanglement_check(degrees(ms)))


def quantum_threshold_psi(n) -> float:
    """
    The coupling angle below which equal, ideally squeezed inputs keep quantum single-mode correlations at the
    steady state (φ = π/2): the solution of cos²ψ = sqrt(1 − 1/(n+1)).
    """
    if not n > 0:
        raise ConfigError(f"The quantum threshold needs n > 0, received {n!r}")
    return math.acos(math.sqrt(math.sqrt(n / (n + 1))))


def nonlinear_degree_limits(config: SystemConfig) -> DegreeLimits:
    """
    Strong-coupling (χ → ∞) asymptotes of the nonlinear steady-state degrees. Both envelopes grow as
    sinh²χ, so the degrees approach 2|βm·cosφ|/(2n+1) for the single-mode and first-order degrees and 1 for η_ab.

    :raises ScenarioMismatch: Unless the modes are equally squeezed with φ = 0, squeezed plus thermal, or
        squeezed plus vacuum
    """
    validate(config)
    scenario = presets.identify(config)
    if scenario == presets.Scenario.EQUAL_SQUEEZED and not presets.phase_is_zero(config.phi):
        scenario = presets.Scenario.CUSTOM
    if scenario not in (presets.Scenario.EQUAL_SQUEEZED, presets.Scenario.SQUEEZED_PLUS_THERMAL,
                        presets.Scenario.SQUEEZED_PLUS_VACUUM):
        raise ScenarioMismatch(f"No strong-coupling limit is tabulated for a '{scenario.value}' configuration")
    p = derived_params(config)
    limit = abs(p.nonlinear_amplitude) / (p.n + 0.5)
    return DegreeLimits(scenario, eta_aa=limit, eta_bb=limit, gamma_ab=limit, eta_ab=1.0)


@kinddispatch
def _closed_form(kind, p, phi, w, u):
    raise ConfigError(f"Unknown coupling kind {kind!r}")


def _safe_div(numerator, denominator):
    return numerator / denominator if denominator > 0 else None


@_closed_form.register_eq(Kind.LINEAR)
def _closed_form_linear(kind, p, phi, w, u):
    if p.n <= 0:
        return CorrelationDegrees(None, None, None, None, None)
    amplitude = complex(p.delta_m * math.cos(phi), math.sin(phi)) * cmath.exp(1j * phi)
    ratio = p.m / p.n
    left = 1 - w
    joint = math.sqrt(max(1 - (p.delta_n * left) ** 2, 0.0))
    return CorrelationDegrees(
        eta_aa=_safe_div(ratio * abs((1 + p.delta_m) * cmath.exp(2j * phi) - amplitude * w), 1 + p.delta_n * left),
        eta_bb=_safe_div(ratio * abs((1 - p.delta_m) + amplitude * w), 1 - p.delta_n * left),
        gamma_ab=_safe_div(abs(p.delta_n * u), joint),
        eta_ab=_safe_div(ratio * p.alpha_sin_phi * abs(u), joint),
        visibility=abs(p.delta_n * u),
    )


@_closed_form.register_eq(Kind.NONLINEAR)
def _closed_form_nonlinear(kind, p, phi, w, u):
    if p.n <= 0:
        return CorrelationDegrees(None, None, None, None, None)
    amplitude = complex(math.cos(phi), p.delta_m * math.sin(phi)) * cmath.exp(1j * phi)
    ratio = p.m / p.n
    gain = 1 + 1 / (2 * p.n)
    joint = math.sqrt(max((2 * p.n + (2 * p.n + 1) * w) ** 2 - (2 * p.n * p.delta_n) ** 2, 0.0))
    return CorrelationDegrees(
        eta_aa=_safe_div(ratio * abs((1 + p.delta_m) * cmath.exp(2j * phi) + amplitude * w), 1 + p.delta_n + gain * w),
        eta_bb=_safe_div(ratio * abs((1 - p.delta_m) + amplitude.conjugate() * w), 1 - p.delta_n + gain * w),
        gamma_ab=_safe_div(2 * p.m * p.beta_cos_phi * abs(u), joint),
        eta_ab=_safe_div((2 * p.n + 1) * abs(u), joint),
        visibility=_safe_div(2 * p.m * p.beta_cos_phi * abs(u), 2 * p.n + (2 * p.n + 1) * w),
    )


def closed_form_degrees(kind, t, config: SystemConfig) -> CorrelationDegrees:
    """
    The degrees written directly in the normalized asymmetries δn and δm and the envelopes, independent of
    :func:`degrees`. Undefined entries are ``None``; the mean occupation n must be positive.
    """
    kind = check_kind(kind, config.coupling)
    validate(config)
    env = envelopes(kind, t, config.coupling)
    return _closed_form(kind, derived_params(config), config.phi, env.w, env.u)
