"""
Builders for the input-state families the modes are prepared in before they are coupled, and identification
of a configuration's family.
"""
from enum import Enum
import math
from gaussduet.model import ModeParams, SystemConfig, CouplingConfig, ideal_m

SCENARIO_TOLERANCE = 1e-12


class Scenario(str, Enum):
    EQUAL_SQUEEZED = "equalSqueezed"
    EQUAL_POP_UNEQUAL_SQUEEZE = "equalPopUnequalSqueeze"
    SQUEEZED_PLUS_VACUUM = "squeezedPlusVacuum"
    SQUEEZED_PLUS_THERMAL = "squeezedPlusThermal"
    CUSTOM = "custom"


def _coupling(coupling):
    return CouplingConfig() if coupling is None else coupling


def equal_squeezed(n, m=None, phi=0.0, coupling=None):
    """Both modes with the same occupation and two-photon correlation, ideally squeezed by default"""
    m = ideal_m(n) if m is None else m
    return SystemConfig(ModeParams(n, m), ModeParams(n, m), phi, _coupling(coupling))


def equal_pop_unequal_squeeze(n, m_a, m_b, phi=0.0, coupling=None):
    return SystemConfig(ModeParams(n, m_a), ModeParams(n, m_b), phi, _coupling(coupling))


def squeezed_plus_vacuum(n_a, m_a=None, phi=0.0, coupling=None):
    m_a = ideal_m(n_a) if m_a is None else m_a
    return SystemConfig(ModeParams(n_a, m_a), ModeParams.vacuum(), phi, _coupling(coupling))


def squeezed_plus_thermal(n, m_a=None, phi=0.0, coupling=None):
    """Mode a squeezed, mode b thermal with the same occupation and no two-photon correlation"""
    m_a = ideal_m(n) if m_a is None else m_a
    return SystemConfig(ModeParams(n, m_a), ModeParams.thermal(n), phi, _coupling(coupling))


def custom(na=0.0, ma=0.0, nb=0.0, mb=0.0, phi=0.0, coupling=None):
    return SystemConfig(ModeParams(na, ma), ModeParams(nb, mb), phi, _coupling(coupling))


BUILDERS = {
    Scenario.EQUAL_SQUEEZED: equal_squeezed,
    Scenario.EQUAL_POP_UNEQUAL_SQUEEZE: equal_pop_unequal_squeeze,
    Scenario.SQUEEZED_PLUS_VACUUM: squeezed_plus_vacuum,
    Scenario.SQUEEZED_PLUS_THERMAL: squeezed_plus_thermal,
    Scenario.CUSTOM: custom,
}


def _same(x, y):
    return abs(x - y) <= SCENARIO_TOLERANCE * max(1.0, abs(x), abs(y))


def identify(config: SystemConfig) -> Scenario:
    """
    Classifies a configuration into one of the input-state families. The phase is not part of the
    classification.
    """
    a, b = config.mode_a, config.mode_b
    if a.m > 0 and b.n == 0 and b.m == 0:
        return Scenario.SQUEEZED_PLUS_VACUUM
    if _same(a.n, b.n):
        if a.m > 0 and b.m == 0 and b.n > 0:
            return Scenario.SQUEEZED_PLUS_THERMAL
        if a.m > 0 and _same(a.m, b.m):
            return Scenario.EQUAL_SQUEEZED
        if a.m != b.m:
            return Scenario.EQUAL_POP_UNEQUAL_SQUEEZE
    return Scenario.CUSTOM


def phase_is_zero(phi):
    return math.cos(phi) > 0 and abs(math.sin(phi)) <= SCENARIO_TOLERANCE
