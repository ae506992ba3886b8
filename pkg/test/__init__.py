import math
from hypothesis import strategies as st
from gaussduet.model import Kind, ModeParams, CouplingConfig, SystemConfig, ideal_m


@st.composite
def mode_params(draw, min_n=0.0, max_n=2.0):
    n = draw(st.floats(min_value=min_n, max_value=max_n, allow_nan=False, allow_infinity=False))
    fraction = draw(st.floats(min_value=0.0, max_value=1.0, allow_nan=False, allow_infinity=False))
    return ModeParams(n, fraction * ideal_m(n))


@st.composite
def system_configs(draw, kind=Kind.LINEAR, min_n=0.0, max_ratio=None):
    """Random stable systems drawn from the same ranges as the verification suites"""
    kind = Kind.parse(kind)
    if max_ratio is None:
        max_ratio = 20.0 if kind == Kind.LINEAR else 0.95
    kappa = draw(st.floats(min_value=0.5, max_value=2.0))
    ratio = draw(st.floats(min_value=0.0, max_value=max_ratio))
    phi = draw(st.floats(min_value=0.0, max_value=2 * math.pi, exclude_max=True))
    return SystemConfig(draw(mode_params(min_n)), draw(mode_params(min_n)), phi,
                        CouplingConfig(kind, ratio * kappa, kappa))
