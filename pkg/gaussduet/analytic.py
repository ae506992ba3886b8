"""
Closed-form evaluation of the time-dependent and steady-state moments for linearly (beamsplitter) and
nonlinearly (parametric down-conversion) coupled damped modes in squeezed reservoirs.

Every quantity is built from two envelope functions of time and coupling strength: *w*, which redistributes
the initial asymmetries of the modes, and *u*, which generates the inter-mode correlations.
"""
from dataclasses import dataclass, asdict
from typing import NamedTuple
import cmath
import logging
import math
from gaussduet.model import Kind, SystemConfig, CouplingConfig, validate, derived_params
from gaussduet.types import ConfigError, StabilityError, MomentSet, VarianceSet
from gaussduet.oracle import moments_to_covariance
from gaussduet.utils.dispatch import kinddispatch

logger = logging.getLogger(__name__)

STEADY = math.inf


@dataclass(frozen=True)
class EnvelopePair:
    w: float
    u: float

    def to_dict(self):
        return asdict(self)


class Decomposition(NamedTuple):
    v_plus: float
    v_minus: float
    u_plus: float
    u_minus: float


def _check_time(t):
    if t != STEADY and not (math.isfinite(t) and t >= 0):
        raise ConfigError(f"Time must be a non-negative number, received {t!r}")
    return float(t)


def check_kind(kind, coupling: CouplingConfig):
    kind = Kind.parse(kind)
    if kind != coupling.kind:
        raise ConfigError(f"Requested {kind.value} formulas for a {coupling.kind.value} coupling")
    return kind


def _decay_integral(rate, t):
    # ∫₀ᵗ exp(−2·rate·s) ds
    if rate == 0:
        return t
    if t == STEADY:
        return 1 / (2 * rate) if rate > 0 else math.inf
    return -math.expm1(-2 * rate * t) / (2 * rate)


@kinddispatch
def steady_envelopes(kind, angle):
    """
    Long-time limits of the envelopes as functions of the scaled angle: (sin²ψ, sinψ·cosψ) for linear
    coupling and (sinh²χ, sinhχ·coshχ) for nonlinear coupling. Any real angle is accepted.
    """
    raise ConfigError(f"Unknown coupling kind {kind!r}")


@steady_envelopes.register_eq(Kind.LINEAR)
def _steady_envelopes_linear(kind, angle):
    s = math.sin(angle)
    return EnvelopePair(s * s, s * math.cos(angle))


@steady_envelopes.register_eq(Kind.NONLINEAR)
def _steady_envelopes_nonlinear(kind, angle):
    s = math.sinh(angle)
    return EnvelopePair(s * s, s * math.cosh(angle))


@kinddispatch
def _envelopes(kind, t, coupling):
    raise ConfigError(f"Unknown coupling kind {kind!r}")


@_envelopes.register_eq(Kind.LINEAR)
def _envelopes_linear(kind, t, coupling):
    psi = math.atan2(coupling.g, coupling.kappa)
    if t == STEADY:
        return steady_envelopes(kind, psi)
    s = math.sin(psi)
    decay = math.exp(-2 * coupling.kappa * t)
    phase = 2 * coupling.g * t + psi
    return EnvelopePair(s * (s - decay * math.sin(phase)), s * (math.cos(psi) - decay * math.cos(phase)))


@_envelopes.register_eq(Kind.NONLINEAR)
def _envelopes_nonlinear(kind, t, coupling):
    g, kappa = coupling.g, coupling.kappa
    if t == STEADY:
        if g >= kappa:
            raise StabilityError(f"Nonlinear coupling g={g!r} ≥ kappa={kappa!r} has no steady state")
        return steady_envelopes(kind, math.atanh(g / kappa))
    # sinhχ[sinhχ − e^{−2κt}sinh(2gt+χ)] rewritten in the rates so it stays valid above threshold
    try:
        slow = math.exp(-2 * (kappa - g) * t)
        fast = math.exp(-2 * (kappa + g) * t)
        i_slow, i_fast = _decay_integral(kappa - g, t), _decay_integral(kappa + g, t)
    except OverflowError:
        raise StabilityError(f"Nonlinear envelopes overflow at t={t!r} for g={g!r} > kappa={kappa!r}") from None
    w = 0.5 * (slow + fast) - 1 + kappa * (i_slow + i_fast)
    u = 0.5 * (slow - fast) + kappa * (i_slow - i_fast)
    return EnvelopePair(w, u)


def envelopes(kind, t, coupling: CouplingConfig) -> EnvelopePair:
    """
    Evaluates both envelope functions.
    :param kind: The coupling kind
    :param t: Time (same units as 1/κ), or ``math.inf`` for the long-time limit
    :param coupling: The coupling strength and loss rate
    :return: EnvelopePair(w, u)
    :raises StabilityError: When the long-time limit is requested for nonlinear g ≥ κ
    """
    kind = check_kind(kind, coupling)
    return _envelopes(kind, _check_time(t), coupling)


def envelope_w(kind, t, coupling: CouplingConfig) -> float:
    return envelopes(kind, t, coupling).w


def envelope_u(kind, t, coupling: CouplingConfig) -> float:
    return envelopes(kind, t, coupling).u


def variance_decomposition(config: SystemConfig) -> Decomposition:
    """
    Splits the input noise into the parts left alone by the interaction (V±) and the parts it redistributes
    (U±).
    """
    p = derived_params(config)
    c2, s2 = math.cos(config.phi) ** 2, math.sin(config.phi) ** 2
    return Decomposition(
        v_plus=0.5 + p.n + p.m * c2 - p.dm * s2,
        v_minus=0.5 + p.n - p.m * c2 + p.dm * s2,
        u_plus=p.dn + p.m * s2 - p.dm * c2,
        u_minus=p.dn - p.m * s2 + p.dm * c2,
    )


@kinddispatch
def _moments(kind, config, env):
    raise ConfigError(f"Unknown coupling kind {kind!r}")


@_moments.register_eq(Kind.LINEAR)
def _moments_linear(kind, config, env):
    p = derived_params(config)
    rotated = p.linear_amplitude * cmath.exp(1j * config.phi)
    w, u = env.w, env.u
    return MomentSet(
        pop_a=p.n + p.dn * (1 - w),
        pop_b=p.n - p.dn * (1 - w),
        c_aa=config.mode_a.m * cmath.exp(2j * config.phi) - w * rotated,
        c_bb=config.mode_b.m + w * rotated,
        c_adagb=complex(-p.dn * u),
        c_ab=-u * rotated,
    )


@_moments.register_eq(Kind.NONLINEAR)
def _moments_nonlinear(kind, config, env):
    p = derived_params(config)
    rotated = p.nonlinear_amplitude * cmath.exp(1j * config.phi)
    w, u = env.w, env.u
    return MomentSet(
        pop_a=config.mode_a.n + (p.n + 0.5) * w,
        pop_b=config.mode_b.n + (p.n + 0.5) * w,
        c_aa=config.mode_a.m * cmath.exp(2j * config.phi) + w * rotated,
        c_bb=config.mode_b.m + w * rotated.conjugate(),
        c_adagb=u * rotated.conjugate(),
        c_ab=complex((p.n + 0.5) * u),
    )


@kinddispatch
def _variances(kind, decomposition, env):
    raise ConfigError(f"Unknown coupling kind {kind!r}")


@_variances.register_eq(Kind.LINEAR)
def _variances_linear(kind, d, env):
    left = 1 - env.w
    return (d.v_plus + d.u_minus * left, d.v_minus + d.u_plus * left,
            d.v_plus - d.u_minus * left, d.v_minus - d.u_plus * left)


@_variances.register_eq(Kind.NONLINEAR)
def _variances_nonlinear(kind, d, env):
    grown = 1 + env.w
    return (d.v_plus * grown + d.u_minus, d.v_minus * grown + d.u_plus,
            d.v_plus * grown - d.u_minus, d.v_minus * grown - d.u_plus)


def moments(kind, t, config: SystemConfig) -> MomentSet:
    """
    All six moment quantities at time *t* (``math.inf`` for the steady state).

    .. code-block:: python

        import math
        import gaussduet as gd

        config = gd.presets.squeezed_plus_vacuum(0.5, gd.model.ideal_m(0.5), phi=math.pi / 2,
                                                 coupling=gd.CouplingConfig("linear", g=1, kappa=1))
        ms = gd.analytic.moments("linear", math.inf, config)
        ms.pop_a  # 0.375

    :raises StabilityError: For the nonlinear steady state with g ≥ κ
    """
    kind = check_kind(kind, config.coupling)
    validate(config)
    return _moments(kind, config, _envelopes(kind, _check_time(t), config.coupling))


def steady_moments(kind, config: SystemConfig) -> MomentSet:
    return moments(kind, STEADY, config)


def steady_moments_at(kind, config: SystemConfig, angle) -> MomentSet:
    """
    Steady moments evaluated directly at a scaled angle (ψ or χ), ignoring the coupling strength stored in
    *config*. The angle is not range checked, so neighbouring points of a finite difference may fall outside
    the physical range.
    """
    kind = Kind.parse(kind)
    return _moments(kind, config, steady_envelopes(kind, angle))


def populations(kind, t, config: SystemConfig):
    ms = moments(kind, t, config)
    return ms.pop_a, ms.pop_b


def single_mode_correlations(kind, t, config: SystemConfig):
    ms = moments(kind, t, config)
    return ms.c_aa, ms.c_bb


def two_mode_correlations(kind, t, config: SystemConfig):
    ms = moments(kind, t, config)
    return ms.c_adagb, ms.c_ab


def variances(kind, t, config: SystemConfig) -> VarianceSet:
    """
    Quadrature variances at time *t*. The symmetrized cross moments are −Im⟨aa⟩ and −Im⟨bb⟩, consistent
    with the moment extraction of the covariance matrix.
    """
    kind = check_kind(kind, config.coupling)
    validate(config)
    env = _envelopes(kind, _check_time(t), config.coupling)
    xx_a, yy_a, xx_b, yy_b = _variances(kind, variance_decomposition(config), env)
    ms = _moments(kind, config, env)
    return VarianceSet(xx_a=xx_a, yy_a=yy_a, xy_a=-ms.c_aa.imag, xx_b=xx_b, yy_b=yy_b, xy_b=-ms.c_bb.imag)


def steady_variances(kind, config: SystemConfig) -> VarianceSet:
    return variances(kind, STEADY, config)


def quadrature_sums(kind, t, config: SystemConfig):
    """
    Sums of the X and of the Y variances of both modes. Linear coupling leaves them at 2V±, nonlinear
    coupling amplifies them to 2V±(1+w).
    """
    vs = variances(kind, t, config)
    return vs.xx_a + vs.xx_b, vs.yy_a + vs.yy_b


def covariance(kind, t, config: SystemConfig):
    """The full 4×4 covariance matrix implied by the closed forms"""
    return moments_to_covariance(moments(kind, t, config))
