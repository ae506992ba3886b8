"""
Parameter types, physical validation and the derived scalars shared by the analytic and oracle paths.
"""
from dataclasses import dataclass, field, replace, asdict
from enum import Enum
import logging
import math
import numpy as np
from gaussduet import core
from gaussduet.types import ConfigError, PhysicalityError, StabilityError, QuadratureCovariance

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


class Kind(str, Enum):
    LINEAR = "linear"
    NONLINEAR = "nonlinear"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigError(f"Unknown coupling kind {value!r}, expected 'linear' or 'nonlinear'") from None


class ModeState(str, Enum):
    VACUUM = "vacuum"
    THERMAL = "thermal"
    CLASSICAL_SQUEEZED = "classical-squeezed"
    QUANTUM_SQUEEZED = "quantum-squeezed"


def ideal_m(n):
    """The largest two-photon correlation a mode with occupation *n* can carry: sqrt(n(n+1))"""
    return math.sqrt(n * (n + 1)) if n > 0 else 0.0


@dataclass(frozen=True)
class ModeParams:
    """
    The state of one input mode (and of its reservoir): the mean thermal photon number *n* and the
    magnitude *m* of the two-photon correlation. Values of *m* exceeding the physical bound by less than
    the clamp tolerance are clamped onto the bound.
    """
    n: float = 0.0
    m: float = 0.0

    def __post_init__(self):
        n, m = float(self.n), float(self.m)
        bound = ideal_m(n)
        if bound < m <= bound + core.setting("physicality_tolerance"):
            m = bound
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)

    @classmethod
    def vacuum(cls):
        return cls(0.0, 0.0)

    @classmethod
    def thermal(cls, n):
        return cls(n, 0.0)

    @property
    def bound(self):
        return ideal_m(self.n)

    def classify(self):
        if self.m == 0:
            return ModeState.VACUUM if self.n == 0 else ModeState.THERMAL
        return ModeState.CLASSICAL_SQUEEZED if self.m <= self.n else ModeState.QUANTUM_SQUEEZED

    def violations(self, name="mode"):
        problems = []
        if not (math.isfinite(self.n) and math.isfinite(self.m)):
            problems.append(ConfigError(f"{name}: n and m must be finite"))
        elif self.n < 0:
            problems.append(ConfigError(f"{name}: n={self.n!r} must be non-negative"))
        elif self.m < 0:
            problems.append(ConfigError(f"{name}: m={self.m!r} must be non-negative"))
        elif self.m > self.bound + core.setting("physicality_tolerance"):
            problems.append(PhysicalityError(
                f"{name}: m={self.m!r} exceeds the physical bound sqrt(n(n+1))={self.bound!r}"))
        return problems


@dataclass(frozen=True)
class CouplingConfig:
    kind: Kind = Kind.LINEAR
    g: float = 0.0
    kappa: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind.parse(self.kind))
        object.__setattr__(self, "g", float(self.g))
        object.__setattr__(self, "kappa", float(self.kappa))

    @classmethod
    def from_angle(cls, kind, angle, kappa=1.0):
        """
        Builds the coupling that corresponds to a scaled angle: g = κ·tan(ψ) for linear coupling and
        g = κ·tanh(χ) for nonlinear coupling. No range check is applied to the angle.
        """
        kind = Kind.parse(kind)
        if kind == Kind.LINEAR:
            return cls(kind, kappa * math.tan(angle), kappa)
        return cls(kind, kappa * math.tanh(angle), kappa)

    def violations(self):
        problems = []
        if not (math.isfinite(self.g) and math.isfinite(self.kappa)):
            problems.append(ConfigError("coupling: g and kappa must be finite"))
        else:
            if self.kappa <= 0:
                problems.append(ConfigError(f"coupling: kappa={self.kappa!r} must be strictly positive"))
            if self.g < 0:
                problems.append(ConfigError(f"coupling: g={self.g!r} must be non-negative"))
        return problems

    @property
    def is_stable(self):
        return self.kind == Kind.LINEAR or self.g < self.kappa


@dataclass(frozen=True)
class SystemConfig:
    mode_a: ModeParams = field(default_factory=ModeParams)
    mode_b: ModeParams = field(default_factory=ModeParams)
    phi: float = 0.0
    coupling: CouplingConfig = field(default_factory=CouplingConfig)

    def __post_init__(self):
        phi = float(self.phi) % TWO_PI if math.isfinite(self.phi) else float(self.phi)
        if phi >= TWO_PI:
            phi = 0.0
        object.__setattr__(self, "phi", phi)

    @property
    def kind(self):
        return self.coupling.kind

    def with_angle(self, angle, kind=None):
        kind = self.kind if kind is None else kind
        return replace(self, coupling=CouplingConfig.from_angle(kind, angle, self.coupling.kappa))

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "g": self.coupling.g,
            "kappa": self.coupling.kappa,
            "na": self.mode_a.n,
            "ma": self.mode_a.m,
            "nb": self.mode_b.n,
            "mb": self.mode_b.m,
            "phi": self.phi,
        }


@dataclass(frozen=True)
class ScaledCoupling:
    kind: Kind
    angle: float


@dataclass(frozen=True)
class DerivedParams:
    """
    Averages and asymmetries of the two input modes together with the phase quantities α, β and θ.
    θ is the phase of the complex amplitude that multiplies the redistribution terms for the given kind.
    """
    kind: Kind
    phi: float
    n: float
    dn: float
    m: float
    dm: float
    delta_n: float
    delta_m: float
    alpha: float
    beta: float
    theta: float

    @property
    def alpha_sin_phi(self):
        return math.hypot(math.sin(self.phi), self.delta_m * math.cos(self.phi))

    @property
    def beta_cos_phi(self):
        return math.hypot(math.cos(self.phi), self.delta_m * math.sin(self.phi))

    @property
    def linear_amplitude(self):
        """αm·sinφ·e^{iθ} for linear coupling, evaluated as Δm·cosφ + i·m·sinφ"""
        return complex(self.dm * math.cos(self.phi), self.m * math.sin(self.phi))

    @property
    def nonlinear_amplitude(self):
        """βm·cosφ·e^{iθ} for nonlinear coupling, evaluated as m·cosφ + i·Δm·sinφ"""
        return complex(self.m * math.cos(self.phi), self.dm * math.sin(self.phi))

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ValidationReport:
    mode_a: ModeState
    mode_b: ModeState
    stable: bool

    def to_dict(self):
        return asdict(self)


def validate(config: SystemConfig) -> ValidationReport:
    """
    Checks a configuration against the physical constraints and classifies the two input modes.
    :param config: The system to check
    :return: A ValidationReport with the classification of each mode
    :raises PhysicalityError: When a mode violates m ≤ sqrt(n(n+1))
    :raises ConfigError: For negative occupations, non-positive κ or negative g
    """
    problems = (config.mode_a.violations("mode_a") + config.mode_b.violations("mode_b")
                + config.coupling.violations())
    if not math.isfinite(config.phi):
        problems.append(ConfigError("phi must be finite"))
    if problems:
        message = "; ".join(p.message for p in problems)
        if all(isinstance(p, PhysicalityError) for p in problems):
            raise PhysicalityError(message)
        raise ConfigError(message)
    return ValidationReport(config.mode_a.classify(), config.mode_b.classify(), config.coupling.is_stable)


def scaled_coupling(coupling: CouplingConfig) -> ScaledCoupling:
    """
    Maps the coupling strength onto the scaled angle: ψ = arctan(g/κ) for linear coupling, χ = artanh(g/κ)
    for nonlinear coupling.
    :raises StabilityError: When the coupling is nonlinear and g ≥ κ
    """
    problems = coupling.violations()
    if problems:
        raise ConfigError("; ".join(p.message for p in problems))
    if coupling.kind == Kind.LINEAR:
        return ScaledCoupling(coupling.kind, math.atan2(coupling.g, coupling.kappa))
    if coupling.g >= coupling.kappa:
        raise StabilityError(f"Nonlinear coupling g={coupling.g!r} is at or above the threshold "
                             f"kappa={coupling.kappa!r}; no steady state exists")
    return ScaledCoupling(coupling.kind, math.atanh(coupling.g / coupling.kappa))


def derived_params(config: SystemConfig) -> DerivedParams:
    a, b, phi = config.mode_a, config.mode_b, config.phi
    n = (a.n + b.n) / 2
    dn = (a.n - b.n) / 2
    m = (a.m + b.m) / 2
    dm = (a.m - b.m) / 2
    delta_n = dn / n if n > 0 else 0.0
    delta_m = dm / m if m > 0 else 0.0

    sin_phi, cos_phi = math.sin(phi), math.cos(phi)
    if m == 0 or (sin_phi == 0 and delta_m == 0):
        theta_linear = math.pi / 2
    else:
        theta_linear = math.atan2(sin_phi, delta_m * cos_phi)
    if m == 0 or (cos_phi == 0 and delta_m == 0):
        theta_nonlinear = 0.0
    else:
        theta_nonlinear = math.atan2(delta_m * sin_phi, cos_phi)

    sin_theta = abs(math.sin(theta_linear))
    cos_theta = abs(math.cos(theta_nonlinear))
    alpha = 1 / sin_theta if sin_theta > 0 else math.inf
    beta = 1 / cos_theta if cos_theta > 0 else math.inf
    theta = theta_linear if config.kind == Kind.LINEAR else theta_nonlinear
    return DerivedParams(config.kind, phi, n, dn, m, dm, delta_n, delta_m, alpha, beta, theta)


def noise_matrix(config: SystemConfig) -> np.ndarray:
    """
    The symmetrized reservoir noise coefficients in the ordering (Xa, Ya, Xb, Yb). The same coefficients
    describe the uncoupled input state, and 2κ times this matrix is the diffusion matrix.
    """
    a, b = config.mode_a, config.mode_b
    c2, s2 = math.cos(2 * config.phi), math.sin(2 * config.phi)
    result = np.zeros((4, 4))
    result[0, 0] = 0.5 + a.n + a.m * c2
    result[1, 1] = 0.5 + a.n - a.m * c2
    result[0, 1] = result[1, 0] = -a.m * s2
    result[2, 2] = 0.5 + b.n + b.m
    result[3, 3] = 0.5 + b.n - b.m
    return result


def input_covariance(config: SystemConfig) -> QuadratureCovariance:
    validate(config)
    return QuadratureCovariance(noise_matrix(config))
