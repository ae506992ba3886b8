"""
First-principles propagation of the quadrature covariance matrix. The second-moment closure of the coupled
Langevin equations is dM/dt = A·M + M·Aᵀ + D, which this module integrates by matrix methods. It shares no
formulas with :mod:`gaussduet.analytic` and serves as its independent check.
"""
from dataclasses import dataclass
import logging
import math
import numpy as np
from scipy.linalg import expm
from gaussduet import core
from gaussduet.model import Kind, SystemConfig, validate, noise_matrix
from gaussduet.types import (ConfigError, StabilityError, NegativePopulation, MomentSet, QuadratureCovariance)

logger = logging.getLogger(__name__)

# Upper triangle index pairs of a symmetric 4x4 matrix, the unknowns of the Lyapunov system
_PAIRS = [(i, j) for i in range(4) for j in range(i, 4)]
_DUPLICATION = np.zeros((16, len(_PAIRS)))
_ELIMINATION = np.zeros((len(_PAIRS), 16))
for _p, (_i, _j) in enumerate(_PAIRS):
    _DUPLICATION[4 * _i + _j, _p] = 1
    _DUPLICATION[4 * _j + _i, _p] = 1
    _ELIMINATION[_p, 4 * _i + _j] = 1

EXPM_NORM_LIMIT = 1e3
NEGATIVE_POPULATION_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class DriftDiffusion:
    """
    Drift matrix A (rates) and diffusion matrix D of the covariance dynamics, in the ordering (Xa, Ya, Xb, Yb).
    """
    kind: Kind
    g: float
    kappa: float
    drift: np.ndarray
    diffusion: np.ndarray

    def eigenvalues(self):
        return np.linalg.eigvals(self.drift)

    @property
    def rate_scale(self):
        return self.kappa + abs(self.g)


def assemble(config: SystemConfig) -> DriftDiffusion:
    """
    Builds the drift and diffusion matrices. Linear coupling rotates Xa into Xb (and Ya into Yb), nonlinear
    coupling mixes X quadratures with +g and Y quadratures with −g. The diffusion is 2κ times the reservoir
    noise coefficients.

    No validation is applied here so neighbouring points of a finite difference can be assembled.
    """
    g, kappa = config.coupling.g, config.coupling.kappa
    drift = -kappa * np.eye(4)
    if config.kind == Kind.LINEAR:
        drift[0, 2], drift[2, 0] = g, -g
        drift[1, 3], drift[3, 1] = g, -g
    else:
        drift[0, 2] = drift[2, 0] = g
        drift[1, 3] = drift[3, 1] = -g
    return DriftDiffusion(config.kind, g, kappa, drift, 2 * kappa * noise_matrix(config))


def is_hurwitz(drift) -> bool:
    real_parts = np.linalg.eigvals(drift).real
    return bool(np.max(real_parts) < -1e-12 * max(1.0, np.linalg.norm(drift, 1)))


@core.attach_exception_handler
def steady_covariance(dd: DriftDiffusion) -> QuadratureCovariance:
    """
    Solves the continuous Lyapunov equation A·M + M·Aᵀ + D = 0 directly for the ten independent entries of M.
    :param dd: The drift and diffusion of the system
    :return: The steady-state covariance
    :raises StabilityError: When A is not Hurwitz
    """
    a, d = dd.drift, dd.diffusion
    if not is_hurwitz(a):
        raise StabilityError(f"Drift is not Hurwitz (g={dd.g!r}, kappa={dd.kappa!r}); no steady state exists")
    operator = np.kron(a, np.eye(4)) + np.kron(np.eye(4), a)
    system = _ELIMINATION @ operator @ _DUPLICATION
    solution = np.linalg.solve(system, -_ELIMINATION @ d.reshape(16))
    m = (_DUPLICATION @ solution).reshape(4, 4)
    residual = np.linalg.norm(a @ m + m @ a.T + d, "fro")
    scale = max(np.linalg.norm(d, "fro"), 1e-300)
    if residual > 1e-10 * scale:
        logger.warning("Lyapunov residual %.3e exceeds tolerance for g=%r kappa=%r", residual, dd.g, dd.kappa)
    else:
        logger.debug("Lyapunov residual %.3e", residual)
    return QuadratureCovariance((m + m.T) / 2)


@core.attach_exception_handler
def propagator(drift, t):
    """
    The matrix exponential e^{A·t}. Arguments with ‖A·t‖₁ above 10³ are split into substeps with
    ‖A·Δt‖₁ ≤ 1 and recombined by repeated squaring.
    """
    scaled = drift * t
    norm = np.linalg.norm(scaled, 1)
    if norm <= EXPM_NORM_LIMIT:
        return expm(scaled)
    substeps = math.ceil(norm)
    logger.debug("Splitting exponential into %d substeps", substeps)
    return np.linalg.matrix_power(expm(scaled / substeps), substeps)


def _check_time(t):
    if not (math.isfinite(t) and t >= 0):
        raise ConfigError(f"Propagation time must be finite and non-negative, received {t!r}")


def integrate(m0: QuadratureCovariance, dd: DriftDiffusion, t, max_step=None) -> QuadratureCovariance:
    """
    Fixed-step fourth-order Runge-Kutta integration of dM/dt = A·M + M·Aᵀ + D. Valid for any drift, including
    above the nonlinear threshold.
    :param m0: The initial covariance
    :param dd: The drift and diffusion of the system
    :param t: The propagation time
    :param max_step: An optional cap on the step size, below the default min(1/(20(κ+g)), t/100)
    :return: The covariance at time *t*
    """
    _check_time(t)
    if t == 0:
        return m0
    step = min(1 / (20 * dd.rate_scale), t / 100)
    if max_step is not None:
        step = min(step, max_step)
    count = math.ceil(t / step)
    h = t / count
    a, d = dd.drift, dd.diffusion
    at = a.T

    def rate(m):
        return a @ m + m @ at + d

    m = np.array(m0.matrix)
    for _ in range(count):
        k1 = rate(m)
        k2 = rate(m + 0.5 * h * k1)
        k3 = rate(m + 0.5 * h * k2)
        k4 = rate(m + h * k3)
        m = m + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    logger.debug("Integrated %d RK4 steps of %.3e", count, h)
    return QuadratureCovariance((m + m.T) / 2)


def propagate(m0: QuadratureCovariance, dd: DriftDiffusion, t, method="auto", max_step=None) -> QuadratureCovariance:
    """
    Propagates a covariance for a time *t*. For a Hurwitz drift the exact solution
    M(t) = e^{At}(M0 − M∞)e^{Aᵀt} + M∞ is used, otherwise the equation is integrated.
    :param method: ``auto``, ``expm`` or ``integrate``
    """
    _check_time(t)
    if t == 0:
        return m0
    if method not in ("auto", "expm", "integrate"):
        raise ValueError(f"Unknown propagation method '{method}'")
    if method == "integrate" or (method == "auto" and not is_hurwitz(dd.drift)):
        return integrate(m0, dd, t, max_step=max_step)
    steady = steady_covariance(dd).matrix
    e = propagator(dd.drift, t)
    m = e @ (m0.matrix - steady) @ e.T + steady
    logger.debug("Propagated with the matrix exponential to t=%r", t)
    return QuadratureCovariance((m + m.T) / 2)


def extract_moments(cov: QuadratureCovariance) -> MomentSet:
    """
    Reads the populations and the complex correlations from a covariance matrix.

    Phase convention: the extraction is the fixed map a = (X − iY)/√2, b = (X_b − iY_b)/√2. The phase φ of
    mode a enters only through :func:`gaussduet.model.input_covariance`, which rotates the noise ellipse of
    mode a so that the uncoupled input reads back as ⟨aa⟩ = m_a·e^{2iφ} and ⟨bb⟩ = m_b. The map itself is the
    same for every φ, so it takes no phase argument.
    :raises NegativePopulation: When a population is below −1e-8
    """
    m = cov.matrix
    pop_a = 0.5 * (m[0, 0] + m[1, 1] - 1)
    pop_b = 0.5 * (m[2, 2] + m[3, 3] - 1)
    for name, pop in (("pop_a", pop_a), ("pop_b", pop_b)):
        if pop < -NEGATIVE_POPULATION_TOLERANCE:
            raise NegativePopulation(f"Covariance implies {name}={pop!r}")
    return MomentSet(
        pop_a=float(pop_a),
        pop_b=float(pop_b),
        c_aa=complex(0.5 * (m[0, 0] - m[1, 1]), -m[0, 1]),
        c_bb=complex(0.5 * (m[2, 2] - m[3, 3]), -m[2, 3]),
        c_adagb=complex(0.5 * (m[0, 2] + m[1, 3]), -0.5 * (m[0, 3] - m[1, 2])),
        c_ab=complex(0.5 * (m[0, 2] - m[1, 3]), -0.5 * (m[0, 3] + m[1, 2])),
    )


def moments_to_covariance(ms: MomentSet) -> QuadratureCovariance:
    """The inverse of :func:`extract_moments`"""
    c_aa, c_bb = complex(ms.c_aa), complex(ms.c_bb)
    total, difference = complex(ms.c_adagb) + complex(ms.c_ab), complex(ms.c_adagb) - complex(ms.c_ab)
    m = np.zeros((4, 4))
    m[0, 0] = ms.pop_a + 0.5 + c_aa.real
    m[1, 1] = ms.pop_a + 0.5 - c_aa.real
    m[0, 1] = -c_aa.imag
    m[2, 2] = ms.pop_b + 0.5 + c_bb.real
    m[3, 3] = ms.pop_b + 0.5 - c_bb.real
    m[2, 3] = -c_bb.imag
    m[0, 2] = total.real
    m[1, 3] = difference.real
    m[0, 3] = -total.imag
    m[1, 2] = difference.imag
    return QuadratureCovariance(np.triu(m) + np.triu(m, 1).T)


def oracle_covariance(config: SystemConfig, t=math.inf, method="auto", max_step=None) -> QuadratureCovariance:
    """
    Covariance of the coupled system at time *t* starting from the uncoupled input state, or the steady state
    when *t* is infinite.
    """
    validate(config)
    dd = assemble(config)
    if t == math.inf:
        return steady_covariance(dd)
    return propagate(QuadratureCovariance(noise_matrix(config)), dd, t, method=method, max_step=max_step)


def oracle_moments(config: SystemConfig, t=math.inf, method="auto", max_step=None) -> MomentSet:
    return extract_moments(oracle_covariance(config, t, method=method, max_step=max_step))
