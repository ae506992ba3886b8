"""
Seeded randomized verification suites: analytic against oracle moments, linear population conservation,
nonlinear constancy of the variance differences, the derivative identities and the convergence order of their
finite differences.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional
import logging
import math
import numpy as np
from gaussduet import analytic, oracle, relations
from gaussduet.model import Kind, ModeParams, SystemConfig, CouplingConfig, ideal_m
from gaussduet.types import ConfigError, VerificationFailure
from gaussduet.utils import json_dumps

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20240601
DEFAULT_COUNT = 100
TIME_FACTORS = (0.0, 0.1, 1.0, 10.0)
MAX_RATIO = {Kind.LINEAR: 20.0, Kind.NONLINEAR: 0.95}
# Angles of the scaled coupling at which linear conservation is checked along ψ
CONSERVATION_ANGLES = tuple(np.linspace(0.0, math.pi / 2, 11).tolist())

TOLERANCES = {
    "cross_path": 1.0,
    "conservation": 1e-12,
    "constancy": 1e-10,
    "identities": 1e-6,
    "convergence": 0.0,
}
# The cross path residual is measured in units of CROSS_PATH_ATOL + CROSS_PATH_RTOL·|oracle value|
CROSS_PATH_RTOL = 1e-8
CROSS_PATH_ATOL = 1e-10
# The convergence residual is the shortfall of the observed finite difference order below MIN_ORDER
MIN_ORDER = 1.9
CONVERGENCE_STEP = relations.MAX_STEP


@dataclass
class SuiteResult:
    name: str
    tolerance: float
    checks: int = 0
    max_residual: float = 0.0
    worst: Optional[Dict] = None

    @property
    def passed(self):
        return self.max_residual <= self.tolerance

    def record(self, residual, context):
        self.checks += 1
        if math.isnan(residual):
            residual = math.inf
        if self.worst is None or residual > self.max_residual:
            self.max_residual = residual
            self.worst = context

    def to_dict(self):
        return {
            "name": self.name,
            "tolerance": self.tolerance,
            "checks": self.checks,
            "max_residual": self.max_residual,
            "passed": self.passed,
            "worst": self.worst,
        }


@dataclass
class VerificationReport:
    seed: int
    count: int
    suites: List[SuiteResult] = field(default_factory=list)

    @property
    def passed(self):
        return all(suite.passed for suite in self.suites)

    def failures(self):
        return [suite for suite in self.suites if not suite.passed]

    def raise_for_failure(self):
        """
        :raises VerificationFailure: Naming each failing suite and echoing its worst configuration
        """
        failed = self.failures()
        if failed:
            details = "; ".join(f"{suite.name} residual {suite.max_residual!r} > {suite.tolerance!r} at "
                                f"{json_dumps(suite.worst, sort_keys=True)}" for suite in failed)
            raise VerificationFailure(f"Verification failed (seed={self.seed}, count={self.count}): {details}")

    def to_dict(self):
        return {"seed": self.seed, "count": self.count, "passed": self.passed,
                "suites": [suite.to_dict() for suite in self.suites]}


def random_config(rng, kind) -> SystemConfig:
    """
    Draws n_i from [0, 2], m_i from [0, sqrt(n_i(n_i+1))], φ from [0, 2π), κ from [0.5, 2] and g/κ from
    [0, 20] (linear) or [0, 0.95] (nonlinear).
    """
    kind = Kind.parse(kind)
    n_a, n_b = rng.uniform(0.0, 2.0, 2)
    f_a, f_b = rng.uniform(0.0, 1.0, 2)
    phi = rng.uniform(0.0, 2 * math.pi)
    kappa = rng.uniform(0.5, 2.0)
    ratio = rng.uniform(0.0, MAX_RATIO[kind])
    return SystemConfig(ModeParams(n_a, f_a * ideal_m(n_a)), ModeParams(n_b, f_b * ideal_m(n_b)), phi,
                        CouplingConfig(kind, ratio * kappa, kappa))


def sample_configs(seed, count):
    """*count* configurations per coupling kind, reproducible from the seed"""
    rng = np.random.default_rng(seed)
    return [(kind, index, random_config(rng, kind)) for kind in Kind for index in range(count)]


def _times(config):
    return [factor / config.coupling.kappa for factor in TIME_FACTORS] + [math.inf]


def _context(kind, index, config, **extra):
    return {"kind": kind.value, "index": index, **config.to_dict(), **extra}


def _cross_path(suite, kind, index, config):
    for t in _times(config):
        mine = analytic.moments(kind, t, config)
        residual = mine.tolerance_ratio(oracle.oracle_moments(config, t), CROSS_PATH_RTOL, CROSS_PATH_ATOL)
        suite.record(residual, _context(kind, index, config, t=t))


def _conservation(suite, kind, index, config):
    total = config.mode_a.n + config.mode_b.n
    for t in _times(config):
        ms = analytic.moments(kind, t, config)
        suite.record(abs(ms.pop_a + ms.pop_b - total), _context(kind, index, config, t=t))
    for angle in CONSERVATION_ANGLES:
        ms = analytic.steady_moments_at(kind, config, angle)
        suite.record(abs(ms.pop_a + ms.pop_b - total), _context(kind, index, config, psi=angle))


def _constancy(suite, kind, index, config):
    d = analytic.variance_decomposition(config)
    for t in _times(config):
        vs = analytic.variances(kind, t, config)
        residual = max(abs(vs.xx_a - vs.xx_b - 2 * d.u_minus), abs(vs.yy_a - vs.yy_b - 2 * d.u_plus))
        suite.record(residual, _context(kind, index, config, t=t))


def _identities(suite, kind, index, config):
    for which in relations.Relation:
        result = relations.check_identity(kind, which, config)
        suite.record(result.residual, _context(kind, index, config, relation=which.value, step=result.step))


def _convergence(suite, kind, index, config):
    for which in relations.Relation:
        order = relations.convergence_order(kind, which, config, h=CONVERGENCE_STEP)
        suite.record(max(0.0, MIN_ORDER - order),
                     _context(kind, index, config, relation=which.value, step=CONVERGENCE_STEP, order=order))


def run_verification(seed=DEFAULT_SEED, count=DEFAULT_COUNT) -> VerificationReport:
    """
    Runs every suite over *count* seeded random configurations per coupling kind.
    :param seed: Seed of the numpy random generator; the same seed replays the same configurations
    :param count: Configurations per coupling kind, at least 1
    :return: VerificationReport with the largest residual per suite and the configuration that produced it
    :raises ConfigError: When count is below 1
    """
    try:
        count = int(count)
    except (TypeError, ValueError):
        raise ConfigError(f"count must be an integer, received {count!r}") from None
    if count < 1:
        raise ConfigError(f"count must be at least 1, received {count}")
    suites = {name: SuiteResult(name, tolerance) for name, tolerance in TOLERANCES.items()}
    for kind, index, config in sample_configs(seed, count):
        _cross_path(suites["cross_path"], kind, index, config)
        if kind == Kind.LINEAR:
            _conservation(suites["conservation"], kind, index, config)
        else:
            _constancy(suites["constancy"], kind, index, config)
        _identities(suites["identities"], kind, index, config)
        _convergence(suites["convergence"], kind, index, config)
    report = VerificationReport(seed, count, list(suites.values()))
    for suite in report.suites:
        logger.info("%s: %d checks, max residual %.3e (tolerance %.0e)", suite.name, suite.checks,
                    suite.max_residual, suite.tolerance)
    return report
