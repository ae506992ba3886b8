"""
Numerical checks of the identities that tie the steady inter-mode correlations to the rate of change of the
single-mode quantities with the scaled coupling angle, and location of the extrema and inflection points
those identities imply.
"""
from dataclasses import dataclass, asdict
from enum import Enum
from typing import Tuple
import logging
import math
import numpy as np
from gaussduet import core
from gaussduet.analytic import check_kind, steady_moments_at
from gaussduet.model import Kind, SystemConfig, validate, scaled_coupling
from gaussduet.observables import degrees
from gaussduet.oracle import assemble, steady_covariance, extract_moments
from gaussduet.types import ConfigError, GridTooCoarse
from gaussduet.utils import parallel_map

logger = logging.getLogger(__name__)

MIN_STEP = 1e-6
MAX_STEP = 1e-2
MIN_EXTREMA_POINTS = 101


class Relation(str, Enum):
    ONE_PHOTON = "onePhoton"
    TWO_PHOTON = "twoPhoton"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for member in cls:
            if str(value).lower() in (member.value.lower(), member.name.lower()):
                return member
        raise ConfigError(f"Unknown relation {value!r}, expected 'onePhoton' or 'twoPhoton'")


class Quantity(str, Enum):
    ONE_PHOTON = "onePhoton"
    TWO_PHOTON = "twoPhoton"
    DEGREES = "degrees"


# (kind, relation) -> (inter-mode moment, paired single-mode moment prefix)
PAIRINGS = {
    (Kind.LINEAR, Relation.ONE_PHOTON): ("c_adagb", "pop"),
    (Kind.LINEAR, Relation.TWO_PHOTON): ("c_ab", "corr"),
    (Kind.NONLINEAR, Relation.ONE_PHOTON): ("c_adagb", "corr"),
    (Kind.NONLINEAR, Relation.TWO_PHOTON): ("c_ab", "pop"),
}


def _single_mode_name(prefix, mode):
    if mode not in ("a", "b"):
        raise ConfigError(f"Mode must be 'a' or 'b', received {mode!r}")
    return f"pop_{mode}" if prefix == "pop" else f"c_{mode}{mode}"


@dataclass(frozen=True)
class IdentityResult:
    kind: Kind
    relation: Relation
    mode: str
    path: str
    angle: float
    lhs: float
    rhs: float
    residual: float
    step: float

    def to_dict(self):
        return asdict(self)


def _evaluator(kind, config, path):
    if path == "analytic":
        return lambda angle: steady_moments_at(kind, config, angle)
    if path == "oracle":
        return lambda angle: extract_moments(steady_covariance(assemble(config.with_angle(angle))))
    raise ConfigError(f"Unknown evaluation path '{path}', expected 'analytic' or 'oracle'")


def _central_difference(f, angle, h):
    return (f(angle + h) - f(angle - h)) / (2 * h)


def _identity(kind, relation, config, h, path, mode, richardson):
    inter_name, prefix = PAIRINGS[(kind, relation)]
    single_name = _single_mode_name(prefix, mode)
    evaluate = _evaluator(kind, config, path)
    angle = scaled_coupling(config.coupling).angle

    def single(x):
        return complex(getattr(evaluate(x), single_name))

    derivative = _central_difference(single, angle, h)
    if richardson:
        derivative = (4 * _central_difference(single, angle, h / 2) - derivative) / 3
    lhs = abs(complex(getattr(evaluate(angle), inter_name)))
    rhs = abs(0.5 * derivative)
    return IdentityResult(kind, relation, mode, path, angle, lhs, rhs, abs(lhs - rhs), h)


def check_identity(kind, which, config: SystemConfig, h=None, path="analytic", mode="a",
                   richardson=False) -> IdentityResult:
    """
    Compares a steady inter-mode correlation with half the derivative of its paired single-mode quantity with
    respect to the scaled angle. The derivative is a central difference of the complex value, and the
    magnitude is taken afterwards.

    ==========  ==========  ===============  ===========================
    kind        which       lhs              differentiated quantity
    ==========  ==========  ===============  ===========================
    linear      onePhoton   abs(⟨a†b⟩)       ⟨a†a⟩ in ψ
    linear      twoPhoton   abs(⟨ab⟩)        ⟨aa⟩ in ψ
    nonlinear   onePhoton   abs(⟨a†b⟩)       ⟨aa⟩ in χ
    nonlinear   twoPhoton   abs(⟨ab⟩)        ⟨a†a⟩ in χ
    ==========  ==========  ===============  ===========================

    :param kind: The coupling kind
    :param which: ``onePhoton`` or ``twoPhoton``
    :param config: The system, whose coupling fixes the angle
    :param h: The step in the scaled angle, within [1e-6, 1e-2]; defaults to the *fd_step* setting
    :param path: ``analytic`` or ``oracle`` (re-solved Lyapunov steady states at the neighbouring angles)
    :param mode: Differentiate the quantity of mode ``a`` or mode ``b``
    :param richardson: Combine the steps h and h/2 to cancel the leading error term
    :return: IdentityResult
    :raises StabilityError: For nonlinear coupling with g ≥ κ
    """
    kind = check_kind(kind, config.coupling)
    h = float(core.setting("fd_step", h))
    if not MIN_STEP <= h <= MAX_STEP:
        raise ConfigError(f"Finite difference step {h!r} is outside [{MIN_STEP}, {MAX_STEP}]")
    validate(config)
    return _identity(kind, Relation.parse(which), config, h, path, mode, richardson)


def convergence_order(kind, which, config: SystemConfig, h=None, path="analytic", mode="a") -> float:
    """
    The observed order of the finite difference: log2 of the residual ratio for steps h and h/2. Infinite
    when either residual is exactly zero.
    """
    first = check_identity(kind, which, config, h=h, path=path, mode=mode)
    second = _identity(first.kind, first.relation, config, first.step / 2, path, mode, False)
    if first.residual == 0 or second.residual == 0:
        return math.inf
    return math.log2(first.residual / second.residual)


def all_identities(config: SystemConfig, h=None, path="analytic", mode="a", richardson=False):
    return [check_identity(config.kind, which, config, h=h, path=path, mode=mode, richardson=richardson)
            for which in Relation]


@dataclass(frozen=True)
class ExtremumReport:
    kind: Kind
    quantity: Quantity
    argmax_index: int
    argmax_angle: float
    inflection_position: float
    inflection_angle: float
    inflections: Tuple[float, ...]
    separation: float

    def to_dict(self):
        return asdict(self)


def _quantity_values(kind, quantity, ms):
    if quantity == Quantity.DEGREES:
        deg = degrees(ms)
        return deg.eta_ab, deg.eta_aa
    inter_name, prefix = PAIRINGS[(kind, Relation(quantity.value))]
    return abs(getattr(ms, inter_name)), abs(getattr(ms, _single_mode_name(prefix, "a")))


def _crossings(second):
    result = []
    for k in range(len(second) - 1):
        left, right = second[k], second[k + 1]
        if (left > 0 >= right) or (left < 0 <= right):
            # second[k] belongs to grid point k+1
            result.append(k + 1 + left / (left - right))
    return result


def locate_extrema(kind, quantity, config_template: SystemConfig, grid) -> ExtremumReport:
    """
    Evaluates the steady state over a grid of scaled angles and reports where the inter-mode quantity peaks
    and where the paired single-mode quantity changes curvature. Positions are in grid units; inflections are
    linear interpolations of the sign change of the second difference. When several inflections exist the
    one nearest the maximum is reported.

    :param quantity: ``onePhoton`` (|⟨a†b⟩| against its single-mode partner), ``twoPhoton`` (|⟨ab⟩|) or
        ``degrees`` (η_ab against η_aa)
    :raises GridTooCoarse: For grids shorter than MIN_EXTREMA_POINTS, non-monotone grids, or when no
        inflection can be resolved
    """
    kind = check_kind(kind, config_template.coupling)
    quantity = Quantity(quantity)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < MIN_EXTREMA_POINTS:
        raise GridTooCoarse(f"A grid of {grid.size} point(s) cannot resolve an extremum, "
                            f"at least {MIN_EXTREMA_POINTS} are needed")
    steps = np.diff(grid)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise GridTooCoarse("The angle grid must be strictly monotone")
    validate(config_template)

    moments = parallel_map(lambda angle: steady_moments_at(kind, config_template, angle), grid)
    pairs = [_quantity_values(kind, quantity, ms) for ms in moments]
    inter = np.array([np.nan if p[0] is None else p[0] for p in pairs])
    single = np.array([np.nan if p[1] is None else p[1] for p in pairs])
    if np.all(np.isnan(inter)):
        raise GridTooCoarse("The inter-mode quantity is undefined on the whole grid")
    argmax = int(np.nanargmax(inter))
    positions = _crossings(np.diff(single, 2))
    if not positions:
        raise GridTooCoarse("No change of curvature is resolvable on the grid")
    inflection = min(positions, key=lambda position: abs(position - argmax))
    indices = np.arange(len(grid))
    logger.debug("Extremum at index %d, inflections at %s", argmax, positions)
    return ExtremumReport(
        kind=kind,
        quantity=quantity,
        argmax_index=argmax,
        argmax_angle=float(grid[argmax]),
        inflection_position=float(inflection),
        inflection_angle=float(np.interp(inflection, indices, grid)),
        inflections=tuple(float(np.interp(p, indices, grid)) for p in positions),
        separation=abs(argmax - inflection),
    )
