"""
Parameter sweeps and figure presets. A sweep evaluates the analytic path over a grid of one or two
parameters, compares every point with the oracle and produces flat rows for tabular output.
"""
from dataclasses import dataclass, field, asdict
from itertools import product
from typing import Dict, List, Optional, Tuple
import csv
import io
import logging
import math
import os
import numpy as np
from gaussduet import analytic, core, oracle, presets
from gaussduet.model import Kind, CouplingConfig, ideal_m
from gaussduet.observables import degrees
from gaussduet.relations import MIN_EXTREMA_POINTS, locate_extrema
from gaussduet.types import ConfigError
from gaussduet.utils import format_float, json_dumps, parallel_map

logger = logging.getLogger(__name__)

AXIS_NAMES = ("t", "psi", "chi", "g", "n", "phi")
PARAMETER_NAMES = AXIS_NAMES + ("kappa", "m", "na", "ma", "nb", "mb")

# Couplings above this ratio are left to the analytic path; the Lyapunov system becomes too ill-conditioned
ORACLE_MAX_RATIO = 1e4

MOMENT_QUANTITIES = ("pop_a", "pop_b",
                     "c_aa_re", "c_aa_im", "abs_c_aa", "c_bb_re", "c_bb_im", "abs_c_bb",
                     "c_adagb_re", "c_adagb_im", "abs_c_adagb", "c_ab_re", "c_ab_im", "abs_c_ab")
VARIANCE_QUANTITIES = ("xx_a", "yy_a", "xy_a", "xx_b", "yy_b", "xy_b")
DEGREE_QUANTITIES = ("eta_aa", "eta_bb", "gamma_ab", "eta_ab", "visibility")
ENVELOPE_QUANTITIES = ("w", "u", "angle")
QUANTITIES = MOMENT_QUANTITIES + VARIANCE_QUANTITIES + DEGREE_QUANTITIES + ENVELOPE_QUANTITIES
DEFAULT_OUTPUTS = ("pop_a", "pop_b", "abs_c_aa", "abs_c_bb", "abs_c_adagb", "abs_c_ab") + DEGREE_QUANTITIES

UNITS = {
    "t": "time", "g": "rate", "kappa": "rate",
    "psi": "rad", "chi": "rad", "phi": "rad", "angle": "rad",
    "n": "photons", "m": "photons", "na": "photons", "ma": "photons", "nb": "photons", "mb": "photons",
    "series": "label",
}
UNITS.update({name: "photons" for name in MOMENT_QUANTITIES})
UNITS.update({name: "quadrature^2" for name in VARIANCE_QUANTITIES})
UNITS.update({name: "1" for name in DEGREE_QUANTITIES + ("w", "u", "oracle_maxdev")})


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int

    @classmethod
    def parse(cls, text):
        """
        Parses ``name:min:max:count``. Angles accept ``pi`` fractions such as ``pi/2``.
        """
        parts = text.split(":")
        if len(parts) != 4:
            raise ConfigError(f"Axis '{text}' must have the form name:min:max:count")
        name, low, high, count = parts
        try:
            count = int(count)
        except ValueError:
            raise ConfigError(f"Axis '{text}' has a non-integer count") from None
        return cls(name.strip(), parse_number(low), parse_number(high), count)

    def values(self):
        return np.linspace(self.min, self.max, self.count).tolist()

    def to_dict(self):
        return asdict(self)


def parse_number(text):
    """
    Reads a float, allowing ``pi`` and simple fractions or multiples of it (``pi/2``, ``0.25*pi``).
    """
    if isinstance(text, (int, float)):
        return float(text)
    cleaned = str(text).strip().lower().replace(" ", "")
    try:
        return float(cleaned)
    except ValueError:
        pass
    if "pi" not in cleaned:
        raise ConfigError(f"Cannot read '{text}' as a number")
    factor, _, divisor = cleaned.partition("/")
    factor = factor.replace("*pi", "").replace("pi*", "").replace("pi", "")
    try:
        sign = {"": 1.0, "+": 1.0, "-": -1.0}.get(factor)
        value = (float(factor) if sign is None else sign) * math.pi
        return value / float(divisor) if divisor else value
    except ValueError:
        raise ConfigError(f"Cannot read '{text}' as a number") from None


@dataclass(frozen=True)
class SweepSpec:
    kind: Kind
    scenario: presets.Scenario
    axes: Tuple[Axis, ...]
    fixed: Dict[str, float] = field(default_factory=dict)
    outputs: Tuple[str, ...] = DEFAULT_OUTPUTS
    oracle: bool = True

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind.parse(self.kind))
        try:
            object.__setattr__(self, "scenario", presets.Scenario(self.scenario))
        except ValueError:
            raise ConfigError(f"Unknown scenario '{self.scenario}'") from None
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "outputs", tuple(self.outputs or DEFAULT_OUTPUTS))
        self.check()

    def check(self):
        if len(self.axes) not in (1, 2):
            raise ConfigError(f"A sweep needs one or two axes, received {len(self.axes)}")
        names = [axis.name for axis in self.axes]
        for axis in self.axes:
            if axis.name not in AXIS_NAMES:
                raise ConfigError(f"Unknown axis '{axis.name}', expected one of {', '.join(AXIS_NAMES)}")
            if axis.count < 2:
                raise ConfigError(f"Axis '{axis.name}' needs at least 2 points")
        if len(set(names)) != len(names):
            raise ConfigError("Axis names must be distinct")
        overlap = set(names) & set(self.fixed)
        if overlap:
            raise ConfigError(f"Parameters {sorted(overlap)} are both swept and fixed")
        unknown = set(self.fixed) - set(PARAMETER_NAMES)
        if unknown:
            raise ConfigError(f"Unknown fixed parameters {sorted(unknown)}")
        unknown = [name for name in self.outputs if name not in QUANTITIES]
        if unknown:
            raise ConfigError(f"Unknown output quantities {unknown}")
        check_coupling_keys(self.kind, set(names) | set(self.fixed))

    @property
    def columns(self):
        return [axis.name for axis in self.axes] + list(self.outputs) + ["oracle_maxdev"]

    def points(self):
        """Grid points in row order, the first axis varying slowest"""
        names = [axis.name for axis in self.axes]
        for values in product(*(axis.values() for axis in self.axes)):
            yield dict(zip(names, values))

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "scenario": self.scenario.value,
            "axes": [axis.to_dict() for axis in self.axes],
            "fixed": dict(self.fixed),
            "outputs": list(self.outputs),
        }


def check_coupling_keys(kind, given):
    """
    Rejects a scaled angle that belongs to the other coupling kind, or a coupling given more than once.
    :raises ConfigError: psi with nonlinear coupling, chi with linear coupling, or two of g, psi and chi
    """
    if "psi" in given and kind != Kind.LINEAR:
        raise ConfigError("psi is the linear coupling angle; use chi for nonlinear coupling")
    if "chi" in given and kind != Kind.NONLINEAR:
        raise ConfigError("chi is the nonlinear coupling angle; use psi for linear coupling")
    if len(set(given) & {"psi", "chi", "g"}) > 1:
        raise ConfigError("Give the coupling either as g or as its scaled angle, not both")


def build_config(scenario, kind, params):
    """
    Builds a SystemConfig from the flat parameter names used by sweeps: n, m (or na, ma, nb, mb), phi,
    kappa and the coupling given as g, psi or chi.
    :raises ConfigError: When the coupling keys contradict *kind* or the scenario is missing a parameter
    """
    params = dict(params)
    kind = Kind.parse(kind)
    check_coupling_keys(kind, params)
    kappa = float(params.pop("kappa", 1.0))
    if "psi" in params:
        coupling = CouplingConfig.from_angle(Kind.LINEAR, params.pop("psi"), kappa)
    elif "chi" in params:
        coupling = CouplingConfig.from_angle(Kind.NONLINEAR, params.pop("chi"), kappa)
    else:
        coupling = CouplingConfig(kind, params.pop("g", 0.0), kappa)
    phi = params.pop("phi", 0.0)
    scenario = presets.Scenario(scenario)
    try:
        if scenario == presets.Scenario.EQUAL_SQUEEZED:
            config = presets.equal_squeezed(params.pop("n"), params.pop("m", None), phi, coupling)
        elif scenario == presets.Scenario.EQUAL_POP_UNEQUAL_SQUEEZE:
            config = presets.equal_pop_unequal_squeeze(params.pop("n"), params.pop("ma"), params.pop("mb"),
                                                       phi, coupling)
        elif scenario == presets.Scenario.SQUEEZED_PLUS_VACUUM:
            n_a = params.pop("n") if "n" in params else params.pop("na")
            m_a = params.pop("m") if "m" in params else params.pop("ma", None)
            config = presets.squeezed_plus_vacuum(n_a, m_a, phi, coupling)
        elif scenario == presets.Scenario.SQUEEZED_PLUS_THERMAL:
            m_a = params.pop("m") if "m" in params else params.pop("ma", None)
            config = presets.squeezed_plus_thermal(params.pop("n"), m_a, phi, coupling)
        else:
            config = presets.custom(params.pop("na", 0.0), params.pop("ma", 0.0), params.pop("nb", 0.0),
                                    params.pop("mb", 0.0), phi, coupling)
    except KeyError as e:
        raise ConfigError(f"Scenario '{scenario.value}' requires the parameter {e.args[0]}") from None
    params.pop("t", None)
    if params:
        raise ConfigError(f"Parameters {sorted(params)} do not apply to scenario '{scenario.value}'")
    return config


def evaluate_point(kind, scenario, params, outputs, with_oracle=True):
    """
    Evaluates the requested quantities at one parameter point. The time is taken from ``t`` and defaults to the
    steady state.
    :return: A dict keyed by quantity name, plus ``oracle_maxdev``
    """
    t = float(params.get("t", math.inf))
    config = build_config(scenario, kind, params)
    moments = analytic.moments(kind, t, config)
    record = moments.flatten()
    if set(outputs) & set(VARIANCE_QUANTITIES):
        record.update(analytic.variances(kind, t, config).to_dict())
    if set(outputs) & set(DEGREE_QUANTITIES):
        record.update(degrees(moments).to_dict())
    if set(outputs) & set(ENVELOPE_QUANTITIES):
        record.update(analytic.envelopes(kind, t, config.coupling).to_dict())
        ratio = config.coupling.g / config.coupling.kappa
        record["angle"] = math.atan(ratio) if config.kind == Kind.LINEAR else (
            math.atanh(ratio) if ratio < 1 else None)
    result = {name: record[name] for name in outputs}
    result["oracle_maxdev"] = None
    if with_oracle and config.coupling.g <= ORACLE_MAX_RATIO * config.coupling.kappa:
        result["oracle_maxdev"] = moments.max_deviation(oracle.oracle_moments(config, t), relative=True)
    return result


def run_sweep(spec: SweepSpec, extra_columns=None):
    """
    Evaluates every grid point of a sweep, concurrently, and returns the rows in grid order.
    """
    extra_columns = extra_columns or {}
    points = list(spec.points())
    logger.info("Sweeping %d points (%s)", len(points), ", ".join(axis.name for axis in spec.axes))

    def evaluate(point):
        values = evaluate_point(spec.kind, spec.scenario, {**spec.fixed, **point}, spec.outputs, spec.oracle)
        return {**extra_columns, **point, **values}

    return parallel_map(evaluate, points)


def header(columns):
    return [f"{name} [{UNITS.get(name, '1')}]" for name in columns]


def _cell(value):
    return value if isinstance(value, str) else format_float(value)


def rows_to_csv(columns, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header(columns))
    for row in rows:
        writer.writerow([_cell(row.get(name)) for name in columns])
    return buffer.getvalue()


def rows_to_json(columns, rows):
    return json_dumps([{name: row.get(name) for name in columns} for row in rows]) + "\n"


def write_rows(path, columns, rows, fmt="csv"):
    if fmt not in ("csv", "json"):
        raise ConfigError(f"Unknown output format '{fmt}'")
    text = rows_to_csv(columns, rows) if fmt == "csv" else rows_to_json(columns, rows)
    if path is None or path == "-":
        return text
    with open(path, "w", newline="") as fp:
        fp.write(text)
    return text


@dataclass(frozen=True)
class FigurePreset:
    id: str
    description: str
    kind: Kind
    scenario: presets.Scenario
    axes: Tuple[Axis, ...]
    fixed: Dict[str, float]
    outputs: Tuple[str, ...]
    series: Tuple[Tuple[str, Dict[str, float]], ...] = ()
    extrema: Optional[str] = None

    def specs(self):
        """One SweepSpec per series, paired with its label (None without series)"""
        if not self.series:
            return [(None, SweepSpec(self.kind, self.scenario, self.axes, self.fixed, self.outputs))]
        return [(label, SweepSpec(self.kind, self.scenario, self.axes, {**self.fixed, **overrides}, self.outputs))
                for label, overrides in self.series]

    def to_dict(self):
        return {
            "id": self.id,
            "description": self.description,
            "kind": self.kind.value,
            "scenario": self.scenario.value,
            "axes": [axis.to_dict() for axis in self.axes],
            "fixed": dict(self.fixed),
            "outputs": list(self.outputs),
            "series": [{"label": label, **overrides} for label, overrides in self.series],
        }


def figure_presets(points=None):
    """
    The figure reproduction presets, with *points* samples per axis (defaults to the *grid_points* setting).
    """
    points = int(core.setting("grid_points", points))
    half_pi = math.pi / 2
    # Linear time-dependent sweeps stay below ψ = π/2, where g = κ·tanψ diverges
    psi_full = Axis("psi", 0.0, half_pi, points)
    psi_open = Axis("psi", 0.0, half_pi - 0.01, points)
    chi = Axis("chi", 0.0, 3.0, points)
    n_axis = Axis("n", 0.05, 3.0, points)
    ideal = ideal_m(0.1)
    return {
        "fig2a": FigurePreset(
            "fig2a", "Populations and single-mode correlations against psi, squeezed mode a and vacuum mode b",
            Kind.LINEAR, presets.Scenario.SQUEEZED_PLUS_VACUUM, (psi_full,), {"n": 0.5, "phi": 0.0},
            ("pop_a", "pop_b", "abs_c_aa", "abs_c_bb")),
        "fig3u": FigurePreset(
            "fig3u", "Steady single-mode degree eta_aa against psi and n, equal ideally squeezed modes",
            Kind.LINEAR, presets.Scenario.EQUAL_SQUEEZED, (psi_open, n_axis), {"phi": half_pi},
            ("eta_aa", "eta_bb", "xx_a")),
        "fig3": FigurePreset(
            "fig3", "Visibility against kappa*t and psi, mode b in the vacuum",
            Kind.LINEAR, presets.Scenario.SQUEEZED_PLUS_VACUUM, (Axis("t", 0.0, 5.0, points), psi_open),
            {"n": 0.5, "phi": 0.0}, ("visibility",)),
        "fig5": FigurePreset(
            "fig5", "Steady variances of the squeezed quadratures against n and chi",
            Kind.NONLINEAR, presets.Scenario.EQUAL_SQUEEZED, (n_axis, chi), {"phi": 0.0},
            ("yy_a", "yy_b")),
        "fig6": FigurePreset(
            "fig6", "First-order coherence gamma_ab against chi and n, equal ideally squeezed modes",
            Kind.NONLINEAR, presets.Scenario.EQUAL_SQUEEZED, (chi, n_axis), {"phi": 0.0},
            ("gamma_ab",)),
        "fig7": FigurePreset(
            "fig7", "Inter-mode two-photon degree eta_ab against chi and n, equal ideally squeezed modes",
            Kind.NONLINEAR, presets.Scenario.EQUAL_SQUEEZED, (chi, n_axis), {"phi": 0.0},
            ("eta_ab",)),
        "fig8a": FigurePreset(
            "fig8a", "Populations and |<a+b>| against psi, squeezed mode a (n=0.1) and vacuum mode b",
            Kind.LINEAR, presets.Scenario.SQUEEZED_PLUS_VACUUM, (psi_full,), {"n": 0.1, "phi": half_pi},
            ("pop_a", "pop_b", "abs_c_adagb"), extrema="onePhoton"),
        "fig8b": FigurePreset(
            "fig8b", "Two-photon degrees eta_ab and eta_aa against psi, equal squeezed modes with n=0.1",
            Kind.LINEAR, presets.Scenario.EQUAL_SQUEEZED, (psi_full,), {"n": 0.1, "phi": half_pi},
            ("eta_ab", "eta_aa", "eta_bb"),
            series=(("m=sqrt(n(n+1))", {"m": ideal}), ("m=n", {"m": 0.1})), extrema="degrees"),
    }


FIGURE_IDS = ("fig2a", "fig3u", "fig3", "fig5", "fig6", "fig7", "fig8a", "fig8b")


def run_figure(figure_id, out_dir, points=None, fmt="csv"):
    """
    Writes ``<id>.csv`` (or ``.json``) and ``<id>.meta.json`` into *out_dir*.
    :return: The paths written
    """
    presets_by_id = figure_presets(points)
    if figure_id not in presets_by_id:
        raise ConfigError(f"Unknown figure '{figure_id}', expected one of {', '.join(FIGURE_IDS)}")
    preset = presets_by_id[figure_id]
    rows, columns, extrema = [], None, []
    for label, spec in preset.specs():
        extra = {} if label is None else {"series": label}
        rows.extend(run_sweep(spec, extra))
        columns = (["series"] if label is not None else []) + spec.columns
        if preset.extrema:
            axis = spec.axes[0]
            grid = Axis(axis.name, axis.min, axis.max, max(axis.count, MIN_EXTREMA_POINTS))
            template = build_config(spec.scenario, spec.kind, spec.fixed)
            report = locate_extrema(spec.kind, preset.extrema, template, grid.values())
            extrema.append({"series": label, **report.to_dict()})
    os.makedirs(out_dir, exist_ok=True)
    data_path = os.path.join(out_dir, f"{figure_id}.{fmt}")
    meta_path = os.path.join(out_dir, f"{figure_id}.meta.json")
    write_rows(data_path, columns, rows, fmt)
    meta = {**preset.to_dict(), "grid_points": preset.axes[0].count, "rows": len(rows)}
    if extrema:
        meta["extrema"] = extrema
    with open(meta_path, "w") as fp:
        fp.write(json_dumps(meta, indent=2, sort_keys=True) + "\n")
    logger.info("Wrote %s and %s", data_path, meta_path)
    return data_path, meta_path
