"""
Command line front end: single-point reports, parameter sweeps, figure data, verification runs and derivative
identity checks. Every number it prints comes from the library API.
"""
import argparse
import json
import logging
import math
import os
import sys
from jinja2 import Environment, FileSystemLoader
from gaussduet import __version__, core, oracle, presets, sweep
from gaussduet.analytic import moments as analytic_moments, variances as analytic_variances
from gaussduet.model import Kind, validate
from gaussduet.observables import degrees, verdicts
from gaussduet.relations import all_identities, convergence_order
from gaussduet.types import GaussDuetError, ConfigError
from gaussduet.utils import JSONEncoder, format_float, format_complex, json_dumps
from gaussduet.verify import DEFAULT_COUNT, DEFAULT_SEED, run_verification

logger = logging.getLogger(__name__)

TEMPLATE_DIR = os.path.join(os.path.dirname(__file__), "templates")

# Flags that describe the system, with the values used when neither the command line nor --config gives one
SYSTEM_DEFAULTS = {
    "kind": None,
    "g": 0.0,
    "kappa": 1.0,
    "na": None,
    "ma": None,
    "nb": None,
    "mb": None,
    "n": None,
    "m": None,
    "phi": None,
    "scenario": presets.Scenario.CUSTOM.value,
}
NUMERIC_FLAGS = ("g", "kappa", "na", "ma", "nb", "mb", "n", "m", "phi", "t", "h")
CONFIG_FILE_KEYS = set(SYSTEM_DEFAULTS) | {"t", "steady", "threads", "seed", "count", "h", "mode", "path",
                                           "format", "out", "axis", "set", "quantities", "points"}


def render_template(name, arguments):
    """
    Renders a text report from a template shipped with the package.
    :param name: The template file name
    :param arguments: A dict with the values to use in rendering the template
    :return: The rendered text
    """
    environment = Environment(loader=FileSystemLoader(TEMPLATE_DIR), trim_blocks=True, lstrip_blocks=True,
                              keep_trailing_newline=True)
    environment.filters["num"] = format_float
    environment.policies["json.dumps_kwargs"] = {"cls": JSONEncoder}
    return environment.get_template(name).render(arguments)


def load_config_file(path):
    """
    Reads a flat key-value JSON document whose keys are long flag names.
    :raises ConfigError: When the file is not a JSON object or has unknown keys
    """
    try:
        with open(path) as fp:
            values = json.load(fp)
    except (OSError, ValueError) as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from None
    if not isinstance(values, dict):
        raise ConfigError(f"Config file {path} must contain a JSON object")
    unknown = set(values) - CONFIG_FILE_KEYS
    if unknown:
        raise ConfigError(f"Config file {path} has unknown keys {sorted(unknown)}")
    return {key.replace("-", "_"): value for key, value in values.items()}


def apply_config_file(args):
    """Fills every flag that was not given on the command line from --config, then from the defaults"""
    values = load_config_file(args.config) if getattr(args, "config", None) else {}
    for key, value in values.items():
        if getattr(args, key, None) in (None, []):
            setattr(args, key, value)
    for key, value in SYSTEM_DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    return args


def parse_assignment(text):
    name, sep, value = text.partition("=")
    if not sep:
        raise ConfigError(f"Expected key=value, received '{text}'")
    return name.strip(), sweep.parse_number(value)


def system_parameters(args):
    """The flat parameters given by the system flags and --set, for :func:`gaussduet.sweep.build_config`"""
    params = {"g": float(args.g), "kappa": float(args.kappa)}
    for key in ("na", "ma", "nb", "mb", "n", "m", "phi"):
        value = getattr(args, key)
        if value is not None:
            params[key] = sweep.parse_number(value)
    for assignment in args.set or []:
        key, value = parse_assignment(assignment)
        params[key] = value
    if "psi" in params or "chi" in params:
        params.pop("g")
    return params


def coupling_kind(args, given):
    """
    The kind named by --kind. Without it, a chi parameter selects nonlinear coupling and anything else linear.
    """
    if args.kind is not None:
        return Kind.parse(args.kind)
    return Kind.NONLINEAR if "chi" in given else Kind.LINEAR


def build_system(args):
    params = system_parameters(args)
    return sweep.build_config(args.scenario, coupling_kind(args, params), params)


def evaluation_time(args):
    if args.steady or args.t is None:
        return math.inf
    return sweep.parse_number(args.t)


def _moment_rows(mine, theirs):
    rows = []
    for name in ("pop_a", "pop_b"):
        rows.append((name, format_float(getattr(mine, name)),
                     format_float(getattr(theirs, name)) if theirs else "not evaluated"))
    for name in ("c_aa", "c_bb", "c_adagb", "c_ab"):
        rows.append((name, format_complex(getattr(mine, name)),
                     format_complex(getattr(theirs, name)) if theirs else "not evaluated"))
    return rows


def cmd_moments(args):
    config = build_system(args)
    kind = config.kind
    t = evaluation_time(args)
    report = validate(config)
    ms = analytic_moments(kind, t, config)
    vs = analytic_variances(kind, t, config)
    theirs = deviation = None
    if config.coupling.g <= sweep.ORACLE_MAX_RATIO * config.coupling.kappa:
        theirs = oracle.oracle_moments(config, t)
        deviation = ms.max_deviation(theirs)
    else:
        logger.warning("Coupling ratio above %.0e, the oracle is not evaluated", sweep.ORACLE_MAX_RATIO)
    ratio = config.coupling.g / config.coupling.kappa
    if kind == Kind.LINEAR:
        angle_name, angle = "psi", math.atan(ratio)
    else:
        angle_name, angle = "chi", math.atanh(ratio) if ratio < 1 else None
    deg = degrees(ms)
    result = {
        "kind": kind.value,
        "t": None if t == math.inf else t,
        "steady": t == math.inf,
        "config": config.to_dict(),
        angle_name: angle,
        "analytic": {"moments": ms, "variances": vs, "degrees": deg},
        "oracle": {"moments": theirs, "degrees": degrees(theirs) if theirs else None},
        "max_deviation": deviation,
        "verdicts": verdicts(ms, vs),
    }
    if args.format == "json":
        text = json_dumps(result, indent=2) + "\n"
    else:
        text = render_template("moments.txt.j2", {
            "kind": kind.value,
            "time": "steady state" if t == math.inf else f"t={format_float(t)}",
            "config": config.to_dict(),
            "report": {"mode_a": report.mode_a.value, "mode_b": report.mode_b.value},
            "angle_name": angle_name,
            "angle": angle,
            "moments": _moment_rows(ms, theirs),
            "deviation": deviation,
            "variances": vs.to_dict(),
            "degrees": deg.to_dict(),
            "verdicts": result["verdicts"],
        })
    _emit(text, args.out)
    return 0


def _sweep_spec(args):
    axes = [sweep.Axis.parse(text) for text in args.axis or []]
    params = system_parameters(args)
    names = {axis.name for axis in axes}
    # Flags left at their defaults do not pin a swept parameter
    if "g" in names or args.g == SYSTEM_DEFAULTS["g"] and names & {"psi", "chi"}:
        params.pop("g", None)
    quantities = [q.strip() for q in args.quantities.split(",")] if args.quantities else None
    kind = coupling_kind(args, names | set(params))
    return sweep.SweepSpec(kind, args.scenario, axes, params, quantities, oracle=not args.no_oracle)


def cmd_sweep(args):
    spec = _sweep_spec(args)
    rows = sweep.run_sweep(spec)
    text = sweep.write_rows(args.out, spec.columns, rows, args.format)
    if args.out is None or args.out == "-":
        sys.stdout.write(text)
    return 0


def cmd_figure(args):
    for path in sweep.run_figure(args.id, args.out or ".", points=args.points, fmt=args.format):
        print(path)
    return 0


def cmd_verify(args):
    report = run_verification(seed=args.seed, count=args.count)
    if args.format == "json":
        _emit(json_dumps(report, indent=2) + "\n", args.out)
    else:
        lines = [f"seed={report.seed} count={report.count}"]
        for suite in report.suites:
            status = "ok" if suite.passed else "FAILED"
            lines.append(f"{suite.name:<13} checks={suite.checks:<5} max_residual={suite.max_residual:.3e} "
                         f"tolerance={suite.tolerance:.0e} {status}")
        _emit("\n".join(lines) + "\n", args.out)
    report.raise_for_failure()
    return 0


def cmd_relations(args):
    config = build_system(args)
    results = all_identities(config, h=args.h, path=args.path, mode=args.mode, richardson=args.richardson)
    columns = ["relation", "mode", "path", "angle", "lhs", "rhs", "residual", "step", "order"]
    rows = []
    for result in results:
        row = result.to_dict()
        row["relation"] = result.relation.value
        row["order"] = convergence_order(config.kind, result.relation, config, h=args.h, path=args.path,
                                         mode=args.mode)
        rows.append(row)
    text = sweep.write_rows(None, columns, rows, args.format)
    _emit(text, args.out)
    return 0


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fp:
            fp.write(text)


def _add_system_flags(parser):
    group = parser.add_argument_group("system")
    group.add_argument("--kind", choices=[kind.value for kind in Kind])
    group.add_argument("--scenario", choices=[scenario.value for scenario in presets.Scenario],
                       help="Input-state family; custom uses --na --ma --nb --mb")
    group.add_argument("--g", type=float, help="Coupling strength (rate)")
    group.add_argument("--kappa", type=float, help="Photon loss rate")
    for name, text in (("na", "Occupation of mode a"), ("ma", "Two-photon correlation of mode a"),
                       ("nb", "Occupation of mode b"), ("mb", "Two-photon correlation of mode b"),
                       ("n", "Shared occupation for scenario families"),
                       ("m", "Two-photon correlation for scenario families, sqrt(n(n+1)) when omitted"),
                       ("phi", "Phase of mode a in radians, accepts pi fractions")):
        group.add_argument(f"--{name}", help=text)
    group.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="Any other parameter, for example psi=pi/4 or chi=0.5")
    group.add_argument("--config", help="Flat JSON file with values for the long flags")


def _add_output_flags(parser, formats=("csv", "json")):
    parser.add_argument("--out", help="Output path, standard output when omitted")
    parser.add_argument("--format", choices=formats, default=None)


def build_parser():
    parser = argparse.ArgumentParser(prog="gaussduet", description=__doc__.strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logging")
    parser.add_argument("--threads", type=int, help="Worker cap for grid evaluation")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    moments = commands.add_parser("moments", help="Analytic and oracle report for a single point")
    _add_system_flags(moments)
    times = moments.add_mutually_exclusive_group()
    times.add_argument("--t", help="Evaluation time, in the units of 1/kappa")
    times.add_argument("--steady", action="store_true", default=None, help="Evaluate the steady state")
    _add_output_flags(moments, ("text", "json"))
    moments.set_defaults(handler=cmd_moments, format_default="text")

    sweep_parser = commands.add_parser("sweep", help="Evaluate quantities over one or two parameter axes")
    _add_system_flags(sweep_parser)
    sweep_parser.add_argument("--axis", action="append", metavar="NAME:MIN:MAX:COUNT",
                              help=f"Swept parameter, one of {', '.join(sweep.AXIS_NAMES)}; repeat for two axes")
    sweep_parser.add_argument("--quantities", help="Comma separated output quantities")
    sweep_parser.add_argument("--no-oracle", action="store_true", help="Skip the oracle_maxdev column")
    _add_output_flags(sweep_parser)
    sweep_parser.set_defaults(handler=cmd_sweep, format_default="csv")

    figure = commands.add_parser("figure", help="Write the data set of a figure preset")
    figure.add_argument("id", help=", ".join(sweep.FIGURE_IDS))
    figure.add_argument("--points", type=int, help="Grid points per axis")
    figure.add_argument("--config", help="Flat JSON file with values for the long flags")
    _add_output_flags(figure)
    figure.set_defaults(handler=cmd_figure, format_default="csv")

    verify = commands.add_parser("verify", help="Run the randomized verification suites")
    verify.add_argument("--seed", type=int)
    verify.add_argument("--count", type=int, help="Configurations per coupling kind")
    verify.add_argument("--config", help="Flat JSON file with values for the long flags")
    _add_output_flags(verify, ("text", "json"))
    verify.set_defaults(handler=cmd_verify, format_default="text")

    relations = commands.add_parser("relations", help="Check the derivative identities for one system")
    _add_system_flags(relations)
    relations.add_argument("--h", type=float, help="Finite difference step in the scaled angle")
    relations.add_argument("--mode", choices=("a", "b"))
    relations.add_argument("--path", choices=("analytic", "oracle"))
    relations.add_argument("--richardson", action="store_true", default=None)
    _add_output_flags(relations)
    relations.set_defaults(handler=cmd_relations, format_default="csv")
    return parser


def _finish_defaults(args):
    apply_config_file(args)
    if args.format is None:
        args.format = args.format_default
    for key, value in (("seed", DEFAULT_SEED), ("count", DEFAULT_COUNT), ("mode", "a"), ("path", "analytic"),
                       ("richardson", False), ("steady", False), ("t", None), ("h", None), ("points", None),
                       ("no_oracle", False), ("axis", None), ("set", None), ("quantities", None), ("out", None)):
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    return args


def join_negative_values(argv):
    """
    Rewrites ``--phi -pi/2`` as ``--phi=-pi/2`` for the numeric flags. argparse reads ``-pi/2`` as an option
    because it does not look like a plain negative number.
    """
    result = []
    tokens = iter(argv)
    for token in tokens:
        if token.lstrip("-") in NUMERIC_FLAGS and token.startswith("--") and "=" not in token:
            value = next(tokens, None)
            if value is None:
                result.append(token)
                continue
            if value.startswith("-") and _is_number(value):
                result.append(f"{token}={value}")
            else:
                result.extend((token, value))
        else:
            result.append(token)
    return result


def _is_number(text):
    try:
        sweep.parse_number(text)
    except ConfigError:
        return False
    return True


def configure_logging(verbosity):
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    """
    Runs the command line and returns the exit code: 0 on success, 1 for a verification failure, 2 for usage
    and validation errors and 3 when no steady state exists.
    """
    parser = build_parser()
    argv = join_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    configure_logging(args.verbose)
    threads_changed = False
    try:
        _finish_defaults(args)
        if args.threads is not None:
            core.update_settings({"threads": args.threads})
            threads_changed = True
        return args.handler(args)
    except GaussDuetError as e:
        print(f"gaussduet: {e.message}", file=sys.stderr)
        return e.exit_code
    finally:
        if threads_changed:
            core.reset_settings()


if __name__ == "__main__":
    sys.exit(main())
