"""This module provides reusable command line parsers and tooling."""

import argparse
import logging
import sys
import traceback

from . import __version__
from .error import ConfigError, Error, FileError
from .output import print_error
from .scenario import EXIT_ERROR, FORMATS, ORDERS, parse_config, run_scenario

try:
    import argcomplete
except ImportError:
    argcomplete = None

CONFIG_HELP = "Flags override the corresponding config file values."


def read_config(path):
    """Returns the config file's text; "-" reads stdin."""
    if path is None:
        return ""
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as hdl:
            return hdl.read()
    except OSError as err:
        raise FileError(str(err)) from err


def _set(table, key, value):
    if value is not None:
        table[key] = value


def collect_overrides(args):
    """Maps the command-line flags the user actually gave onto config keys."""
    table = {"scenario": args.scenario}
    _set(table, "n", getattr(args, "qubits", None))
    _set(table, "eps_b", getattr(args, "bath_polarization", None))
    _set(table, "sweep", getattr(args, "sweep", None))
    _set(table, "tol", getattr(args, "tol", None))
    _set(table, "max_iters", getattr(args, "max_iters", None))
    _set(table, "jobs", getattr(args, "jobs", None))

    _set(table, "reset_qubits", getattr(args, "reset_qubits", None))
    _set(table, "order", getattr(args, "order", None))
    _set(table, "driven_qubit", getattr(args, "driven_qubit", None))
    _set(table, "active_pair", getattr(args, "active_pair", None))
    _set(table, "ratio", getattr(args, "ratio", None))

    solomon = {}
    for key in ("rho1", "rho2", "sigma", "s1_eq", "s2_eq", "s1_0", "s2_0", "t_end", "dt"):
        _set(solomon, key, getattr(args, key, None))
    if getattr(args, "free", False):
        solomon["saturated"] = False
    if solomon:
        table["solomon"] = solomon

    output = {}
    _set(output, "path", args.out)
    _set(output, "format", args.format)
    if output:
        table["output"] = output

    return table


def cmd_scenario(args):
    """This function runs a simulation scenario for the command line.

    It merges the config file (if any) with the given flags, validates the
    result, runs the scenario and writes the report.

    Returns 0 in case of success, 1 for configuration, validation and file
    errors, and 2 when a protocol run did not converge. Encountered problems
    are written to stderr.
    """
    try:
        text = read_config(args.config)
        cfg = parse_config(text, collect_overrides(args))
    except ConfigError as err:
        where = f"{args.config}: " if args.config else ""
        print_error(f"error: {where}{err}")
        return EXIT_ERROR
    except Error as err:
        print_error("error: " + str(err))
        return EXIT_ERROR

    try:
        return run_scenario(cfg)
    except Error as err:
        print_error("error: " + str(err))
        return EXIT_ERROR
    except Exception as err:
        print_error("internal error: " + str(err))
        traceback.print_exc(file=sys.stderr)
        return EXIT_ERROR


def add_version_arg(parser):
    parser.add_argument(
        "--version", "-v", action="store_true", help="show version and exit"
    )


def add_verbose_arg(parser):
    parser.add_argument(
        "--verbose",
        "-V",
        action="count",
        default=0,
        help="log progress to stderr; repeat for debug output",
    )


def configure_logging(verbosity):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def _add_common_args(parser, scenario):
    parser.set_defaults(run_cmd=cmd_scenario, scenario=scenario)
    parser.add_argument(
        "--config", "-c", metavar="FILE", help='TOML scenario config; "-" reads stdin'
    )
    parser.add_argument(
        "--out", "-o", metavar="PATH", help="output file; stdout when omitted"
    )
    parser.add_argument(
        "--format", "-f", choices=FORMATS, help="output format (default: json)"
    )


def _add_protocol_args(parser):
    parser.add_argument("--qubits", "-n", type=int, metavar="N", help="register size")
    parser.add_argument(
        "--bath-polarization", "-b", type=float, metavar="X", help="bath polarization eps_b"
    )
    parser.add_argument(
        "--sweep",
        type=float,
        nargs="+",
        metavar="X",
        help="bath polarizations to sweep over, reported in the given order",
    )
    parser.add_argument("--tol", type=float, metavar="T", help="L1 convergence tolerance")
    parser.add_argument(
        "--max-iters", type=int, metavar="M", help="cap on protocol rounds per run"
    )
    parser.add_argument(
        "--jobs", "-j", type=int, metavar="J", help="evaluate sweep points in parallel"
    )


def _add_ppa_args(parser):
    parser.add_argument(
        "--reset-qubits",
        type=int,
        nargs="+",
        metavar="Q",
        help="qubits refreshed from the bath (default: all but qubit 0)",
    )
    parser.add_argument("--order", choices=ORDERS, help="round order")


def _add_noe_args(parser):
    parser.add_argument(
        "--driven-qubit", type=int, metavar="Q", help="saturated qubit (default: 1)"
    )
    parser.add_argument(
        "--active-pair",
        type=int,
        nargs=2,
        metavar=("I", "J"),
        help="basis states equilibrated by the state reset",
    )
    parser.add_argument(
        "--ratio", type=float, metavar="R", help="state-reset ratio (default: e^(4 delta))"
    )


def add_ppa_cmd(parser):
    """This adds the PPA scenario CLI interface to the given argparse parser.
    It registers the cmd_scenario() callback as the parser's run_cmd default."""
    _add_common_args(parser, "ppa")
    _add_protocol_args(parser)
    _add_ppa_args(parser)


def add_noe_cmd(parser):
    """This adds the cross-relaxation scenario CLI interface to the given
    argparse parser."""
    _add_common_args(parser, "noe")
    _add_protocol_args(parser)
    _add_noe_args(parser)


def add_compare_cmd(parser):
    """This adds the PPA vs. cross-relaxation comparison CLI interface to the
    given argparse parser."""
    _add_common_args(parser, "compare")
    _add_protocol_args(parser)
    _add_ppa_args(parser)
    _add_noe_args(parser)


def add_solomon_cmd(parser):
    """This adds the Solomon-equation integration CLI interface to the given
    argparse parser."""
    _add_common_args(parser, "solomon")
    for flag, key, help_ in (
        ("--rho1", "rho1", "relaxation rate of spin 1"),
        ("--rho2", "rho2", "relaxation rate of spin 2"),
        ("--sigma", "sigma", "cross-relaxation rate"),
        ("--s1-eq", "s1_eq", "equilibrium <S_z> of spin 1"),
        ("--s2-eq", "s2_eq", "equilibrium <S_z> of spin 2"),
        ("--s1-0", "s1_0", "initial <S_z> of spin 1 (default: 0)"),
        ("--s2-0", "s2_0", "initial <S_z> of spin 2 (default: 0)"),
        ("--t-end", "t_end", "integration end time"),
        ("--dt", "dt", "integration step"),
    ):
        parser.add_argument(flag, dest=key, type=float, help=help_)
    parser.add_argument(
        "--free", action="store_true", help="don't saturate spin 2"
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hbac", description="A heat-bath algorithmic cooling simulator"
    )
    add_version_arg(parser)
    add_verbose_arg(parser)

    command_parser = parser.add_subparsers(
        title="scenarios",
        help="See `%(prog)s <scenario> -h` for per-scenario usage info. " + CONFIG_HELP,
    )

    sub_parser = command_parser.add_parser(
        "ppa", help="Run the Partner Pairing Algorithm to its steady state"
    )
    add_ppa_cmd(sub_parser)

    sub_parser = command_parser.add_parser(
        "noe", help="Run state-reset + saturation cooling to its steady state"
    )
    add_noe_cmd(sub_parser)

    sub_parser = command_parser.add_parser(
        "solomon", help="Integrate the two-spin cross-relaxation equations"
    )
    add_solomon_cmd(sub_parser)

    sub_parser = command_parser.add_parser(
        "compare", help="Compare PPA and cross-relaxation steady states"
    )
    add_compare_cmd(sub_parser)

    return parser


def main(argv=None):
    parser = build_parser()

    if argcomplete is not None:
        argcomplete.autocomplete(parser)

    args = parser.parse_args(argv)

    if args.version:
        print(__version__)
        return 0

    if "run_cmd" not in args:
        print_error("error: please provide a scenario to run")
        return EXIT_ERROR

    configure_logging(args.verbose)
    return args.run_cmd(args)
