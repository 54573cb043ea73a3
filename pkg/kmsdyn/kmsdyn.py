import argparse
import sys

import colorama
from colorama import Fore

from . import __version__
from .config.run_config import FORMATS, RunConfig
from .errors import KmsdynError, UnsupportedClassification
from .reports import commands
from .utils.logging import setup_logger

# Set up logger for main application
logger = setup_logger("kmsdyn")


def _common_parser() -> argparse.ArgumentParser:
    """Flags shared by every subcommand."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--map", help="map specification in z, e.g. 'z^2+c'")
    common.add_argument("--param", action="append", metavar="NAME=VALUE", help="bind a parameter (repeatable)")
    common.add_argument("--preset", help="named map from the presets file")
    common.add_argument("--metric", help="auto, flat, chordal or weighted:<expr>")
    common.add_argument("--region", choices=("julia", "sphere"), help="where critical classes are taken")
    common.add_argument("--depth", type=int, help="backward-tree or iteration depth")
    common.add_argument("--horizon", type=int, help="forward-orbit horizon")
    common.add_argument("--tol", type=float, help="orbit return tolerance")
    common.add_argument("--assume-ce", action="store_true", help="assert the Collet-Eckmann condition")
    common.add_argument(
        "--assume-preperiodic-critical", action="store_true", help="assert critical points lie in the Julia set"
    )
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument("--out", help="output file (standard output for text formats when omitted)")
    common.add_argument("--format", choices=FORMATS, help="output format (default depends on the command)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="kmsdyn", description="KMS-state classification data for rational maps.")
    parser.add_argument("--version", action="version", version=f"kmsdyn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    classify = sub.add_parser("classify", parents=[common], help="orbit, isotropy and consistency at a point")
    classify.add_argument("point", help="point literal, e.g. 0, 1+i or inf")

    census = sub.add_parser("census", parents=[common], help="extremal KMS-state counts")
    census.add_argument("--beta", action="append", required=True, help="inverse temperature (repeatable)")
    census.add_argument("--action", default="gauge", help="gauge, conformal or potential:<expr>")

    phase = sub.add_parser("phase-diagram", parents=[common], help="conformal census over a beta grid")
    phase.add_argument("--beta-min", type=float, required=True)
    phase.add_argument("--beta-max", type=float, required=True)
    phase.add_argument("--steps", type=int, default=41)

    julia = sub.add_parser("julia", parents=[common], help="render the Julia set")
    julia.add_argument("--resolution", type=int)

    pressure = sub.add_parser("pressure", parents=[common], help="pressure samples and the Bowen root")
    pressure.add_argument("--delta", action="append", required=True, help="exponent (repeatable)")
    pressure.add_argument("--estimator", choices=("birkhoff", "ratio"))

    measure = sub.add_parser("measure", parents=[common], help="Lyubich or eigenmeasure cloud")
    measure.add_argument("--kind", choices=("lyubich", "eigenmeasure"), default="lyubich")
    measure.add_argument("--delta", help="exponent of the eigenmeasure")
    return parser


def run(args: argparse.Namespace) -> commands.CommandResult:
    config = RunConfig.from_namespace(args)
    logger.info(f"Running {args.command} for {config.map_spec} (config {config.config_hash})")
    match args.command:
        case "classify":
            result = commands.cmd_classify(config, args.point)
        case "census":
            result = commands.cmd_census(config, args.beta, args.action)
        case "phase-diagram":
            result = commands.cmd_phase_diagram(config, args.beta_min, args.beta_max, args.steps)
        case "julia":
            result = commands.cmd_julia(config, args.resolution)
        case "pressure":
            result = commands.cmd_pressure(config, args.delta, args.estimator)
        case "measure":
            result = commands.cmd_measure(config, args.kind, args.delta)
        case _:
            raise KmsdynError(f"unknown command {args.command!r}")
    commands.emit(result, config)
    return result


def main(argv: list[str] | None = None) -> int:
    """The main function running the program."""
    colorama.init(True)
    args = build_parser().parse_args(argv)
    logger.info(f"Starting kmsdyn {args.command}")
    exit_code = 0
    try:
        result = run(args)
        exit_code = result.exit_code
        if exit_code:
            print(Fore.YELLOW + f"{args.command}: finished with exit code {exit_code}", file=sys.stderr)
    except UnsupportedClassification as e:
        # NOTE: The partial summable-orbit list goes to stderr; --out is not written
        print(Fore.YELLOW + f"Classification not provided: {e}", file=sys.stderr)
        for grand in e.summable_orbits:
            print(Fore.YELLOW + f"  summable orbit at {grand.representative} (VAL_inf {grand.val_infinity})", file=sys.stderr)
        logger.warning(f"Unsupported classification: {e}")
        exit_code = e.exit_code
    except KmsdynError as e:
        print(Fore.RED + f"{type(e).__name__}: {e}", file=sys.stderr)
        logger.error(f"{args.command} failed: {e}", exc_info=True)
        exit_code = e.exit_code
    except Exception as e:
        logger.critical(f"Critical error in main function: {str(e)}", exc_info=True)
        exit_code = 1
    finally:
        logger.info(f"kmsdyn {args.command} terminated with exit code {exit_code}")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
