"""
Command-line surface

    certify|bound|simulate|verify|sweep <config> [--test ID]... [--lambda X | --optimize]
        [--out PATH] [--param NAME --range LO:HI --points N --refine]
    fixture example2|example410 --out PATH [--n N] [--nu X]

Every command prints one JSON report on stdout and exits with 0 (certified
or no violation), 1 (not certified or violated) or 2 (inapplicable selection,
invalid configuration or runtime error).
"""

import argparse
import logging
import sys
from typing import Dict, List, Optional, Sequence

from pydantic import ValidationError

from config.settings import NORM_CONFIG
from src.core.errors import ConfigError, NcertError
from src.models.schemas import ErrorReport, Finding, NormKind, Severity, StabilityTest, SweepSpec
from src.observability.logging_config import configure_logging
from src.services.config_service import ConfigService, RunContext
from src.services.fixtures import FIXTURES, generate_fixture
from src.services.report_service import EXIT_ERROR, CertificationService
from src.services.sweep_service import SweepService
from src.utils.serialization import dumps_report

logger = logging.getLogger(__name__)


def _assignment(text: str) -> Dict[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return {name.strip(): float(value)}
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter value {value!r} is not a number")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="JSON run configuration (looked up in fixtures/ if not found)")
    common.add_argument("--norm", choices=NORM_CONFIG["supported"], help="override the configured norm")
    common.add_argument(
        "--set",
        dest="overrides",
        action="append",
        type=_assignment,
        default=[],
        metavar="NAME=VALUE",
        help="override a named parameter before parsing expressions",
    )
    common.add_argument("--log-level", help="logging level (default from LOG_LEVEL)")

    rate = argparse.ArgumentParser(add_help=False)
    group = rate.add_mutually_exclusive_group()
    group.add_argument("--lambda", dest="rate", type=float, help="decay rate for the rate certificate")
    group.add_argument("--optimize", action="store_true", help="search for the largest certifiable decay rate")

    tests = argparse.ArgumentParser(add_help=False)
    tests.add_argument(
        "--test",
        dest="tests",
        action="append",
        choices=[test.value for test in StabilityTest],
        help="stability test to run (repeatable)",
    )

    parser = argparse.ArgumentParser(
        prog="ncert", description="Exponential-stability certificates for linear neutral delay systems"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    certify = commands.add_parser("certify", parents=[common, tests], help="run stability tests")
    certify.add_argument("--lambda", dest="rate", type=float, help="decay rate for thm31/thm31a")

    commands.add_parser("bound", parents=[common, rate], help="exponential solution bound")

    simulate = commands.add_parser("simulate", parents=[common], help="integrate and write the trajectory CSV")
    simulate.add_argument("--out", required=True, help="trajectory CSV path")

    verify = commands.add_parser("verify", parents=[common, rate], help="check a trajectory against the bound")
    verify.add_argument("--out", help="CSV path for the |x(t)| / bound ratio curve")
    verify.add_argument("--m0-scale", dest="m0_scale", type=float, help=argparse.SUPPRESS)

    sweep = commands.add_parser("sweep", parents=[common, tests], help="sweep a named parameter")
    sweep.add_argument("--param", required=True, help="parameter name substituted into expressions")
    sweep.add_argument("--range", dest="value_range", required=True, metavar="LO:HI", help="parameter range")
    sweep.add_argument("--points", type=int, default=20, help="evenly spaced parameter values (default 20)")
    sweep.add_argument("--refine", action="store_true", help="bisect each verdict flip")
    sweep.add_argument("--out", help="sweep CSV path")

    fixture = commands.add_parser("fixture", help="write a shipped example configuration")
    fixture.add_argument("name", choices=FIXTURES, help="example to write")
    fixture.add_argument("--out", required=True, help="JSON configuration path")
    fixture.add_argument("--n", type=int, default=4, help="example2 dimension (default 4)")
    fixture.add_argument("--nu", type=float, default=0.05, help="example410 parameter (default 0.05)")
    fixture.add_argument("--log-level", help="logging level (default from LOG_LEVEL)")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, float]:
    merged: Dict[str, float] = {}
    for item in args.overrides:
        merged.update(item)
    return merged


def _config(args: argparse.Namespace):
    config = ConfigService.load(args.config)
    overrides = _overrides(args)
    if overrides:
        config = ConfigService.with_parameters(config, overrides)
    if args.norm:
        config = config.model_copy(update={"norm": NormKind.parse(args.norm).value})
    return config


def _context(args: argparse.Namespace) -> RunContext:
    return ConfigService.build(_config(args))


def _selected_tests(args: argparse.Namespace) -> Optional[List[StabilityTest]]:
    return [StabilityTest(test) for test in args.tests] if args.tests else None


def cmd_certify(args: argparse.Namespace):
    return CertificationService.certify(_context(args), _selected_tests(args), args.rate)


def cmd_bound(args: argparse.Namespace):
    return CertificationService.bound(_context(args), args.rate, args.optimize)


def cmd_simulate(args: argparse.Namespace):
    return CertificationService.simulate(_context(args), args.out)


def cmd_verify(args: argparse.Namespace):
    return CertificationService.verify(_context(args), args.rate, args.optimize, args.out, args.m0_scale)


def cmd_sweep(args: argparse.Namespace):
    spec = SweepSpec.from_range(args.param, args.value_range, args.points, args.refine)
    return SweepService.sweep(_config(args), spec, _selected_tests(args), args.out)


def cmd_fixture(args: argparse.Namespace):
    return generate_fixture(args.name, args.out, n=args.n, nu=args.nu)


COMMANDS = {
    "certify": cmd_certify,
    "bound": cmd_bound,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "fixture": cmd_fixture,
}


def _error_report(error: Exception) -> ErrorReport:
    return ErrorReport(
        error=str(error),
        kind=type(error).__name__,
        findings=[Finding(severity=Severity.ERROR, message=str(error), quantity="config")]
        if isinstance(error, (ConfigError, ValidationError))
        else [],
        exit_code=EXIT_ERROR,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)

    try:
        report = COMMANDS[args.command](args)
    except (NcertError, ValidationError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        report = _error_report(e)

    print(dumps_report(report))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
