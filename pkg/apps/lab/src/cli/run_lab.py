from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

_SRC = Path(__file__).resolve().parents[1]
_ROOT = Path(__file__).resolve().parents[4]
for _p in (_ROOT, _SRC):
    if str(_p) not in sys.path:
        sys.path.insert(0, str(_p))

from dotenv import load_dotenv  # noqa: E402
from pydantic import ValidationError  # noqa: E402

load_dotenv()

from cli.commands import COMMANDS, dispatch  # noqa: E402
from cli.output import render  # noqa: E402
from config.settings import Settings, get_settings  # noqa: E402
from packages.qubit_core.qubit_core import bloch_from_angles, bloch_from_components  # noqa: E402
from packages.shared.shared.errors import InvalidParameterError, QThermoError  # noqa: E402
from packages.shared.shared.logging import get_logger, setup_logging  # noqa: E402
from packages.shared.shared.types import parse_sign  # noqa: E402
from schemas.documents import RunRequest, ScanDescriptor  # noqa: E402

logger = get_logger("cli")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3

AXES = ("i", "f", "a1", "a2", "b1", "b2")


def _floats(text: str, count: int, what: str) -> Tuple[float, ...]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != count:
        raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers for {what}, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"malformed {what} {text!r}") from exc


def angle_pair(text: str) -> Tuple[float, ...]:
    return _floats(text, 2, "theta,phi")


def components(text: str) -> Tuple[float, ...]:
    return _floats(text, 3, "x,y,z")


def sign(text: str) -> int:
    try:
        return parse_sign(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)

    g = common.add_argument_group("protocol")
    g.add_argument("--energy", type=float, help="level splitting E of the initial Hamiltonian (levels ±E)")
    g.add_argument("--energy-final", type=float, help="E of the final Hamiltonian (default: --energy)")
    g.add_argument("--beta", type=float, help="inverse temperature, >= 0")
    g.add_argument("--time", type=float, help="evolution time for --evolution final-ht")
    g.add_argument("--evolution", choices=["quench", "final-ht", "explicit"])
    g.add_argument("--unitary", type=components, metavar="THETA,PHI,ALPHA",
                   help="explicit U = exp(-i alpha n(theta,phi)·sigma)")
    g.add_argument("--backward-mode", choices=["exact", "initial-ht"])

    # angles are radians; write --axis-f=-1,0 when the first value is negative
    for name in AXES:
        ex = common.add_mutually_exclusive_group()
        ex.add_argument(f"--axis-{name}", type=angle_pair, metavar="THETA,PHI")
        ex.add_argument(f"--axis-{name}-xyz", type=components, metavar="X,Y,Z")
    common.add_argument("--optimal", action="store_true", help="use the reference optimal axes")
    common.add_argument("--convention", choices=["plus", "minus"])

    g = common.add_argument_group("numerics")
    g.add_argument("--order", type=int)
    g.add_argument("--samples", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--workers", type=int)
    g.add_argument("--restarts", type=int)
    g.add_argument("--target", choices=["chsh", "work-bell"])
    g.add_argument("--outcome-n", type=sign)
    g.add_argument("--outcome-m", type=sign)
    g.add_argument("--scan", metavar="PARAM=START:STOP:STEPS")
    g.add_argument("--quantity", choices=["jarzynski", "moment", "taylor", "work-bell", "free-energy"])
    g.add_argument("--check", action="store_true", help="exit 3 when the identity misses its tolerance")
    g.add_argument("--tolerance", type=float)
    g.add_argument("--format", choices=["json", "csv"])
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qthermo-lab",
        description="Single-qubit two-point-measurement thermodynamics laboratory",
    )
    common = _common_parser()
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "selftest":
            p.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    return parser


def request_from_args(args: argparse.Namespace, settings: Settings) -> RunRequest:
    fields: Dict[str, Any] = {"command": args.command}
    for name in AXES:
        angles = getattr(args, f"axis_{name}")
        xyz = getattr(args, f"axis_{name}_xyz")
        if angles is not None:
            fields[f"axis_{name}"] = bloch_from_angles(*angles).as_tuple()
        elif xyz is not None:
            fields[f"axis_{name}"] = bloch_from_components(*xyz).as_tuple()

    for key in (
        "energy", "energy_final", "beta", "time", "evolution", "unitary", "backward_mode",
        "order", "samples", "seed", "workers", "restarts", "target", "outcome_n", "outcome_m",
        "quantity", "convention", "tolerance",
    ):
        value = getattr(args, key)
        if value is not None:
            fields[key] = value
    if args.scan is not None:
        fields["scan"] = ScanDescriptor.parse(args.scan)
    fields["format"] = args.format or settings.OUTPUT.default_format
    fields["optimal"] = args.optimal
    fields["check"] = args.check
    suites: Optional[List[str]] = getattr(args, "suite", None)
    if suites:
        fields["suites"] = tuple(suites)
    return RunRequest(**fields)


def run(argv: Optional[Sequence[str]] = None) -> int:
    settings = get_settings()
    setup_logging(settings.LOGGING.level, json_lines=settings.LOGGING.json_lines)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK

    try:
        req = request_from_args(args, settings)
        logger.debug("request: %s", req.echo())
        outcome = dispatch(req, settings)
        text = render(outcome.document, req.format)
    except (InvalidParameterError, ValidationError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QThermoError as exc:
        print(f"{parser.prog} {args.command}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    sys.stdout.write(text)
    sys.stdout.flush()
    for failure in outcome.failures:
        print(f"{parser.prog} {args.command}: {failure}", file=sys.stderr)
    return EXIT_VALIDATION if outcome.failures else EXIT_OK


def main() -> None:
    raise SystemExit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
