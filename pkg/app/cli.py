"""
Command-line front end.

    aubert-dual dual "L(D[0,-2],D[0,-1];pi(3+))" --trace
    aubert-dual derive "pi(3+)" --at 1:1
    aubert-dual socle "pi(1+)" --at 1:-1 --k 2
    aubert-dual derive "L(D[0,-1];pi(1+))" --at delta01
    aubert-dual selftest --max-rank 4 --workers 4

Expressions come from the positional arguments or from ``--input`` (a file
with an optional header and one expression per line; ``-`` reads stdin). A
document starting with ``{`` or ``[`` is read as JSON, so ``--json`` output
feeds back in.
Results go to stdout, logs and errors to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone
from typing import Any, Callable, Optional, Sequence

from app import __version__
from app.config.settings import get_settings
from app.core.exceptions import EXIT_INTERNAL, EXIT_OK, EXIT_VALIDATION, DualityServiceError
from app.core.utils import get_logger, setup_logging
from app.models.datum import LanglandsDatum, Point, RhoLabel
from app.models.schemas import (
    DatumModel,
    DatumResponse,
    DerivativeResponse,
    DualResponse,
    EnumerationParams,
    IrreducibleResponse,
    RankResponse,
    SplitResponse,
    TraceStepModel,
    load_json_document,
    to_json,
)
from app.services import calculus
from app.services.classification import jantzen_split, rank
from app.services.duality import DualTrace, dual, render_trace
from app.services.golden import run_all
from app.services.parser import (
    Declarations,
    format_rep,
    parse_document,
    parse_point,
    split_document,
)
from app.services.verification import verify

logger = get_logger(__name__)

COMMANDS = ("dual", "derive", "socle", "irred", "split", "rank", "selftest", "golden")
SPECIAL_POINTS = ("delta01", "z01")


class Query:
    """Parsed invocation: declarations, targets and the optional point."""

    def __init__(self, args: argparse.Namespace, decl: Declarations, data: list[LanglandsDatum]):
        self.args = args
        self.decl = decl
        self.data = data

    def point(self) -> Point:
        text = self._at()
        rho_id, sep, value = text.rpartition(":")
        if sep and rho_id == "rho" and "rho" not in self.decl.rhos:
            text = value
        return parse_point(text, self.decl)

    def special(self) -> Optional[tuple[str, RhoLabel]]:
        """``delta01[:rho]`` or ``z01[:rho]``."""
        kind, _, rho_id = self._at().partition(":")
        if kind not in SPECIAL_POINTS:
            return None
        return kind, self.decl.rho(rho_id or None)

    def _at(self) -> str:
        if not self.args.at:
            raise argparse.ArgumentTypeError(f"{self.args.command} needs --at rho:x")
        return self.args.at.strip()

    def render(self, datum: LanglandsDatum) -> str:
        return format_rep(datum, self.decl)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aubert-dual",
        description="Zelevinsky-Aubert duals, derivatives and socles for Sp(2n) and SO(2n+1)",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("expressions", nargs="*", help="representation expressions")
    parser.add_argument(
        "--group", choices=("Sp", "SO"), help="overrides the header and DEFAULT_GROUP"
    )
    parser.add_argument("--input", help="file with header and expressions, '-' for stdin")
    parser.add_argument("--json", action="store_true", help="emit JSON instead of text")
    parser.add_argument("--trace", action="store_true", help="print the step table of each dual")
    parser.add_argument(
        "--at", help="point rho:x (x an int or int/2), or delta01[:rho] / z01[:rho]"
    )
    parser.add_argument("--k", type=int, help="socle order")
    parser.add_argument("--max-rank", type=int, default=3, help="selftest rank bound")
    parser.add_argument(
        "--lines", default="", help="selftest lines, comma separated (rho or rho/half)"
    )
    parser.add_argument("--max-block-d", type=int, default=7, help="selftest Jordan block bound")
    parser.add_argument("--workers", type=int, help="selftest processes (default VERIFY_WORKERS)")
    parser.add_argument(
        "--metadata", action="store_true", help="attach version and timing to the output"
    )
    parser.add_argument("--log-level", help="overrides LOG_LEVEL")
    return parser


def _read_document(args: argparse.Namespace) -> str:
    parts = []
    if args.input == "-":
        parts.append(sys.stdin.read())
    elif args.input:
        with open(args.input, encoding="utf-8") as handle:
            parts.append(handle.read())
    parts.extend(args.expressions)
    return "\n".join(parts)


def _emit_json(payload: Any) -> None:
    print(json.dumps(payload, sort_keys=True, ensure_ascii=False))


def _trace_models(trace: DualTrace, q: Query) -> list[TraceStepModel]:
    return [
        TraceStepModel(
            operation=step.kind.value,
            point=str(step.point) if step.point is not None else None,
            k=step.k,
            before=q.render(step.before),
            after=q.render(step.after),
            depth=step.depth,
        )
        for step in trace.steps
    ]


def _datum_model(datum: LanglandsDatum) -> DatumModel:
    return DatumModel.model_validate(to_json(datum))


# commands over expressions


def cmd_dual(q: Query) -> list[dict]:
    out = []
    for datum in q.data:
        result, trace = dual(datum)
        if q.args.json:
            out.append(
                DualResponse(
                    text=q.render(result),
                    datum=_datum_model(result),
                    trace=_trace_models(trace, q) if q.args.trace else [],
                ).model_dump()
            )
            continue
        print(q.render(result))
        if q.args.trace:
            print(render_trace(trace, q.decl))
    return out


def _derive_one(q: Query, datum: LanglandsDatum) -> calculus.DerivativeResult:
    special = q.special()
    if special is None:
        return calculus.derivative_at(datum, q.point())
    kind, rho = special
    if kind == "delta01":
        return calculus.derivative_delta01(datum, rho)
    return calculus.derivative_z01(datum, rho)


def cmd_derive(q: Query) -> list[dict]:
    out = []
    for datum in q.data:
        result = _derive_one(q, datum)
        if q.args.json:
            out.append(
                DerivativeResponse(
                    text=q.render(result.value), datum=_datum_model(result.value), k=result.k
                ).model_dump()
            )
        else:
            print(f"k={result.k} {q.render(result.value)}")
    return out


def cmd_socle(q: Query) -> list[dict]:
    if q.args.k is None:
        raise argparse.ArgumentTypeError("socle needs --k")
    special = q.special()
    out = []
    for datum in q.data:
        if special is None:
            value = calculus.socle_at(datum, q.point(), q.args.k)
        elif special[0] == "z01":
            value = calculus.socle_z01(datum, special[1], q.args.k)
        else:
            raise argparse.ArgumentTypeError("socle supports rho:x or z01[:rho]")
        if q.args.json:
            out.append(DatumResponse(text=q.render(value), datum=_datum_model(value)).model_dump())
        else:
            print(q.render(value))
    return out


def cmd_irred(q: Query) -> list[dict]:
    point = q.point()
    out = []
    for datum in q.data:
        if calculus.point_case(point, datum.group) is calculus.PointCase.GOOD:
            verdict = calculus.irreducible_at(datum, point)
        else:
            verdict = calculus.irreducible_at_generic(datum, point)
        if q.args.json:
            out.append(IrreducibleResponse(irreducible=verdict, point=str(point)).model_dump())
        else:
            print("irreducible" if verdict else "reducible")
    return out


def cmd_split(q: Query) -> list[dict]:
    out = []
    for datum in q.data:
        factors = jantzen_split(datum)
        if q.args.json:
            out.append(
                SplitResponse(
                    factors=[
                        {
                            "parity": f.parity.value,
                            "line": str(f.line) if f.line else None,
                            "text": q.render(f.datum),
                            "datum": to_json(f.datum),
                        }
                        for f in factors
                    ]
                ).model_dump()
            )
            continue
        for f in factors:
            line = f" {f.line}" if f.line else ""
            print(f"{f.parity.value}{line}: {q.render(f.datum)}")
    return out


def cmd_rank(q: Query) -> list[dict]:
    out = []
    for datum in q.data:
        n = rank(datum)
        if q.args.json:
            out.append(RankResponse(rank=n).model_dump())
        else:
            print(n)
    return out


_EXPRESSION_COMMANDS: dict[str, Callable[[Query], list[dict]]] = {
    "dual": cmd_dual,
    "derive": cmd_derive,
    "socle": cmd_socle,
    "irred": cmd_irred,
    "split": cmd_split,
    "rank": cmd_rank,
}


# commands without expressions


def cmd_selftest(args: argparse.Namespace, header: str) -> int:
    lines = [s for s in args.lines.split(",") if s.strip()] or [get_settings().DEFAULT_RHO]
    params = EnumerationParams(
        group=args.group or get_settings().DEFAULT_GROUP,
        header=header,
        lines=lines,
        max_rank=args.max_rank,
        max_block_d=args.max_block_d,
    )
    report = verify(params, args.workers)
    if args.json:
        _emit_json(report.model_dump(mode="json"))
    else:
        print(report.summary())
    return EXIT_OK if report.passed else EXIT_INTERNAL


def cmd_golden(args: argparse.Namespace) -> int:
    results = run_all()
    if args.json:
        _emit_json(
            [
                {
                    "name": r.case.name,
                    "ok": r.ok,
                    "input": r.case.expression,
                    "dual": format_rep(r.dual),
                    "expected": r.case.expected,
                }
                for r in results
            ]
        )
    else:
        for r in results:
            print(r.line())
            if args.trace:
                print(render_trace(r.trace))
    return EXIT_OK if all(r.ok for r in results) else EXIT_INTERNAL


def _metadata(started: float) -> dict[str, Any]:
    return {
        "version": __version__,
        "elapsed_ms": round((time.perf_counter() - started) * 1000, 3),
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def _dispatch(args: argparse.Namespace) -> int:
    document = _read_document(args)
    if args.command == "golden":
        return cmd_golden(args)
    if args.command == "selftest":
        header, _ = split_document(document)
        return cmd_selftest(args, "\n".join(header))

    if document.lstrip().startswith(("{", "[")):
        decl, data = load_json_document(document, args.group)
    else:
        decl, data = parse_document(document, args.group)
    if not data:
        raise argparse.ArgumentTypeError("no expression given")
    out = _EXPRESSION_COMMANDS[args.command](Query(args, decl, data))
    if args.json:
        _emit_json(out[0] if len(out) == 1 else out)
    return EXIT_OK


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Execute one invocation and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)

    started = time.perf_counter()
    try:
        code = _dispatch(args)
    except DualityServiceError as exc:
        logger.debug("cli.error", error=exc.message, details=exc.details)
        print(f"error: {exc.message}", file=sys.stderr)
        if "position" in exc.details:
            print(f"  {exc.details['text']}", file=sys.stderr)
            print("  " + " " * exc.details["position"] + "^", file=sys.stderr)
        return exc.exit_code
    except argparse.ArgumentTypeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    if args.metadata:
        print(json.dumps(_metadata(started), sort_keys=True), file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
