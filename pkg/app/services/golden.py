"""Worked examples with known duals, used by the CLI ``golden`` command and the tests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from app.core.utils import get_logger
from app.models.datum import LanglandsDatum
from app.services.duality import DualTrace, dual
from app.services.parser import Declarations, format_rep, parse_rep

logger = get_logger(__name__)


@dataclass(frozen=True)
class GoldenCase:
    name: str
    group: str
    expression: str
    expected: str


GOLDEN_CASES: tuple[GoldenCase, ...] = (
    GoldenCase(
        "ladder L(D[0,-2],D[0,-1];pi(3+)) on Sp_12",
        "Sp",
        "L(D[0,-2],D[0,-1];pi(3+))",
        "L(D[0,-2],D[0,-1];pi(3+))",
    ),
    GoldenCase(
        "tempered with eta = (+,+,+,-,-) on Sp_14",
        "Sp",
        "pi(1+,1+,3+,5-,5-)",
        "L(D[-2,-2],D[-1,-2],D[-1,-1];pi(1-,1-,1-,1-,3+))",
    ),
    GoldenCase(
        "tempered with eta = (-,-,+,-,-) on Sp_14",
        "Sp",
        "pi(1-,1-,3+,5-,5-)",
        "L(D[-2,-2],D[-1,-1],D[0,-2];pi(1-,1-,3+))",
    ),
    GoldenCase(
        "tempered pi(3+,5-,5-) on Sp_12",
        "Sp",
        "pi(3+,5-,5-)",
        "L(D[-2,-2],D[-1,-2],D[-1,-1];pi(1-,1-,3+))",
    ),
)


@dataclass(frozen=True)
class GoldenResult:
    case: GoldenCase
    datum: LanglandsDatum
    expected: LanglandsDatum
    dual: LanglandsDatum
    trace: DualTrace

    @property
    def ok(self) -> bool:
        return self.dual == self.expected

    def line(self, decl: Optional[Declarations] = None) -> str:
        status = "ok" if self.ok else "MISMATCH"
        source, target = format_rep(self.datum, decl), format_rep(self.dual, decl)
        text = f"{status:8} {self.case.name}: {source} -> {target}"
        if not self.ok:
            text += f" (expected {format_rep(self.expected, decl)})"
        return text


def run_golden(case: GoldenCase) -> GoldenResult:
    decl = Declarations.default(case.group)
    datum = parse_rep(case.expression, decl)
    expected = parse_rep(case.expected, decl)
    result, trace = dual(datum)
    outcome = GoldenResult(case, datum, expected, result, trace)
    if not outcome.ok:
        logger.error(
            "golden.mismatch", case=case.name, got=format_rep(result), expected=case.expected
        )
    return outcome


def run_all() -> list[GoldenResult]:
    return [run_golden(case) for case in GOLDEN_CASES]
