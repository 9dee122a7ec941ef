"""
Zelevinsky-Aubert duals by recursion on highest derivatives.

Each Jantzen factor is handled separately:

1. if some non-self-dual point rho|.|^x has a nonzero highest derivative,
   dualise the derivative and take the socle at the conjugate point;
2. otherwise, if the factor is not tempered, peel off Delta_rho[0,-1] and
   rebuild with Z_rho[0,1] on the dual side;
3. tempered factors are dualised directly (good) or are fixed (bad, ugly).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from app.core.exceptions import InternalConsistencyError, PreconditionError
from app.core.utils import LoggerMixin, get_logger
from app.models.datum import Factor, LanglandsDatum, Parity, Point, RhoLabel
from app.models.halfint import HalfInt
from app.services.arthur import dual_tempered
from app.services.calculus import (
    DerivativeResult,
    admissible_points,
    derivative_at,
    derivative_delta01,
    point_order,
    socle_at,
    socle_z01,
)
from app.services.classification import check_datum, factor_of, jantzen_merge, jantzen_split, rank
from app.services.parser import Declarations, format_rep

logger = get_logger(__name__)


class StepKind(str, Enum):
    DERIVATIVE = "D"
    SOCLE = "S"
    DELTA01 = "D_delta01"
    Z01 = "S_z01"
    TEMPERED = "temp_dual"
    FIXED = "fixed"


class ScanOrder(str, Enum):
    """Order in which candidate points and Step 2 labels are tried."""

    DEFAULT = "default"
    REVERSED = "reversed"


@dataclass(frozen=True, slots=True)
class TraceStep:
    kind: StepKind
    point: Optional[Point]
    k: int
    before: LanglandsDatum
    after: LanglandsDatum
    depth: int = 0


@dataclass
class DualTrace:
    steps: list[TraceStep] = field(default_factory=list)

    def record(
        self,
        kind: StepKind,
        point: Optional[Point],
        k: int,
        before: LanglandsDatum,
        after: LanglandsDatum,
        depth: int,
    ) -> None:
        self.steps.append(TraceStep(kind, point, k, before, after, depth))

    def __len__(self) -> int:
        return len(self.steps)

    def kinds(self) -> list[StepKind]:
        return [step.kind for step in self.steps]


def conj(point: Point) -> Point:
    """rho|.|^x -> rho^v|.|^{-x}"""
    return point.conj()


def _scan(datum: LanglandsDatum, order: ScanOrder) -> Optional[tuple[Point, DerivativeResult]]:
    points = admissible_points(datum)
    if order is ScanOrder.REVERSED:
        points = sorted(points, key=point_order, reverse=True)
    for point in points:
        result = derivative_at(datum, point)
        if result.k:
            return point, result
    return None


def find_candidate(
    f: Factor | LanglandsDatum, order: ScanOrder = ScanOrder.DEFAULT
) -> Optional[tuple[Point, int]]:
    """First admissible point with a nonzero highest derivative, with its order."""
    datum = f.datum if isinstance(f, Factor) else f
    found = _scan(datum, order)
    if found is None:
        return None
    point, result = found
    return point, result.k


def delta01_label(
    datum: LanglandsDatum, order: ScanOrder = ScanOrder.DEFAULT
) -> Optional[RhoLabel]:
    """Self-dual label used by the Delta[0,-1] step: smallest id carrying a segment with x = 0."""
    labels = {
        seg.rho.id: seg.rho for seg in datum.segments if seg.rho.is_self_dual and seg.x == 0
    }
    if not labels:
        return None
    ids = sorted(labels, reverse=order is ScanOrder.REVERSED)
    return labels[ids[0]]


def _descend(before: LanglandsDatum, after: LanglandsDatum, operation: str) -> None:
    if rank(after) >= rank(before):
        logger.error("dual.no_progress", operation=operation, datum=format_rep(before))
        raise InternalConsistencyError(
            f"{operation} did not lower the rank", format_rep(before)
        )


class _Dualiser(LoggerMixin):
    def __init__(self, trace: DualTrace, order: ScanOrder):
        self.trace = trace
        self.order = order

    def run(self, factor: Factor, depth: int = 0) -> LanglandsDatum:
        datum = factor.datum
        found = _scan(datum, self.order)
        if found is not None:
            point, result = found
            return self._via_point(factor, point, result, depth)
        if not datum.is_tempered:
            return self._via_delta01(factor, depth)
        return self._tempered(factor, depth)

    def _via_point(
        self, factor: Factor, point: Point, result: DerivativeResult, depth: int
    ) -> LanglandsDatum:
        datum = factor.datum
        _descend(datum, result.value, f"D at {point}")
        self.logger.debug("dual.candidate", point=str(point), k=result.k, depth=depth)
        self.trace.record(StepKind.DERIVATIVE, point, result.k, datum, result.value, depth)

        inner = self.run(factor.with_datum(result.value), depth + 1)
        target = conj(point)
        out = socle_at(inner, target, result.k)
        self.trace.record(StepKind.SOCLE, target, result.k, inner, out, depth)
        return out

    def _via_delta01(self, factor: Factor, depth: int) -> LanglandsDatum:
        datum = factor.datum
        rho = delta01_label(datum, self.order)
        if rho is None:
            self.logger.error("dual.no_delta01", datum=format_rep(datum))
            raise InternalConsistencyError(
                "reduced non-tempered factor has no segment starting at 0", format_rep(datum)
            )
        point = Point(rho, HalfInt.of(0))
        result = derivative_delta01(datum, rho, check=False)
        _descend(datum, result.value, f"D_delta01 at {rho.id}")
        self.logger.debug("dual.delta01", rho=rho.id, k=result.k, depth=depth)
        self.trace.record(StepKind.DELTA01, point, result.k, datum, result.value, depth)

        inner = self.run(factor.with_datum(result.value), depth + 1)
        out = socle_z01(inner, rho, result.k)
        self.trace.record(StepKind.Z01, point, result.k, inner, out, depth)
        return out

    def _tempered(self, factor: Factor, depth: int) -> LanglandsDatum:
        datum = factor.datum
        if factor.parity is not Parity.GOOD:
            self.trace.record(StepKind.FIXED, None, 0, datum, datum, depth)
            return datum
        try:
            out = dual_tempered(datum.temp, datum.group)
        except PreconditionError as exc:
            raise InternalConsistencyError(
                f"reduced tempered factor fails the tempered-dual hypothesis: {exc.message}",
                format_rep(datum),
            ) from exc
        kind = StepKind.FIXED if out == datum else StepKind.TEMPERED
        self.trace.record(kind, None, 0, datum, out, depth)
        return out


def dual_factor(
    f: Factor, trace: Optional[DualTrace] = None, order: ScanOrder = ScanOrder.DEFAULT
) -> LanglandsDatum:
    return _Dualiser(trace if trace is not None else DualTrace(), order).run(f)


def dual_with_order(d: LanglandsDatum, order: ScanOrder) -> tuple[LanglandsDatum, DualTrace]:
    trace = DualTrace()
    duals = [f.with_datum(dual_factor(f, trace, order)) for f in jantzen_split(d)]
    result = check_datum(jantzen_merge(duals))
    logger.debug("dual.done", steps=len(trace), order=order.value)
    return result, trace


def dual(d: LanglandsDatum) -> tuple[LanglandsDatum, DualTrace]:
    """Zelevinsky-Aubert dual of ``d`` and the steps taken to reach it."""
    return dual_with_order(d, ScanOrder.DEFAULT)


_REPLAYERS: dict[StepKind, Callable[[TraceStep], bool]] = {
    StepKind.DERIVATIVE: lambda s: derivative_at(s.before, s.point)
    == DerivativeResult(s.k, s.after),
    StepKind.SOCLE: lambda s: socle_at(s.before, s.point, s.k) == s.after,
    StepKind.DELTA01: lambda s: derivative_delta01(s.before, s.point.rho, check=False)
    == DerivativeResult(s.k, s.after),
    StepKind.Z01: lambda s: socle_z01(s.before, s.point.rho, s.k) == s.after,
    StepKind.TEMPERED: lambda s: dual_tempered(s.before.temp, s.before.group) == s.after,
    StepKind.FIXED: lambda s: s.before == s.after,
}


def replay(trace: DualTrace) -> list[int]:
    """Re-apply every step; returns the positions whose recorded output is not reproduced."""
    return [i for i, step in enumerate(trace.steps) if not _REPLAYERS[step.kind](step)]


_MIRROR_KINDS = {
    StepKind.DERIVATIVE: StepKind.SOCLE,
    StepKind.SOCLE: StepKind.DERIVATIVE,
    StepKind.DELTA01: StepKind.Z01,
    StepKind.Z01: StepKind.DELTA01,
    StepKind.TEMPERED: StepKind.TEMPERED,
    StepKind.FIXED: StepKind.FIXED,
}


def mirror_step(step: TraceStep) -> TraceStep:
    """The step the dual's own construction takes in place of ``step``.

    S and D trade places (Delta[0,-1] with Z[0,1]), the point is conjugated and
    both ends are replaced by their duals. Every end lies in a single Jantzen factor.
    """
    return TraceStep(
        _MIRROR_KINDS[step.kind],
        conj(step.point) if step.point is not None else None,
        step.k,
        dual_factor(factor_of(step.after)),
        dual_factor(factor_of(step.before)),
        step.depth,
    )


def _factor_blocks(trace: DualTrace) -> list[list[TraceStep]]:
    """Split a trace into the runs of its Jantzen factors; each closes at depth 0."""
    blocks: list[list[TraceStep]] = [[]]
    for step in trace.steps:
        blocks[-1].append(step)
        if step.depth == 0 and step.kind not in (StepKind.DERIVATIVE, StepKind.DELTA01):
            blocks.append([])
    return [block for block in blocks if block]


def mirrored(trace: DualTrace) -> DualTrace:
    """Each factor's steps read backwards through ``mirror_step``.

    A trace produced by ``dual`` equals its mirror.
    """
    out = DualTrace()
    for block in _factor_blocks(trace):
        out.steps.extend(mirror_step(step) for step in reversed(block))
    return out


_STEP_LABELS = {
    StepKind.DERIVATIVE: "D",
    StepKind.SOCLE: "S",
    StepKind.DELTA01: "D_D[0,-1]",
    StepKind.Z01: "S_Z[0,1]",
    StepKind.TEMPERED: "dual_temp",
    StepKind.FIXED: "fixed",
}


def _step_point(step: TraceStep) -> str:
    if step.point is None:
        return "-"
    if step.kind in (StepKind.DELTA01, StepKind.Z01):
        return step.point.rho.id
    return str(step.point)


def render_trace(trace: DualTrace, decl: Optional[Declarations] = None) -> str:
    """One line per step: depth-indented operation, point, order, before -> after."""
    rows = []
    for i, step in enumerate(trace.steps, start=1):
        label = "  " * step.depth + _STEP_LABELS[step.kind]
        rows.append(
            (
                str(i),
                label,
                _step_point(step),
                f"k={step.k}" if step.k else "",
                f"{format_rep(step.before, decl)} -> {format_rep(step.after, decl)}",
            )
        )
    if not rows:
        return ""
    widths = [max(len(row[c]) for row in rows) for c in range(4)]
    lines = []
    for row in rows:
        cells = [row[c].ljust(widths[c]) for c in range(4)] + [row[4]]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)
