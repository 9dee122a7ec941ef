"""
Verification harness: runs the structural laws of the dual and of the
derivative calculus over an enumerated family and reports counts plus the
first counterexample.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, Optional, TypeVar

from app.config.settings import get_settings
from app.core.utils import get_logger
from app.core.exceptions import UnsupportedSocleError
from app.models.datum import LanglandsDatum, Parity, Point, RhoLabel, RhoLine
from app.models.halfint import HalfInt
from app.models.schemas import CheckFailure, EnumerationParams, VerificationReport
from app.services.calculus import (
    DerivativeResult,
    admissible_points,
    derivative_at,
    derivative_delta01,
    derivative_z01,
    irreducible_at,
    irreducible_at_generic,
    is_reduced_at,
    socle_at,
    socle_z01,
)
from app.services.classification import classify_line, jantzen_merge, jantzen_split, rank
from app.services.duality import (
    ScanOrder,
    conj,
    delta01_label,
    dual,
    dual_with_order,
    find_candidate,
    mirrored,
    replay,
)
from app.services.enumeration import enumerate_reps
from app.services.parser import format_rep

logger = get_logger(__name__)

MAX_IRREDUCIBILITY_X = HalfInt(7)
ONE = HalfInt.of(1)

T = TypeVar("T")


class _Checker:
    """Collects results for one datum into a report."""

    def __init__(self, report: VerificationReport, position: int, datum: LanglandsDatum):
        self.report = report
        self.position = position
        self.datum = datum

    def check(self, name: str, law: Callable[[], bool], detail: str = "") -> bool:
        try:
            ok = law()
        except Exception as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        self.report.count(name, ok)
        if not ok and self.report.first_failure is None:
            self.report.first_failure = CheckFailure(
                check=name,
                position=self.position,
                datum=format_rep(self.datum),
                detail=detail or "law does not hold",
            )
            logger.warning(
                "verify.failure", check=name, datum=format_rep(self.datum), detail=detail
            )
        return ok

    def attempt(self, name: str, compute: Callable[[], T], detail: str = "") -> Optional[T]:
        """Run ``compute``; an exception counts as a failed ``name`` check."""
        box: list[T] = []

        def law() -> bool:
            box.append(compute())
            return True

        return box[0] if self.check(name, law, detail) else None


def _good_points(datum: LanglandsDatum) -> list[Point]:
    points = []
    for rho in datum.rhos():
        if not rho.is_self_dual:
            continue
        for twice in range(1, MAX_IRREDUCIBILITY_X.twice + 1):
            x = HalfInt(twice)
            if classify_line(RhoLine.through(rho, x), datum.group) is Parity.GOOD:
                points.append(Point(rho, x))
    return points


def _on_integral_line(datum: LanglandsDatum, rho: RhoLabel) -> bool:
    return all(seg.x.is_integral for seg in datum.segments_on(rho)) and all(
        block.d % 2 for block in datum.temp.blocks if block.rho.id == rho.id
    )


def _z01_reduced(datum: LanglandsDatum, rho: RhoLabel) -> bool:
    """Reduced at rho|.|^1 and at every negative rho|.|^z."""
    return is_reduced_at(datum, Point(rho, ONE)) and all(
        is_reduced_at(datum, p) for p in admissible_points(datum) if p.rho.id == rho.id and p.x < 0
    )


def _socle_z01_if_supported(datum: LanglandsDatum, rho: RhoLabel) -> Optional[LanglandsDatum]:
    try:
        return socle_z01(datum, rho, 1)
    except UnsupportedSocleError:
        return None


def check_z01_laws(c: _Checker, datum: LanglandsDatum) -> None:
    """The [0,1]-derivative and socle undo each other wherever both are defined."""
    for rho in datum.rhos():
        if not rho.is_self_dual or not _on_integral_line(datum, rho):
            continue
        if not _z01_reduced(datum, rho):
            continue
        base = c.attempt("z01_derivative", lambda: derivative_z01(datum, rho), f"at {rho.id}")
        if base is None:
            continue
        if base.k:
            c.check(
                "z01_socle_inverse",
                lambda: socle_z01(base.value, rho, base.k, check=False) == datum,
                f"at {rho.id}",
            )
        raised = c.attempt("z01_socle", lambda: _socle_z01_if_supported(datum, rho), f"at {rho.id}")
        if raised is None or not _z01_reduced(raised, rho):
            continue
        c.check(
            "z01_derivative_inverse",
            lambda: derivative_z01(raised, rho) == DerivativeResult(base.k + 1, base.value),
            f"at {rho.id}",
        )


def check_datum_laws(report: VerificationReport, position: int, datum: LanglandsDatum) -> None:
    c = _Checker(report, position, datum)
    report.total += 1

    done = c.attempt("dual", lambda: dual(datum))
    if done is None:
        return
    hat, trace = done

    c.check("split", lambda: jantzen_merge(jantzen_split(datum)) == datum)
    c.check("involution", lambda: dual(hat)[0] == datum)
    c.check("rank", lambda: rank(hat) == rank(datum))
    c.check("order", lambda: dual_with_order(datum, ScanOrder.REVERSED)[0] == hat)
    c.check("replay", lambda: not replay(trace))
    c.check("mirror", lambda: mirrored(trace) == trace)

    for point in admissible_points(datum):
        result = c.attempt("derivative", lambda: derivative_at(datum, point), f"at {point}")
        if result is None:
            continue
        if result.k:
            c.check(
                "commutation",
                lambda: derivative_at(hat, conj(point)) == _dual_of(result),
                f"at {point}",
            )
            c.check(
                "socle_inverse",
                lambda: socle_at(result.value, point, result.k) == datum,
                f"at {point}",
            )
        c.check(
            "derivative_inverse",
            lambda: derivative_at(socle_at(datum, point), point)
            == DerivativeResult(result.k + 1, result.value),
            f"at {point}",
        )

    if not datum.is_tempered and find_candidate(datum) is None:
        rho = delta01_label(datum)
        if rho is not None:
            c.check(
                "delta01_commutation",
                lambda: derivative_z01(hat, rho, check=False)
                == _dual_of(derivative_delta01(datum, rho, check=False)),
                f"at {rho.id}",
            )

    check_z01_laws(c, datum)

    if datum.temp.sigma is None:
        for point in _good_points(datum):
            c.check(
                "irreducibility",
                lambda: irreducible_at(datum, point) == irreducible_at_generic(datum, point),
                f"at {point}",
            )


def _dual_of(result: DerivativeResult) -> DerivativeResult:
    return DerivativeResult(result.k, dual(result.value)[0])


def _verify_slice(payload: Dict[str, Any], index: int, stride: int) -> Dict[str, Any]:
    params = EnumerationParams.model_validate(payload)
    report = VerificationReport(params=params)
    for position, datum in enumerate(enumerate_reps(params)):
        if position % stride == index:
            check_datum_laws(report, position, datum)
    return report.model_dump()


def merge_reports(params: EnumerationParams, parts: list[VerificationReport]) -> VerificationReport:
    merged = VerificationReport(params=params)
    for part in parts:
        merged.total += part.total
        for name, n in part.checks.items():
            merged.checks[name] = merged.checks.get(name, 0) + n
        for name, n in part.failures.items():
            merged.failures[name] = merged.failures.get(name, 0) + n
    firsts = [p.first_failure for p in parts if p.first_failure is not None]
    if firsts:
        merged.first_failure = min(firsts, key=lambda f: f.position)
    return merged


def verify(params: EnumerationParams, workers: Optional[int] = None) -> VerificationReport:
    """Run every law over ``enumerate_reps(params)``; failures are report entries."""
    workers = workers or get_settings().VERIFY_WORKERS
    payload = params.model_dump()
    if workers == 1:
        parts = [_verify_slice(payload, 0, 1)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_verify_slice, payload, i, workers) for i in range(workers)]
            parts = [f.result() for f in futures]
    report = merge_reports(params, [VerificationReport.model_validate(p) for p in parts])
    logger.info(
        "verify.done",
        total=report.total,
        failures=sum(report.failures.values()),
        workers=workers,
        passed=report.passed,
    )
    return report
