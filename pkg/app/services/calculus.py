"""
Highest derivatives and socles of Langlands data.

A point rho|.|^x falls in one of four cases: ugly (rho not self-dual),
negative (x < 0), positive on a good line, positive on a bad line.
x = 0 on a self-dual line is reached only through the Delta_rho[0,-1] and
Z_rho[0,1] operations.
"""

from __future__ import annotations

from contextvars import ContextVar
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Union

from app.config.settings import get_settings
from app.core.exceptions import (
    InternalConsistencyError,
    PreconditionError,
    UnsupportedPointError,
    UnsupportedSocleError,
)
from app.core.utils import get_logger
from app.models.datum import (
    Factor,
    GroupType,
    LanglandsDatum,
    Parity,
    Point,
    RhoLabel,
    RhoLine,
    Segment,
    TemperedData,
)
from app.models.halfint import HalfInt
from app.services.arthur import (
    AParamForm,
    from_aparam,
    lowered,
    m_psi_effective,
    normalized,
    soc_special,
    to_aparam,
)
from app.services.classification import classify_line, rank, validation_errors
from app.services.matching import MatchResult, OrderedIndexSet, best_match
from app.services.parser import format_rep

logger = get_logger(__name__)

Target = Union[Factor, LanglandsDatum]

ONE = HalfInt.of(1)


class PointCase(str, Enum):
    UGLY = "ugly"
    NEGATIVE = "negative"
    GOOD = "positive-good"
    BAD = "positive-bad"


@dataclass(frozen=True, slots=True)
class DerivativeResult:
    """Highest derivative: its order ``k`` and the derivative itself."""

    k: int
    value: LanglandsDatum


def as_datum(pi: Target) -> LanglandsDatum:
    return pi.datum if isinstance(pi, Factor) else pi


def point_case(point: Point, group: GroupType) -> PointCase:
    if not point.rho.is_self_dual:
        return PointCase.UGLY
    if point.x == 0:
        raise UnsupportedPointError(
            str(point), "x = 0 on a self-dual line; use the [0,-1] and [0,1] operations"
        )
    if point.x < 0:
        return PointCase.NEGATIVE
    parity = classify_line(RhoLine.through(point.rho, point.x), group)
    return PointCase.GOOD if parity is Parity.GOOD else PointCase.BAD


def point_order(point: Point) -> tuple:
    """Scan order: line, |x| descending, positive before negative."""
    line = RhoLine.through(point.rho, point.x)
    return (line.key, -abs(point.x).twice, 0 if point.x > 0 else 1, point.rho.id)


def _checked(value: LanglandsDatum, operation: str) -> LanglandsDatum:
    errors = validation_errors(value)
    if errors:
        logger.error("calculus.invalid_output", operation=operation, datum=format_rep(value))
        raise InternalConsistencyError(
            f"{operation} produced an invalid datum: {'; '.join(errors)}", format_rep(value)
        )
    return value


# ---------------------------------------------------------------------------
# index sets


def _segments_for(datum: LanglandsDatum, rho: RhoLabel) -> list[Segment]:
    """Segments of ``datum``, with those on the pair of a non-self-dual rho written over rho."""
    if rho.is_self_dual:
        return list(datum.segments)
    pair = (rho.id, rho.dual_id)
    return [seg.rebased(rho) if seg.rho.id in pair else seg for seg in datum.segments]


def _indices(segs: Sequence[Segment], rho: RhoLabel, keep: Callable[[Segment], bool]) -> list[int]:
    return [i for i, seg in enumerate(segs) if seg.rho.id == rho.id and keep(seg)]


def _a_match(segs: Sequence[Segment], rho: RhoLabel, x: HalfInt) -> MatchResult:
    """f: A_{x-1}^0 -> A_x^0 where A_z = {x_i = z} ordered by y, and a' ~> a iff y_a' > y_a."""
    by_y = lambda i: segs[i].y  # noqa: E731
    lower = OrderedIndexSet.build(_indices(segs, rho, lambda s: s.x == x - 1), by_y)
    upper = OrderedIndexSet.build(_indices(segs, rho, lambda s: s.x == x), by_y)
    return best_match(lower, upper, lambda b, a: segs[b].y > segs[a].y)


def _b_match(segs: Sequence[Segment], rho: RhoLabel, x: HalfInt) -> MatchResult:
    """g: B_{x-1}^0 -> B_x^0 with B_z = {y_i = -z} ordered by -x, and b' ~> b iff x_b' < x_b."""
    by_x = lambda i: -segs[i].x  # noqa: E731
    lower = OrderedIndexSet.build(_indices(segs, rho, lambda s: s.y == -(x - 1)), by_x)
    upper = OrderedIndexSet.build(_indices(segs, rho, lambda s: s.y == -x), by_x)
    return best_match(lower, upper, lambda b, a: segs[b].x < segs[a].x)


def _assemble(
    group: GroupType,
    segs: Sequence[Optional[Segment]],
    temp: TemperedData,
    extra: Sequence[Segment] = (),
) -> LanglandsDatum:
    kept = tuple(seg for seg in segs if seg is not None)
    return LanglandsDatum(group, kept + tuple(extra), temp)


# ---------------------------------------------------------------------------
# ugly and negative points


def _derive_negative(datum: LanglandsDatum, point: Point) -> DerivativeResult:
    rho, x = point.rho, point.x
    segs = _segments_for(datum, rho)
    match = _a_match(segs, rho, x)
    out: list[Optional[Segment]] = list(segs)
    for i in match.bc:
        out[i] = Segment.maybe(rho, x - 1, segs[i].y)
    return DerivativeResult(len(match.bc), _assemble(datum.group, out, datum.temp))


def _socle_negative(datum: LanglandsDatum, point: Point) -> LanglandsDatum:
    rho, x = point.rho, point.x
    segs = _segments_for(datum, rho)
    match = _a_match(segs, rho, x)
    if match.ac:
        a = match.ac.minimum()
        segs[a] = Segment(rho, x, segs[a].y)
        return _assemble(datum.group, segs, datum.temp)
    return _assemble(datum.group, segs, datum.temp, [Segment(rho, x, x)])


# ---------------------------------------------------------------------------
# positive points


@dataclass(frozen=True)
class _Positive:
    """Segments split into the ladders Delta_rho[x-1,-x]^t and the rest.

    Also carries the A and B matchings.
    """

    rho: RhoLabel
    x: HalfInt
    rest: tuple[Segment, ...]
    t: int
    f: MatchResult
    g: MatchResult

    @property
    def ladder(self) -> Segment:
        return Segment(self.rho, self.x - 1, -self.x)

    @property
    def v(self) -> int:
        """|A_{x-1}^c|"""
        return len(self.f.ac)

    @property
    def s(self) -> int:
        """|B_x^c|"""
        return len(self.g.bc)

    def lowered_segments(self, threshold: int) -> list[Optional[Segment]]:
        """x_i -> x-1 on A_x^c; y_i -> -(x-1) on the j-th element of B_x^c once j > threshold."""
        out: list[Optional[Segment]] = list(self.rest)
        for i in self.f.bc:
            out[i] = Segment.maybe(self.rho, self.x - 1, self.rest[i].y)
        for j, i in enumerate(self.g.bc, start=1):
            if j > threshold:
                out[i] = Segment.maybe(self.rho, self.rest[i].x, -(self.x - 1))
        return out


def _positive(datum: LanglandsDatum, point: Point) -> _Positive:
    rho, x = point.rho, point.x
    ladder = Segment(rho, x - 1, -x)
    rest = tuple(seg for seg in datum.segments if seg != ladder)
    return _Positive(
        rho=rho,
        x=x,
        rest=rest,
        t=len(datum.segments) - len(rest),
        f=_a_match(rest, rho, x),
        g=_b_match(rest, rho, x),
    )


def _socle_outer(datum: LanglandsDatum, ctx: _Positive, case: str) -> LanglandsDatum:
    """Cases (a), (c), (d): promote A_{x-1}^c, extend B_{x-1}^c, or insert rho|.|^{-x}."""
    rho, x = ctx.rho, ctx.x
    out = list(ctx.rest)
    extra = [ctx.ladder] * ctx.t
    if case == "a":
        i = ctx.f.ac.minimum()
        out[i] = Segment(rho, x, out[i].y)
    elif case == "c":
        i = ctx.g.ac.minimum()
        out[i] = Segment(rho, out[i].x, -x)
    else:
        extra.append(Segment(rho, -x, -x))
    return _assemble(datum.group, out, datum.temp, extra)


def _derive_good(datum: LanglandsDatum, point: Point) -> DerivativeResult:
    ctx = _positive(datum, point)
    a = to_aparam(ctx.t, datum.temp, ctx.x, ctx.rho, datum.group)
    m, m_prime, v = a.m, a.m_prime, ctx.v
    k = len(ctx.f.bc) + max(m + max(ctx.s - m_prime, 0) - v, 0)
    if k == 0:
        return DerivativeResult(0, datum)
    out = ctx.lowered_segments(m_prime + max(v - m, 0))
    core = from_aparam(lowered(a, max(m - v, 0)))
    return DerivativeResult(k, _assemble(datum.group, out, core.temp, core.segments))


def _socle_good(datum: LanglandsDatum, point: Point) -> LanglandsDatum:
    ctx = _positive(datum, point)
    a = to_aparam(ctx.t, datum.temp, ctx.x, ctx.rho, datum.group)
    m, m_prime, v, s = a.m, a.m_prime, ctx.v, ctx.s
    if m + max(s - m_prime, 0) < v:
        return _socle_outer(datum, ctx, "a")
    if s < m_prime and m >= v:
        core = from_aparam(soc_special(a))
        return _assemble(datum.group, ctx.rest, core.temp, core.segments)
    return _socle_outer(datum, ctx, "c" if ctx.g.ac else "d")


def _bad_counts(datum: LanglandsDatum, ctx: _Positive) -> tuple[int, int, int]:
    """m, m' and kappa for a bad line; blocks carry no sign and S_0 is never counted."""
    temp = datum.temp
    m = temp.multiplicity(ctx.rho, ctx.x.twice + 1)
    m_prime = temp.multiplicity(ctx.rho, ctx.x.twice - 1) if ctx.x.twice > 1 else 0
    return m, m_prime, ctx.t % 2


def _derive_bad(datum: LanglandsDatum, point: Point) -> DerivativeResult:
    ctx = _positive(datum, point)
    m, m_prime, kappa = _bad_counts(datum, ctx)
    v, s = ctx.v, ctx.s
    k = len(ctx.f.bc) + max(m + kappa + max(s - m_prime - kappa, 0) - v, 0)
    if k == 0:
        return DerivativeResult(0, datum)

    out = ctx.lowered_segments(m_prime + kappa + max(v - m - kappa, 0))
    t, temp = ctx.t, datum.temp
    if m + kappa > v:
        if v % 2 == 0:
            t, down, up = ctx.t - kappa, m - v, m - v + 2 * kappa
        else:
            t, down, up = ctx.t - kappa + 1, m - v + 1, m - v - 1 + 2 * kappa
        d_plus = ctx.x.twice + 1
        temp = temp.remove(ctx.rho, d_plus, down).add(ctx.rho, d_plus - 2, up)
    return DerivativeResult(k, _assemble(datum.group, out, temp, [ctx.ladder] * t))


def _socle_bad(datum: LanglandsDatum, point: Point) -> LanglandsDatum:
    ctx = _positive(datum, point)
    m, m_prime, kappa = _bad_counts(datum, ctx)
    v, s = ctx.v, ctx.s
    if m + kappa + max(s - m_prime - kappa, 0) < v:
        return _socle_outer(datum, ctx, "a")
    if s < m_prime + kappa and m + kappa >= v:
        d_plus = ctx.x.twice + 1
        if kappa == 0:
            t, temp = ctx.t + 1, datum.temp.remove(ctx.rho, d_plus - 2, 2)
        else:
            t, temp = ctx.t - 1, datum.temp.add(ctx.rho, d_plus, 2)
        return _assemble(datum.group, ctx.rest, temp, [ctx.ladder] * t)
    return _socle_outer(datum, ctx, "c" if ctx.g.ac else "d")


_DERIVATIVES: dict[PointCase, Callable[[LanglandsDatum, Point], DerivativeResult]] = {
    PointCase.UGLY: _derive_negative,
    PointCase.NEGATIVE: _derive_negative,
    PointCase.GOOD: _derive_good,
    PointCase.BAD: _derive_bad,
}

_SOCLES: dict[PointCase, Callable[[LanglandsDatum, Point], LanglandsDatum]] = {
    PointCase.UGLY: _socle_negative,
    PointCase.NEGATIVE: _socle_negative,
    PointCase.GOOD: _socle_good,
    PointCase.BAD: _socle_bad,
}


# ---------------------------------------------------------------------------
# public operations at a point


def derivative_at(pi: Target, point: Point) -> DerivativeResult:
    """Highest rho|.|^x-derivative D^{(k)}(pi) and its order k."""
    datum = as_datum(pi)
    case = point_case(point, datum.group)
    result = _DERIVATIVES[case](datum, point)
    if result.k == 0:
        return DerivativeResult(0, datum)
    value = _checked(result.value, "derivative_at")
    if get_settings().STRICT_CHECKS:
        _check_rank(datum, value, result.k * point.rho.dim, "derivative_at")
    logger.debug("calculus.derivative", point=str(point), case=case.value, k=result.k)
    return DerivativeResult(result.k, value)


def socle_at(pi: Target, point: Point, r: int = 1) -> LanglandsDatum:
    """soc((rho|.|^x)^r x pi), computed one step at a time."""
    if r < 0:
        raise PreconditionError("socle_at", f"r must be non-negative, got {r}")
    datum = as_datum(pi)
    case = point_case(point, datum.group)
    strict = get_settings().STRICT_CHECKS
    for _ in range(r):
        after = _checked(_SOCLES[case](datum, point), "socle_at")
        if strict:
            _check_inverse(datum, after, point)
        datum = after
    logger.debug("calculus.socle", point=str(point), case=case.value, r=r)
    return datum


def is_reduced_at(pi: Target, point: Point) -> bool:
    return derivative_at(pi, point).k == 0


def admissible_points(pi: Target) -> list[Point]:
    """Points that can carry a nonzero derivative.

    These are segment endpoints and block fringes, with both signs.
    """
    datum = as_datum(pi)
    found: dict[tuple[str, int], Point] = {}

    def offer(rho: RhoLabel, e: HalfInt) -> None:
        for x in (e, -e):
            if x == 0 and rho.is_self_dual:
                continue
            found.setdefault((rho.id, x.twice), Point(rho, x))

    for seg in datum.segments:
        for rho in {seg.rho.id: seg.rho, seg.rho.dual_id: seg.rho.dual()}.values():
            offer(rho, seg.x)
            offer(rho, seg.y)
    for block in datum.temp.blocks:
        offer(block.rho, HalfInt(block.d - 1))
        offer(block.rho, HalfInt(block.d + 1))
    return sorted(found.values(), key=point_order)


def _check_rank(before: LanglandsDatum, after: LanglandsDatum, drop: int, operation: str) -> None:
    if rank(before) - rank(after) != drop:
        raise InternalConsistencyError(
            f"{operation}: rank went from {rank(before)} to {rank(after)}, "
            f"expected a drop of {drop}",
            format_rep(before),
        )


def _check_inverse(before: LanglandsDatum, after: LanglandsDatum, point: Point) -> None:
    base = derivative_at(before, point)
    back = derivative_at(after, point)
    if back.k != base.k + 1 or back.value != base.value:
        logger.error(
            "calculus.socle_postcondition",
            point=str(point),
            before=format_rep(before),
            after=format_rep(after),
        )
        raise InternalConsistencyError(
            f"socle at {point} is not inverse to the highest derivative", format_rep(before)
        )


# ---------------------------------------------------------------------------
# irreducibility of rho|.|^x x pi


def irreducible_at(pi: Target, point: Point) -> bool:
    """Combinatorial criterion on a good line with x > 0."""
    datum = as_datum(pi)
    if not point.rho.is_self_dual or point.x <= 0:
        raise PreconditionError("irreducible_at", "needs a self-dual rho and x > 0")
    if point_case(point, datum.group) is not PointCase.GOOD:
        raise PreconditionError(
            "irreducible_at", f"{point} is not on a good line; use irreducible_at_generic"
        )
    below = _a_match(datum.segments, point.rho, -point.x)
    ctx = _positive(datum, point)
    a = to_aparam(ctx.t, datum.temp, ctx.x, ctx.rho, datum.group)
    m_minus = m_psi_effective(a)
    return (
        not below.ac
        and ctx.s >= m_minus
        and a.m + ctx.s - m_minus >= ctx.v
        and not ctx.g.ac
    )


def irreducible_at_generic(pi: Target, point: Point) -> bool:
    """rho|.|^x x pi is irreducible iff its socle equals that of rho^v|.|^{-x} x pi."""
    datum = as_datum(pi)
    return socle_at(datum, point, 1) == socle_at(datum, point.conj(), 1)


# ---------------------------------------------------------------------------
# Delta_rho[0,-1] and Z_rho[0,1]


def _require_self_dual(rho: RhoLabel, operation: str) -> None:
    if not rho.is_self_dual:
        raise UnsupportedPointError(f"{rho.id}:0", f"{operation} needs a self-dual rho")


def _blocking_point(
    datum: LanglandsDatum, rho: RhoLabel, keep: Callable[[Point], bool]
) -> Optional[Point]:
    for point in admissible_points(datum):
        if point.rho.id == rho.id and keep(point) and not is_reduced_at(datum, point):
            return point
    return None


def _flip_trivial(temp: TemperedData, rho: RhoLabel, n: int) -> TemperedData:
    """eta_n: multiply eta(rho) on rho x S_1 by (-1)^n."""
    if n % 2 == 0 or not temp.multiplicity(rho, 1):
        return temp
    return temp.with_sign(rho, 1, temp.sign(rho, 1).flipped())


def derivative_delta01(pi: Target, rho: RhoLabel, check: bool = True) -> DerivativeResult:
    """Highest Delta_rho[0,-1]-derivative of a datum reduced at every rho|.|^z, z != 0."""
    datum = as_datum(pi)
    _require_self_dual(rho, "derivative_delta01")
    if check:
        blocking = _blocking_point(datum, rho, lambda p: True)
        if blocking is not None:
            raise PreconditionError("derivative_delta01", f"not reduced at {blocking}")
    on_rho = datum.segments_on(rho)
    if not on_rho:
        raise PreconditionError("derivative_delta01", f"no segment on {rho.id}")
    if min(seg.x for seg in on_rho) != 0:
        raise InternalConsistencyError(
            f"derivative_delta01: smallest x on {rho.id} is not 0", format_rep(datum)
        )

    k = 0
    out: list[Optional[Segment]] = []
    for seg in datum.segments:
        if seg.rho.id == rho.id and seg.x == 0:
            k += 1
            out.append(Segment.maybe(rho, -2, seg.y))
        else:
            out.append(seg)
    value = _checked(_assemble(datum.group, out, datum.temp), "derivative_delta01")
    logger.debug("calculus.derivative_delta01", rho=rho.id, k=k)
    return DerivativeResult(k, value)


def _line_parity(datum: LanglandsDatum, rho: RhoLabel) -> Parity:
    return classify_line(RhoLine.through(rho, 0), datum.group)


def _check_z01_hypothesis(datum: LanglandsDatum, rho: RhoLabel, operation: str) -> None:
    if not is_reduced_at(datum, Point(rho, ONE)):
        raise PreconditionError(operation, f"not reduced at {rho.id}:1")
    blocking = _blocking_point(datum, rho, lambda p: p.x < 0)
    if blocking is not None:
        raise PreconditionError(operation, f"not reduced at {blocking}")


def _core_derivative_z01(
    core: LanglandsDatum, rho: RhoLabel, parity: Parity
) -> tuple[int, LanglandsDatum]:
    """Highest [0,1]-derivative of L(Delta_rho[0,-1]^t; pi(phi, eta)) reduced at rho|.|^1."""
    ladder = Segment(rho, HalfInt.of(0), HalfInt.of(-1))
    t = sum(1 for seg in core.segments if seg == ladder)
    if t != len(core.segments):
        raise InternalConsistencyError("[0,1] core carries foreign segments", format_rep(core))
    temp, group = core.temp, core.group
    tempered = LanglandsDatum(group, (), temp)

    if parity is Parity.BAD:
        if t % 2 or temp.multiplicity(rho, 3):
            raise InternalConsistencyError("bad [0,1] core is not reduced at 1", format_rep(core))
        return t, tempered

    minus_one = Segment(rho, HalfInt.of(-1), HalfInt.of(-1))
    m = temp.multiplicity(rho, 1)
    if temp.multiplicity(rho, 3):
        if m % 2:
            if t % 2 == 0:
                return t, tempered
            return t, LanglandsDatum(group, (minus_one,), temp.add(rho, 1).remove(rho, 3))
        reduced = temp.remove(rho, 1).remove(rho, 3)
        return t + 1, LanglandsDatum(group, (), _flip_trivial(reduced, rho, t + 1))
    if m % 2:
        if t == 0:
            return 0, core
        if t % 2 == 0:
            return t - 1, LanglandsDatum(group, (minus_one,), temp.add(rho, 1, 2))
        return t - 1, LanglandsDatum(group, (ladder,), temp)
    return t, LanglandsDatum(group, (), _flip_trivial(temp, rho, t))


def derivative_z01(pi: Target, rho: RhoLabel, check: bool = True) -> DerivativeResult:
    """Highest Z_rho[0,1]-derivative.

    The datum must be reduced at rho|.|^1 and at every negative rho|.|^z.
    """
    datum = as_datum(pi)
    _require_self_dual(rho, "derivative_z01")
    if check:
        _check_z01_hypothesis(datum, rho, "derivative_z01")
    parity = _line_parity(datum, rho)

    ladder = Segment(rho, HalfInt.of(0), HalfInt.of(-1))
    rest = [seg for seg in datum.segments if seg != ladder]
    t = len(datum.segments) - len(rest)
    step = derivative_at(LanglandsDatum(datum.group, (ladder,) * t, datum.temp), Point(rho, ONE))
    rest += [Segment(rho, ONE, ONE)] * step.k

    match = _a_match(rest, rho, ONE)
    if match.bc:
        raise PreconditionError("derivative_z01", f"not reduced at {rho.id}:1")
    out: list[Optional[Segment]] = list(rest)
    for i in match.a0:
        out[i] = Segment.maybe(rho, -1, rest[i].y)
    for i in match.b0:
        out[i] = Segment.maybe(rho, 0, rest[i].y)

    k_a, core = _core_derivative_z01(step.value, rho, parity)
    k = k_a + len(match.b0)
    if k == 0:
        return DerivativeResult(0, datum)
    value = _checked(_assemble(datum.group, out, core.temp, core.segments), "derivative_z01")
    if get_settings().STRICT_CHECKS:
        _check_rank(datum, value, 2 * k * rho.dim, "derivative_z01")
    logger.debug("calculus.derivative_z01", rho=rho.id, k=k, k_core=k_a, forced=len(match.b0))
    return DerivativeResult(k, value)


def _core_socle_z01(
    core: LanglandsDatum, rho: RhoLabel, k: int, parity: Parity, s: int, t: int
) -> LanglandsDatum:
    """S_{[0,1]}^{(k)} of L((rho|.|^{-1})^s, Delta_rho[0,-1]^t; pi(phi', eta')).

    The result is read back as a highest derivative.
    """
    if k == 0:
        return core
    temp, group = core.temp, core.group
    if parity is Parity.BAD:
        if s or t or k % 2:
            raise PreconditionError(
                "socle_z01", "bad [0,1] core needs no rho|.|^{-1}, no Delta[0,-1] and an even order"
            )
        ladder = Segment(rho, HalfInt.of(0), HalfInt.of(-1))
        return LanglandsDatum(group, (ladder,) * k, temp)

    m3 = temp.multiplicity(rho, 3)
    if s + t + m3 > 1:
        raise PreconditionError("socle_z01", "core is not the highest [0,1]-derivative of anything")
    m_prime = temp.multiplicity(rho, 1)
    eta = temp.sign(rho, 1)

    if s:
        if m_prime < 2 or k % 2 == 0:
            raise PreconditionError(
                "socle_z01", "rho|.|^{-1} in the core needs rho^2 and an odd order"
            )
        form = AParamForm(group, rho, ONE, k + 1, m_prime, temp.remove(rho, 1, 2), eta_a=eta)
    elif t or m3:
        if m_prime % 2 == 0 or k % 2:
            raise PreconditionError("socle_z01", "core needs m(rho) odd and an even order")
        form = AParamForm(group, rho, ONE, k + 1 if t else k, 1, temp)
    else:
        flipped = _flip_trivial(temp, rho, k)
        form = AParamForm(group, rho, ONE, k, m_prime + 1, flipped, eta_a=flipped.sign(rho, 1))
    return from_aparam(normalized(form))


def _socle_z01_formula(datum: LanglandsDatum, rho: RhoLabel, k: int) -> LanglandsDatum:
    """soc(Z_rho[0,1]^k x pi) read off as the inverse of the highest [0,1]-derivative.

    Only valid when the socle itself is reduced at rho|.|^1 and at every negative rho|.|^z.
    """
    parity = _line_parity(datum, rho)

    minus_one = Segment(rho, HalfInt.of(-1), HalfInt.of(-1))
    ladder = Segment(rho, HalfInt.of(0), HalfInt.of(-1))
    rest = [seg for seg in datum.segments if seg not in (minus_one, ladder)]
    s = sum(1 for seg in datum.segments if seg == minus_one)
    t = sum(1 for seg in datum.segments if seg == ladder)

    by_y = lambda i: rest[i].y  # noqa: E731
    lower = OrderedIndexSet.build(_indices(rest, rho, lambda seg: seg.x == -1), by_y)
    upper = OrderedIndexSet.build(_indices(rest, rho, lambda seg: seg.x == 0), by_y)
    match = best_match(lower, upper, lambda b, a: rest[b].y > rest[a].y)
    k_a = k - len(lower)
    if k_a < 0:
        raise PreconditionError(
            "socle_z01", f"order {k} is below the {len(lower)} segments forced back to x = 0"
        )

    out: list[Segment] = list(rest)
    for i in lower:
        out[i] = Segment(rho, HalfInt.of(0), rest[i].y)
    for i in match.b0:
        out[i] = Segment(rho, ONE, rest[i].y)

    core = LanglandsDatum(datum.group, (minus_one,) * s + (ladder,) * t, datum.temp)
    core = _core_socle_z01(core, rho, k_a, parity, s, t)
    core = socle_at(core, Point(rho, ONE), len(match.ac))
    logger.debug("calculus.socle_z01", rho=rho.id, k=k, k_core=k_a, raised=len(match.ac))
    return _checked(_assemble(datum.group, out, core.temp, core.segments), "socle_z01")


def _links_with_ladder(seg: Segment, rho: RhoLabel) -> bool:
    """Segments below Delta_rho[0,-1] in the Langlands order that do not commute with it."""
    return seg.rho.id == rho.id and (seg.x == -2 or (seg.x == -1 and seg.y <= -2))


_DUAL_SIDE: ContextVar[frozenset[tuple[str, str, int]]] = ContextVar(
    "socle_z01_dual_side", default=frozenset()
)


def _socle_z01_dual_side(datum: LanglandsDatum, rho: RhoLabel, k: int) -> LanglandsDatum:
    """soc(Z_rho[0,1]^k x pi) = dual of soc(Delta_rho[0,-1]^k x dual(pi)).

    The Delta side is the Langlands datum of dual(pi) with Delta_rho[0,-1]^k added, as long as
    no segment of dual(pi) is linked with Delta_rho[0,-1].
    """
    from app.services.duality import dual

    key = (format_rep(datum), rho.id, k)
    active = _DUAL_SIDE.get()
    if key in active:
        raise InternalConsistencyError(
            f"socle_z01 at {rho.id} re-entered its own dual-side computation", format_rep(datum)
        )
    token = _DUAL_SIDE.set(active | {key})
    try:
        hat, _ = dual(datum)
        linked = [seg for seg in hat.segments if _links_with_ladder(seg, rho)]
        if linked:
            raise UnsupportedSocleError(
                "socle_z01",
                f"dual {format_rep(hat)} has segments linked with Delta[0,-1]: "
                + ", ".join(str(seg) for seg in linked),
            )
        ladder = Segment(rho, HalfInt.of(0), HalfInt.of(-1))
        lifted = _assemble(hat.group, hat.segments, hat.temp, [ladder] * k)
        value, _ = dual(_checked(lifted, "socle_z01"))
    finally:
        _DUAL_SIDE.reset(token)
    logger.debug("calculus.socle_z01_dual_side", rho=rho.id, k=k)
    return value


def socle_z01(pi: Target, rho: RhoLabel, k: int, check: bool = True) -> LanglandsDatum:
    """soc(Z_rho[0,1]^k x pi) for pi reduced at rho|.|^1.

    The closed formula is tried first and kept when the highest [0,1]-derivative of its
    output gives back the input. Otherwise the socle is computed on the dual side; a
    ``UnsupportedSocleError`` marks the inputs neither route covers.
    """
    if k < 1:
        raise PreconditionError("socle_z01", f"k must be positive, got {k}")
    datum = as_datum(pi)
    _require_self_dual(rho, "socle_z01")
    reduced_at_one = is_reduced_at(datum, Point(rho, ONE))
    if check and not reduced_at_one:
        raise PreconditionError("socle_z01", f"not reduced at {rho.id}:1")

    base: Optional[DerivativeResult] = None
    start, order = datum, k
    if reduced_at_one and _blocking_point(datum, rho, lambda p: p.x < 0) is None:
        base = derivative_z01(datum, rho, check=False)
        if base.k:
            start, order = base.value, k + base.k

    misses: tuple[type[Exception], ...] = (PreconditionError,)
    if base is not None:
        misses = (PreconditionError, InternalConsistencyError)
    value: Optional[LanglandsDatum]
    try:
        value = _socle_z01_formula(start, rho, order)
    except misses as exc:
        logger.debug("calculus.socle_z01_formula_miss", rho=rho.id, reason=str(exc))
        value = None

    if value is not None and base is not None:
        expected = DerivativeResult(order, start)
        if not (
            is_reduced_at(value, Point(rho, ONE))
            and _blocking_point(value, rho, lambda p: p.x < 0) is None
            and derivative_z01(value, rho, check=False) == expected
        ):
            value = None

    if value is None:
        value = _socle_z01_dual_side(datum, rho, k)
    if get_settings().STRICT_CHECKS:
        _check_rank(value, datum, 2 * k * rho.dim, "socle_z01")
        if not is_reduced_at(value, Point(rho, ONE)):
            raise InternalConsistencyError(
                f"socle_z01 output is not reduced at {rho.id}:1", format_rep(value)
            )
    return value
