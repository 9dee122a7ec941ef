import pytest

from app.core.exceptions import DatumValidationError
from app.models.datum import (
    ExpClass,
    GroupType,
    JordanBlock,
    LanglandsDatum,
    Parity,
    RhoLabel,
    RhoLine,
    Segment,
    SelfDuality,
    Sign,
    TemperedData,
)
from app.models.halfint import HalfInt
from app.services.classification import (
    classify_line,
    factor_of,
    jantzen_merge,
    jantzen_split,
    rank,
    re_base,
    tempered_rank,
    validation_errors,
)

ORTH = RhoLabel("1", 1, SelfDuality.ORTHOGONAL)
SYMP = RhoLabel("s", 2, SelfDuality.SYMPLECTIC)
UGLY = RhoLabel("c", 1, SelfDuality.NONE, "cv")


@pytest.mark.parametrize(
    "rho, exp_class, group, parity",
    [
        (ORTH, ExpClass.INTEGRAL, GroupType.SP_EVEN, Parity.GOOD),
        (ORTH, ExpClass.HALF_INTEGRAL, GroupType.SP_EVEN, Parity.BAD),
        (ORTH, ExpClass.INTEGRAL, GroupType.SO_ODD, Parity.BAD),
        (ORTH, ExpClass.HALF_INTEGRAL, GroupType.SO_ODD, Parity.GOOD),
        (SYMP, ExpClass.INTEGRAL, GroupType.SP_EVEN, Parity.BAD),
        (SYMP, ExpClass.HALF_INTEGRAL, GroupType.SP_EVEN, Parity.GOOD),
        (SYMP, ExpClass.INTEGRAL, GroupType.SO_ODD, Parity.GOOD),
        (UGLY.representative, ExpClass.UGLY, GroupType.SP_EVEN, Parity.UGLY),
    ],
)
def test_classify_line(rho, exp_class, group, parity):
    assert classify_line(RhoLine(rho, exp_class), group) is parity


def test_line_requires_matching_class():
    with pytest.raises(DatumValidationError):
        RhoLine(UGLY, ExpClass.INTEGRAL)
    with pytest.raises(DatumValidationError):
        RhoLine(ORTH, ExpClass.UGLY)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("pi(1+,1+,3+,5-,5-)", 7),
        ("L(D[0,-2],D[0,-1];pi(3+))", 6),
        ("pi(3+,5-,5-)", 6),
        ("pi(1+)", 0),
        ("L(D[-1,-1];pi(1+))", 1),
    ],
)
def test_rank(rep, text, expected):
    assert rank(rep(text)) == expected


def test_tempered_rank_with_anchor(mixed, rep):
    datum = rep("L(D[0,-1]@c;pi(1.@s^2)*sc)", mixed)
    assert tempered_rank(datum.temp, datum.group) == 4
    assert rank(datum) == 6


def test_validation_errors_collects_all():
    datum = LanglandsDatum(
        GroupType.SP_EVEN,
        (Segment(ORTH, HalfInt.of(1), HalfInt.of(0)),),
        TemperedData((JordanBlock(ORTH, 2, 1, Sign.PLUS),)),
    )
    errors = validation_errors(datum)
    assert len(errors) == 5
    assert any("x + y" in e for e in errors)
    assert any("cuspidal anchor" in e for e in errors)


class TestJantzen:
    def test_good_only(self, rep):
        factors = jantzen_split(rep("L(D[0,-2],D[0,-1];pi(3+))"))
        assert [f.parity for f in factors] == [Parity.GOOD]

    def test_split_and_merge(self, mixed, rep):
        datum = rep("L(D[0,-2]@1,D[-1/2,-1/2]@1,D[1,1]@cv;pi(1+@1,1.@s^2)*sc)", mixed)
        factors = jantzen_split(datum)
        assert [f.parity for f in factors] == [Parity.GOOD, Parity.BAD, Parity.BAD, Parity.UGLY]
        good, bad_one, bad_s, ugly = factors
        assert [str(s) for s in good.datum.segments] == ["D[0,-2]@1"]
        assert bad_one.line == RhoLine(mixed.rho("1"), ExpClass.HALF_INTEGRAL)
        assert bad_s.datum.temp.multiplicity(mixed.rho("s"), 1) == 2
        assert ugly.datum.segments[0].rho.id == "c"
        assert ugly.datum.segments[0].x == HalfInt.of(-1)
        assert jantzen_merge(factors) == datum

    def test_factor_of(self, rep):
        assert factor_of(rep("pi(3+)")).parity is Parity.GOOD

    def test_factor_of_rejects_mixed(self, mixed, rep):
        with pytest.raises(DatumValidationError):
            factor_of(rep("pi(1+@1,1.@s^2)*sc", mixed))

    def test_merge_needs_factors(self):
        with pytest.raises(DatumValidationError):
            jantzen_merge([])


def test_re_base(mixed, rep):
    datum = rep("L(D[2,1]@c;pi()*sc)", mixed)
    (seg,) = re_base(datum.segments, mixed.rho("cv"))
    assert (seg.rho.id, seg.x, seg.y) == ("cv", HalfInt.of(-1), HalfInt.of(-2))
    with pytest.raises(DatumValidationError):
        re_base(datum.segments, ORTH)


def test_factor_ranks_add_up(mixed, rep):
    datum = rep("L(D[0,-2]@1,D[-1/2,-1/2]@1,D[1,1]@cv;pi(1+@1,1.@s^2)*sc)", mixed)
    factors = jantzen_split(datum)
    shared = (len(factors) - 1) * mixed.sigma("sc").rank
    assert sum(rank(f.datum) for f in factors) - shared == rank(datum) == 6
