import pytest

from app.config.settings import get_settings
from app.core.exceptions import DatumValidationError, EnumerationBudgetError
from app.models.datum import Parity
from app.models.halfint import HalfInt
from app.models.schemas import EnumerationParams
from app.services.classification import rank
from app.services.enumeration import (
    DEFAULT_SIGMA,
    enumerate_reps,
    exponent_bound,
    parse_line_spec,
    resolve,
)
from app.services.parser import format_rep


def test_exponent_bound():
    assert exponent_bound(7) == 4
    assert exponent_bound(1) == 1


class TestLineSpec:
    def test_integral_good_line(self, sp):
        spec = parse_line_spec("1", sp)
        assert spec.parity is Parity.GOOD
        assert spec.exponents(1) == [HalfInt.of(-1), HalfInt.of(0), HalfInt.of(1)]
        assert spec.block_sizes(5) == [1, 3, 5]

    def test_half_integral_bad_line(self, sp):
        spec = parse_line_spec("1/half", sp)
        assert spec.parity is Parity.BAD
        assert spec.exponents(1) == [HalfInt(-3), HalfInt(-1), HalfInt(1), HalfInt(3)]
        assert spec.block_sizes(5) == [2, 4]

    def test_ugly_line_has_no_blocks(self, mixed):
        spec = parse_line_spec("c", mixed)
        assert spec.parity is Parity.UGLY
        assert spec.block_sizes(7) == []

    def test_bad_suffix(self, sp):
        with pytest.raises(DatumValidationError):
            parse_line_spec("1/quarter", sp)


def test_resolve_adds_default_sigma_for_bad_lines():
    _, specs, sigma = resolve(EnumerationParams(lines=["1", "1/half"]))
    assert [s.parity for s in specs] == [Parity.GOOD, Parity.BAD]
    assert sigma == DEFAULT_SIGMA


def test_resolve_good_lines_need_no_sigma():
    assert resolve(EnumerationParams())[2] is None


class TestEnumerate:
    def test_rank_zero(self):
        assert [format_rep(d) for d in enumerate_reps(EnumerationParams(max_rank=0))] == ["pi(1+)"]

    def test_rank_one(self):
        data = list(enumerate_reps(EnumerationParams(max_rank=1)))
        assert sorted(format_rep(d) for d in data) == sorted(
            [
                "pi(1+)",
                "pi(3+)",
                "pi(1+,1+,1+)",
                "L(D[-1,-1];pi(1+))",
                "L(D[-2,-2];pi(1+))",
                "L(D[-3,-3];pi(1+))",
                "L(D[-4,-4];pi(1+))",
            ]
        )

    def test_unique_and_bounded(self):
        data = list(enumerate_reps(EnumerationParams(max_rank=2, max_block_d=5)))
        assert len(data) == len(set(data))
        assert all(rank(d) <= 2 for d in data)

    def test_bad_line_data_carry_sigma(self):
        params = EnumerationParams(lines=["1/half"], max_rank=1)
        data = list(enumerate_reps(params))
        assert data
        assert all(d.temp.sigma == DEFAULT_SIGMA for d in data)

    def test_budget(self, monkeypatch):
        monkeypatch.setenv("MAX_ENUMERATION_RANK", "1")
        get_settings.cache_clear()
        with pytest.raises(EnumerationBudgetError):
            list(enumerate_reps(EnumerationParams(max_rank=2)))
