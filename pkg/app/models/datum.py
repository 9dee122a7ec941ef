"""
Immutable data model: supercuspidal labels, lines, segments, Jordan blocks,
tempered parts and Langlands data.

Constructors canonicalise; group-dependent validation lives in
``app.services.classification``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Iterator, Optional

from app.core.exceptions import DatumValidationError
from app.models.halfint import HalfInt, Number


class GroupType(str, Enum):
    SP_EVEN = "Sp"
    SO_ODD = "SO"

    @property
    def phi_type(self) -> SelfDuality:
        """Type of the tempered parameter: orthogonal for Sp_{2n}, symplectic for SO_{2n+1}."""
        return SelfDuality.ORTHOGONAL if self is GroupType.SP_EVEN else SelfDuality.SYMPLECTIC


class SelfDuality(str, Enum):
    NONE = "none"
    ORTHOGONAL = "orth"
    SYMPLECTIC = "symp"

    def opposite(self) -> SelfDuality:
        if self is SelfDuality.NONE:
            return self
        if self is SelfDuality.ORTHOGONAL:
            return SelfDuality.SYMPLECTIC
        return SelfDuality.ORTHOGONAL


class ExpClass(str, Enum):
    INTEGRAL = "Integral"
    HALF_INTEGRAL = "HalfIntegral"
    UGLY = "Ugly"


class Parity(str, Enum):
    GOOD = "Good"
    BAD = "Bad"
    UGLY = "Ugly"


class Sign(Enum):
    PLUS = 1
    MINUS = -1
    UNSET = 0

    @classmethod
    def of(cls, value: int) -> Sign:
        return cls.PLUS if value > 0 else cls.MINUS

    @property
    def symbol(self) -> str:
        return {1: "+", -1: "-", 0: "."}[self.value]

    def times(self, other: Sign | int) -> Sign:
        other_value = other.value if isinstance(other, Sign) else other
        if self is Sign.UNSET or other_value == 0:
            raise ValueError("cannot multiply an unset sign")
        return Sign.of(self.value * other_value)

    def flipped(self) -> Sign:
        return self if self is Sign.UNSET else Sign.of(-self.value)


def parity_sign(n: int) -> Sign:
    """(-1)^n"""
    return Sign.PLUS if n % 2 == 0 else Sign.MINUS


@dataclass(frozen=True, slots=True, order=True)
class RhoLabel:
    id: str
    dim: int = 1
    self_dual: SelfDuality = SelfDuality.ORTHOGONAL
    dual_id: str = ""

    def __post_init__(self) -> None:
        if not self.dual_id:
            object.__setattr__(self, "dual_id", self.id)
        if self.dim < 1:
            raise DatumValidationError([f"rho {self.id}: dim must be positive"])
        if (self.self_dual is SelfDuality.NONE) == (self.dual_id == self.id):
            raise DatumValidationError(
                [f"rho {self.id}: self_dual=none exactly when dual differs from id"]
            )

    @property
    def is_self_dual(self) -> bool:
        return self.self_dual is not SelfDuality.NONE

    def dual(self) -> RhoLabel:
        if self.is_self_dual:
            return self
        return RhoLabel(id=self.dual_id, dim=self.dim, self_dual=SelfDuality.NONE, dual_id=self.id)

    @property
    def representative(self) -> RhoLabel:
        """Canonical base of the pair {rho, rho dual}."""
        return self if self.id <= self.dual_id else self.dual()

    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True, slots=True)
class RhoLine:
    base: RhoLabel
    exp_class: ExpClass

    def __post_init__(self) -> None:
        if (self.exp_class is ExpClass.UGLY) == self.base.is_self_dual:
            raise DatumValidationError(
                [f"line {self.base.id}: Ugly exactly for non-self-dual bases"]
            )

    @classmethod
    def through(cls, rho: RhoLabel, x: Number) -> RhoLine:
        """Line carrying rho|.|^x."""
        if not rho.is_self_dual:
            return cls(rho.representative, ExpClass.UGLY)
        exp = ExpClass.INTEGRAL if HalfInt.of(x).is_integral else ExpClass.HALF_INTEGRAL
        return cls(rho, exp)

    def contains(self, x: HalfInt) -> bool:
        if self.exp_class is ExpClass.UGLY:
            return True
        return x.is_integral == (self.exp_class is ExpClass.INTEGRAL)

    @property
    def key(self) -> tuple[str, str]:
        return (self.base.id, self.exp_class.value)

    def __str__(self) -> str:
        return f"{self.base.id}/{self.exp_class.value}"


@dataclass(frozen=True, slots=True)
class Point:
    """The supercuspidal rho|.|^x."""

    rho: RhoLabel
    x: HalfInt

    def conj(self) -> Point:
        return Point(self.rho.dual(), -self.x)

    def __str__(self) -> str:
        return f"{self.rho.id}:{self.x}"


@dataclass(frozen=True, slots=True)
class Segment:
    rho: RhoLabel
    x: HalfInt
    y: HalfInt

    def __post_init__(self) -> None:
        if not (self.x - self.y).is_integral:
            raise DatumValidationError([f"segment [{self.x},{self.y}]: x - y must be an integer"])
        if self.x < self.y:
            raise DatumValidationError([f"segment [{self.x},{self.y}]: x < y"])

    @classmethod
    def maybe(cls, rho: RhoLabel, x: Number, y: Number) -> Optional[Segment]:
        """Build [x, y], or None for the empty segment [y-1, y]."""
        x, y = HalfInt.of(x), HalfInt.of(y)
        if x == y - 1:
            return None
        return cls(rho, x, y)

    @property
    def length(self) -> int:
        return (self.x - self.y).to_int() + 1

    @property
    def size(self) -> int:
        return self.rho.dim * self.length

    @property
    def center_twice(self) -> int:
        return self.x.twice + self.y.twice

    def sort_key(self) -> tuple[int, int, str]:
        return (self.center_twice, self.x.twice, self.rho.id)

    def rebased(self, target: RhoLabel) -> Segment:
        """Rewrite on the contragredient line: D_{rho^v}[x,y] -> D_rho[-y,-x]."""
        if self.rho.id == target.id:
            return self
        if self.rho.dual_id != target.id:
            raise DatumValidationError([f"cannot rebase {self} onto {target.id}"])
        return Segment(target, -self.y, -self.x)

    def __str__(self) -> str:
        return f"D[{self.x},{self.y}]@{self.rho.id}"


@dataclass(frozen=True, slots=True)
class JordanBlock:
    rho: RhoLabel
    d: int
    mult: int
    sign: Sign

    def __post_init__(self) -> None:
        if self.d < 1:
            raise DatumValidationError([f"block S_{self.d}: d must be positive"])
        if self.mult < 1:
            raise DatumValidationError([f"block S_{self.d}: multiplicity must be positive"])

    @property
    def dimension(self) -> int:
        return self.rho.dim * self.d * self.mult

    @property
    def exponent(self) -> HalfInt:
        """(d-1)/2"""
        return HalfInt(self.d - 1)


@dataclass(frozen=True, slots=True)
class SigmaAnchor:
    id: str
    rank: int = 0

    def __post_init__(self) -> None:
        if self.rank < 0:
            raise DatumValidationError([f"sigma {self.id}: rank must be non-negative"])


def _merge_blocks(blocks: Iterable[JordanBlock]) -> tuple[JordanBlock, ...]:
    merged: dict[tuple[str, int], JordanBlock] = {}
    for block in blocks:
        key = (block.rho.id, block.d)
        seen = merged.get(key)
        if seen is None:
            merged[key] = block
            continue
        if seen.sign is not block.sign:
            raise DatumValidationError(
                [f"block {block.rho.id}/S_{block.d}: conflicting signs on one isomorphism class"]
            )
        merged[key] = replace(seen, mult=seen.mult + block.mult)
    return tuple(merged[key] for key in sorted(merged))


@dataclass(frozen=True, slots=True)
class TemperedData:
    """pi(phi, eta): Jordan blocks with one sign each, plus an optional cuspidal anchor."""

    blocks: tuple[JordanBlock, ...] = ()
    sigma: Optional[SigmaAnchor] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", _merge_blocks(self.blocks))

    def __iter__(self) -> Iterator[JordanBlock]:
        return iter(self.blocks)

    def find(self, rho: RhoLabel, d: int) -> Optional[JordanBlock]:
        for block in self.blocks:
            if block.rho.id == rho.id and block.d == d:
                return block
        return None

    def multiplicity(self, rho: RhoLabel, d: int) -> int:
        block = self.find(rho, d)
        return block.mult if block else 0

    def sign(self, rho: RhoLabel, d: int) -> Sign:
        block = self.find(rho, d)
        return block.sign if block else Sign.UNSET

    def on(self, rho: RhoLabel) -> tuple[JordanBlock, ...]:
        return tuple(b for b in self.blocks if b.rho.id == rho.id)

    @property
    def dimension(self) -> int:
        return sum(b.dimension for b in self.blocks)

    @property
    def signed(self) -> tuple[JordanBlock, ...]:
        return tuple(b for b in self.blocks if b.sign is not Sign.UNSET)

    @property
    def unset(self) -> tuple[JordanBlock, ...]:
        return tuple(b for b in self.blocks if b.sign is Sign.UNSET)

    def character(self) -> Sign:
        """eta(z_phi): product of sign^mult over signed blocks."""
        value = 1
        for block in self.signed:
            if block.mult % 2:
                value *= block.sign.value
        return Sign.of(value)

    def add(self, rho: RhoLabel, d: int, count: int = 1, sign: Sign = Sign.UNSET) -> TemperedData:
        """Add ``count`` copies of rho x S_d; an existing class keeps its sign. d = 0 is a no-op."""
        if count == 0 or d == 0:
            return self
        if count < 0:
            return self.remove(rho, d, -count)
        current = self.find(rho, d)
        if current is not None:
            sign = current.sign
        return TemperedData(self.blocks + (JordanBlock(rho, d, count, sign),), self.sigma)

    def remove(self, rho: RhoLabel, d: int, count: int = 1) -> TemperedData:
        if count == 0 or d == 0:
            return self
        current = self.find(rho, d)
        have = current.mult if current else 0
        if have < count:
            raise DatumValidationError(
                [f"cannot remove {count} copies of {rho.id}/S_{d} from {have}"]
            )
        rest = tuple(b for b in self.blocks if b is not current)
        if have > count:
            rest += (replace(current, mult=have - count),)
        return TemperedData(rest, self.sigma)

    def with_sign(self, rho: RhoLabel, d: int, sign: Sign) -> TemperedData:
        return TemperedData(
            tuple(
                replace(b, sign=sign) if b.rho.id == rho.id and b.d == d else b
                for b in self.blocks
            ),
            self.sigma,
        )

    def flipped(self, rho: RhoLabel) -> TemperedData:
        """Negate eta on every block of rho."""
        return TemperedData(
            tuple(
                replace(b, sign=b.sign.flipped()) if b.rho.id == rho.id else b
                for b in self.blocks
            ),
            self.sigma,
        )

    def restricted(self, keep) -> TemperedData:
        return TemperedData(tuple(b for b in self.blocks if keep(b)), self.sigma)


def canonical_segments(segments: Iterable[Segment]) -> tuple[Segment, ...]:
    """Re-base ugly segments to their representative and sort by (x+y, x, rho.id)."""
    based = []
    for seg in segments:
        if not seg.rho.is_self_dual:
            seg = seg.rebased(seg.rho.representative)
        based.append(seg)
    return tuple(sorted(based, key=Segment.sort_key))


@dataclass(frozen=True, slots=True)
class LanglandsDatum:
    group: GroupType
    segments: tuple[Segment, ...] = ()
    temp: TemperedData = field(default_factory=TemperedData)

    def __post_init__(self) -> None:
        object.__setattr__(self, "segments", canonical_segments(self.segments))

    @property
    def is_tempered(self) -> bool:
        return not self.segments

    def with_segments(self, segments: Iterable[Segment]) -> LanglandsDatum:
        return LanglandsDatum(self.group, tuple(segments), self.temp)

    def with_temp(self, temp: TemperedData) -> LanglandsDatum:
        return LanglandsDatum(self.group, self.segments, temp)

    def segments_on(self, rho: RhoLabel) -> tuple[Segment, ...]:
        return tuple(s for s in self.segments if s.rho.id == rho.id)

    def rhos(self) -> tuple[RhoLabel, ...]:
        seen: dict[str, RhoLabel] = {}
        for seg in self.segments:
            seen.setdefault(seg.rho.id, seg.rho)
        for block in self.temp.blocks:
            seen.setdefault(block.rho.id, block.rho)
        return tuple(seen[k] for k in sorted(seen))


@dataclass(frozen=True, slots=True)
class Factor:
    """One Jantzen component: the Good part, or one Bad or Ugly line."""

    parity: Parity
    datum: LanglandsDatum
    line: Optional[RhoLine] = None

    @property
    def group(self) -> GroupType:
        return self.datum.group

    def with_datum(self, datum: LanglandsDatum) -> Factor:
        return Factor(self.parity, datum, self.line)
