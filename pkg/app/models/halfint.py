"""Exact half-integers stored as twice their value."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Union

_HALF_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*2)?\s*$")

Number = Union["HalfInt", int]


@total_ordering
@dataclass(frozen=True, slots=True)
class HalfInt:
    twice: int

    @classmethod
    def of(cls, value: Number) -> HalfInt:
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeError(f"cannot build HalfInt from {value!r}")
        return cls(2 * value)

    @classmethod
    def parse(cls, text: str) -> HalfInt:
        """Parse ``int`` or ``int/2``."""
        match = _HALF_RE.match(text)
        if not match:
            raise ValueError(f"not a half-integer: {text!r}")
        n = int(match.group(1))
        return cls(n) if "/" in text else cls(2 * n)

    @property
    def is_integral(self) -> bool:
        return self.twice % 2 == 0

    def as_fraction(self) -> Fraction:
        return Fraction(self.twice, 2)

    def __add__(self, other: Number) -> HalfInt:
        return HalfInt(self.twice + HalfInt.of(other).twice)

    __radd__ = __add__

    def __sub__(self, other: Number) -> HalfInt:
        return HalfInt(self.twice - HalfInt.of(other).twice)

    def __rsub__(self, other: Number) -> HalfInt:
        return HalfInt(HalfInt.of(other).twice - self.twice)

    def __neg__(self) -> HalfInt:
        return HalfInt(-self.twice)

    def __abs__(self) -> HalfInt:
        return HalfInt(abs(self.twice))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, HalfInt):
            return self.twice == other.twice
        if isinstance(other, int) and not isinstance(other, bool):
            return self.twice == 2 * other
        return NotImplemented

    def __lt__(self, other: Number) -> bool:
        return self.twice < HalfInt.of(other).twice

    def __hash__(self) -> int:
        return hash(Fraction(self.twice, 2))

    def to_int(self) -> int:
        if not self.is_integral:
            raise ValueError(f"{self} is not an integer")
        return self.twice // 2

    def __str__(self) -> str:
        if self.is_integral:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def __repr__(self) -> str:
        return f"HalfInt({self})"


def half(value: Union[Number, str]) -> HalfInt:
    """Coerce ints, strings and HalfInts."""
    if isinstance(value, str):
        return HalfInt.parse(value)
    return HalfInt.of(value)
