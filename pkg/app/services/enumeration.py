"""
Exhaustive enumeration of valid canonical Langlands data over a set of
declared lines, bounded by rank and Jordan block size. Segment endpoints
are limited to |e| <= (max_block_d + 1)/2, the largest block fringe.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Optional, Sequence

from app.config.settings import get_settings
from app.core.exceptions import DatumValidationError, EnumerationBudgetError
from app.core.utils import get_logger
from app.models.datum import (
    GroupType,
    JordanBlock,
    LanglandsDatum,
    Parity,
    RhoLabel,
    RhoLine,
    Segment,
    Sign,
    SigmaAnchor,
    TemperedData,
)
from app.models.halfint import HalfInt
from app.models.schemas import EnumerationParams
from app.services.classification import classify_line, tempered_rank, validation_errors
from app.services.parser import Declarations, parse_header, split_document

logger = get_logger(__name__)

DEFAULT_SIGMA = SigmaAnchor("sigma", 0)


def exponent_bound(max_block_d: int) -> int:
    return (max_block_d + 1) // 2


@dataclass(frozen=True)
class LineSpec:
    """A line with the exponent class used to enumerate on it."""

    line: RhoLine
    parity: Parity
    half: bool

    @property
    def rho(self) -> RhoLabel:
        return self.line.base

    def exponents(self, bound: int) -> list[HalfInt]:
        """Exponents of the right class with |e| <= bound (bound + 1/2 on half-integral lines)."""
        offset = 1 if self.half else 0
        span = range(-2 * bound - offset, 2 * bound + offset + 1)
        return [HalfInt(t) for t in span if t % 2 == offset]

    def block_sizes(self, max_d: int) -> list[int]:
        if self.parity is Parity.UGLY:
            return []
        return [d for d in range(1, max_d + 1) if (d % 2 == 0) == self.half]


def parse_line_spec(text: str, decl: Declarations) -> LineSpec:
    rho_id, _, suffix = text.partition("/")
    if suffix not in ("", "int", "half"):
        raise DatumValidationError([f"line {text!r}: expected rho, rho/int or rho/half"])
    rho = decl.rho(rho_id or None)
    half = suffix == "half"
    line = RhoLine.through(rho, HalfInt(1) if half else HalfInt(0))
    return LineSpec(line, classify_line(line, decl.group), half)


def resolve(
    params: EnumerationParams,
) -> tuple[Declarations, list[LineSpec], Optional[SigmaAnchor]]:
    header, _ = split_document(params.header)
    decl = parse_header(header, params.group)
    specs = [parse_line_spec(text, decl) for text in params.lines]
    sigma = None
    if any(spec.parity is not Parity.GOOD for spec in specs):
        sigma = decl.sigmas[sorted(decl.sigmas)[0]] if decl.sigmas else DEFAULT_SIGMA
    return decl, specs, sigma


def _segment_catalog(specs: Sequence[LineSpec], budget: int, max_block_d: int) -> list[Segment]:
    """All segments of size <= budget on the given lines."""
    catalog: set[Segment] = set()
    for spec in specs:
        exps = spec.exponents(exponent_bound(max_block_d))
        for x in exps:
            for y in exps:
                if y > x:
                    continue
                seg = Segment(spec.rho, x, y)
                if seg.size > budget:
                    continue
                if spec.parity is not Parity.UGLY and x + y >= 0:
                    continue
                catalog.add(seg)
    return sorted(catalog, key=lambda s: (s.size, s.sort_key()))


def _multisets(
    items: Sequence[Segment], budget: int, start: int = 0
) -> Iterator[tuple[Segment, ...]]:
    """Multisets of ``items`` with total size <= budget, in a fixed order."""
    yield ()
    for i in range(start, len(items)):
        size = items[i].size
        if size > budget:
            continue
        for rest in _multisets(items, budget - size, i):
            yield (items[i],) + rest


def _block_choices(
    specs: Sequence[LineSpec], max_d: int, max_dim: int
) -> Iterator[tuple[tuple[LineSpec, int, int], ...]]:
    kinds = [(spec, d) for spec in specs for d in spec.block_sizes(max_d)]

    def walk(i: int, room: int) -> Iterator[tuple[tuple[LineSpec, int, int], ...]]:
        if i == len(kinds):
            yield ()
            return
        spec, d = kinds[i]
        step = 2 if spec.parity is Parity.BAD else 1
        unit = spec.rho.dim * d
        mult = 0
        while mult * unit <= room:
            for rest in walk(i + 1, room - mult * unit):
                yield (((spec, d, mult),) if mult else ()) + rest
            mult += step

    return walk(0, max_dim)


def _tempered_parts(
    specs: Sequence[LineSpec],
    group: GroupType,
    max_rank: int,
    max_d: int,
    sigma: Optional[SigmaAnchor],
) -> Iterator[tuple[TemperedData, int]]:
    max_dim = 2 * max_rank + 1
    for choice in _block_choices(specs, max_d, max_dim):
        signed = [(spec, d, mult) for spec, d, mult in choice if spec.parity is Parity.GOOD]
        unset = [
            JordanBlock(spec.rho, d, mult, Sign.UNSET)
            for spec, d, mult in choice
            if spec.parity is Parity.BAD
        ]
        for signs in product((Sign.PLUS, Sign.MINUS), repeat=len(signed)):
            blocks = tuple(
                JordanBlock(spec.rho, d, mult, sign) for (spec, d, mult), sign in zip(signed, signs)
            )
            temp = TemperedData(blocks + tuple(unset), sigma)
            if temp.signed and temp.character() is not Sign.PLUS:
                continue
            try:
                r0 = tempered_rank(temp, group)
            except DatumValidationError:
                continue
            if r0 <= max_rank:
                yield temp, r0


def enumerate_reps(params: EnumerationParams) -> Iterator[LanglandsDatum]:
    """Every valid canonical datum of rank <= max_rank on the declared lines, each once."""
    allowed = get_settings().MAX_ENUMERATION_RANK
    if params.max_rank > allowed:
        raise EnumerationBudgetError(params.max_rank, allowed)

    decl, specs, sigma = resolve(params)
    catalog = _segment_catalog(specs, params.max_rank, params.max_block_d)
    seen: set[LanglandsDatum] = set()
    for temp, r0 in _tempered_parts(specs, decl.group, params.max_rank, params.max_block_d, sigma):
        for segments in _multisets(catalog, params.max_rank - r0):
            datum = LanglandsDatum(decl.group, segments, temp)
            if datum in seen or validation_errors(datum):
                continue
            seen.add(datum)
            yield datum
    logger.debug("enumerate.done", count=len(seen), max_rank=params.max_rank, lines=params.lines)
