"""
Line classification, validation, rank bookkeeping and the Jantzen split.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Sequence

from app.core.exceptions import DatumValidationError
from app.models.datum import (
    ExpClass,
    Factor,
    GroupType,
    JordanBlock,
    LanglandsDatum,
    Parity,
    RhoLabel,
    RhoLine,
    Segment,
    Sign,
    TemperedData,
)


def classify_line(line: RhoLine, group: GroupType) -> Parity:
    if line.exp_class is ExpClass.UGLY:
        return Parity.UGLY
    same_type = line.base.self_dual is group.phi_type
    if line.exp_class is ExpClass.INTEGRAL:
        return Parity.GOOD if same_type else Parity.BAD
    return Parity.BAD if same_type else Parity.GOOD


def segment_line(seg: Segment) -> RhoLine:
    return RhoLine.through(seg.rho, seg.x)


def block_line(block: JordanBlock) -> RhoLine:
    return RhoLine.through(block.rho, block.exponent)


def re_base(segments: Iterable[Segment], target: RhoLabel) -> tuple[Segment, ...]:
    """Rewrite segments of an ugly pair onto ``target``."""
    if target.is_self_dual:
        raise DatumValidationError([f"re_base: {target.id} is self-dual"])
    out = []
    for seg in segments:
        if seg.rho.id not in (target.id, target.dual_id):
            raise DatumValidationError([f"re_base: {seg} is not on the pair of {target.id}"])
        out.append(seg.rebased(target))
    return tuple(sorted(out, key=Segment.sort_key))


def validation_errors(datum: LanglandsDatum) -> list[str]:
    group = datum.group
    errors: list[str] = []
    has_good_segments = False
    needs_sigma = False

    for seg in datum.segments:
        parity = classify_line(segment_line(seg), group)
        if parity is Parity.UGLY:
            needs_sigma = True
            continue
        if seg.x + seg.y >= 0:
            errors.append(f"{seg}: x + y must be negative")
        if parity is Parity.GOOD:
            has_good_segments = True
        else:
            needs_sigma = True

    for block in datum.temp.blocks:
        if not block.rho.is_self_dual:
            errors.append(f"block {block.rho.id}/S_{block.d}: rho must be self-dual")
            continue
        parity = classify_line(block_line(block), group)
        if parity is Parity.GOOD and block.sign is Sign.UNSET:
            errors.append(f"block {block.rho.id}/S_{block.d}: good parity needs a sign")
        if parity is Parity.BAD:
            needs_sigma = True
            if block.sign is not Sign.UNSET:
                errors.append(f"block {block.rho.id}/S_{block.d}: bad parity carries no sign")
            if block.mult % 2:
                errors.append(
                    f"block {block.rho.id}/S_{block.d}: bad parity needs even multiplicity"
                )

    temp = datum.temp
    if temp.signed and temp.character() is not Sign.PLUS:
        errors.append("sign character is nontrivial on the central element")
    if needs_sigma and temp.sigma is None:
        errors.append("bad or ugly data need a cuspidal anchor sigma")
    if has_good_segments and temp.sigma is not None and not temp.signed:
        errors.append(
            "good-parity segments need an explicit tempered parameter, not an opaque sigma"
        )
    if temp.signed or temp.sigma is None:
        parity_ok = temp.dimension % 2 == (1 if group is GroupType.SP_EVEN else 0)
        if not parity_ok:
            errors.append(f"dim phi = {temp.dimension} has the wrong parity for {group.value}")
    return errors


def check_datum(datum: LanglandsDatum) -> LanglandsDatum:
    errors = validation_errors(datum)
    if errors:
        raise DatumValidationError(errors)
    return datum


def tempered_rank(temp: TemperedData, group: GroupType) -> int:
    if temp.signed or temp.sigma is None:
        dim = temp.dimension
        if group is GroupType.SP_EVEN:
            if dim % 2 != 1:
                raise DatumValidationError([f"dim phi = {dim} must be odd for Sp"])
            return (dim - 1) // 2
        if dim % 2:
            raise DatumValidationError([f"dim phi = {dim} must be even for SO"])
        return dim // 2
    return temp.sigma.rank + sum(b.dimension for b in temp.unset) // 2


def rank(datum: LanglandsDatum) -> int:
    return sum(seg.size for seg in datum.segments) + tempered_rank(datum.temp, datum.group)


def jantzen_split(datum: LanglandsDatum) -> list[Factor]:
    check_datum(datum)
    group, sigma = datum.group, datum.temp.sigma

    good_segments: list[Segment] = []
    good_blocks: list[JordanBlock] = []
    bad: dict[RhoLine, tuple[list[Segment], list[JordanBlock]]] = defaultdict(lambda: ([], []))
    ugly: dict[RhoLine, list[Segment]] = defaultdict(list)

    for seg in datum.segments:
        line = segment_line(seg)
        parity = classify_line(line, group)
        if parity is Parity.GOOD:
            good_segments.append(seg)
        elif parity is Parity.BAD:
            bad[line][0].append(seg)
        else:
            ugly[line].append(seg)
    for block in datum.temp.blocks:
        line = block_line(block)
        if classify_line(line, group) is Parity.GOOD:
            good_blocks.append(block)
        else:
            bad[line][1].append(block)

    factors: list[Factor] = []
    if good_segments or good_blocks or not (bad or ugly):
        temp = TemperedData(tuple(good_blocks), sigma)
        factors.append(Factor(Parity.GOOD, LanglandsDatum(group, tuple(good_segments), temp)))
    for line in sorted(bad, key=lambda ln: ln.key):
        segs, blocks = bad[line]
        temp = TemperedData(tuple(blocks), sigma)
        factors.append(Factor(Parity.BAD, LanglandsDatum(group, tuple(segs), temp), line))
    for line in sorted(ugly, key=lambda ln: ln.key):
        segs = re_base(ugly[line], line.base)
        temp = TemperedData((), sigma)
        factors.append(Factor(Parity.UGLY, LanglandsDatum(group, segs, temp), line))
    return factors


def jantzen_merge(factors: Sequence[Factor]) -> LanglandsDatum:
    if not factors:
        raise DatumValidationError(["jantzen_merge needs at least one factor"])
    group = factors[0].group
    segments: list[Segment] = []
    blocks: list[JordanBlock] = []
    sigma = None
    for factor in factors:
        if factor.group is not group:
            raise DatumValidationError(["factors belong to different groups"])
        segments.extend(factor.datum.segments)
        blocks.extend(factor.datum.temp.blocks)
        sigma = sigma or factor.datum.temp.sigma
    return LanglandsDatum(group, tuple(segments), TemperedData(tuple(blocks), sigma))


def factor_of(datum: LanglandsDatum) -> Factor:
    """The single factor of a datum living on one Jantzen class."""
    factors = jantzen_split(datum)
    if len(factors) != 1:
        raise DatumValidationError([f"datum spans {len(factors)} Jantzen factors"])
    return factors[0]
