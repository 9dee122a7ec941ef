"""
Text surface: declaration headers, representation expressions, printing.

    header:  group Sp|SO
             rho <id> dim=<int> type=orth|symp|none [dual=<id>]
             sigma <id> rank=<int>
    rep   := "L(" seg ("," seg)* ";" temp ")" | temp
    seg   := "D[" half "," half "]" ["@" rho]
    temp  := "pi(" [block ("," block)*] ")" ["*" sigma]
    block := int ("+"|"-"|".") ["@" rho] ["^" int]
    half  := int | int "/2"
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from app.config.settings import get_settings
from app.core.exceptions import (
    DatumValidationError,
    RepresentationSyntaxError,
    UndeclaredSymbolError,
)
from app.models.datum import (
    GroupType,
    JordanBlock,
    LanglandsDatum,
    Point,
    RhoLabel,
    Segment,
    SelfDuality,
    SigmaAnchor,
    Sign,
    TemperedData,
)
from app.models.halfint import HalfInt
from app.services.classification import check_datum

_ID = re.compile(r"[A-Za-z0-9_']+")
_INT = re.compile(r"-?\d+")
_SIGNS = {"+": Sign.PLUS, "-": Sign.MINUS, ".": Sign.UNSET}
_HEADER_WORDS = ("group", "rho", "sigma")


@dataclass(frozen=True)
class Declarations:
    group: GroupType
    rhos: dict[str, RhoLabel] = field(default_factory=dict)
    sigmas: dict[str, SigmaAnchor] = field(default_factory=dict)

    @classmethod
    def default(cls, group: GroupType | str | None = None) -> Declarations:
        settings = get_settings()
        group = GroupType(group or settings.DEFAULT_GROUP)
        trivial = RhoLabel(settings.DEFAULT_RHO, 1, SelfDuality.ORTHOGONAL)
        return cls(group, {trivial.id: trivial})

    @property
    def default_rho(self) -> Optional[RhoLabel]:
        """The unique declared self-dual label."""
        self_dual = [r for r in self.rhos.values() if r.is_self_dual]
        return self_dual[0] if len(self_dual) == 1 else None

    def rho(self, rho_id: Optional[str]) -> RhoLabel:
        if rho_id is None:
            default = self.default_rho
            if default is None:
                raise UndeclaredSymbolError("rho", "<default>")
            return default
        try:
            return self.rhos[rho_id]
        except KeyError:
            raise UndeclaredSymbolError("rho", rho_id) from None

    def sigma(self, sigma_id: str) -> SigmaAnchor:
        try:
            return self.sigmas[sigma_id]
        except KeyError:
            raise UndeclaredSymbolError("sigma", sigma_id) from None

    def with_group(self, group: GroupType | str) -> Declarations:
        return Declarations(GroupType(group), dict(self.rhos), dict(self.sigmas))


def _options(words: list[str], line: str) -> dict[str, str]:
    opts = {}
    for word in words:
        key, sep, value = word.partition("=")
        if not sep or not value:
            raise RepresentationSyntaxError(
                f"expected key=value, got {word!r}", line, line.find(word)
            )
        opts[key] = value
    return opts


def parse_header(lines: list[str], group: GroupType | str | None = None) -> Declarations:
    settings = get_settings()
    group_value: Optional[str] = None
    rhos: dict[str, RhoLabel] = {}
    sigmas: dict[str, SigmaAnchor] = {}

    for line in lines:
        words = line.split()
        head, rest = words[0], words[1:]
        if head == "group":
            if len(rest) != 1 or rest[0] not in ("Sp", "SO"):
                raise RepresentationSyntaxError("expected 'group Sp' or 'group SO'", line, 0)
            group_value = rest[0]
        elif head == "rho":
            if not rest:
                raise RepresentationSyntaxError("rho needs an id", line, len(line))
            rho_id, opts = rest[0], _options(rest[1:], line)
            try:
                kind = SelfDuality(opts.get("type", "orth"))
                dim = int(opts.get("dim", "1"))
            except ValueError as exc:
                raise RepresentationSyntaxError(str(exc), line, 0) from None
            own_dual = rho_id if kind is not SelfDuality.NONE else ""
            label = RhoLabel(rho_id, dim, kind, opts.get("dual", own_dual))
            rhos[label.id] = label
            if not label.is_self_dual:
                rhos.setdefault(label.dual_id, label.dual())
        elif head == "sigma":
            if not rest:
                raise RepresentationSyntaxError("sigma needs an id", line, len(line))
            opts = _options(rest[1:], line)
            try:
                sigmas[rest[0]] = SigmaAnchor(rest[0], int(opts.get("rank", "0")))
            except ValueError as exc:
                raise RepresentationSyntaxError(str(exc), line, 0) from None
        else:
            raise RepresentationSyntaxError(f"unknown header keyword {head!r}", line, 0)

    if not rhos:
        trivial = RhoLabel(settings.DEFAULT_RHO, 1, SelfDuality.ORTHOGONAL)
        rhos[trivial.id] = trivial
    chosen = group or group_value or settings.DEFAULT_GROUP
    return Declarations(GroupType(chosen), rhos, sigmas)


def split_document(text: str) -> tuple[list[str], list[str]]:
    """Separate header lines from expression lines; '#' starts a comment."""
    header, expressions = [], []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.split()[0] in _HEADER_WORDS:
            header.append(line)
        else:
            expressions.append(line)
    return header, expressions


def parse_document(
    text: str, group: GroupType | str | None = None
) -> tuple[Declarations, list[LanglandsDatum]]:
    header, expressions = split_document(text)
    decl = parse_header(header, group)
    return decl, [parse_rep(expr, decl) for expr in expressions]


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, reason: str) -> RepresentationSyntaxError:
        return RepresentationSyntaxError(reason, self.text, self.pos)

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, literal: str) -> bool:
        self.skip()
        return self.text.startswith(literal, self.pos)

    def accept(self, literal: str) -> bool:
        if self.peek(literal):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal: str) -> None:
        if not self.accept(literal):
            raise self.error(f"expected {literal!r}")

    def regex(self, pattern: re.Pattern[str], what: str) -> str:
        self.skip()
        match = pattern.match(self.text, self.pos)
        if not match:
            raise self.error(f"expected {what}")
        self.pos = match.end()
        return match.group(0)

    def half(self) -> HalfInt:
        n = int(self.regex(_INT, "an integer"))
        if self.accept("/"):
            self.expect("2")
            return HalfInt(n)
        return HalfInt.of(n)

    def at_end(self) -> bool:
        self.skip()
        return self.pos == len(self.text)


def _parse_segment(sc: _Scanner, decl: Declarations) -> Optional[Segment]:
    sc.expect("D[")
    x = sc.half()
    sc.expect(",")
    y = sc.half()
    sc.expect("]")
    rho = decl.rho(sc.regex(_ID, "a rho id") if sc.accept("@") else None)
    if x < y - 1:
        raise DatumValidationError([f"segment [{x},{y}]: x < y"])
    return Segment.maybe(rho, x, y)


def _parse_temp(sc: _Scanner, decl: Declarations) -> TemperedData:
    sc.expect("pi(")
    blocks: list[JordanBlock] = []
    if not sc.peek(")"):
        while True:
            d = int(sc.regex(_INT, "a block size"))
            sc.skip()
            symbol = sc.text[sc.pos : sc.pos + 1]
            if symbol not in _SIGNS:
                raise sc.error("expected a sign '+', '-' or '.'")
            sc.pos += 1
            rho = decl.rho(sc.regex(_ID, "a rho id") if sc.accept("@") else None)
            mult = int(sc.regex(_INT, "a multiplicity")) if sc.accept("^") else 1
            blocks.append(JordanBlock(rho, d, mult, _SIGNS[symbol]))
            if not sc.accept(","):
                break
    sc.expect(")")
    sigma = decl.sigma(sc.regex(_ID, "a sigma id")) if sc.accept("*") else None
    return TemperedData(tuple(blocks), sigma)


def parse_rep(
    text: str, decl: Optional[Declarations] = None, validate: bool = True
) -> LanglandsDatum:
    decl = decl or Declarations.default()
    sc = _Scanner(text)
    segments: list[Segment] = []
    if sc.accept("L("):
        while True:
            seg = _parse_segment(sc, decl)
            if seg is not None:
                segments.append(seg)
            if not sc.accept(","):
                break
        sc.expect(";")
        temp = _parse_temp(sc, decl)
        sc.expect(")")
    else:
        temp = _parse_temp(sc, decl)
    if not sc.at_end():
        raise sc.error("trailing input")
    datum = LanglandsDatum(decl.group, tuple(segments), temp)
    return check_datum(datum) if validate else datum


def parse_point(text: str, decl: Declarations) -> Point:
    """``rho:x`` or just ``x`` on the default line."""
    rho_id, sep, value = text.rpartition(":")
    try:
        x = HalfInt.parse(value)
    except ValueError:
        raise RepresentationSyntaxError(
            "expected rho:x with x an int or int/2", text, len(rho_id) + len(sep)
        ) from None
    return Point(decl.rho(rho_id or None), x)


def _default_id(decl: Optional[Declarations]) -> Optional[str]:
    if decl is None:
        return get_settings().DEFAULT_RHO
    default = decl.default_rho
    return default.id if default else None


def _suffix(rho: RhoLabel, default_id: Optional[str]) -> str:
    return "" if rho.id == default_id else f"@{rho.id}"


def format_temp(temp: TemperedData, decl: Optional[Declarations] = None) -> str:
    default_id = _default_id(decl)
    parts = []
    for block in temp.blocks:
        parts.extend([f"{block.d}{block.sign.symbol}{_suffix(block.rho, default_id)}"] * block.mult)
    text = "pi(" + ",".join(parts) + ")"
    if temp.sigma is not None:
        text += f"*{temp.sigma.id}"
    return text


def format_segment(seg: Segment, decl: Optional[Declarations] = None) -> str:
    return f"D[{seg.x},{seg.y}]{_suffix(seg.rho, _default_id(decl))}"


def format_rep(datum: LanglandsDatum, decl: Optional[Declarations] = None) -> str:
    temp = format_temp(datum.temp, decl)
    if not datum.segments:
        return temp
    segs = ",".join(format_segment(seg, decl) for seg in datum.segments)
    return f"L({segs};{temp})"
