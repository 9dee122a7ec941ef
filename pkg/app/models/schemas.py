"""
Pydantic wire models: the JSON mirror of a Langlands datum, HTTP request and
response bodies, enumeration parameters and the verification report.
"""

from __future__ import annotations

import json
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from app.core.exceptions import DatumValidationError, RepresentationSyntaxError
from app.models.datum import GroupType, JordanBlock, LanglandsDatum, Segment, Sign, TemperedData
from app.models.halfint import HalfInt
from app.services.classification import check_datum
from app.services.parser import Declarations, parse_header, split_document

_SIGN_SYMBOLS = {"+": Sign.PLUS, "-": Sign.MINUS, ".": Sign.UNSET}


class SegmentModel(BaseModel):
    rho: str
    x2: int
    y2: int


class BlockModel(BaseModel):
    rho: str
    d: int = Field(ge=1)
    mult: int = Field(ge=1)
    sign: Literal["+", "-", "."]


class TemperedModel(BaseModel):
    sigma: Optional[str] = None
    blocks: List[BlockModel] = Field(default_factory=list)


class DatumModel(BaseModel):
    """JSON mirror of a canonical Langlands datum; exponents are stored doubled."""

    group: Literal["Sp", "SO"]
    segments: List[SegmentModel] = Field(default_factory=list)
    temp: TemperedModel = Field(default_factory=TemperedModel)


def to_json(datum: LanglandsDatum) -> Dict[str, Any]:
    model = DatumModel(
        group=datum.group.value,
        segments=[SegmentModel(rho=s.rho.id, x2=s.x.twice, y2=s.y.twice) for s in datum.segments],
        temp=TemperedModel(
            sigma=datum.temp.sigma.id if datum.temp.sigma else None,
            blocks=[
                BlockModel(rho=b.rho.id, d=b.d, mult=b.mult, sign=b.sign.symbol)
                for b in datum.temp.blocks
            ],
        ),
    )
    return model.model_dump()


def from_json(
    data: Dict[str, Any] | DatumModel, decl: Declarations, validate: bool = True
) -> LanglandsDatum:
    """Rebuild a datum; labels and anchors are resolved against ``decl``."""
    try:
        model = data if isinstance(data, DatumModel) else DatumModel.model_validate(data)
    except ValidationError as exc:
        raise DatumValidationError(
            [f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors()]
        ) from None
    segments = tuple(
        Segment(decl.rho(s.rho), HalfInt(s.x2), HalfInt(s.y2)) for s in model.segments
    )
    blocks = tuple(
        JordanBlock(decl.rho(b.rho), b.d, b.mult, _SIGN_SYMBOLS[b.sign]) for b in model.temp.blocks
    )
    sigma = decl.sigma(model.temp.sigma) if model.temp.sigma else None
    datum = LanglandsDatum(GroupType(model.group), segments, TemperedData(blocks, sigma))
    return check_datum(datum) if validate else datum


def load_json_document(
    text: str, group: Optional[str] = None
) -> tuple[Declarations, List[LanglandsDatum]]:
    """Data from a JSON document.

    Accepts a datum mirror, a response body carrying it under ``datum`` (what the
    CLI prints with ``--json``), or a list of either. A ``header`` string on any
    item declares the labels for all of them.
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RepresentationSyntaxError(f"invalid JSON: {exc.msg}", text, exc.pos) from None
    items = payload if isinstance(payload, list) else [payload]
    if not all(isinstance(item, dict) for item in items):
        raise DatumValidationError(["JSON input must be an object or a list of objects"])
    header_text = next((item["header"] for item in items if item.get("header")), "")
    header, expressions = split_document(header_text)
    if expressions:
        raise DatumValidationError(["header may only contain group, rho and sigma lines"])
    decl = parse_header(header, group)
    return decl, [from_json(item.get("datum", item), decl) for item in items]


class EnumerationParams(BaseModel):
    """Bounds for the exhaustive enumeration.

    ``lines`` entries are ``rho`` (integral exponents) or ``rho/half``; labels
    come from the declarations in ``header``.
    """

    group: Literal["Sp", "SO"] = "Sp"
    header: str = ""
    lines: List[str] = Field(default_factory=lambda: ["1"])
    max_rank: int = Field(default=3, ge=0)
    max_block_d: int = Field(default=7, ge=1)

    @field_validator("lines")
    @classmethod
    def check_lines(cls, v: List[str]) -> List[str]:
        if not v:
            raise ValueError("at least one line is required")
        return [line.strip() for line in v]


class CheckFailure(BaseModel):
    check: str
    position: int
    datum: str
    detail: str


class VerificationReport(BaseModel):
    params: EnumerationParams
    total: int = 0
    checks: Dict[str, int] = Field(default_factory=dict)
    failures: Dict[str, int] = Field(default_factory=dict)
    first_failure: Optional[CheckFailure] = None

    @property
    def passed(self) -> bool:
        return self.first_failure is None

    def count(self, check: str, ok: bool) -> None:
        self.checks[check] = self.checks.get(check, 0) + 1
        if not ok:
            self.failures[check] = self.failures.get(check, 0) + 1

    def summary(self) -> str:
        lines = [f"data: {self.total}"]
        for name in sorted(self.checks):
            failed = self.failures.get(name, 0)
            lines.append(f"{name}: {self.checks[name]} checked, {failed} failed")
        if self.first_failure is not None:
            f = self.first_failure
            lines.append(f"first failure: {f.check} on #{f.position} {f.datum}: {f.detail}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


# HTTP bodies


class QueryRequest(BaseModel):
    """A datum given either as an expression or as its JSON mirror."""

    header: str = ""
    expression: Optional[str] = None
    datum: Optional[DatumModel] = None
    group: Optional[Literal["Sp", "SO"]] = None

    @model_validator(mode="after")
    def one_source(self) -> "QueryRequest":
        if (self.expression is None) == (self.datum is None):
            raise ValueError("give exactly one of expression and datum")
        return self


class PointQueryRequest(QueryRequest):
    at: str = Field(..., description="rho:x with x an int or int/2")
    k: int = Field(default=1, ge=0)


class DatumResponse(BaseModel):
    text: str
    datum: DatumModel


class TraceStepModel(BaseModel):
    operation: str
    point: Optional[str] = None
    k: int = 0
    before: str
    after: str
    depth: int = 0


class DualResponse(DatumResponse):
    trace: List[TraceStepModel] = Field(default_factory=list)


class DerivativeResponse(DatumResponse):
    k: int


class IrreducibleResponse(BaseModel):
    irreducible: bool
    point: str


class SplitResponse(BaseModel):
    factors: List[Dict[str, Any]]


class RankResponse(BaseModel):
    rank: int
