from typing import Any

from fastapi import APIRouter

from app.api.dependencies import ParsedQuery
from app.core.utils import get_logger
from app.models.datum import LanglandsDatum
from app.models.schemas import (
    DatumModel,
    DatumResponse,
    DerivativeResponse,
    DualResponse,
    IrreducibleResponse,
    PointQueryRequest,
    QueryRequest,
    RankResponse,
    SplitResponse,
    TraceStepModel,
    to_json,
)
from app.services import calculus
from app.services.classification import jantzen_split, rank
from app.services.duality import dual
from app.services.parser import Declarations, format_rep

router = APIRouter(prefix="/duality", tags=["Duality"])
logger = get_logger(__name__)


def _datum_response(datum: LanglandsDatum, decl: Declarations) -> dict[str, Any]:
    return {"text": format_rep(datum, decl), "datum": DatumModel.model_validate(to_json(datum))}


@router.post("/dual", response_model=DualResponse)
async def dual_endpoint(body: QueryRequest) -> DualResponse:
    """Zelevinsky-Aubert dual with its step trace"""
    q = ParsedQuery(body)
    result, trace = dual(q.datum)
    logger.info("api.dual", datum=format_rep(q.datum, q.decl), steps=len(trace))
    return DualResponse(
        **_datum_response(result, q.decl),
        trace=[
            TraceStepModel(
                operation=step.kind.value,
                point=str(step.point) if step.point is not None else None,
                k=step.k,
                before=format_rep(step.before, q.decl),
                after=format_rep(step.after, q.decl),
                depth=step.depth,
            )
            for step in trace.steps
        ],
    )


@router.post("/derive", response_model=DerivativeResponse)
async def derive_endpoint(body: PointQueryRequest) -> DerivativeResponse:
    """Highest derivative at rho|.|^x"""
    q = ParsedQuery(body)
    result = calculus.derivative_at(q.datum, q.point)
    return DerivativeResponse(**_datum_response(result.value, q.decl), k=result.k)


@router.post("/socle", response_model=DatumResponse)
async def socle_endpoint(body: PointQueryRequest) -> DatumResponse:
    """soc((rho|.|^x)^k x pi)"""
    q = ParsedQuery(body)
    return DatumResponse(**_datum_response(calculus.socle_at(q.datum, q.point, q.k), q.decl))


@router.post("/irreducible", response_model=IrreducibleResponse)
async def irreducible_endpoint(body: PointQueryRequest) -> IrreducibleResponse:
    q = ParsedQuery(body)
    if calculus.point_case(q.point, q.datum.group) is calculus.PointCase.GOOD:
        verdict = calculus.irreducible_at(q.datum, q.point)
    else:
        verdict = calculus.irreducible_at_generic(q.datum, q.point)
    return IrreducibleResponse(irreducible=verdict, point=str(q.point))


@router.post("/split", response_model=SplitResponse)
async def split_endpoint(body: QueryRequest) -> SplitResponse:
    """Jantzen factors"""
    q = ParsedQuery(body)
    return SplitResponse(
        factors=[
            {
                "parity": f.parity.value,
                "line": str(f.line) if f.line else None,
                "text": format_rep(f.datum, q.decl),
                "datum": to_json(f.datum),
            }
            for f in jantzen_split(q.datum)
        ]
    )


@router.post("/rank", response_model=RankResponse)
async def rank_endpoint(body: QueryRequest) -> RankResponse:
    return RankResponse(rank=rank(ParsedQuery(body).datum))
