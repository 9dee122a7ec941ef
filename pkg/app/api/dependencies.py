from typing import Optional

from app.core.exceptions import DatumValidationError
from app.models.datum import LanglandsDatum, Point
from app.models.schemas import PointQueryRequest, QueryRequest, from_json
from app.services.parser import Declarations, parse_header, parse_point, parse_rep, split_document


class ParsedQuery:
    """Declarations and the single datum named by a request body"""

    def __init__(self, body: QueryRequest):
        header, expressions = split_document(body.header)
        if expressions:
            raise DatumValidationError(["header may only contain group, rho and sigma lines"])
        self.decl: Declarations = parse_header(header, body.group)
        self.datum: LanglandsDatum = (
            from_json(body.datum, self.decl)
            if body.datum is not None
            else parse_rep(body.expression or "", self.decl)
        )
        self.point: Optional[Point] = None
        if isinstance(body, PointQueryRequest):
            self.point = parse_point(body.at, self.decl)
            self.k = body.k
