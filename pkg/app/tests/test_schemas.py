import json

import pytest
from pydantic import ValidationError

from app.core.exceptions import (
    DatumValidationError,
    RepresentationSyntaxError,
    UndeclaredSymbolError,
)
from app.models.schemas import DatumModel, EnumerationParams, from_json, load_json_document, to_json


def test_json_mirror_fields(rep, so):
    data = to_json(rep("L(D[-1/2,-3/2];pi(2+,2+))", so))
    assert data == {
        "group": "SO",
        "segments": [{"rho": "1", "x2": -1, "y2": -3}],
        "temp": {"sigma": None, "blocks": [{"rho": "1", "d": 2, "mult": 2, "sign": "+"}]},
    }


def test_from_json_resolves_labels(mixed, rep):
    datum = rep("L(D[1,1]@c;pi(1+@1,1.@s^2)*sc)", mixed)
    assert from_json(to_json(datum), mixed) == datum
    assert from_json(DatumModel.model_validate(to_json(datum)), mixed) == datum


def _tempered(rho, d, mult, sign):
    return {"group": "Sp", "temp": {"blocks": [{"rho": rho, "d": d, "mult": mult, "sign": sign}]}}


def test_from_json_undeclared(sp):
    with pytest.raises(UndeclaredSymbolError):
        from_json(_tempered("q", d=1, mult=1, sign="+"), sp)


def test_model_rejects_bad_sign():
    with pytest.raises(ValidationError):
        DatumModel.model_validate(_tempered("1", d=1, mult=1, sign="*"))


def test_enumeration_params_need_lines():
    with pytest.raises(ValidationError):
        EnumerationParams(lines=[])
    assert EnumerationParams(lines=[" 1 "]).lines == ["1"]


def test_from_json_validates(sp):
    with pytest.raises(DatumValidationError):
        from_json(_tempered("1", d=1, mult=2, sign="+"), sp)
    with pytest.raises(DatumValidationError):
        from_json({"group": "Sp", "segments": [{"rho": "1"}]}, sp)


def test_load_json_document_accepts_response_bodies(rep):
    datum = rep("L(D[0,-1];pi(1+))")
    body = {"text": "L(D[0,-1];pi(1+))", "datum": to_json(datum), "trace": []}
    decl, data = load_json_document(json.dumps([body, to_json(datum)]))
    assert data == [datum, datum]
    assert decl.rho("1").id == "1"


def test_load_json_document_header(mixed, rep):
    datum = rep("L(D[1,1]@c;pi(1+@1,1.@s^2)*sc)", mixed)
    header = "\n".join(
        [
            "group Sp",
            "rho 1 dim=1 type=orth",
            "rho s dim=2 type=symp",
            "rho c dim=1 type=none dual=cv",
            "sigma sc rank=2",
        ]
    )
    _, data = load_json_document(json.dumps({"header": header, "datum": to_json(datum)}))
    assert data == [datum]


def test_load_json_document_rejects_scalars():
    with pytest.raises(DatumValidationError):
        load_json_document("[1, 2]")
    with pytest.raises(RepresentationSyntaxError):
        load_json_document("{")
