import pytest

from app.config.settings import get_settings
from app.models.datum import LanglandsDatum, Point
from app.services.parser import Declarations, parse_header, parse_point, parse_rep


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch):
    """Every test sees settings built from its own environment."""
    monkeypatch.setenv("LOG_JSON", "false")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def strict(monkeypatch):
    monkeypatch.setenv("STRICT_CHECKS", "true")
    monkeypatch.setenv("DEBUG", "true")
    get_settings.cache_clear()


@pytest.fixture
def sp() -> Declarations:
    return Declarations.default("Sp")


@pytest.fixture
def so() -> Declarations:
    return Declarations.default("SO")


@pytest.fixture
def mixed() -> Declarations:
    """Trivial rho, a symplectic rho of dimension 2, an ugly pair and an anchor."""
    return parse_header(
        [
            "group Sp",
            "rho 1 dim=1 type=orth",
            "rho s dim=2 type=symp",
            "rho c dim=1 type=none dual=cv",
            "sigma sc rank=2",
        ]
    )


@pytest.fixture
def rep(sp):
    def build(text: str, decl: Declarations = None) -> LanglandsDatum:
        return parse_rep(text, decl or sp)

    return build


@pytest.fixture
def at(sp):
    def build(text: str, decl: Declarations = None) -> Point:
        return parse_point(text, decl or sp)

    return build
