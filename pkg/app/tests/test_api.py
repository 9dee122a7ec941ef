import pytest
from fastapi.testclient import TestClient

from app.main import app

API = "/api/v1"


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


class TestHealth:
    def test_root(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json()["status"] == "healthy"

    def test_detailed_runs_a_dual(self, client):
        response = client.get(f"{API}/health/detailed")
        assert response.status_code == 200
        body = response.json()
        assert body["checks"]["dual"]["status"] == "healthy"
        assert "X-Request-ID" in response.headers

    def test_liveness(self, client):
        assert client.get(f"{API}/health/liveness").json()["status"] == "alive"


class TestDuality:
    def test_dual(self, client):
        payload = {"expression": "L(D[0,-2],D[0,-1];pi(3+))"}
        response = client.post(f"{API}/duality/dual", json=payload)
        assert response.status_code == 200
        body = response.json()
        assert body["text"] == "L(D[0,-2],D[0,-1];pi(3+))"
        assert [s["operation"] for s in body["trace"]] == [
            "D_delta01",
            "D",
            "D",
            "fixed",
            "S",
            "S",
            "S_z01",
        ]

    def test_dual_accepts_its_own_output(self, client):
        first = client.post(f"{API}/duality/dual", json={"expression": "pi(1-,1-,3+)"}).json()
        assert first["text"] == "L(D[0,-1];pi(1+))"
        second = client.post(f"{API}/duality/dual", json={"datum": first["datum"]})
        assert second.status_code == 200
        assert second.json()["text"] == "pi(1-,1-,3+)"

    def test_derive(self, client):
        response = client.post(f"{API}/duality/derive", json={"expression": "pi(3+)", "at": "1:1"})
        assert response.json()["k"] == 1
        assert response.json()["text"] == "pi(1+)"

    def test_socle(self, client):
        response = client.post(
            f"{API}/duality/socle", json={"expression": "pi(1+)", "at": "1:-1", "k": 2}
        )
        assert response.json()["text"] == "L(D[-1,-1],D[-1,-1];pi(1+))"

    def test_irreducible(self, client):
        body = {"expression": "pi(3+)", "at": "1:3"}
        response = client.post(f"{API}/duality/irreducible", json=body)
        assert response.json() == {"irreducible": True, "point": "1:3"}

    def test_split_with_header(self, client):
        response = client.post(
            f"{API}/duality/split",
            json={
                "header": "rho c dim=1 type=none dual=cv\nsigma sc rank=1",
                "expression": "L(D[1,1]@c;pi()*sc)",
            },
        )
        factors = response.json()["factors"]
        assert [f["parity"] for f in factors] == ["Ugly"]
        assert factors[0]["text"] == "L(D[1,1]@c;pi()*sc)"

    def test_rank_in_so(self, client):
        body = {"expression": "pi(2+,2+)", "group": "SO"}
        response = client.post(f"{API}/duality/rank", json=body)
        assert response.json() == {"rank": 2}


class TestErrors:
    def test_syntax_error(self, client):
        response = client.post(f"{API}/duality/rank", json={"expression": "pi(1+"})
        assert response.status_code == 422
        error = response.json()["error"]
        assert error["type"] == "RepresentationSyntaxError"
        assert error["details"]["position"] == 5

    def test_header_with_expressions(self, client):
        body = {"header": "pi(1+)", "expression": "pi(1+)"}
        response = client.post(f"{API}/duality/rank", json=body)
        assert response.status_code == 422
        assert response.json()["error"]["type"] == "DatumValidationError"

    def test_unsupported_point(self, client):
        response = client.post(f"{API}/duality/derive", json={"expression": "pi(3+)", "at": "1:0"})
        assert response.status_code == 422
        assert response.json()["error"]["type"] == "UnsupportedPointError"

    def test_request_validation(self, client):
        response = client.post(f"{API}/duality/dual", json={})
        assert response.status_code == 422
        assert response.json()["error"]["type"] == "ValidationError"

    def test_expression_and_datum_together(self, client):
        body = {"expression": "pi(1+)", "datum": {"group": "Sp"}}
        response = client.post(f"{API}/duality/rank", json=body)
        assert response.status_code == 422
        assert response.json()["error"]["type"] == "ValidationError"
