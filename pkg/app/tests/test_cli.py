import json

import pytest

from app.cli import run
from app.core.exceptions import EXIT_OK, EXIT_VALIDATION


def _out(capsys):
    return capsys.readouterr().out.strip().splitlines()


class TestExpressionCommands:
    def test_dual(self, capsys):
        assert run(["dual", "L(D[0,-2],D[0,-1];pi(3+))"]) == EXIT_OK
        assert _out(capsys) == ["L(D[0,-2],D[0,-1];pi(3+))"]

    def test_dual_with_trace(self, capsys):
        assert run(["dual", "L(D[0,-2],D[0,-1];pi(3+))", "--trace"]) == EXIT_OK
        lines = _out(capsys)
        assert len(lines) == 8
        assert "S_Z[0,1]" in lines[-1]

    def test_dual_json(self, capsys):
        assert run(["dual", "pi(1-,1-,3+)", "--json", "--trace"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["text"] == "L(D[0,-1];pi(1+))"
        assert payload["datum"]["segments"] == [{"rho": "1", "x2": 0, "y2": -2}]
        assert [step["operation"] for step in payload["trace"]] == ["temp_dual"]

    def test_several_expressions(self, capsys):
        assert run(["rank", "pi(1+,1+,3+,5-,5-)", "pi(3+,5-,5-)"]) == EXIT_OK
        assert _out(capsys) == ["7", "6"]

    @pytest.mark.parametrize("at", ["1:1", "1", "rho:1"])
    def test_derive(self, capsys, at):
        assert run(["derive", "pi(3+)", "--at", at]) == EXIT_OK
        assert _out(capsys) == ["k=1 pi(1+)"]

    def test_derive_delta01(self, capsys):
        assert run(["derive", "L(D[0,-1];pi(1+,1+,1+))", "--at", "delta01"]) == EXIT_OK
        assert _out(capsys) == ["k=1 pi(1+,1+,1+)"]

    def test_derive_z01(self, capsys):
        assert run(["derive", "pi(1-,1-,3+)", "--at", "z01:1"]) == EXIT_OK
        assert _out(capsys) == ["k=1 pi(1+)"]

    def test_socle(self, capsys):
        assert run(["socle", "pi(1+)", "--at", "1:-1", "--k", "2"]) == EXIT_OK
        assert _out(capsys) == ["L(D[-1,-1],D[-1,-1];pi(1+))"]

    def test_socle_z01(self, capsys):
        assert run(["socle", "pi(1+)", "--at", "z01", "--k", "1"]) == EXIT_OK
        assert _out(capsys) == ["pi(1-,1-,3+)"]

    def test_irred(self, capsys):
        assert run(["irred", "pi(1+)", "pi(3+)", "--at", "1:3"]) == EXIT_OK
        assert _out(capsys) == ["irreducible", "irreducible"]
        assert run(["irred", "pi(1+)", "--at", "1:1"]) == EXIT_OK
        assert _out(capsys) == ["reducible"]

    def test_split(self, capsys):
        assert run(["split", "L(D[0,-2],D[0,-1];pi(3+))"]) == EXIT_OK
        assert _out(capsys) == ["Good: L(D[0,-2],D[0,-1];pi(3+))"]

    def test_input_file_with_header(self, capsys, tmp_path):
        source = tmp_path / "reps.txt"
        source.write_text("group SO\n# two blocks\npi(2+,2+)\n", encoding="utf-8")
        assert run(["rank", "--input", str(source)]) == EXIT_OK
        assert _out(capsys) == ["2"]

    def test_metadata_goes_to_stderr(self, capsys):
        assert run(["rank", "pi(3+)", "--metadata"]) == EXIT_OK
        captured = capsys.readouterr()
        assert captured.out.strip() == "1"
        assert "elapsed_ms" in captured.err

    def test_json_output_feeds_back_in(self, capsys, tmp_path):
        assert run(["dual", "pi(1-,1-,3+)", "--json"]) == EXIT_OK
        source = tmp_path / "dual.json"
        source.write_text(capsys.readouterr().out, encoding="utf-8")
        assert run(["dual", "--input", str(source)]) == EXIT_OK
        assert _out(capsys) == ["pi(1-,1-,3+)"]

    def test_json_list_feeds_back_in(self, capsys):
        assert run(["dual", "pi(1-,1-,3+)", "L(D[0,-1];pi(1+))", "--json"]) == EXIT_OK
        document = capsys.readouterr().out
        assert run(["dual", document]) == EXIT_OK
        assert _out(capsys) == ["pi(1-,1-,3+)", "L(D[0,-1];pi(1+))"]

    def test_json_datum_with_header(self, capsys):
        document = json.dumps(
            {
                "header": "group SO",
                "datum": {
                    "group": "SO",
                    "temp": {"blocks": [{"rho": "1", "d": 2, "mult": 2, "sign": "+"}]},
                },
            }
        )
        assert run(["rank", document]) == EXIT_OK
        assert _out(capsys) == ["2"]


class TestErrors:
    def test_syntax_error_points_at_position(self, capsys):
        assert run(["dual", "L(D[0,-1] pi(1+))"]) == EXIT_VALIDATION
        err = capsys.readouterr().err
        assert "syntax error at position 10" in err
        assert "^" in err

    def test_invalid_datum(self, capsys):
        assert run(["dual", "pi(1+,1+)"]) == EXIT_VALIDATION
        assert "invalid datum" in capsys.readouterr().err

    def test_missing_point(self, capsys):
        assert run(["derive", "pi(3+)"]) == EXIT_VALIDATION

    def test_socle_needs_order(self, capsys):
        assert run(["socle", "pi(1+)", "--at", "1:1"]) == EXIT_VALIDATION

    def test_zero_point(self, capsys):
        assert run(["derive", "pi(3+)", "--at", "1:0"]) == EXIT_VALIDATION

    def test_no_expression(self, capsys):
        assert run(["rank"]) == EXIT_VALIDATION

    def test_malformed_json(self, capsys):
        assert run(["rank", "{\"group\": "]) == EXIT_VALIDATION
        assert "invalid JSON" in capsys.readouterr().err

    def test_json_datum_breaking_invariants(self, capsys):
        block = {"rho": "1", "d": 1, "mult": 2, "sign": "+"}
        document = json.dumps({"group": "Sp", "temp": {"blocks": [block]}})
        assert run(["rank", document]) == EXIT_VALIDATION
        assert "invalid datum" in capsys.readouterr().err

    def test_missing_file(self, capsys, tmp_path):
        assert run(["rank", "--input", str(tmp_path / "absent.txt")]) == EXIT_VALIDATION

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            run(["frobnicate"])


class TestHarnessCommands:
    def test_golden(self, capsys):
        assert run(["golden"]) == EXIT_OK
        lines = _out(capsys)
        assert len(lines) == 4
        assert all(line.startswith("ok") for line in lines)

    def test_golden_json(self, capsys):
        assert run(["golden", "--json"]) == EXIT_OK
        assert all(entry["ok"] for entry in json.loads(capsys.readouterr().out))

    def test_selftest(self, capsys):
        assert run(["selftest", "--max-rank", "0", "--workers", "1"]) == EXIT_OK
        assert _out(capsys)[-1] == "PASS"
