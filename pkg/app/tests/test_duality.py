from dataclasses import replace

import pytest

from app.services.classification import factor_of, rank
from app.services.duality import (
    DualTrace,
    ScanOrder,
    StepKind,
    delta01_label,
    dual,
    dual_factor,
    find_candidate,
    mirror_step,
    mirrored,
    render_trace,
    replay,
)
from app.services.golden import GOLDEN_CASES, run_all, run_golden


@pytest.mark.parametrize("case", GOLDEN_CASES, ids=lambda c: c.expression)
def test_golden_cases(case):
    outcome = run_golden(case)
    assert outcome.ok, outcome.line()
    assert replay(outcome.trace) == []
    assert rank(outcome.dual) == rank(outcome.datum)


def test_run_all_reports_every_case():
    results = run_all()
    assert [r.case for r in results] == list(GOLDEN_CASES)
    assert all(r.line().startswith("ok") for r in results)


class TestLadderTrace:
    @pytest.fixture
    def traced(self, rep):
        return dual(rep("L(D[0,-2],D[0,-1];pi(3+))"))

    def test_steps(self, traced):
        _, trace = traced
        assert trace.kinds() == [
            StepKind.DELTA01,
            StepKind.DERIVATIVE,
            StepKind.DERIVATIVE,
            StepKind.FIXED,
            StepKind.SOCLE,
            StepKind.SOCLE,
            StepKind.Z01,
        ]
        assert [s.depth for s in trace.steps] == [0, 1, 2, 3, 2, 1, 0]
        assert [str(s.point) for s in trace.steps[1:3]] == ["1:-2", "1:1"]
        assert [str(s.point) for s in trace.steps[4:6]] == ["1:-1", "1:2"]
        assert [s.k for s in trace.steps] == [2, 1, 1, 0, 1, 1, 2]

    def test_intermediates(self, traced, rep):
        result, trace = traced
        afters = [s.after for s in trace.steps]
        assert afters == [
            rep("L(D[-2,-2];pi(3+))"),
            rep("pi(3+)"),
            rep("pi(1+)"),
            rep("pi(1+)"),
            rep("L(D[-1,-1];pi(1+))"),
            rep("L(D[-1,-2];pi(1+))"),
            result,
        ]
        assert result == rep("L(D[0,-2],D[0,-1];pi(3+))")

    def test_render(self, traced, sp):
        _, trace = traced
        lines = render_trace(trace, sp).splitlines()
        assert len(lines) == 7
        assert "D_D[0,-1]" in lines[0]
        assert "S_Z[0,1]" in lines[-1]
        assert "fixed" in lines[3]
        assert lines[0].rstrip().endswith("-> L(D[-2,-2];pi(3+))")


def test_first_step_of_tempered_dual(rep):
    _, trace = dual(rep("pi(1+,1+,3+,5-,5-)"))
    first = trace.steps[0]
    assert (first.kind, str(first.point), first.k) == (StepKind.DERIVATIVE, "1:2", 1)


class TestCandidates:
    def test_found(self, rep):
        point, k = find_candidate(rep("L(D[-2,-2];pi(3+))"))
        assert (str(point), k) == ("1:-2", 1)

    def test_reduced_ladder(self, rep):
        assert find_candidate(rep("L(D[0,-2],D[0,-1];pi(3+))")) is None

    def test_factor_input(self, rep):
        assert find_candidate(factor_of(rep("pi(3+)"))) is not None

    def test_delta01_label(self, rep, sp):
        assert delta01_label(rep("L(D[0,-2],D[0,-1];pi(3+))")) == sp.rho("1")
        assert delta01_label(rep("L(D[-2,-2];pi(3+))"), ScanOrder.REVERSED) is None


class TestUglyLine:
    def test_dual_of_two_characters_is_a_segment(self, mixed, rep):
        result, trace = dual(rep("L(D[1,1]@c,D[2,2]@c;pi()*sc)", mixed))
        assert result == rep("L(D[2,1]@c;pi()*sc)", mixed)
        assert not replay(trace)

    def test_involution(self, mixed, rep):
        datum = rep("L(D[2,1]@c;pi()*sc)", mixed)
        assert dual(dual(datum)[0])[0] == datum

    def test_character_is_self_dual(self, mixed, rep):
        datum = rep("L(D[1,1]@c;pi()*sc)", mixed)
        result, trace = dual(datum)
        assert result == datum
        assert trace.kinds() == [StepKind.DERIVATIVE, StepKind.FIXED, StepKind.SOCLE]
        assert str(trace.steps[-1].point) == "cv:-1"


def test_tempered_factor_dualised_directly(rep):
    trace = DualTrace()
    out = dual_factor(factor_of(rep("pi(1-,1-,3+)")), trace)
    assert out == rep("L(D[0,-1];pi(1+))")
    assert trace.kinds() == [StepKind.TEMPERED]


def test_replay_flags_tampered_step(rep):
    _, trace = dual(rep("L(D[-2,-2];pi(3+))"))
    first = trace.steps[0]
    trace.steps[0] = replace(first, k=first.k + 1)
    assert replay(trace) == [0]


class TestMirror:
    @pytest.mark.parametrize(
        "text",
        ["L(D[0,-2],D[0,-1];pi(3+))", "L(D[-2,-2];pi(3+))", "pi(1+,1+,3+,5-,5-)", "pi(1-,1-,3+)"],
    )
    def test_trace_is_its_own_mirror(self, rep, text):
        _, trace = dual(rep(text))
        assert mirrored(trace) == trace

    def test_ugly_line(self, mixed, rep):
        _, trace = dual(rep("L(D[1,1]@c,D[2,2]@c;pi()*sc)", mixed))
        assert mirrored(trace) == trace

    def test_factors_are_mirrored_separately(self, rep):
        _, ladder = dual(rep("L(D[0,-2],D[0,-1];pi(3+))"))
        _, tempered = dual(rep("pi(1-,1-,3+)"))
        joined = DualTrace(ladder.steps + tempered.steps)
        assert mirrored(joined) == joined

    def test_derivative_mirrors_to_socle(self, rep):
        _, trace = dual(rep("L(D[0,-2],D[0,-1];pi(3+))"))
        step = mirror_step(trace.steps[1])
        assert step == trace.steps[5]
        assert (step.kind, str(step.point), step.k) == (StepKind.SOCLE, "1:2", 1)
        assert mirror_step(trace.steps[0]).kind is StepKind.Z01

    def test_tampered_trace_breaks_the_mirror(self, rep):
        _, trace = dual(rep("L(D[-2,-2];pi(3+))"))
        trace.steps[-1] = replace(trace.steps[-1], k=trace.steps[-1].k + 1)
        assert mirrored(trace) != trace
