from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given

from xscore.diagnosis import (MINIMUM_ONLY, AbductionProblem, CausalSetting, DiagnosisProblem, abduce,
                              actual_causes_logical, diagnoses, is_diagnosis, is_explanation,
                              is_minimal_diagnosis)
from xscore.errors import CapExceeded, ParseError, PreconditionError
from xscore.logic import consistent

from conftest import rng_for, seeds
from oracles import logical_causes_by_flips

MODEL = ["!AbA -> (x <-> (a & b))", "!AbO -> (d <-> (x | c))"]


@pytest.fixture
def circuit(fixture):
    return DiagnosisProblem.from_json(fixture("circuit_diagnosis.json"))


def test_minimal_diagnoses(circuit):
    found = diagnoses(circuit)
    assert [d.abnormal for d in found] == [frozenset({"AbO"})]
    assert found[0].minimal and found[0].minimum
    assert is_diagnosis(circuit, {"AbA", "AbO"}) and not is_minimal_diagnosis(circuit, {"AbA", "AbO"})
    assert not is_diagnosis(circuit, {"AbA"})


def test_consistent_problem_has_empty_diagnosis():
    p = DiagnosisProblem(MODEL, ["AbA", "AbO"], ["a", "b", "c", "d"])
    assert [d.abnormal for d in diagnoses(p)] == [frozenset()]


def test_minimum_only_stops_early():
    p = DiagnosisProblem(["!A1 -> x", "!A2 -> y", "!A3 -> (x | y)"], ["A1", "A2", "A3"], ["!x", "!y"])
    assert [sorted(d.abnormal) for d in diagnoses(p)] == [["A1", "A2", "A3"]]
    p = DiagnosisProblem(["!A1 -> x", "!A2 -> x", "!A3 -> y"], ["A1", "A2", "A3"], ["!x | !y"])
    found = diagnoses(p, MINIMUM_ONLY)
    assert [sorted(d.abnormal) for d in found] == [["A3"]]
    assert [sorted(d.abnormal) for d in diagnoses(p)] == [["A3"], ["A1", "A2"]]


def test_component_cap():
    comps = [f"A{i}" for i in range(5)]
    with pytest.raises(CapExceeded):
        diagnoses(DiagnosisProblem([], comps, []), cap=4)


def test_bad_problem_json():
    with pytest.raises(ParseError):
        DiagnosisProblem.from_json({"model": [], "components": "AbA"})


def random_problem(rng):
    comps = [f"Ab{i}" for i in range(rng.randint(1, 5))]
    wires = [f"w{i}" for i in range(len(comps) + 1)]
    model = []
    for i, ab in enumerate(comps):
        op = rng.choice(["&", "|", "<->"])
        a, b = rng.sample(wires[:i + 1] + ["i0", "i1"], 2) if i else ("i0", "i1")
        model.append(f"!{ab} -> ({wires[i + 1]} <-> ({a} {op} {b}))")
    obs = [("" if rng.random() < 0.5 else "!") + w for w in ["i0", "i1", wires[-1]]]
    return DiagnosisProblem(model, comps, obs)


@given(seeds)
def test_diagnoses_are_exactly_the_minimal_consistent_sets(seed):
    p = random_problem(rng_for(seed))
    found = {d.abnormal for d in diagnoses(p)}
    every = [frozenset(s) for k in range(len(p.components) + 1) for s in combinations(p.components, k)]
    ok = {s for s in every if is_diagnosis(p, s)}
    assert found == {s for s in ok if not any(t < s for t in ok)}
    for d in found:
        assert all(not is_diagnosis(p, d - {c}) for c in d)


def test_abduction(fixture):
    covid = AbductionProblem.from_json(fixture("covid_abduction.json"))
    assert abduce(covid) == [frozenset({"Covid19"})]
    strong = AbductionProblem.from_json(fixture("strong_abduction.json"))
    assert abduce(strong) == [frozenset({"AbO"})]
    weak = AbductionProblem.from_json(fixture("weak_abduction.json"))
    assert not is_explanation(weak, {"AbO"})
    assert consistent(list(weak.theory) + ["AbO", "d"])
    assert abduce(weak) == []


def test_trivial_abduction_is_flagged(caplog):
    p = AbductionProblem(["h -> o", "o"], ["h"], ["o"])
    assert abduce(p) == [frozenset()]
    assert "without any hypothesis" in caplog.text


def test_inconsistent_hypotheses_are_not_explanations():
    p = AbductionProblem(["h -> o", "!h"], ["h"], ["o"])
    assert abduce(p) == []


def test_unknown_hypothesis():
    with pytest.raises(ParseError):
        AbductionProblem(["a"], ["zzz"], ["a"])


@given(seeds)
def test_explanations_replay(seed):
    rng = rng_for(seed)
    hyps = [f"h{i}" for i in range(rng.randint(1, 4))]
    theory = [f"{rng.choice(hyps)} & {rng.choice(hyps)} -> o{rng.randint(0, 2)}" for _ in range(4)]
    theory += [f"!{rng.choice(hyps)} | !{rng.choice(hyps)}"]
    hyps = [h for h in hyps if any(h in t for t in theory)]
    if not any("o0" in t for t in theory):
        return
    p = AbductionProblem(theory, hyps, ["o0"])
    for h in abduce(p):
        assert is_explanation(p, h)
        for x in h:
            assert not is_explanation(p, h - {x})


def test_logical_causes(fixture):
    s = CausalSetting.from_json(fixture("circuit_causes.json"))
    got = {r.atom: r for r in actual_causes_logical(s)}
    assert got["AbO"].verdict == "counterfactual" and got["AbO"].responsibility == 1
    assert got["AbA"].verdict == "not-a-cause" and got["AbA"].responsibility == 0


def test_actual_cause_needing_one_contingent_flip():
    # o holds while either backup works; u alone is no cause, u with v is
    s = CausalSetting(["!Au & !Av -> o", "(Au | Av) & !(Au & Av) -> o"], [],
                      [("Au", False), ("Av", False)], "o")
    got = {r.atom: r for r in actual_causes_logical(s)}
    assert got["Au"].verdict == "actual" and got["Au"].responsibility == Fraction(1, 2)
    assert got["Au"].min_contingencies == (frozenset({"Av"}),)


def test_base_entailment_required():
    s = CausalSetting(["a -> o"], ["!a"], [("a", False)], "o")
    with pytest.raises(PreconditionError):
        actual_causes_logical(s)


@given(seeds)
def test_logical_causes_match_flip_oracle(seed):
    rng = rng_for(seed)
    p = random_problem(rng)
    obs = p.observation[-1]
    facts = list(p.observation[:-1])
    s = CausalSetting(p.model, facts, [(c, rng.random() < 0.2) for c in p.components], obs)
    if not s.holds_after(()):
        return
    got = {r.atom: r.responsibility for r in actual_causes_logical(s)}
    assert got == logical_causes_by_flips(s)
