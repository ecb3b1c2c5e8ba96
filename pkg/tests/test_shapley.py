from fractions import Fraction

import pytest
from hypothesis import given

from xscore.circuit import CircuitBuilder
from xscore.classifier import Classifier, Distribution, distribution_from_json
from xscore.compile import compile_dt, cnf_to_circuit, parse_cnf
from xscore.errors import CapExceeded, ParseError, PreconditionError, UnsupportedError
from xscore.generate import random_bits, random_dt, random_game_values, random_product, random_space, random_table
from xscore.shapley import (GameFunction, ScoreReport, expected_label, game_from_classifier, shap_brute,
                            shap_exact, shapley, shapley_by_permutations, verify_red_identity)

from conftest import rng_for, seeds


def players(n):
    return tuple(f"p{i}" for i in range(n))


def test_two_player_game():
    g = GameFunction(("a", "b"), values=[Fraction(0), Fraction(1), Fraction(2), Fraction(6)])
    assert shapley(g) == {"a": Fraction(5, 2), "b": Fraction(7, 2)}


def test_empty_game():
    assert shapley(GameFunction((), values=[Fraction(3)])) == {}


def test_player_cap():
    with pytest.raises(CapExceeded):
        shapley(GameFunction(players(4), values=[Fraction(0)] * 16), cap=3)


@given(seeds)
def test_subset_formula_matches_permutations(seed):
    rng = rng_for(seed)
    n = rng.randint(1, 6)
    g = GameFunction(players(n), values=random_game_values(rng, n))
    assert shapley(g) == shapley_by_permutations(g)


def test_monotone_shap_sum(fixture):
    c = cnf_to_circuit(parse_cnf(fixture("monotone2cnf.cnf")))
    r = shap_brute(c, {"x1": 1, "x2": 0, "x3": 1})
    # 1 - 5/8
    assert sum(r.scores.values()) == Fraction(3, 8)


def test_shap_exact_needs_certificate(fixture):
    c = cnf_to_circuit(parse_cnf(fixture("monotone2cnf.cnf")))
    with pytest.raises(PreconditionError):
        shap_exact(c, {"x1": 1, "x2": 0, "x3": 1})


def test_constant_classifier_scores_zero():
    b = CircuitBuilder(["x", "y"])
    c = b.build(b.const(1), "by-construction")
    assert set(shap_exact(c, {"x": 0, "y": 1}).scores.values()) == {0}
    assert set(shap_brute(c, {"x": 0, "y": 1}).scores.values()) == {0}


def test_game_matches_direct_conditional_expectation():
    rng = rng_for(7)
    space = random_space(rng, 3)
    c = random_table(rng, space)
    d = random_product(rng, space)
    e = next(iter(space.entities()))
    g = game_from_classifier(c, e, d)
    for mask in range(8):
        S = frozenset(n for i, n in enumerate(space.names) if mask >> i & 1)
        assert g(S) == expected_label(c, e, S, d)


@given(seeds)
def test_exact_equals_brute_uniform(seed):
    rng = rng_for(seed)
    c = compile_dt(random_dt(rng, rng.randint(1, 7)))
    e = random_bits(rng, c.features)
    assert shap_exact(c, e).scores == shap_brute(c, e).scores


@given(seeds)
def test_exact_equals_brute_product(seed):
    rng = rng_for(seed)
    dt = random_dt(rng, rng.randint(1, 7))
    c = compile_dt(dt)
    e = random_bits(rng, c.features)
    d = random_product(rng, dt.schema)
    assert shap_exact(c, e, d).scores == shap_brute(c, e, d).scores


@given(seeds)
def test_red_identity(seed):
    rng = rng_for(seed)
    c = compile_dt(random_dt(rng, rng.randint(1, 8)))
    r = verify_red_identity(c, random_bits(rng, c.features))
    assert r.holds and r.residual == 0


@given(seeds)
def test_shap_efficiency_on_tables(seed):
    rng = rng_for(seed)
    space = random_space(rng, rng.randint(1, 4))
    c = random_table(rng, space)
    e = dict(zip(space.names, (rng.choice(dom) for _, dom in space.features)))
    d = random_product(rng, space)
    r = shap_brute(c, e, d)
    assert sum(r.scores.values()) == c(e) - expected_label(c, e, frozenset(), d)


def test_empirical_distribution():
    space = random_space(rng_for(1), 2)
    c = random_table(rng_for(2), space)
    rows = list(space.entities())
    e = rows[0]
    uniform = shap_brute(c, e).scores
    assert shap_brute(c, e, Distribution.empirical(rows)).scores == uniform
    with pytest.raises(UnsupportedError):
        shap_exact(compile_dt(random_dt(rng_for(3), 2)), {"x1": 0, "x2": 0}, Distribution.empirical(rows))


def test_empirical_needs_support():
    space = random_space(rng_for(4), 2)
    c = random_table(rng_for(5), space)
    ents = list(space.entities())
    d = Distribution.empirical([ents[-1]])
    with pytest.raises(PreconditionError):
        shap_brute(c, ents[0], d)


@pytest.mark.parametrize("obj", [
    {"kind": "product", "marginals": {"x": {"0": "1/2", "1": "1/3"}}},
    {"kind": "product", "marginals": {"x": {"0": 0.5, "1": 0.5}}},
    {"kind": "nonsense"},
    {"kind": "empirical", "sample": []},
])
def test_bad_distributions(obj):
    with pytest.raises(ParseError):
        distribution_from_json(obj)


def test_report_formats():
    r = ScoreReport({"a": Fraction(1, 3), "b": Fraction(-2)}, "shap-exact")
    js = r.to_json(approx=True)
    assert js["scores"][0] == {"feature": "a", "score": "1/3", "approx": "0.333333333333333"}
    assert js["scores"][1]["score"] == "-2"
    assert r.to_csv().splitlines() == ["feature,score,method,witness", "a,1/3,shap-exact,", "b,-2,shap-exact,"]
