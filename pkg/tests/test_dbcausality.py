from fractions import Fraction

import pytest
from hypothesis import given

from xscore.dbcausality import (Instance, Var, causes, causes_brute, cbd_encoding, cq_to_denial,
                                diagnosis_tuples, eval_cq, parse_query, witness_sets)
from xscore.diagnosis import diagnoses, is_diagnosis
from xscore.errors import InputError, ParseError, PreconditionError
from xscore.generate import QUERIES, random_instance

from conftest import rng_for, seeds

Q = parse_query("Q :- S(x), R(x,y), S(y).")


@pytest.fixture
def D(fixture):
    return Instance.from_json(fixture("db_D.json"))


@pytest.fixture
def D2(fixture):
    return Instance.from_json(fixture("db_D_prime.json"))


def by_fact(reports):
    return {r.fact: r for r in reports}


def test_parse_query():
    assert Q.atoms == (("S", (Var("x"),)), ("R", (Var("x"), Var("y"))), ("S", (Var("y"),)))
    q = parse_query("R(x, 'c')")
    assert q.atoms == (("R", (Var("x"), "c")),)
    assert parse_query(str(Q)) == Q


@pytest.mark.parametrize("text", ["Q :- .", "Q :- S(x", "Q :- S(x) R(x,y).", "Q :- S(x,).", "Q :- S('a)."])
def test_bad_queries(text):
    with pytest.raises(ParseError):
        parse_query(text)


def test_eval(D):
    ok, w = eval_cq(D, Q)
    assert ok and w == {"x": "a", "y": "d"}
    assert not eval_cq(D.without([("S", ("b",)), ("S", ("a",))]), Q)[0]
    assert not eval_cq(Instance({"R": [], "S": []}), Q)[0]


def test_arity_mismatch(D):
    with pytest.raises(InputError):
        eval_cq(D, parse_query("Q :- R(x)."))
    with pytest.raises(InputError):
        eval_cq(D, parse_query("Q :- U(x)."))


def test_instance_validation():
    with pytest.raises(InputError):
        Instance({"R": [["a"], ["a", "b"]]})
    with pytest.raises(InputError):
        Instance({"R": [["a"], ["a"]]})
    with pytest.raises(InputError):
        Instance({"R": [["a"]]}, frozenset({("R", ("b",))}))


def test_example_d(D):
    r = by_fact(causes(D, Q))
    sb = r[("S", ("b",))]
    assert sb.verdict == "actual" and sb.responsibility == Fraction(1, 2)
    assert frozenset({("S", ("a",))}) in sb.min_contingencies
    assert r[("S", ("c",))].responsibility == Fraction(1, 2)


def test_example_d_prime(D2):
    r = by_fact(causes(D2, Q))
    assert r[("S", ("b",))].verdict == "counterfactual" and r[("S", ("b",))].responsibility == 1
    sc = r[("S", ("c",))]
    assert sc.responsibility == Fraction(1, 2) and frozenset({("R", ("b", "b"))}) in sc.min_contingencies
    assert r[("S", ("a",))].verdict == "not-a-cause"


def test_false_query_rejected():
    db = Instance({"S": [["a"]], "R": []})
    with pytest.raises(PreconditionError):
        causes(db, Q)


def test_exogenous_tuples_are_never_causes(D2):
    db = Instance(D2.relations, frozenset({("S", ("b",))}))
    r = by_fact(causes(db, Q))
    assert ("S", ("b",)) not in r
    assert r[("R", ("b", "b"))].responsibility == Fraction(1, 2)
    # a witness made only of exogenous tuples cannot be broken
    db = Instance(D2.relations, frozenset({("S", ("b",)), ("R", ("b", "b"))}))
    assert all(r_.verdict == "not-a-cause" for r_ in causes(db, Q))


def test_denial(D):
    k = cq_to_denial(Q)
    assert str(k) == "¬∃x∃y(S(x) ∧ R(x,y) ∧ S(y))"
    assert k.violated(D)
    assert k.satisfied(D.without([("S", ("b",)), ("S", ("a",))]))


def test_single_join_triple():
    db = Instance({"S": [["a"], ["b"]], "R": [["a", "b"]]})
    p = cbd_encoding(db, Q)
    assert len(p.components) == 3
    assert sorted(sorted(d.abnormal) for d in diagnoses(p)) == [["Ab_R[a,b]"], ["Ab_S[a]"], ["Ab_S[b]"]]


def test_query_false_encoding_needs_no_abnormality():
    db = Instance({"S": [["a"]], "R": [["a", "b"]]})
    assert [d.abnormal for d in diagnoses(cbd_encoding(db, Q))] == [frozenset()]


def test_encoding_on_d(D):
    p = cbd_encoding(D, Q)
    assert not is_diagnosis(p, set())
    hits = set().union(*(diagnosis_tuples(D, d.abnormal) for d in diagnoses(p)))
    assert hits == {r.fact for r in causes(D, Q) if r.verdict != "not-a-cause"}


@given(seeds)
def test_matches_brute_oracle(seed):
    rng = rng_for(seed)
    db = random_instance(rng, 10, p_exogenous=0.2)
    q = parse_query(rng.choice(QUERIES))
    if not eval_cq(db, q)[0]:
        return
    assert causes(db, q) == causes_brute(db, q)


@given(seeds)
def test_reported_contingencies_are_valid(seed):
    rng = rng_for(seed)
    db = random_instance(rng, 12)
    q = parse_query(rng.choice(QUERIES))
    if not witness_sets(db, q):
        return
    for r in causes(db, q):
        assert (r.verdict == "counterfactual") == (r.responsibility == 1)
        for g in r.min_contingencies:
            assert eval_cq(db.without(g), q)[0]
            assert not eval_cq(db.without(g | {r.fact}), q)[0]
