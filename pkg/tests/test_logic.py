import pytest
from hypothesis import given
import hypothesis.strategies as st

from xscore.errors import ParseError
from xscore.logic import (And, Atom, Iff, Implies, Not, Or, atoms, clausify, consistent, entails,
                          format_formula, holds, parse_formula, sat, truth_table_sat)

from conftest import rng_for, seeds

MODEL = ["!AbA -> (x <-> (a & b))", "!AbO -> (d <-> (x | c))"]
OBS = ["a", "!b", "c", "!d"]


def test_precedence():
    f = parse_formula("a | b & !c -> d <-> e")
    assert f == Iff(Implies(Or(Atom("a"), And(Atom("b"), Not(Atom("c")))), Atom("d")), Atom("e"))
    assert parse_formula("a -> b -> c") == Implies(Atom("a"), Implies(Atom("b"), Atom("c")))


def test_bracketed_atoms():
    f = parse_formula("!Ab_R[c,b] -> R[c,b]")
    assert atoms(f) == ["Ab_R[c,b]", "R[c,b]"]


@pytest.mark.parametrize("text", ["", "a &", "(a", "a b", "a -> ", "&"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_formula(text)


def test_format_roundtrip():
    for text in MODEL + ["!(a & b) | true", "a <-> (b -> false)"]:
        f = parse_formula(text)
        assert parse_formula(format_formula(f)) == f


def test_sat_basics():
    assert not consistent(["a", "!a"])
    r = sat(["a | b", "!a"])
    assert r and r.model == {"a": False, "b": True}
    assert consistent([])
    assert not consistent(["false"])
    assert consistent(["true"])


def test_circuit_inconsistency():
    assert not consistent(MODEL + OBS + ["!AbA", "!AbO"])
    assert consistent(MODEL + OBS + ["!AbA", "AbO"])
    assert consistent(MODEL + OBS + ["AbA", "AbO"])


def test_circuit_entailments():
    facts = MODEL + ["a", "!b", "c"]
    assert entails(facts + ["!AbA", "!AbO"], "d")
    assert not entails(facts + ["!AbA", "AbO"], "d")
    assert entails(facts + ["AbA", "!AbO"], "d")


def test_model_hides_auxiliaries():
    r = sat(["(a & b) | (c <-> d)"])
    assert set(r.model) == {"a", "b", "c", "d"}
    assert holds(parse_formula("(a & b) | (c <-> d)"), r.model)


def random_formula(rng, names, depth):
    if depth == 0 or rng.random() < 0.25:
        roll = rng.random()
        if roll < 0.05:
            return parse_formula(rng.choice(["true", "false"]))
        return Atom(rng.choice(names))
    kind = rng.choice(["not", "and", "or", "imp", "iff"])
    sub = lambda: random_formula(rng, names, depth - 1)
    if kind == "not":
        return Not(sub())
    if kind == "and":
        return And(*(sub() for _ in range(rng.randint(2, 3))))
    if kind == "or":
        return Or(*(sub() for _ in range(rng.randint(2, 3))))
    return (Implies if kind == "imp" else Iff)(sub(), sub())


@given(seeds)
def test_sat_agrees_with_truth_tables(seed):
    rng = rng_for(seed)
    names = [f"p{i}" for i in range(rng.randint(1, 8))]
    theory = [random_formula(rng, names, 4) for _ in range(rng.randint(1, 5))]
    r = sat(theory)
    assert r.satisfiable == truth_table_sat(theory)
    if r:
        full = {n: r.model.get(n, False) for n in names}
        assert all(holds(f, full) for f in theory)


@given(seeds)
def test_clausification_is_equisatisfiable_under_assumptions(seed):
    rng = rng_for(seed)
    names = [f"p{i}" for i in range(rng.randint(1, 5))]
    f = random_formula(rng, names, 3)
    lits = [Atom(n) if rng.random() < 0.5 else Not(Atom(n)) for n in names]
    assign = {n: l[0] == "atom" for n, l in zip(names, lits)}
    assert consistent([f] + lits) == holds(f, assign)


@given(st.lists(st.sampled_from(["a", "!a", "b", "!b", "a | b", "a -> b"]), max_size=5))
def test_entailment_is_refutation(theory):
    for phi in ["a", "b", "a & b", "a | !a"]:
        assert entails(theory, phi) == (not consistent(theory + [Not(parse_formula(phi))]))
