from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given

from xscore.circuit import (BY_CHECK, BY_CONSTRUCTION, UNCERTIFIED, CircuitBuilder, brute_count_by_distance,
                            brute_force_count, check_decomposable, check_deterministic, circuit_from_json,
                            circuit_to_json, count_by_distance, evaluate, model_count, models)
from xscore.compile import compile_dt
from xscore.errors import CapExceeded, InputError, PreconditionError, StructuralError
from xscore.generate import random_bits, random_dt

from conftest import rng_for, seeds


def monotone():
    b = CircuitBuilder(["x1", "x2", "x3"])
    x1, x2, x3 = b.var("x1"), b.var("x2"), b.var("x3")
    return b.build(b.and_(b.or_(x1, x2), b.or_(x2, x3)))


def ite(b, x, hi, lo):
    return b.or_(b.and_(x, hi), b.and_(b.not_(x), lo))


def test_evaluate_monotone():
    c = monotone()
    assert evaluate(c, {"x1": 1, "x2": 0, "x3": 1}) == 1
    assert evaluate(c, {"x1": 1, "x2": 0, "x3": 0}) == 0
    assert evaluate(c, [0, 1, 0]) == 1


def test_evaluate_rejects_missing_and_bad_values():
    c = monotone()
    with pytest.raises(InputError):
        evaluate(c, {"x1": 1, "x2": 0})
    with pytest.raises(InputError):
        evaluate(c, {"x1": 2, "x2": 0, "x3": 0})


def test_monotone_is_not_ddbc():
    c = monotone()
    dec = check_decomposable(c)
    assert not dec.ok and dec.detail == frozenset({"x2"})
    det = check_deterministic(c)
    assert not det.ok and det.status == "violation"
    assert not c.certified
    with pytest.raises(PreconditionError):
        model_count(c)


def test_monotone_models():
    c = monotone()
    assert brute_force_count(c) == 5
    got = {tuple(m[x] for x in ("x1", "x2", "x3")) for m in models(c)}
    assert got == {(1, 1, 1), (1, 0, 1), (0, 1, 1), (0, 1, 0), (1, 1, 0)}


def test_check_promotes_to_by_check():
    b = CircuitBuilder(["a", "b"])
    c = b.build(ite(b, b.var("a"), b.var("b"), b.const(0)))
    assert c.certification == UNCERTIFIED
    assert check_decomposable(c).ok and check_deterministic(c).ok
    assert c.certification == BY_CHECK
    assert model_count(c) == 1


def test_deterministic_witness_is_real():
    b = CircuitBuilder(["a", "b"])
    a, bb = b.var("a"), b.var("b")
    c = b.build(b.or_(a, bb))
    v = check_deterministic(c)
    assert v.status == "violation"
    assert evaluate(c, v.detail) == 1 and v.detail["a"] == 1 and v.detail["b"] == 1


def test_budget_exceeded_is_reported():
    names = [f"x{i}" for i in range(6)]
    b = CircuitBuilder(names)
    c = b.build(b.or_(b.and_(*(b.var(n) for n in names)), b.and_(*(b.not_(b.var(n)) for n in names))))
    assert check_deterministic(c, budget=3).status == "budget-exceeded"
    assert check_deterministic(c, budget=6).ok


def test_constants():
    b = CircuitBuilder(["x"])
    zero = b.build(b.const(0))
    check_decomposable(zero), check_deterministic(zero)
    assert model_count(zero) == 0 and brute_force_count(zero) == 0
    b = CircuitBuilder(["x"])
    one = b.build(b.const(1))
    check_decomposable(one), check_deterministic(one)
    assert model_count(one) == 1


def test_cap():
    names = [f"x{i}" for i in range(5)]
    b = CircuitBuilder(names)
    c = b.build(b.and_(*(b.var(n) for n in names)))
    with pytest.raises(CapExceeded) as exc:
        brute_force_count(c, cap=4)
    assert exc.value.reached == 5


def test_json_roundtrip_and_sparse_ids():
    obj = {"gates": [{"id": 10, "kind": "var", "feature": "p"},
                     {"id": 7, "kind": "not", "inputs": [10]}], "output": 7}
    c = circuit_from_json(obj)
    assert evaluate(c, {"p": 0}) == 1
    again = circuit_from_json(circuit_to_json(c))
    assert circuit_to_json(again) == circuit_to_json(c)


@pytest.mark.parametrize("obj", [
    {"gates": [{"id": 0, "kind": "and", "inputs": [3]}], "output": 0},
    {"gates": [{"id": 0, "kind": "var", "feature": "a"}, {"id": 0, "kind": "not", "inputs": [0]}], "output": 0},
    {"gates": [{"id": 0, "kind": "not", "inputs": []}], "output": 0},
    {"gates": [{"id": 0, "kind": "xor", "inputs": []}], "output": 0},
    {"gates": []},
])
def test_json_structural_errors(obj):
    with pytest.raises(StructuralError):
        circuit_from_json(obj)


@given(seeds)
def test_exact_counts_match_enumeration(seed):
    rng = rng_for(seed)
    dt = random_dt(rng, rng.randint(1, 8))
    c = compile_dt(dt)
    assert c.certification == BY_CONSTRUCTION
    assert model_count(c) == brute_force_count(c)
    e = random_bits(rng, c.features)
    dc = count_by_distance(c, e)
    assert list(dc.counts) == brute_count_by_distance(c, e)
    assert dc.total == model_count(c)


@given(seeds)
def test_distance_zero_row_is_the_label(seed):
    rng = rng_for(seed)
    c = compile_dt(random_dt(rng, rng.randint(1, 6)))
    e = random_bits(rng, c.features)
    counts = count_by_distance(c, e).counts
    scope = c.varsets[c.output]
    assert counts[0] == (evaluate(c, e) if scope else model_count(c))
