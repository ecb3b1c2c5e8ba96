from fractions import Fraction

import pytest
from hypothesis import given

from xscore.classifier import Classifier, Distribution
from xscore.errors import CapExceeded, PreconditionError
from xscore.generate import random_product, random_space, random_table
from xscore.loaders import load_model, fixture_path
from xscore.resp import Constraints, actual_cause, resp_global, resp_local, resp_report
from xscore.space import FeatureSpace

from conftest import rng_for, seeds
from oracles import resp_by_entities


@pytest.fixture
def loan(fixture):
    c = load_model(fixture_path("loan_table.json"))
    return c, fixture("loan_entity.json")


def test_loan_scores(loan):
    c, e = loan
    assert resp_global(c, e, "Age").score == 1
    r = resp_global(c, e, "Income")
    assert r.score == Fraction(1, 2) and r.witness == {"Location": "brooklyn"}
    assert actual_cause(c, e, "Age").kind == "counterfactual"
    assert actual_cause(c, e, "Income").kind == "actual"


def test_local_scores(loan):
    c, e = loan
    assert resp_local(c, e, "Income", {"Location": "brooklyn"}) == Fraction(1, 2)
    assert resp_local(c, e, "Income", {}) == 0
    with pytest.raises(PreconditionError):
        resp_local(c, e, "Income", {"Age": "25"})  # the contingency alone switches the label
    with pytest.raises(PreconditionError):
        resp_local(c, e, "Income", {"Income": "80K"})


def test_include_original_halves_binary_flip(loan):
    c, e = loan
    assert resp_local(c, e, "Age", {}, include_original=True) == Fraction(1, 2)
    assert resp_global(c, e, "Income", include_original=True).score == Fraction(1, 4)


def test_label_precondition(loan):
    c, e = loan
    other = {**e, "Age": "25"}
    with pytest.raises(PreconditionError):
        resp_global(c, other, "Age")
    assert resp_global(c, other, "Age", label=0).score == 1


def test_never_flipping_feature_scores_zero():
    space = FeatureSpace.of({"a": ("0", "1"), "b": ("0", "1")})
    c = Classifier(space, lambda e: int(e["a"] == "1"))
    r = resp_global(c, {"a": "1", "b": "0"}, "b")
    assert r.score == 0 and r.verdict == "not-a-cause"


def test_constraints(loan):
    c, e = loan
    frozen = Constraints(immutable=frozenset({"Location"}))
    assert resp_global(c, e, "Income", constraints=frozen).score == 0
    banned = Constraints(forbidden=({"Income": "80K", "Location": "brooklyn"},))
    assert resp_global(c, e, "Income", constraints=banned).score == 0


def test_caps(loan):
    c, e = loan
    with pytest.raises(CapExceeded):
        resp_global(c, e, "Income", max_cardinality=0)
    assert resp_global(c, e, "Age", max_cardinality=0).score == 1


def test_marginal_weighting():
    space = FeatureSpace.of({"f": ("a", "b", "c")})
    c = Classifier(space, lambda e: int(e["f"] != "c"))
    e = {"f": "a"}
    assert resp_global(c, e, "f").score == Fraction(1, 2)
    d = Distribution.product({"f": {"a": Fraction(1, 2), "b": Fraction(1, 8), "c": Fraction(3, 8)}})
    assert resp_global(c, e, "f", d).score == Fraction(3, 4)


def test_report(loan):
    c, e = loan
    rep = resp_report(c, e)
    assert rep.scores == {"Age": 1, "Income": Fraction(1, 2), "Location": Fraction(1, 2)}
    assert rep.witnesses["Age"] == {}


@given(seeds)
def test_matches_entity_oracle(seed):
    rng = rng_for(seed)
    space = random_space(rng, rng.randint(1, 4))
    c = random_table(rng, space)
    e = dict(zip(space.names, (rng.choice(dom) for _, dom in space.features)))
    label = c(e)
    d = random_product(rng, space) if rng.random() < 0.5 else None
    for f in space.names:
        r = resp_global(c, e, f, d, label=label)
        want, k = resp_by_entities(c, e, f, d, label=label)
        assert (r.score, r.cardinality) == (want, k)


@given(seeds)
def test_binary_law(seed):
    rng = rng_for(seed)
    names = [f"b{i}" for i in range(rng.randint(1, 5))]
    space = FeatureSpace.of({n: ("0", "1") for n in names})
    c = random_table(rng, space)
    e = {n: rng.choice("01") for n in names}
    for f in names:
        r = resp_global(c, e, f, label=c(e))
        assert r.score == (0 if r.cardinality is None else Fraction(1, 1 + r.cardinality))
