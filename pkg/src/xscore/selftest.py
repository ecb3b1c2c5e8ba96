"""Regression table of known values, runnable as ``xscore selftest``."""

from __future__ import annotations

from fractions import Fraction

from .circuit import brute_force_count, evaluate, models
from .classifier import Distribution
from .compile import compile_dt, parse_cnf, cnf_to_circuit, parse_dt
from .dbcausality import Instance, causes, parse_query
from .diagnosis import (AbductionProblem, CausalSetting, DiagnosisProblem, abduce,
                        actual_causes_logical, diagnoses, is_diagnosis, is_minimal_diagnosis)
from .loaders import fixture_path, load_json, load_model
from .logic import consistent, entails
from .resp import resp_global
from .shapley import shap_brute, shap_exact, verify_red_identity

X = ("x1", "x2", "x3")


def _monotone():
    return cnf_to_circuit(parse_cnf(fixture_path("monotone2cnf.cnf").read_text()))


def check_monotone_labels():
    c = _monotone()
    return evaluate(c, dict(zip(X, (1, 0, 1)))) == 1 and evaluate(c, dict(zip(X, (1, 0, 0)))) == 0


def check_monotone_count():
    c = _monotone()
    found = {tuple(m[x] for x in X) for m in models(c)}
    expected = {(1, 1, 1), (1, 0, 1), (0, 1, 1), (0, 1, 0), (1, 1, 0)}
    return brute_force_count(c) == 5 and found == expected


def check_monotone_shap_sum():
    c = _monotone()
    e = dict(zip(X, (1, 0, 1)))
    return sum(shap_brute(c, e).scores.values()) == Fraction(3, 8)


def check_tree_red_identity():
    c = compile_dt(parse_dt(fixture_path("dt3.json").read_text()))
    e = load_json(fixture_path("dt3_entity.json"))
    return verify_red_identity(c, e).holds and shap_exact(c, e).scores == shap_brute(c, e).scores


def _loan():
    c = load_model(fixture_path("loan_table.json"))
    return c, load_json(fixture_path("loan_entity.json"))


def check_resp_age():
    c, e = _loan()
    return resp_global(c, e, "Age").score == 1


def check_resp_income():
    c, e = _loan()
    return resp_global(c, e, "Income").score == Fraction(1, 2)


Q = "Q :- S(x), R(x,y), S(y)."


def _report(name, fact):
    db = Instance.from_json(load_json(fixture_path(name)))
    return next(r for r in causes(db, parse_query(Q)) if r.fact == fact)


def check_db_sb_on_d():
    r = _report("db_D.json", ("S", ("b",)))
    return r.responsibility == Fraction(1, 2) and frozenset({("S", ("a",))}) in r.min_contingencies


def check_db_sb_on_d_prime():
    r = _report("db_D_prime.json", ("S", ("b",)))
    return r.verdict == "counterfactual" and r.responsibility == 1


def check_db_sc_on_d_prime():
    r = _report("db_D_prime.json", ("S", ("c",)))
    return r.responsibility == Fraction(1, 2) and frozenset({("R", ("b", "b"))}) in r.min_contingencies


def _circuit_problem():
    return DiagnosisProblem.from_json(load_json(fixture_path("circuit_diagnosis.json")))


def check_inconsistency():
    p = _circuit_problem()
    base = list(p.model) + list(p.observation)
    return (not consistent(base + ["!AbA", "!AbO"])) and consistent(base + ["!AbA", "AbO"])


def check_minimal_diagnoses():
    p = _circuit_problem()
    return [d.abnormal for d in diagnoses(p)] == [frozenset({"AbO"})]


def check_nonminimal_diagnosis():
    p = _circuit_problem()
    return is_diagnosis(p, {"AbA", "AbO"}) and not is_minimal_diagnosis(p, {"AbA", "AbO"})


def check_entailments():
    p = _circuit_problem()
    t = list(p.model) + ["a", "!b", "c"]
    return (entails(t + ["!AbA", "!AbO"], "d") and not entails(t + ["!AbA", "AbO"], "d")
            and entails(t + ["AbA", "!AbO"], "d"))


def check_logical_causes():
    s = CausalSetting.from_json(load_json(fixture_path("circuit_causes.json")))
    got = {r.atom: (r.verdict, r.responsibility) for r in actual_causes_logical(s)}
    return got == {"AbO": ("counterfactual", 1), "AbA": ("not-a-cause", 0)}


def _abduce(name):
    return abduce(AbductionProblem.from_json(load_json(fixture_path(name))))


def check_abduction_covid():
    return _abduce("covid_abduction.json") == [frozenset({"Covid19"})]


def check_abduction_strong():
    return _abduce("strong_abduction.json") == [frozenset({"AbO"})]


def check_abduction_weak():
    p = AbductionProblem.from_json(load_json(fixture_path("weak_abduction.json")))
    theory = list(p.theory) + ["AbO"]
    return consistent(theory + ["d"]) and frozenset({"AbO"}) not in abduce(p)


CHECKS = [
    ("monotone2cnf labels <1,0,1> -> 1, <1,0,0> -> 0", check_monotone_labels),
    ("monotone2cnf has the 5 listed models", check_monotone_count),
    ("monotone2cnf Shap sum at <1,0,1> is 3/8", check_monotone_shap_sum),
    ("tree fixture: count/Shap identity, exact == brute", check_tree_red_identity),
    ("loan table: Resp(Age) = 1", check_resp_age),
    ("loan table: Resp(Income) = 1/2", check_resp_income),
    ("D: Resp(S(b)) = 1/2 via {S(a)}", check_db_sb_on_d),
    ("D': S(b) counterfactual, responsibility 1", check_db_sb_on_d_prime),
    ("D': Resp(S(c)) = 1/2 via {R(b,b)}", check_db_sc_on_d_prime),
    ("circuit: all-normal inconsistent, AbO consistent", check_inconsistency),
    ("circuit: minimal diagnoses are exactly {AbO}", check_minimal_diagnoses),
    ("circuit: {AbA, AbO} is a non-minimal diagnosis", check_nonminimal_diagnosis),
    ("circuit: entailments of d under three Ab settings", check_entailments),
    ("circuit: Resp(AbO) = 1, AbA not a cause", check_logical_causes),
    ("abduction: covid explains breathlessness", check_abduction_covid),
    ("abduction: strong model explains !d by {AbO}", check_abduction_strong),
    ("abduction: weak model has no {AbO} explanation", check_abduction_weak),
]


def run(out=print) -> bool:
    ok_all = True
    for name, fn in CHECKS:
        try:
            ok = bool(fn())
            note = ""
        except Exception as exc:  # a crash is a failure, reported in the table
            ok, note = False, f" ({type(exc).__name__}: {exc})"
        ok_all &= ok
        out(f"{'PASS' if ok else 'FAIL'}  {name}{note}")
    out(f"{sum(1 for _ in CHECKS)} checks, {'all passed' if ok_all else 'FAILURES'}")
    return ok_all
