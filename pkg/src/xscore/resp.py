"""Generalized responsibility (Resp) scores over black-box classifiers.

For an entity ``e`` with the label of interest, a feature ``F*`` and a
contingency ``(G, w)`` (other features reassigned, label unchanged), the local
score is

    (1 - E[ L(e[G := w][F* := v]) ]) / (1 + |G|)

with ``v`` ranging over the intervention values of ``F*``.  By default those
are the values other than ``e(F*)``, weighted by the distribution's marginal
for ``F*``; ``include_original=True`` lets the original value take part.

The global score searches contingencies by increasing size and, at the first
size where some local score is positive, returns the best one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Mapping, Optional

from .classifier import Classifier, Distribution, as_classifier
from .errors import CapExceeded, InputError, PreconditionError
from .shapley import ScoreReport

DEFAULT_MAX_EVALUATIONS = 2_000_000

COUNTERFACTUAL = "counterfactual"
ACTUAL = "actual"
NOT_A_CAUSE = "not-a-cause"


@dataclass(frozen=True)
class Constraints:
    """Admissibility of interventions.

    ``immutable`` features may not be changed; ``forbidden`` lists partial
    assignments no intervened entity may match; ``predicate(original,
    candidate)`` is an optional extra filter.
    """

    immutable: frozenset = frozenset()
    forbidden: tuple = ()
    predicate: Optional[Callable] = None

    def admits(self, original: Mapping, candidate: Mapping) -> bool:
        for f in self.immutable:
            if candidate[f] != original[f]:
                return False
        for combo in self.forbidden:
            if all(candidate.get(k) == v for k, v in combo.items()):
                return False
        if self.predicate is not None and not self.predicate(original, candidate):
            return False
        return True


NO_CONSTRAINTS = Constraints()


def constraints_from_json(obj, space) -> Constraints:
    if obj is None:
        return NO_CONSTRAINTS
    immutable = frozenset(obj.get("immutable", ()))
    for f in immutable:
        space.domain(f)
    forbidden = []
    for combo in obj.get("forbidden", ()):
        fixed = {}
        for k, v in combo.items():
            dom = space.domain(k)
            hits = [d for d in dom if str(d) == str(v)]
            if not hits:
                raise InputError(f"forbidden combination mentions {k}={v!r}, not in domain")
            fixed[k] = hits[0]
        forbidden.append(fixed)
    return Constraints(immutable, tuple(forbidden))


class _Labeler:
    """Memoized ``[L(x) == label]`` over entities."""

    def __init__(self, c: Classifier, label: int):
        self.c = c
        self.label = label
        self.names = c.space.names
        self.memo = {}
        self.calls = 0

    def __call__(self, x: Mapping) -> int:
        key = tuple(x[n] for n in self.names)
        hit = self.memo.get(key)
        if hit is None:
            self.calls += 1
            hit = self.memo[key] = int(self.c(x) == self.label)
        return hit


def _intervention_weights(c, e, feature, d, include_original, marginal):
    dom = c.space.domain(feature)
    if marginal == "uniform" or d.kind == "uniform":
        weights = {v: Fraction(1) for v in dom}
    elif marginal == "distribution":
        weights = d.marginal(c.space, feature)
    else:
        raise InputError(f"unknown marginal mode {marginal!r}")
    if not include_original:
        weights = {v: w for v, w in weights.items() if v != e[feature]}
    return weights


def _local(lab, e, base, feature, weights, constraints, size):
    num = den = Fraction(0)
    for v, w in weights.items():
        x = dict(base)
        x[feature] = v
        if not constraints.admits(e, x):
            continue
        num += w * lab(x)
        den += w
    if den == 0:
        return Fraction(0)  # no admissible intervention on the feature
    return (1 - num / den) / (1 + size)


def _prepare(c, e, d, label):
    c = as_classifier(c)
    d = Distribution.uniform() if d is None else d.check(c.space)
    e = c.space.coerce(e)
    if c(e) != label:
        raise PreconditionError(f"L(e) = {c(e)}, but the explained label is {label}; "
                                f"pass label={c(e)} to explain the other outcome")
    return c, e, d


def resp_local(c, e: Mapping, feature: str, contingency: Mapping, d: Optional[Distribution] = None,
               *, label: int = 1, include_original: bool = False, constraints: Constraints = NO_CONSTRAINTS,
               marginal: str = "distribution") -> Fraction:
    """Local responsibility of ``feature`` under the contingency ``Γ := w̄``."""
    c, e, d = _prepare(c, e, d, label)
    c.space.domain(feature)
    if feature in contingency:
        raise PreconditionError(f"the contingency may not reassign {feature!r} itself")
    base = dict(e)
    for f, v in contingency.items():
        dom = c.space.domain(f)
        hits = [x for x in dom if x == v or str(x) == str(v)]
        if not hits:
            raise InputError(f"contingency value {f}={v!r} is not in the domain")
        base[f] = hits[0]
    lab = _Labeler(c, label)
    if not lab(base):
        raise PreconditionError("the contingency alone switches the label")
    weights = _intervention_weights(c, e, feature, d, include_original, marginal)
    return _local(lab, e, base, feature, weights, constraints, len(contingency))


@dataclass
class RespResult:
    feature: str
    score: Fraction
    witness: Optional[dict]  # the maximizing contingency, None if not a cause
    cardinality: Optional[int]  # |Γ| of the witness
    evaluations: int = 0

    @property
    def verdict(self) -> str:
        if self.witness is None:
            return NOT_A_CAUSE
        return COUNTERFACTUAL if self.cardinality == 0 else ACTUAL


def resp_global(c, e: Mapping, feature: str, d: Optional[Distribution] = None, *, label: int = 1,
                include_original: bool = False, constraints: Constraints = NO_CONSTRAINTS,
                marginal: str = "distribution", max_cardinality: Optional[int] = None,
                max_evaluations: int = DEFAULT_MAX_EVALUATIONS) -> RespResult:
    """Best local score over minimum-size contingencies (0 if there is none).

    Contingencies only reassign features to values different from ``e``'s.
    Ties keep the first maximizer in (feature order of Γ, domain order of w̄).
    """
    c, e, d = _prepare(c, e, d, label)
    space = c.space
    space.domain(feature)
    others = [f for f in space.names if f != feature and f not in constraints.immutable]
    limit = len(others) if max_cardinality is None else min(max_cardinality, len(others))
    weights = _intervention_weights(c, e, feature, d, include_original, marginal)
    lab = _Labeler(c, label)
    checked = 0
    for size in range(limit + 1):
        best, witness = Fraction(0), None
        for gamma in combinations(others, size):
            choices = [[v for v in space.domain(f) if v != e[f]] for f in gamma]
            for values in product(*choices):
                checked += 1
                if lab.calls > max_evaluations:
                    raise CapExceeded(f"resp search for {feature!r} stopped after {lab.calls} "
                                      f"classifier calls at contingency size {size}", reached=size)
                base = dict(e)
                base.update(zip(gamma, values))
                if not constraints.admits(e, base) or not lab(base):
                    continue
                score = _local(lab, e, base, feature, weights, constraints, size)
                if score > best:
                    best, witness = score, dict(zip(gamma, values))
        if witness is not None:
            return RespResult(feature, best, witness, size, lab.calls)
    if limit < len(others):
        raise CapExceeded(f"no positive contingency for {feature!r} up to size {limit}", reached=limit)
    return RespResult(feature, Fraction(0), None, None, lab.calls)


@dataclass(frozen=True)
class CauseVerdict:
    kind: str  # counterfactual | actual | not-a-cause
    min_cardinality: Optional[int]
    score: Fraction
    witness: Optional[dict]


def actual_cause(c, e: Mapping, feature: str, d: Optional[Distribution] = None, **kw) -> CauseVerdict:
    """Classify ``F*(e)`` as counterfactual cause, actual cause or neither."""
    r = resp_global(c, e, feature, d, **kw)
    return CauseVerdict(r.verdict, r.cardinality, r.score, r.witness)


def resp_report(c, e: Mapping, d: Optional[Distribution] = None, features=None, **kw) -> ScoreReport:
    c = as_classifier(c)
    d = Distribution.uniform() if d is None else d
    features = c.space.names if features is None else features
    scores, witnesses = {}, {}
    for f in features:
        r = resp_global(c, e, f, d, **kw)
        scores[f] = r.score
        witnesses[f] = r.witness
    return ScoreReport(scores, "resp", d.kind, witnesses)
