"""Classifiers as label functions over a feature space, and distributions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, Mapping, Optional, Sequence

from .circuit import Circuit, evaluate, truth_tables
from .compile import DecisionTree
from .errors import InputError, ParseError, PreconditionError
from .space import FeatureSpace


class Classifier:
    """A total label function ``L: entity -> {0, 1}`` over ``space``."""

    def __init__(self, space: FeatureSpace, fn: Callable[[dict], int], source=None):
        self.space = space
        self._fn = fn
        self.source = source
        self._labels = None

    def __call__(self, e: Mapping) -> int:
        return int(self._fn(e))

    @classmethod
    def from_circuit(cls, circuit: Circuit) -> "Classifier":
        return cls(FeatureSpace.binary(circuit.features), lambda e: evaluate(circuit, e), circuit)

    @classmethod
    def from_tree(cls, dt: DecisionTree) -> "Classifier":
        return cls(dt.schema, dt.classify, dt)

    @classmethod
    def from_table(cls, space: FeatureSpace, table: Mapping[tuple, int],
                   default: Optional[int] = None) -> "Classifier":
        """``table`` maps value tuples (in feature order) to labels."""
        table = dict(table)
        for key, label in table.items():
            if len(key) != len(space):
                raise InputError(f"table row {key} has the wrong width")
            space.validate(dict(zip(space.names, key)))
            if label not in (0, 1):
                raise InputError(f"table row {key}: label must be 0 or 1")
        if default is None and len(table) != space.population():
            raise InputError(f"table covers {len(table)} of {space.population()} entities "
                             f"and has no default label")
        names = space.names

        def fn(e):
            return table.get(tuple(e[n] for n in names), default)

        return cls(space, fn, table)

    def complement(self) -> "Classifier":
        return Classifier(self.space, lambda e: 1 - self(e), self)

    def labels(self) -> list:
        """Labels of all entities in ``space.entities()`` order."""
        if self._labels is None:
            if isinstance(self.source, Circuit) and self.space.is_binary:
                c = self.source
                order = [c.feature_index[n] for n in reversed(self.space.names)]
                table = truth_tables(c, order)[c.output]
                self._labels = [(table >> i) & 1 for i in range(1 << len(order))]
            else:
                self._labels = [self(e) for e in self.space.entities()]
        return self._labels


def as_classifier(obj) -> Classifier:
    if isinstance(obj, Classifier):
        return obj
    if isinstance(obj, Circuit):
        return Classifier.from_circuit(obj)
    if isinstance(obj, DecisionTree):
        return Classifier.from_tree(obj)
    raise TypeError(f"cannot use {type(obj).__name__} as a classifier")


def parse_rational(x) -> Fraction:
    if isinstance(x, bool):
        raise ParseError(f"not a rational: {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"not a rational: {x!r}") from None
    if isinstance(x, float):
        raise ParseError(f"rationals must be given as 'p/q' strings, got float {x!r}")
    raise ParseError(f"not a rational: {x!r}")


def format_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Distribution:
    """Uniform, product (independent marginals) or empirical distribution."""

    kind: str = "uniform"
    marginals: Optional[Mapping] = None  # feature -> {value: Fraction}
    sample: tuple = ()  # ((entity dict, weight Fraction), ...)

    def __post_init__(self):
        if self.kind not in ("uniform", "product", "empirical"):
            raise ParseError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "product":
            if not self.marginals:
                raise ParseError("product distribution needs marginals")
            for name, m in self.marginals.items():
                if any(p < 0 for p in m.values()):
                    raise ParseError(f"marginal for {name!r} has a negative probability")
                if sum(m.values()) != 1:
                    raise ParseError(f"marginal for {name!r} sums to {sum(m.values())}, not 1")
        if self.kind == "empirical":
            if not self.sample:
                raise ParseError("empirical distribution needs a nonempty sample")
            if any(w <= 0 for _, w in self.sample):
                raise ParseError("empirical weights must be positive")

    @classmethod
    def uniform(cls) -> "Distribution":
        return cls("uniform")

    @classmethod
    def product(cls, marginals: Mapping) -> "Distribution":
        return cls("product", {f: {v: Fraction(p) for v, p in m.items()} for f, m in marginals.items()})

    @classmethod
    def empirical(cls, rows: Sequence[Mapping], weights: Optional[Sequence] = None) -> "Distribution":
        weights = [1] * len(rows) if weights is None else weights
        return cls("empirical", None, tuple((dict(r), Fraction(w)) for r, w in zip(rows, weights)))

    def check(self, space: FeatureSpace) -> "Distribution":
        """Validate against ``space``; returns self with values coerced to the domains."""
        if self.kind == "product":
            fixed = {}
            for name, dom in space.features:
                if name not in self.marginals:
                    raise InputError(f"product distribution has no marginal for {name!r}")
                m = {}
                for v, p in self.marginals[name].items():
                    hits = [d for d in dom if d == v or str(d) == str(v)]
                    if not hits:
                        raise InputError(f"marginal for {name!r} mentions {v!r}, not in domain")
                    m[hits[0]] = m.get(hits[0], 0) + p
                fixed[name] = {d: m.get(d, Fraction(0)) for d in dom}
            return Distribution("product", fixed)
        if self.kind == "empirical":
            return Distribution("empirical", None,
                                tuple((space.coerce(r), w) for r, w in self.sample))
        return self

    def marginal(self, space: FeatureSpace, feature: str) -> dict:
        dom = space.domain(feature)
        if self.kind == "uniform":
            return {v: Fraction(1, len(dom)) for v in dom}
        if self.kind == "product":
            m = self.check(space).marginals[feature]
            return dict(m)
        total = sum(w for _, w in self.sample)
        out = {v: Fraction(0) for v in dom}
        for row, w in self.check(space).sample:
            out[row[feature]] += w / total
        return out

    def to_json(self) -> dict:
        if self.kind == "uniform":
            return {"kind": "uniform"}
        if self.kind == "product":
            return {"kind": "product", "marginals": {
                f: {str(v): format_rational(p) for v, p in m.items()} for f, m in self.marginals.items()}}
        return {"kind": "empirical", "sample": [
            {"entity": {k: str(v) for k, v in r.items()}, "weight": format_rational(w)}
            for r, w in self.sample]}


def distribution_from_json(obj: Optional[Mapping]) -> Distribution:
    if obj is None:
        return Distribution.uniform()
    if not isinstance(obj, Mapping) or "kind" not in obj:
        raise ParseError("distribution JSON needs a 'kind'")
    kind = obj["kind"]
    if kind == "uniform":
        return Distribution.uniform()
    if kind == "product":
        marg = obj.get("marginals")
        if not isinstance(marg, Mapping):
            raise ParseError("product distribution needs a 'marginals' mapping")
        return Distribution("product", {f: {v: parse_rational(p) for v, p in m.items()}
                                        for f, m in marg.items()})
    if kind == "empirical":
        rows = obj.get("sample")
        if not isinstance(rows, list):
            raise ParseError("empirical distribution needs a 'sample' list")
        out = []
        for r in rows:
            if isinstance(r, Mapping) and "entity" in r:
                out.append((dict(r["entity"]), parse_rational(r.get("weight", 1))))
            else:
                out.append((dict(r), Fraction(1)))
        return Distribution("empirical", None, tuple(out))
    raise ParseError(f"unknown distribution kind {kind!r}")


def _lcm_denominators(values):
    d = 1
    for v in values:
        d = lcm(d, Fraction(v).denominator)
    return d
