"""Seeded random instances for property tests and experiment scripts."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

from .classifier import Classifier, Distribution
from .compile import BINARY, DecisionTree, Leaf, Test
from .space import FeatureSpace


def random_dt(rng: random.Random, n_features: int, max_depth: int = None, leaf_prob: float = 0.25,
              domains: dict = None) -> DecisionTree:
    """A random tree that never retests a feature on a path.

    ``domains`` maps feature name to its value tuple; by default all
    ``n_features`` features are binary ("0"/"1").
    """
    if domains is None:
        domains = {f"x{i}": BINARY for i in range(1, n_features + 1)}
    schema = FeatureSpace.of(domains)
    names = list(schema.names)
    max_depth = len(names) if max_depth is None else max_depth
    nodes = {}

    def grow(available, depth):
        nid = len(nodes)
        nodes[nid] = None
        if not available or depth >= max_depth or (depth > 0 and rng.random() < leaf_prob):
            nodes[nid] = Leaf(rng.randint(0, 1))
            return nid
        feature = rng.choice(available)
        rest = [f for f in available if f != feature]
        kids = tuple((v, grow(rest, depth + 1)) for v in schema.domain(feature))
        nodes[nid] = Test(feature, kids)
        return nid

    root = grow(names, 0)
    return DecisionTree(schema, nodes, root)


def random_bits(rng: random.Random, names) -> dict:
    return {n: rng.randint(0, 1) for n in names}


def random_rational(rng: random.Random, max_den: int = 7) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(0, den), den)


def random_product(rng: random.Random, space: FeatureSpace, max_den: int = 7) -> Distribution:
    marginals = {}
    for name, dom in space.features:
        raw = [rng.randint(0, max_den) for _ in dom]
        if sum(raw) == 0:
            raw[rng.randrange(len(raw))] = 1
        total = sum(raw)
        marginals[name] = {v: Fraction(r, total) for v, r in zip(dom, raw)}
    return Distribution.product(marginals)


def random_table(rng: random.Random, space: FeatureSpace, p_one: float = 0.5) -> Classifier:
    table = {vals: int(rng.random() < p_one) for vals in product(*(d for _, d in space.features))}
    return Classifier.from_table(space, table)


def random_space(rng: random.Random, n_features: int, max_domain: int = 3) -> FeatureSpace:
    return FeatureSpace.of({f"F{i}": tuple(f"v{j}" for j in range(rng.randint(2, max_domain)))
                            for i in range(1, n_features + 1)})


def random_game_values(rng: random.Random, n_players: int, max_den: int = 9) -> list:
    return [Fraction(rng.randint(-20, 20), rng.randint(1, max_den)) for _ in range(1 << n_players)]


QUERIES = (
    "Q :- S(x), R(x,y), S(y).",
    "Q :- R(x,y), R(y,z).",
    "Q :- S(x), R(x,x).",
    "Q :- R(x,y), S(y), T(y).",
    "Q :- R(x,'a').",
)


def random_instance(rng: random.Random, max_tuples: int = 10, constants: str = "abcd",
                    p_exogenous: float = 0.0):
    """Relations S, T (unary) and R (binary) with at most ``max_tuples`` tuples."""
    from .dbcausality import Instance

    pool = [("S", (x,)) for x in constants] + [("T", (x,)) for x in constants]
    pool += [("R", (x, y)) for x in constants for y in constants]
    chosen = rng.sample(pool, rng.randint(1, min(max_tuples, len(pool))))
    rels = {"R": [], "S": [], "T": []}
    for rel, t in chosen:
        rels[rel].append(list(t))
    exo = [(rel, t) for rel, t in chosen if rng.random() < p_exogenous]
    return Instance(rels, frozenset(exo))
