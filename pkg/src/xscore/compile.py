"""Decision trees and CNF formulas, and their compilation into circuits.

Decision trees are compiled into deterministic, decomposable circuits with
the guarded-multiplexer encoding

    c(n) = Or(And(Not(Var x), c(n0)), And(Var x, c(n1)))

for a node testing ``x`` with children ``n0`` (x = 0) and ``n1`` (x = 1).  The
two disjuncts are guarded by ``x`` and ``not x``, so the Or is deterministic; a
tree never retests a feature along a path, so the And is decomposable.  The
compiler checks the no-retest property and refuses trees that violate it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Optional

from .circuit import BY_CONSTRUCTION, UNCERTIFIED, Circuit, CircuitBuilder
from .errors import CompilationError, InputError, ParseError, PreconditionError, StructuralError
from .space import FeatureSpace

BINARY = ("0", "1")


@dataclass(frozen=True)
class Leaf:
    label: int


@dataclass(frozen=True)
class Test:
    feature: str
    branches: tuple  # ((value, child id), ...) in domain order

    def child(self, value):
        for v, c in self.branches:
            if v == value:
                return c
        raise InputError(f"no branch for {self.feature}={value!r}")


@dataclass(frozen=True)
class DecisionTree:
    schema: FeatureSpace
    nodes: Mapping  # id -> Leaf | Test
    root: int

    def __len__(self):
        return len(self.nodes)

    @property
    def is_binary(self) -> bool:
        return all(set(dom) == set(BINARY) for _, dom in self.schema.features)

    def classify(self, e: Mapping) -> int:
        node = self.nodes[self.root]
        while isinstance(node, Test):
            if node.feature not in e:
                raise InputError(f"entity is missing feature {node.feature!r}")
            node = self.nodes[node.child(_as_domain_value(self.schema, node.feature, e[node.feature]))]
        return node.label

    def topological(self) -> list:
        """Node ids reachable from the root, parents before children."""
        order, state = [], {}
        stack = [(self.root, False)]
        while stack:
            nid, done = stack.pop()
            if done:
                state[nid] = 2
                order.append(nid)
                continue
            if state.get(nid) == 2:
                continue
            if state.get(nid) == 1:
                raise StructuralError(f"cycle through node {nid}")
            state[nid] = 1
            stack.append((nid, True))
            node = self.nodes[nid]
            if isinstance(node, Test):
                for _, c in reversed(node.branches):
                    if state.get(c) == 1:
                        raise StructuralError(f"cycle through node {c}")
                    if state.get(c) != 2:
                        stack.append((c, False))
        order.reverse()
        return order


def _as_domain_value(schema, feature, v):
    dom = schema.domain(feature)
    if v in dom:
        return v
    for d in dom:
        if str(d) == str(v):
            return d
    raise InputError(f"feature {feature!r}: value {v!r} not in domain {list(dom)}")


def parse_dt(source) -> DecisionTree:
    """Parse and validate decision-tree JSON (text or already-decoded dict)."""
    if isinstance(source, (str, bytes)):
        try:
            obj = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ParseError(f"decision tree is not valid JSON: {exc}") from None
    else:
        obj = source
    if not isinstance(obj, Mapping) or not {"schema", "nodes", "root"} <= set(obj):
        raise ParseError("decision tree JSON needs 'schema', 'nodes' and 'root'")
    if not isinstance(obj["schema"], Mapping):
        raise ParseError("'schema' must map feature names to value lists")
    schema = FeatureSpace.of({k: tuple(str(v) for v in dom) for k, dom in obj["schema"].items()})
    nodes = {}
    for raw in obj["nodes"]:
        if not isinstance(raw, Mapping) or "id" not in raw:
            raise ParseError(f"node entry {raw!r} needs an 'id'")
        nid = raw["id"]
        if nid in nodes:
            raise ParseError(f"duplicate node id {nid}")
        if "leaf" in raw:
            if raw["leaf"] not in (0, 1, "0", "1"):
                raise ParseError(f"node {nid}: leaf label must be 0 or 1")
            nodes[nid] = Leaf(int(raw["leaf"]))
            continue
        feature = raw.get("feature")
        if feature not in schema:
            raise ParseError(f"node {nid}: unknown feature {feature!r}")
        branches = raw.get("branches")
        if not isinstance(branches, Mapping):
            raise ParseError(f"node {nid}: internal node needs a 'branches' mapping")
        dom = schema.domain(feature)
        keys = {str(k) for k in branches}
        if keys != set(dom):
            missing = sorted(set(dom) - keys)
            extra = sorted(keys - set(dom))
            raise ParseError(f"node {nid}: branches on {feature!r} must cover exactly its domain "
                             f"(missing {missing}, unexpected {extra})")
        bmap = {str(k): c for k, c in branches.items()}
        nodes[nid] = Test(feature, tuple((v, bmap[v]) for v in dom))
    for nid, node in nodes.items():
        if isinstance(node, Test):
            for v, c in node.branches:
                if c not in nodes:
                    raise StructuralError(f"node {nid}: branch {v!r} points to unknown node {c}")
    if obj["root"] not in nodes:
        raise StructuralError(f"root {obj['root']!r} is not a node id")
    dt = DecisionTree(schema, nodes, obj["root"])
    dt.topological()  # rejects cycles
    return dt


def dt_to_json(dt: DecisionTree) -> dict:
    nodes = []
    for nid, node in dt.nodes.items():
        if isinstance(node, Leaf):
            nodes.append({"id": nid, "leaf": node.label})
        else:
            nodes.append({"id": nid, "feature": node.feature,
                          "branches": {v: c for v, c in node.branches}})
    return {"schema": {n: list(d) for n, d in dt.schema.features}, "nodes": nodes, "root": dt.root}


def indicator(feature: str, value) -> str:
    return f"{feature}={value}"


def _is_bit_domain(dom):
    return set(map(str, dom)) == {"0", "1"}


def binarize_dt(dt: DecisionTree) -> DecisionTree:
    """Rewrite a categorical tree over one-hot indicator features.

    A feature with domain {0, 1} becomes the single indicator ``F=1``.  A
    feature with domain v1..vk becomes indicators ``F=v1`` .. ``F=vk``; a test
    on it becomes the chain "F=v1? ... F=v(k-1)?" whose final negative branch
    leads to the vk child.  Labels agree with the original tree on one-hot
    entities; other indicator combinations are out of distribution (the
    first set indicator in the chain wins, none set means vk).
    """
    feats = []
    for name, dom in dt.schema.features:
        if _is_bit_domain(dom):
            feats.append((indicator(name, "1"), BINARY))
        else:
            feats.extend((indicator(name, v), BINARY) for v in dom)
    schema = FeatureSpace(tuple(feats))

    order = dt.topological()
    # tests on single-valued features are pass-throughs
    redirect = {nid: dt.nodes[nid].branches[0][1] for nid in order
                if isinstance(dt.nodes[nid], Test) and len(dt.nodes[nid].branches) == 1}

    def target(nid):
        while nid in redirect:
            nid = redirect[nid]
        return nid

    int_ids = all(isinstance(k, int) for k in dt.nodes)
    counter = [max(dt.nodes) + 1 if int_ids else 0]

    def fresh(base, i):
        if not int_ids:
            return f"{base}/{i}"
        counter[0] += 1
        return counter[0] - 1

    nodes = {}
    for nid in order:
        if nid in redirect:
            continue
        node = dt.nodes[nid]
        if isinstance(node, Leaf):
            nodes[nid] = node
            continue
        branches = [(v, target(c)) for v, c in node.branches]
        if _is_bit_domain(dt.schema.domain(node.feature)):
            kids = {str(v): c for v, c in branches}
            nodes[nid] = Test(indicator(node.feature, "1"), (("0", kids["0"]), ("1", kids["1"])))
            continue
        chain = [nid] + [fresh(nid, i) for i in range(1, len(branches) - 1)]
        for i, cid in enumerate(chain):
            value, child = branches[i]
            else_id = chain[i + 1] if i + 1 < len(chain) else branches[-1][1]
            nodes[cid] = Test(indicator(node.feature, value), (("0", else_id), ("1", child)))
    return DecisionTree(schema, nodes, target(dt.root))


def one_hot(dt_or_schema, e: Mapping) -> dict:
    """Map an entity over the original schema onto the binarized schema."""
    schema = dt_or_schema.schema if isinstance(dt_or_schema, DecisionTree) else dt_or_schema
    out = {}
    for name, dom in schema.features:
        v = _as_domain_value(schema, name, e[name])
        if _is_bit_domain(dom):
            out[indicator(name, "1")] = "1" if str(v) == "1" else "0"
        else:
            for d in dom:
                out[indicator(name, d)] = "1" if d == v else "0"
    return out


def check_no_retest(dt: DecisionTree) -> Optional[tuple]:
    """Return (node id, feature) of the first retest along some path, or None."""
    tested_above = {dt.root: frozenset()}
    for nid in dt.topological():
        node = dt.nodes[nid]
        if not isinstance(node, Test):
            continue
        above = tested_above[nid]
        if node.feature in above:
            return nid, node.feature
        below = above | {node.feature}
        for _, c in node.branches:
            tested_above[c] = tested_above.get(c, frozenset()) | below
    return None


def compile_dt(dt: DecisionTree) -> Circuit:
    """Compile a binary decision tree into a dDBC certified by construction."""
    if not dt.is_binary:
        raise PreconditionError("compile_dt needs a binary tree (domains exactly ['0', '1']); "
                                "run binarize_dt first")
    retest = check_no_retest(dt)
    if retest is not None:
        nid, feature = retest
        raise CompilationError(f"node {nid} retests feature {feature!r} along a path; "
                               f"the compiled circuit would not be decomposable")
    b = CircuitBuilder(dt.schema.names)
    negated = {}
    compiled = {}
    for nid in reversed(dt.topological()):
        node = dt.nodes[nid]
        if isinstance(node, Leaf):
            compiled[nid] = b.const(node.label)
            continue
        x = b.var(node.feature)
        if x not in negated:
            negated[x] = b.not_(x)
        lo, hi = compiled[node.child("0")], compiled[node.child("1")]
        compiled[nid] = b.or_(b.and_(negated[x], lo), b.and_(x, hi))
    return b.build(compiled[dt.root], BY_CONSTRUCTION)


# CNF ----------------------------------------------------------------------

@dataclass(frozen=True)
class CnfFormula:
    n_vars: int
    clauses: tuple  # tuple of tuples of signed 1-based ints

    @property
    def names(self) -> tuple:
        return tuple(f"x{i}" for i in range(1, self.n_vars + 1))

    @property
    def has_empty_clause(self) -> bool:
        return any(len(c) == 0 for c in self.clauses)

    @property
    def is_monotone2(self) -> bool:
        return all(0 < len(c) <= 2 and all(l > 0 for l in c) for c in self.clauses)


def parse_cnf(text: str) -> CnfFormula:
    """Parse DIMACS: ``p cnf n m`` then clauses of signed ints ending in 0."""
    header = None
    clauses, current = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"line {lineno}: bad header {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"line {lineno}: bad header {line!r}") from None
            continue
        if header is None:
            raise ParseError(f"line {lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"line {lineno}: malformed literal {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > header[0]:
                raise ParseError(f"line {lineno}: literal {lit} exceeds declared {header[0]} variables")
            else:
                current.append(lit)
    if header is None:
        raise ParseError("missing 'p cnf' header")
    if current:
        raise ParseError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise ParseError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return CnfFormula(header[0], tuple(clauses))


def cnf_to_circuit(f: CnfFormula) -> Circuit:
    """And-of-Or circuit over ``x1..xn``; structural flags stay unchecked."""
    b = CircuitBuilder(f.names)
    ors = []
    for clause in f.clauses:
        if not clause:
            ors.append(b.const(0))
            continue
        lits = [b.var(f"x{l}") if l > 0 else b.not_(b.var(f"x{-l}")) for l in clause]
        ors.append(b.or_(*lits))
    out = b.and_(*ors) if ors else b.const(1)
    return b.build(out, UNCERTIFIED)
