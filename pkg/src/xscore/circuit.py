"""Boolean circuits: representation, evaluation, structural checks, counting.

A circuit is a list of gates in topological order (children before parents).
Gate ids are dense: gate ``i`` sits at ``circuit.gates[i]``.  Var leaves carry
an index into ``circuit.features``, the ordered feature universe.

Counting operations (``model_count``, ``count_by_distance``) are only sound on
deterministic and decomposable circuits (dDBCs); they refuse to run unless the
circuit has been certified, either by the structural checks below or by a
compiler that guarantees the properties by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Mapping, Optional, Sequence

from .errors import CapExceeded, InputError, PreconditionError, StructuralError

VAR, CONST, NOT, AND, OR = "var", "const", "not", "and", "or"
KINDS = (VAR, CONST, NOT, AND, OR)

BY_CONSTRUCTION = "by-construction"
BY_CHECK = "by-check"
UNCERTIFIED = "none"

DEFAULT_BRUTE_CAP = 20
DEFAULT_DETERMINISM_BUDGET = 20


@dataclass(frozen=True)
class Gate:
    id: int
    kind: str
    feature: Optional[int] = None
    value: Optional[int] = None
    children: tuple = ()


@dataclass(frozen=True)
class Verdict:
    """Outcome of a structural check.

    ``status`` is one of ``"ok"``, ``"violation"`` or ``"budget-exceeded"``.
    For decomposability violations ``detail`` is the overlapping feature set;
    for determinism violations it is a witness assignment (feature -> bit)
    under which two children of ``gate`` are both true.
    """

    status: str
    gate: Optional[int] = None
    detail: object = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class DistanceCounts:
    """Satisfying assignments of a gate, bucketed by Hamming distance.

    ``counts[l]`` is the number of models over ``scope`` that disagree with the
    reference entity on exactly ``l`` features.
    """

    counts: tuple
    scope: tuple = ()

    def __getitem__(self, i):
        return self.counts[i]

    def __len__(self):
        return len(self.counts)

    def __iter__(self):
        return iter(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts)


class Circuit:
    """Immutable DAG of Boolean gates.

    Structural flags (``decomposable``, ``deterministic``) are tri-state:
    ``None`` means unchecked.  They are the only mutable part of a circuit and
    are only ever written by the check functions or the compiler.
    """

    def __init__(self, gates: Sequence[Gate], output: int, features: Sequence[str],
                 certification: str = UNCERTIFIED):
        self.gates = tuple(gates)
        self.output = output
        self.features = tuple(features)
        if len(set(self.features)) != len(self.features):
            raise StructuralError("duplicate feature names")
        self.feature_index = {name: i for i, name in enumerate(self.features)}
        self._validate()
        self.varsets = self._compute_varsets()
        self.certification = certification
        if certification == BY_CONSTRUCTION:
            self.decomposable = True
            self.deterministic = True
        else:
            self.decomposable = None
            self.deterministic = None

    def _validate(self):
        if not self.gates:
            raise StructuralError("circuit has no gates")
        for i, g in enumerate(self.gates):
            if g.id != i:
                raise StructuralError(f"gate at position {i} has id {g.id}; ids must be dense")
            if g.kind not in KINDS:
                raise StructuralError(f"gate {i}: unknown kind {g.kind!r}")
            for c in g.children:
                if not 0 <= c < i:
                    raise StructuralError(f"gate {i}: child {c} is not a previously defined gate")
            if g.kind == VAR:
                if g.feature is None or not 0 <= g.feature < len(self.features):
                    raise StructuralError(f"gate {i}: bad feature reference {g.feature!r}")
                if g.children:
                    raise StructuralError(f"gate {i}: var gate with children")
            elif g.kind == CONST:
                if g.value not in (0, 1):
                    raise StructuralError(f"gate {i}: constant must be 0 or 1")
                if g.children:
                    raise StructuralError(f"gate {i}: const gate with children")
            elif g.kind == NOT:
                if len(g.children) != 1:
                    raise StructuralError(f"gate {i}: not gate needs exactly one child")
            elif not g.children:
                raise StructuralError(f"gate {i}: {g.kind} gate needs at least one child")
        if not 0 <= self.output < len(self.gates):
            raise StructuralError(f"output {self.output} is not a gate id")

    def _compute_varsets(self):
        out = []
        for g in self.gates:
            if g.kind == VAR:
                out.append(frozenset((g.feature,)))
            elif g.kind == CONST:
                out.append(frozenset())
            else:
                out.append(frozenset().union(*(out[c] for c in g.children)))
        return tuple(out)

    @property
    def certified(self) -> bool:
        return self.decomposable is True and self.deterministic is True

    def variables(self, gate: Optional[int] = None) -> tuple:
        """Feature names in Var(gate), in universe order."""
        vs = self.varsets[self.output if gate is None else gate]
        return tuple(self.features[i] for i in sorted(vs))

    def condition(self, assignment: Mapping[str, int]) -> "Circuit":
        """Replace Var leaves of the assigned features by constants.

        Conditioning preserves determinism and decomposability, so the
        result inherits this circuit's flags.
        """
        fixed = {}
        for name, bit in assignment.items():
            if name not in self.feature_index:
                raise InputError(f"unknown feature {name!r}")
            fixed[self.feature_index[name]] = _bit(name, bit)
        gates = []
        for g in self.gates:
            if g.kind == VAR and g.feature in fixed:
                gates.append(Gate(g.id, CONST, value=fixed[g.feature]))
            else:
                gates.append(g)
        c = Circuit(gates, self.output, self.features, self.certification)
        c.decomposable = self.decomposable
        c.deterministic = self.deterministic
        return c

    def __len__(self):
        return len(self.gates)

    def __repr__(self):
        return (f"Circuit({len(self.gates)} gates, output={self.output}, "
                f"features={list(self.features)}, certification={self.certification!r})")


class CircuitBuilder:
    """Incremental construction with hash-consing of leaves.

    >>> b = CircuitBuilder()
    >>> c = b.build(b.or_(b.and_(b.var("a"), b.var("b")), b.var("c")))
    >>> evaluate(c, {"a": 1, "b": 0, "c": 1})
    1
    """

    def __init__(self, features: Iterable[str] = ()):
        self.features = []
        self.feature_index = {}
        self.gates = []
        self._vars = {}
        self._consts = {}
        for name in features:
            self._feature(name)

    def _feature(self, name):
        if name not in self.feature_index:
            self.feature_index[name] = len(self.features)
            self.features.append(name)
        return self.feature_index[name]

    def _add(self, kind, feature=None, value=None, children=()):
        gid = len(self.gates)
        self.gates.append(Gate(gid, kind, feature, value, tuple(children)))
        return gid

    def var(self, name: str) -> int:
        fid = self._feature(name)
        if fid not in self._vars:
            self._vars[fid] = self._add(VAR, feature=fid)
        return self._vars[fid]

    def const(self, value: int) -> int:
        value = int(value)
        if value not in self._consts:
            self._consts[value] = self._add(CONST, value=value)
        return self._consts[value]

    def not_(self, child: int) -> int:
        return self._add(NOT, children=(child,))

    def and_(self, *children: int) -> int:
        return self._add(AND, children=children)

    def or_(self, *children: int) -> int:
        return self._add(OR, children=children)

    def build(self, output: int, certification: str = UNCERTIFIED) -> Circuit:
        return Circuit(self.gates, output, self.features, certification)


def _bit(name, v):
    if v in (0, 1):  # also admits True/False
        return int(v)
    if isinstance(v, str) and v in ("0", "1"):
        return int(v)
    raise InputError(f"feature {name!r}: value {v!r} is not a bit")


def _entity_bits(circuit: Circuit, e, needed=None) -> dict:
    """Normalize an entity (mapping or feature-ordered sequence) to {fid: bit}."""
    if isinstance(e, Mapping):
        bits = {}
        for name, v in e.items():
            if name in circuit.feature_index:
                bits[circuit.feature_index[name]] = _bit(name, v)
    else:
        values = list(e)
        if len(values) != len(circuit.features):
            raise InputError(f"entity has {len(values)} values, circuit has "
                             f"{len(circuit.features)} features")
        bits = {i: _bit(circuit.features[i], v) for i, v in enumerate(values)}
    needed = circuit.varsets[circuit.output] if needed is None else needed
    missing = [circuit.features[i] for i in sorted(needed) if i not in bits]
    if missing:
        raise InputError(f"entity is missing values for {missing}")
    return bits


def evaluate(circuit: Circuit, e) -> int:
    """Evaluate the circuit on entity ``e`` (one pass, topological order)."""
    bits = _entity_bits(circuit, e)
    vals = _evaluate_all(circuit, bits)
    return vals[circuit.output]


def _evaluate_all(circuit, bits):
    vals = [0] * len(circuit.gates)
    for g in circuit.gates:
        k = g.kind
        if k == VAR:
            vals[g.id] = bits[g.feature]
        elif k == CONST:
            vals[g.id] = g.value
        elif k == NOT:
            vals[g.id] = 1 - vals[g.children[0]]
        elif k == AND:
            vals[g.id] = int(all(vals[c] for c in g.children))
        else:
            vals[g.id] = int(any(vals[c] for c in g.children))
    return vals


def check_decomposable(circuit: Circuit) -> Verdict:
    """Every And gate must have children with pairwise-disjoint varsets."""
    for g in circuit.gates:
        if g.kind != AND:
            continue
        seen = frozenset()
        overlap = set()
        for c in g.children:
            vs = circuit.varsets[c]
            overlap |= seen & vs
            seen |= vs
        if overlap:
            circuit.decomposable = False
            names = frozenset(circuit.features[i] for i in overlap)
            return Verdict("violation", g.id, names)
    circuit.decomposable = True
    _promote(circuit)
    return Verdict("ok")


def _promote(circuit):
    if circuit.certified and circuit.certification == UNCERTIFIED:
        circuit.certification = BY_CHECK


def _var_patterns(m):
    """Truth tables of the m projection functions over 2**m assignments."""
    size = 1 << m
    full = (1 << size) - 1
    pats = []
    for j in range(m):
        half = 1 << j
        unit = (1 << (2 * half)) - 1
        block = ((1 << half) - 1) << half
        pats.append(full // unit * block)
    return pats, full


def truth_tables(circuit: Circuit, order: Sequence[int], root: Optional[int] = None) -> dict:
    """Bit-parallel truth tables for every gate below ``root``.

    Bit ``i`` of a table is the gate's value under the assignment giving
    feature ``order[j]`` the value ``(i >> j) & 1``.  ``order`` must cover the
    root's varset.
    """
    root = circuit.output if root is None else root
    pos = {fid: j for j, fid in enumerate(order)}
    pats, full = _var_patterns(len(order))
    tables = {}
    for gid in _reachable(circuit, root):
        g = circuit.gates[gid]
        k = g.kind
        if k == VAR:
            tables[gid] = pats[pos[g.feature]]
        elif k == CONST:
            tables[gid] = full if g.value else 0
        elif k == NOT:
            tables[gid] = full ^ tables[g.children[0]]
        elif k == AND:
            t = full
            for c in g.children:
                t &= tables[c]
            tables[gid] = t
        else:
            t = 0
            for c in g.children:
                t |= tables[c]
            tables[gid] = t
    return tables


def _reachable(circuit, root):
    marked = [False] * (root + 1)
    marked[root] = True
    for gid in range(root, -1, -1):
        if marked[gid]:
            for c in circuit.gates[gid].children:
                marked[c] = True
    return [gid for gid in range(root + 1) if marked[gid]]


def _decode(circuit, order, index, scope):
    return {circuit.features[fid]: (index >> j) & 1
            for j, fid in enumerate(order) if fid in scope}


def _or_overlap(circuit, g, tables):
    kids = g.children
    for a in range(len(kids)):
        for b in range(a + 1, len(kids)):
            both = tables[kids[a]] & tables[kids[b]]
            if both:
                return (both & -both).bit_length() - 1
    return None


def check_deterministic(circuit: Circuit, budget: int = DEFAULT_DETERMINISM_BUDGET) -> Verdict:
    """Exhaustively check that no Or gate has two simultaneously true children.

    Each Or gate is checked over the assignments to its own varset, using
    bit-parallel truth tables.  Gates whose varset is larger than ``budget``
    are skipped and, absent a violation elsewhere, make the verdict
    ``budget-exceeded``.
    """
    ors = [g for g in circuit.gates if g.kind == OR and len(g.children) > 1]
    universe = frozenset().union(*(circuit.varsets[g.id] for g in ors)) if ors else frozenset()
    over_budget = None
    if len(universe) <= budget:
        order = sorted(universe)
        tables = {}
        for g in ors:
            if g.id not in tables:
                tables.update(truth_tables(circuit, order, g.id))
            hit = _or_overlap(circuit, g, tables)
            if hit is not None:
                circuit.deterministic = False
                return Verdict("violation", g.id, _decode(circuit, order, hit, circuit.varsets[g.id]))
    else:
        for g in ors:
            scope = circuit.varsets[g.id]
            if len(scope) > budget:
                over_budget = g.id if over_budget is None else over_budget
                continue
            order = sorted(scope)
            tables = truth_tables(circuit, order, g.id)
            hit = _or_overlap(circuit, g, tables)
            if hit is not None:
                circuit.deterministic = False
                return Verdict("violation", g.id, _decode(circuit, order, hit, scope))
    if over_budget is not None:
        return Verdict("budget-exceeded", over_budget, budget)
    circuit.deterministic = True
    _promote(circuit)
    return Verdict("ok")


def _require_certified(circuit, what):
    if not circuit.certified:
        raise PreconditionError(
            f"{what} needs a certified dDBC (decomposable={circuit.decomposable}, "
            f"deterministic={circuit.deterministic}); run the structural checks "
            f"or use brute_force_count")


def model_count(circuit: Circuit) -> int:
    """Number of models over Var(output), bottom-up on a certified dDBC."""
    _require_certified(circuit, "model_count")
    vs = circuit.varsets
    counts = {}
    for gid in _reachable(circuit, circuit.output):
        g = circuit.gates[gid]
        k = g.kind
        if k == VAR:
            counts[gid] = 1
        elif k == CONST:
            counts[gid] = g.value
        elif k == NOT:
            c = g.children[0]
            counts[gid] = (1 << len(vs[c])) - counts[c]
        elif k == AND:
            n = 1
            for c in g.children:
                n *= counts[c]
            counts[gid] = n
        else:
            width = len(vs[gid])
            counts[gid] = sum(counts[c] << (width - len(vs[c])) for c in g.children)
    return counts[circuit.output]


def brute_force_count(circuit: Circuit, cap: int = DEFAULT_BRUTE_CAP) -> int:
    """Exhaustive model count over Var(output); no structural preconditions."""
    order = sorted(circuit.varsets[circuit.output])
    if len(order) > cap:
        raise CapExceeded(f"{len(order)} variables exceed the enumeration cap {cap}",
                          reached=len(order))
    return truth_tables(circuit, order)[circuit.output].bit_count()


def models(circuit: Circuit, cap: int = DEFAULT_BRUTE_CAP) -> list:
    """All satisfying assignments over Var(output), as dicts, in index order."""
    order = sorted(circuit.varsets[circuit.output])
    if len(order) > cap:
        raise CapExceeded(f"{len(order)} variables exceed the enumeration cap {cap}",
                          reached=len(order))
    table = truth_tables(circuit, order)[circuit.output]
    scope = frozenset(order)
    out = []
    while table:
        low = table & -table
        out.append(_decode(circuit, order, low.bit_length() - 1, scope))
        table ^= low
    return out


def convolve(a: Sequence[int], b: Sequence[int]) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def binomial_row(n: int) -> list:
    return [comb(n, k) for k in range(n + 1)]


def distance_rows(circuit: Circuit, bits: Mapping[int, int], reuse: Optional[dict] = None) -> dict:
    """Per-gate distance counts for every gate reachable from the output.

    ``reuse`` maps gate ids to rows known to be valid for this circuit (for
    instance rows of gates untouched by a conditioning); they are not
    recomputed.
    """
    vs = circuit.varsets
    rows = {}
    for gid in _reachable(circuit, circuit.output):
        if reuse is not None and gid in reuse:
            rows[gid] = reuse[gid]
            continue
        g = circuit.gates[gid]
        k = g.kind
        if k == VAR:
            rows[gid] = [1, 0] if bits[g.feature] == 1 else [0, 1]
        elif k == CONST:
            rows[gid] = [g.value]
        elif k == NOT:
            child = rows[g.children[0]]
            rows[gid] = [comb(len(child) - 1, i) - x for i, x in enumerate(child)]
        elif k == AND:
            acc = [1]
            for c in g.children:
                acc = convolve(acc, rows[c])
            rows[gid] = acc
        else:
            width = len(vs[gid])
            acc = [0] * (width + 1)
            for c in g.children:
                spread = convolve(rows[c], binomial_row(width - len(vs[c])))
                for i, x in enumerate(spread):
                    acc[i] += x
            rows[gid] = acc
    return rows


def count_by_distance(circuit: Circuit, e) -> DistanceCounts:
    """Models of a certified dDBC stratified by Hamming distance from ``e``."""
    _require_certified(circuit, "count_by_distance")
    bits = _entity_bits(circuit, e)
    rows = distance_rows(circuit, bits)
    return DistanceCounts(tuple(rows[circuit.output]), circuit.variables())


def brute_count_by_distance(circuit: Circuit, e, cap: int = DEFAULT_BRUTE_CAP) -> list:
    """Enumeration oracle for ``count_by_distance``."""
    bits = _entity_bits(circuit, e)
    order = sorted(circuit.varsets[circuit.output])
    if len(order) > cap:
        raise CapExceeded(f"{len(order)} variables exceed the enumeration cap {cap}",
                          reached=len(order))
    table = truth_tables(circuit, order)[circuit.output]
    ref = sum(bits[fid] << j for j, fid in enumerate(order))
    out = [0] * (len(order) + 1)
    for i in range(1 << len(order)):
        if table >> i & 1:
            out[(i ^ ref).bit_count()] += 1
    return out


# JSON ---------------------------------------------------------------------

def circuit_from_json(obj: Mapping, trust_certification: bool = True) -> Circuit:
    """Load ``{"gates": [...], "output": id}``; gate ids may be sparse."""
    if not isinstance(obj, Mapping) or "gates" not in obj or "output" not in obj:
        raise StructuralError("circuit JSON needs 'gates' and 'output'")
    features = list(obj.get("features", ()))
    findex = {name: i for i, name in enumerate(features)}
    remap = {}
    gates = []
    for raw in obj["gates"]:
        try:
            gid, kind = raw["id"], raw["kind"]
        except (KeyError, TypeError):
            raise StructuralError(f"gate entry {raw!r} needs 'id' and 'kind'") from None
        if gid in remap:
            raise StructuralError(f"duplicate gate id {gid}")
        dense = len(gates)
        if kind == VAR:
            name = raw.get("feature")
            if not isinstance(name, str):
                raise StructuralError(f"gate {gid}: var gate needs a string 'feature'")
            if name not in findex:
                findex[name] = len(features)
                features.append(name)
            gates.append(Gate(dense, VAR, feature=findex[name]))
        elif kind == CONST:
            value = raw.get("value")
            if value not in (0, 1) or isinstance(value, bool):
                raise StructuralError(f"gate {gid}: const needs value 0 or 1")
            gates.append(Gate(dense, CONST, value=value))
        elif kind in (NOT, AND, OR):
            inputs = raw.get("inputs")
            if not isinstance(inputs, list):
                raise StructuralError(f"gate {gid}: {kind} gate needs an 'inputs' list")
            try:
                kids = tuple(remap[c] for c in inputs)
            except (KeyError, TypeError):
                raise StructuralError(
                    f"gate {gid}: inputs {inputs} reference undefined gates") from None
            gates.append(Gate(dense, kind, children=kids))
        else:
            raise StructuralError(f"gate {gid}: unknown kind {kind!r}")
        remap[gid] = dense
    if obj["output"] not in remap:
        raise StructuralError(f"output {obj['output']!r} is not a gate id")
    cert = obj.get("certification", UNCERTIFIED) if trust_certification else UNCERTIFIED
    if cert not in (BY_CONSTRUCTION, BY_CHECK, UNCERTIFIED):
        raise StructuralError(f"unknown certification {cert!r}")
    c = Circuit(gates, remap[obj["output"]], features,
                BY_CONSTRUCTION if cert != UNCERTIFIED else UNCERTIFIED)
    c.certification = cert
    return c


def circuit_to_json(circuit: Circuit) -> dict:
    gates = []
    for g in circuit.gates:
        d = {"id": g.id, "kind": g.kind}
        if g.kind == VAR:
            d["feature"] = circuit.features[g.feature]
        elif g.kind == CONST:
            d["value"] = g.value
        else:
            d["inputs"] = list(g.children)
        gates.append(d)
    out = {"features": list(circuit.features), "gates": gates, "output": circuit.output}
    if circuit.certified:
        out["certification"] = circuit.certification
    return out
