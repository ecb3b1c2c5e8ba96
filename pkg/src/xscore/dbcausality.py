"""Actual causes and responsibility of tuples for Boolean conjunctive queries.

A fact is a pair ``(relation, tuple)``.  Tuple ``t`` is an actual cause for a
true query when some set Γ of endogenous tuples (without ``t``) can be deleted
with the query still true, while deleting Γ together with ``t`` makes it
false.  Responsibility is ``1 / (1 + |Γ|)`` for a smallest such Γ.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Optional

from .diagnosis import DiagnosisProblem
from .errors import CapExceeded, InputError, ParseError, PreconditionError
from .logic import And, Atom, Implies, Not

DEFAULT_TUPLE_CAP = 24


def fact_str(fact) -> str:
    rel, tup = fact
    return f"{rel}({','.join(tup)})"


def fact_atom(fact) -> str:
    rel, tup = fact
    return f"{rel}[{','.join(tup)}]"


def ab_atom(fact) -> str:
    rel, tup = fact
    return f"Ab_{rel}[{','.join(tup)}]"


@dataclass(frozen=True)
class Instance:
    relations: Mapping  # name -> sorted tuple of tuples of str
    exogenous: frozenset = frozenset()  # facts

    def __post_init__(self):
        rels = {}
        for name, rows in self.relations.items():
            rows = [tuple(str(v) for v in r) for r in rows]
            if len(set(rows)) != len(rows):
                raise InputError(f"relation {name} has duplicate tuples")
            if len({len(r) for r in rows}) > 1:
                raise InputError(f"relation {name} mixes arities")
            rels[name] = tuple(sorted(rows))
        object.__setattr__(self, "relations", rels)
        exo = frozenset((r, tuple(str(v) for v in t)) for r, t in self.exogenous)
        for f in exo:
            if f[1] not in rels.get(f[0], ()):
                raise InputError(f"exogenous fact {fact_str(f)} is not in the instance")
        object.__setattr__(self, "exogenous", exo)

    def arity(self, rel) -> Optional[int]:
        rows = self.relations.get(rel)
        return len(rows[0]) if rows else None

    def facts(self) -> list:
        return [(r, t) for r in sorted(self.relations) for t in self.relations[r]]

    def endogenous(self) -> list:
        return [f for f in self.facts() if f not in self.exogenous]

    def without(self, removed: Iterable) -> "Instance":
        removed = set(removed)
        rels = {r: [t for t in rows if (r, t) not in removed] for r, rows in self.relations.items()}
        return Instance(rels, frozenset(f for f in self.exogenous if f not in removed))

    def __len__(self):
        return sum(len(rows) for rows in self.relations.values())

    @classmethod
    def from_json(cls, obj: Mapping) -> "Instance":
        rels = obj.get("relations")
        if not isinstance(rels, Mapping):
            raise ParseError("instance JSON needs a 'relations' mapping")
        for name, rows in rels.items():
            if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
                raise ParseError(f"relation {name} must be a list of tuples")
        exo = set()
        for item in obj.get("exogenous", ()):
            if isinstance(item, str):  # a whole relation
                if item not in rels:
                    raise InputError(f"exogenous relation {item} is not in the instance")
                exo.update((item, tuple(map(str, t))) for t in rels[item])
            elif isinstance(item, list) and len(item) == 2 and isinstance(item[1], list):
                exo.add((item[0], tuple(map(str, item[1]))))
            else:
                raise ParseError(f"bad exogenous entry {item!r}")
        return cls(rels, frozenset(exo))

    def to_json(self) -> dict:
        out = {"relations": {r: [list(t) for t in rows] for r, rows in sorted(self.relations.items())}}
        if self.exogenous:
            out["exogenous"] = [[r, list(t)] for r, t in sorted(self.exogenous)]
        return out


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class ConjunctiveQuery:
    atoms: tuple  # ((relation, (term, ...)), ...), a term is Var or str
    name: str = "Q"

    def variables(self) -> list:
        seen = []
        for _, terms in self.atoms:
            for t in terms:
                if isinstance(t, Var) and t not in seen:
                    seen.append(t)
        return seen

    def check(self, db: Instance):
        for rel, terms in self.atoms:
            a = db.arity(rel)
            if rel not in db.relations:
                raise InputError(f"query mentions unknown relation {rel}")
            if a is not None and a != len(terms):
                raise InputError(f"{rel} has arity {a} but the query uses {len(terms)}")

    def __str__(self):
        body = ", ".join(f"{r}({','.join(t.name if isinstance(t, Var) else repr(t) for t in ts)})"
                         for r, ts in self.atoms)
        return f"{self.name} :- {body}."


_ATOM = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*\(([^()]*)\)\s*")


def parse_query(text: str) -> ConjunctiveQuery:
    """``Q :- S(x), R(x,y), S(y).``; bare identifiers are variables, quoted
    strings and numbers are constants.  The head is optional."""
    name = "Q"
    body = text.strip()
    if ":-" in body:
        head, body = body.split(":-", 1)
        name = head.strip().rstrip("()").strip() or "Q"
    body = body.strip()
    if body.endswith("."):
        body = body[:-1]
    atoms = []
    pos = 0
    while pos < len(body):
        m = _ATOM.match(body, pos)
        if not m:
            raise ParseError(f"cannot parse query atom at {body[pos:]!r}")
        terms = []
        for raw in m.group(2).split(","):
            raw = raw.strip()
            if not raw:
                raise ParseError(f"empty term in {m.group(0).strip()!r}")
            if raw[0] in "'\"":
                if len(raw) < 2 or raw[-1] != raw[0]:
                    raise ParseError(f"unterminated constant {raw!r}")
                terms.append(raw[1:-1])
            elif raw.isdigit():
                terms.append(raw)
            elif re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", raw):
                terms.append(Var(raw))
            else:
                raise ParseError(f"bad term {raw!r}")
        atoms.append((m.group(1), tuple(terms)))
        pos = m.end()
        if pos < len(body):
            if body[pos] != ",":
                raise ParseError(f"expected ',' at {body[pos:]!r}")
            pos += 1
    if not atoms:
        raise ParseError("query body is empty")
    return ConjunctiveQuery(tuple(atoms), name)


def _bindings(db: Instance, q: ConjunctiveQuery):
    """Lazy backtracking join.  Rows are sorted, so bindings come out
    lexicographically in variable first-occurrence order."""

    def go(i, binding):
        if i == len(q.atoms):
            yield dict(binding)
            return
        rel, terms = q.atoms[i]
        for row in db.relations.get(rel, ()):
            new = {}
            ok = True
            for t, v in zip(terms, row):
                if isinstance(t, Var):
                    bound = binding.get(t, new.get(t))
                    if bound is None:
                        new[t] = v
                    elif bound != v:
                        ok = False
                        break
                elif t != v:
                    ok = False
                    break
            if ok:
                binding.update(new)
                yield from go(i + 1, binding)
                for t in new:
                    del binding[t]

    return go(0, {})


def homomorphisms(db: Instance, q: ConjunctiveQuery) -> list:
    q.check(db)
    return list(_bindings(db, q))


def eval_cq(db: Instance, q: ConjunctiveQuery):
    """(truth value, first witnessing binding as {variable: constant} or None)."""
    q.check(db)
    w = next(_bindings(db, q), None)
    return (w is not None), ({v.name: c for v, c in w.items()} if w is not None else None)


def _ground(terms, binding):
    return tuple(binding[t] if isinstance(t, Var) else t for t in terms)


def witness_sets(db: Instance, q: ConjunctiveQuery) -> list:
    """Distinct fact sets that some binding maps the query body onto."""
    out = []
    for b in homomorphisms(db, q):
        s = frozenset((rel, _ground(terms, b)) for rel, terms in q.atoms)
        if s not in out:
            out.append(s)
    return out


@dataclass(frozen=True)
class CauseReport:
    fact: tuple
    verdict: str  # counterfactual | actual | not-a-cause
    min_contingencies: tuple  # tuple of frozensets of facts, sorted
    responsibility: Fraction

    def to_json(self) -> dict:
        from .classifier import format_rational
        return {"tuple": fact_str(self.fact), "verdict": self.verdict,
                "min_contingencies": [[fact_str(f) for f in sorted(g)] for g in self.min_contingencies],
                "responsibility": format_rational(self.responsibility)}


def _report(fact, found):
    if not found:
        return CauseReport(fact, "not-a-cause", (), Fraction(0))
    size = len(found[0])
    found = tuple(sorted(found, key=lambda g: sorted(g)))
    return CauseReport(fact, "counterfactual" if size == 0 else "actual", found, Fraction(1, 1 + size))


def causes(db: Instance, q: ConjunctiveQuery, cap: int = DEFAULT_TUPLE_CAP) -> list:
    """One report per endogenous tuple, ordered by relation then tuple.

    Only tuples occurring in some witness set can matter, so contingencies
    are searched breadth-first over those.
    """
    wits = witness_sets(db, q)
    if not wits:
        raise PreconditionError("the query is false on this instance")
    relevant = sorted({f for w in wits for f in w if f not in db.exogenous})
    if len(relevant) > cap:
        raise CapExceeded(f"{len(relevant)} relevant tuples exceed the cap of {cap}", reached=len(relevant))
    memo = {}

    def alive(removed):
        hit = memo.get(removed)
        if hit is None:
            hit = memo[removed] = any(w.isdisjoint(removed) for w in wits)
        return hit

    out = []
    for t in db.endogenous():
        found = []
        if t in relevant:
            rest = [f for f in relevant if f != t]
            for k in range(len(rest) + 1):
                for combo in combinations(rest, k):
                    g = frozenset(combo)
                    if alive(g) and not alive(g | {t}):
                        found.append(g)
                if found:
                    break
        out.append(_report(t, found))
    return out


def causes_brute(db: Instance, q: ConjunctiveQuery) -> list:
    """Oracle: re-evaluate the query on every subset of endogenous tuples."""
    endo = db.endogenous()
    if len(endo) > 16:
        raise CapExceeded(f"{len(endo)} endogenous tuples are too many to enumerate", reached=len(endo))
    if not eval_cq(db, q)[0]:
        raise PreconditionError("the query is false on this instance")
    n = len(endo)
    true_after = [eval_cq(db.without(endo[i] for i in range(n) if m >> i & 1), q)[0] for m in range(1 << n)]
    out = []
    for i, t in enumerate(endo):
        best = None
        found = []
        for m in range(1 << n):
            if m >> i & 1 or not true_after[m] or true_after[m | 1 << i]:
                continue
            size = bin(m).count("1")
            if best is None or size < best:
                best, found = size, []
            if size == best:
                found.append(frozenset(endo[j] for j in range(n) if m >> j & 1))
        out.append(_report(t, found))
    return out


@dataclass(frozen=True)
class DenialConstraint:
    """``not exists vars: body``; violated by an instance exactly when the query holds."""

    query: ConjunctiveQuery

    def violated(self, db: Instance) -> bool:
        return eval_cq(db, self.query)[0]

    def satisfied(self, db: Instance) -> bool:
        return not self.violated(db)

    def __str__(self):
        vs = "".join(f"∃{v.name}" for v in self.query.variables())
        body = " ∧ ".join(f"{r}({','.join(t.name if isinstance(t, Var) else repr(t) for t in ts)})"
                          for r, ts in self.query.atoms)
        return f"¬{vs}({body})"


def cq_to_denial(q: ConjunctiveQuery) -> DenialConstraint:
    return DenialConstraint(q)


def cbd_encoding(db: Instance, q: ConjunctiveQuery) -> DiagnosisProblem:
    """Consistency-based diagnosis problem for the denial of ``q`` on ``db``.

    Each grounding of the body gives the rule ``(and of not Ab) -> not body``.
    Groundings that use a fact outside ``db`` hold trivially under the closed
    world, so only groundings onto ``db`` are emitted.  Exogenous tuples get
    no Ab atom.  The observation states every fact of ``db``.
    """
    q.check(db)
    rules = []
    for b in homomorphisms(db, q):
        ground = [(rel, _ground(terms, b)) for rel, terms in q.atoms]
        normal = [Not(Atom(ab_atom(f))) for f in dict.fromkeys(ground) if f not in db.exogenous]
        body = And(*(Atom(fact_atom(f)) for f in ground))
        rules.append(Implies(And(*normal), Not(body)) if normal else Not(body))
    components = [ab_atom(f) for f in db.endogenous()]
    observation = [Atom(fact_atom(f)) for f in db.facts()]
    return DiagnosisProblem(tuple(rules), tuple(components), tuple(observation))


def diagnosis_tuples(db: Instance, abnormal) -> frozenset:
    """Map Ab atom names of a diagnosis back to facts."""
    back = {ab_atom(f): f for f in db.facts()}
    return frozenset(back[a] for a in abnormal)
