"""Propositional formulas, clausification and a DPLL satisfiability core.

Formulas are nested tuples::

    ("atom", name) | ("const", bool) | ("not", f) | ("and", f, ...)
    | ("or", f, ...) | ("imp", f, g) | ("iff", f, g)

Text syntax: atoms, ``true``/``false``, ``!``, ``&``, ``|``, ``->``, ``<->``
and parentheses, with that binding order (``!`` tightest, ``->`` right
associative).  Atom names may carry a bracketed argument list, as in
``Ab_R[c,b]``, which is how ground database atoms are spelled.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Optional, Sequence

from .errors import ParseError

TRUE = ("const", True)
FALSE = ("const", False)


def Atom(name: str):
    return ("atom", name)


def Not(f):
    return ("not", f)


def And(*fs):
    if not fs:
        return TRUE
    return fs[0] if len(fs) == 1 else ("and",) + tuple(fs)


def Or(*fs):
    if not fs:
        return FALSE
    return fs[0] if len(fs) == 1 else ("or",) + tuple(fs)


def Implies(f, g):
    return ("imp", f, g)


def Iff(f, g):
    return ("iff", f, g)


def literal(name: str, positive: bool = True):
    return Atom(name) if positive else Not(Atom(name))


_TOKEN = re.compile(r"\s*(?:(<->)|(->)|([!&|()])|(true|false)\b|([A-Za-z_][A-Za-z0-9_']*(?:\[[^\]]*\])?))")


def _tokenize(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].strip()[:1]!r} at offset {pos} in {text!r}")
        iff, imp, op, const, atom = m.groups()
        if iff or imp or op:
            out.append((iff or imp or op, None))
        elif const:
            out.append(("const", const == "true"))
        else:
            out.append(("atom", atom))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, kind=None):
        if self.i >= len(self.toks):
            raise ParseError(f"unexpected end of formula {self.text!r}")
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[0]!r} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self):
        if not self.toks:
            raise ParseError("empty formula")
        f = self.iff()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input after position {self.i} in {self.text!r}")
        return f

    def iff(self):
        f = self.imp()
        while self.peek() == "<->":
            self.take()
            f = Iff(f, self.imp())
        return f

    def imp(self):
        f = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(f, self.imp())
        return f

    def disj(self):
        fs = [self.conj()]
        while self.peek() == "|":
            self.take()
            fs.append(self.conj())
        return Or(*fs)

    def conj(self):
        fs = [self.unary()]
        while self.peek() == "&":
            self.take()
            fs.append(self.unary())
        return And(*fs)

    def unary(self):
        kind = self.peek()
        if kind == "!":
            self.take()
            return Not(self.unary())
        if kind == "(":
            self.take()
            f = self.iff()
            self.take(")")
            return f
        if kind == "const":
            return ("const", self.take()[1])
        if kind == "atom":
            return Atom(self.take()[1])
        raise ParseError(f"unexpected token {kind!r} in {self.text!r}")


def parse_formula(text: str):
    if not isinstance(text, str):
        raise ParseError(f"formula must be a string, got {type(text).__name__}")
    return _Parser(text).parse()


def as_formula(f):
    return parse_formula(f) if isinstance(f, str) else f


def format_formula(f) -> str:
    tag = f[0]
    if tag == "atom":
        return f[1]
    if tag == "const":
        return "true" if f[1] else "false"
    if tag == "not":
        return "!" + _wrap(f[1])
    if tag == "and":
        return " & ".join(_wrap(g) for g in f[1:])
    if tag == "or":
        return " | ".join(_wrap(g) for g in f[1:])
    if tag == "imp":
        return f"{_wrap(f[1])} -> {_wrap(f[2])}"
    return f"{_wrap(f[1])} <-> {_wrap(f[2])}"


def _wrap(f):
    s = format_formula(f)
    return s if f[0] in ("atom", "const", "not") else f"({s})"


def atoms(f, acc=None) -> list:
    """Atom names in order of first occurrence."""
    acc = [] if acc is None else acc
    stack = [f]
    while stack:
        g = stack.pop()
        if g[0] == "atom":
            if g[1] not in acc:
                acc.append(g[1])
        elif g[0] != "const":
            stack.extend(reversed(g[1:]))
    return acc


def holds(f, assignment: Mapping[str, bool]) -> bool:
    tag = f[0]
    if tag == "atom":
        return bool(assignment[f[1]])
    if tag == "const":
        return f[1]
    if tag == "not":
        return not holds(f[1], assignment)
    if tag == "and":
        return all(holds(g, assignment) for g in f[1:])
    if tag == "or":
        return any(holds(g, assignment) for g in f[1:])
    if tag == "imp":
        return (not holds(f[1], assignment)) or holds(f[2], assignment)
    return holds(f[1], assignment) == holds(f[2], assignment)


# Clausification -------------------------------------------------------------

class _Clausifier:
    """Tseitin encoding; literals and flat clauses are emitted directly."""

    def __init__(self):
        self.ids = {}
        self.names = []
        self.n_aux = 0
        self.clauses = []

    def atom_id(self, name):
        if name not in self.ids:
            self.names.append(name)
            self.ids[name] = len(self.names)
        return self.ids[name]

    def fresh(self):
        self.names.append(None)
        self.n_aux += 1
        return len(self.names)

    def add(self, f):
        f = _nnf(f)
        if f[0] == "and":
            for g in f[1:]:
                self.add(g)
            return
        if f[0] == "const":
            if not f[1]:
                self.clauses.append([])
            return
        lits = self._flat_clause(f)
        if lits is True:
            return
        if lits is not None:
            self.clauses.append(lits)
        else:
            self.clauses.append([self.lit(f)])

    def _flat_clause(self, f):
        parts = f[1:] if f[0] == "or" else (f,)
        out = []
        for g in parts:
            if g[0] == "atom":
                out.append(self.atom_id(g[1]))
            elif g[0] == "not" and g[1][0] == "atom":
                out.append(-self.atom_id(g[1][1]))
            elif g[0] == "const":
                if g[1]:
                    return True
            else:
                return None
        return out

    def lit(self, f):
        """Literal equivalent to NNF formula f (defining clauses added)."""
        tag = f[0]
        if tag == "atom":
            return self.atom_id(f[1])
        if tag == "not":
            return -self.lit(f[1])
        if tag == "const":
            v = self.fresh()
            self.clauses.append([v] if f[1] else [-v])
            return v
        kids = [self.lit(g) for g in f[1:]]
        v = self.fresh()
        if tag == "and":
            for k in kids:
                self.clauses.append([-v, k])
            self.clauses.append([v] + [-k for k in kids])
        else:
            for k in kids:
                self.clauses.append([v, -k])
            self.clauses.append([-v] + kids)
        return v


def _nnf(f, positive=True):
    """Negation normal form over and/or/not-atom/const."""
    tag = f[0]
    if tag == "atom":
        return f if positive else Not(f)
    if tag == "const":
        return ("const", f[1] == positive)
    if tag == "not":
        return _nnf(f[1], not positive)
    if tag == "imp":
        return _nnf(Or(Not(f[1]), f[2]), positive)
    if tag == "iff":
        a, b = f[1], f[2]
        return _nnf(And(Or(Not(a), b), Or(a, Not(b))), positive)
    kids = tuple(_nnf(g, positive) for g in f[1:])
    if (tag == "and") == positive:
        return And(*kids)
    return Or(*kids)


@dataclass
class SatResult:
    satisfiable: bool
    model: Optional[dict] = None  # atom name -> bool, original atoms only

    def __bool__(self):
        return self.satisfiable


def clausify(theory: Iterable):
    c = _Clausifier()
    for f in theory:
        f = as_formula(f)
        for name in atoms(f):
            c.atom_id(name)
    for f in theory:
        c.add(as_formula(f))
    return c


def _propagate(clauses, assign):
    """Unit propagation; returns simplified clauses or None on conflict."""
    while True:
        unit = None
        out = []
        for cl in clauses:
            undecided = []
            sat = False
            for l in cl:
                v = assign.get(abs(l))
                if v is None:
                    undecided.append(l)
                elif v == (l > 0):
                    sat = True
                    break
            if sat:
                continue
            if not undecided:
                return None
            if len(undecided) == 1 and unit is None:
                unit = undecided[0]
            out.append(undecided)
        if unit is None:
            return out
        assign[abs(unit)] = unit > 0
        clauses = out


def dpll(clauses, assign=None):
    """Plain DPLL on int-literal clauses; branches on the lowest variable id."""
    assign = {} if assign is None else assign
    stack = [(list(map(list, clauses)), assign)]
    while stack:
        cls, asg = stack.pop()
        cls = _propagate(cls, asg)
        if cls is None:
            continue
        if not cls:
            return asg
        v = min(abs(l) for cl in cls for l in cl)
        neg = dict(asg)
        neg[v] = False
        pos = dict(asg)
        pos[v] = True
        stack.append((cls, neg))
        stack.append((cls, pos))
    return None


def sat(theory: Iterable) -> SatResult:
    theory = [as_formula(f) for f in theory]
    c = clausify(theory)
    asg = dpll(c.clauses)
    if asg is None:
        return SatResult(False)
    model = {name: bool(asg.get(i + 1, False)) for i, name in enumerate(c.names) if name is not None}
    return SatResult(True, model)


def consistent(theory: Iterable) -> bool:
    return sat(theory).satisfiable


def entails(theory: Iterable, phi) -> bool:
    """theory |= phi iff theory + {not phi} is unsatisfiable."""
    return not sat(list(theory) + [Not(as_formula(phi))]).satisfiable


def truth_table_sat(theory: Sequence) -> bool:
    """Enumeration oracle for ``sat``."""
    theory = [as_formula(f) for f in theory]
    names = []
    for f in theory:
        atoms(f, names)
    for values in product((False, True), repeat=len(names)):
        a = dict(zip(names, values))
        if all(holds(f, a) for f in theory):
            return True
    return False
