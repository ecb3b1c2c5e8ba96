"""Shapley values of coalition games and the Shap attribution score.

``shap_brute`` works for any classifier and distribution by enumerating the
entity population.  ``shap_exact`` works on certified dDBCs only and runs in
time polynomial in the circuit size: under the uniform distribution through
Hamming-distance-stratified model counts, under a product distribution through
per-gate generating polynomials

    R_g(z) = sum over S subset of Var(g) of  z^|S| * P(g = 1 | features in S fixed to e)

which multiply at decomposable And gates and add (after padding with the
missing variables) at deterministic Or gates.  In both cases the coefficient
of ``z^k`` aggregates the game values of all coalitions of size ``k``, which is
all the Shapley formula needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import comb, factorial, lcm
from typing import Callable, Mapping, Optional, Sequence

from .circuit import (AND, CONST, NOT, VAR, Circuit, _entity_bits, _reachable, binomial_row,
                      convolve, distance_rows, evaluate, model_count)
from .classifier import Classifier, Distribution, as_classifier, format_rational
from .errors import CapExceeded, InputError, PreconditionError, UnsupportedError

DEFAULT_PLAYER_CAP = 20
DEFAULT_SHAP_CAP = 14


@dataclass
class GameFunction:
    """A coalition game: ``evaluator(frozenset of players) -> Fraction``.

    ``values`` optionally holds the game pre-tabulated by bitmask (bit ``i``
    set when ``players[i]`` is in the coalition).
    """

    players: tuple
    evaluator: Optional[Callable] = None
    values: Optional[list] = None

    def __call__(self, coalition) -> Fraction:
        coalition = frozenset(coalition)
        if self.values is not None:
            mask = 0
            for i, p in enumerate(self.players):
                if p in coalition:
                    mask |= 1 << i
            return self.values[mask]
        return Fraction(self.evaluator(coalition))

    def table(self) -> list:
        if self.values is None:
            players = self.players
            self.values = [
                Fraction(self.evaluator(frozenset(p for i, p in enumerate(players) if mask >> i & 1)))
                for mask in range(1 << len(players))
            ]
        return self.values


def shapley(game: GameFunction, cap: int = DEFAULT_PLAYER_CAP) -> dict:
    """Exact Shapley value of every player, subset-sum form."""
    n = len(game.players)
    if n > cap:
        raise CapExceeded(f"{n} players exceed the cap {cap}", reached=n)
    if n == 0:
        return {}
    vals = game.table()
    den = 1
    for v in vals:
        den = lcm(den, v.denominator)
    ints = [v.numerator * (den // v.denominator) for v in vals]
    weight = [factorial(k) * factorial(n - k - 1) for k in range(n)]
    size = [0] * (1 << n)
    for mask in range(1, 1 << n):
        size[mask] = size[mask >> 1] + (mask & 1)
    out = {}
    total_den = factorial(n) * den
    for i, p in enumerate(game.players):
        bit = 1 << i
        acc = 0
        for mask in range(1 << n):
            if not mask & bit:
                acc += weight[size[mask]] * (ints[mask | bit] - ints[mask])
        out[p] = Fraction(acc, total_den)
    return out


def shapley_by_permutations(game: GameFunction, cap: int = 8) -> dict:
    """Average marginal contribution over all player orderings (oracle)."""
    n = len(game.players)
    if n > cap:
        raise CapExceeded(f"{n} players exceed the permutation cap {cap}", reached=n)
    totals = {p: Fraction(0) for p in game.players}
    count = 0
    for order in permutations(game.players):
        seen = set()
        before = game(frozenset())
        for p in order:
            seen.add(p)
            after = game(frozenset(seen))
            totals[p] += after - before
            before = after
        count += 1
    return {p: t / count for p, t in totals.items()}


# Games from classifiers --------------------------------------------------------

def _marginal_weights(space, d, name):
    """Integer weights and common denominator of a feature's marginal."""
    m = d.marginal(space, name)
    q = 1
    for p in m.values():
        q = lcm(q, p.denominator)
    return [int(m[v] * q) for v in space.domain(name)], q


def _conditional_table(c: Classifier, e: Mapping, d: Distribution):
    """All game values G_e(S) at once, as (integer table, denominator).

    The label table is reduced one feature at a time: each feature's axis of
    size |Dom| collapses to two slots, "free" (averaged under the marginal)
    and "fixed" (pinned to e's value).  The result is indexed by coalition
    bitmask with the first feature as the most significant bit.
    """
    space = c.space
    arr = list(c.labels())
    shape = [len(dom) for _, dom in space.features]
    den = 1
    for i, (name, dom) in enumerate(space.features):
        weights, q = _marginal_weights(space, d, name)
        den *= q
        k = shape[i]
        pin = dom.index(e[name])
        inner = 1
        for s in shape[i + 1:]:
            inner *= s
        outer = len(arr) // (k * inner)
        new = [0] * (outer * 2 * inner)
        for o in range(outer):
            base = o * k * inner
            nbase = o * 2 * inner
            for r in range(inner):
                free = 0
                for v in range(k):
                    free += weights[v] * arr[base + v * inner + r]
                new[nbase + r] = free
                new[nbase + inner + r] = q * arr[base + pin * inner + r]
        arr = new
        shape[i] = 2
    return arr, den


def _empirical_game(c: Classifier, e: Mapping, d: Distribution):
    names = c.space.names
    rows = [(row, w, c(row)) for row, w in d.check(c.space).sample]

    def g(coalition):
        num = den = Fraction(0)
        for row, w, label in rows:
            if all(row[n] == e[n] for n in coalition):
                num += w * label
                den += w
        if den == 0:
            raise PreconditionError(
                f"empirical sample has no entity agreeing with e on {sorted(coalition, key=names.index)}")
        return num / den

    return g


def game_from_classifier(c, e: Mapping, d: Optional[Distribution] = None) -> GameFunction:
    """The Shap game G_e(S) = E[L(e') | e'_S = e_S] over the features of ``c``."""
    c = as_classifier(c)
    d = Distribution.uniform() if d is None else d
    e = c.space.coerce(e)
    names = c.space.names
    n = len(names)
    if d.kind == "empirical":
        return GameFunction(names, _empirical_game(c, e, d))
    d = d.check(c.space)
    table, den = _conditional_table(c, e, d)
    # reindex: table uses first feature as most significant bit
    values = [None] * (1 << n)
    for mask in range(1 << n):
        idx = 0
        for i in range(n):
            if mask >> i & 1:
                idx |= 1 << (n - 1 - i)
        values[mask] = Fraction(table[idx], den)
    return GameFunction(names, None, values)


def expected_label(c, e: Mapping, coalition, d: Optional[Distribution] = None) -> Fraction:
    """Direct enumeration of E[L(e') | e'_S = e_S]; slow, used as a cross-check."""
    c = as_classifier(c)
    d = Distribution.uniform() if d is None else d
    e = c.space.coerce(e)
    if d.kind == "empirical":
        return _empirical_game(c, e, d)(frozenset(coalition))
    d = d.check(c.space)
    margs = {n: d.marginal(c.space, n) for n in c.space.names}
    total = Fraction(0)
    for ent in c.space.entities():
        if any(ent[n] != e[n] for n in coalition):
            continue
        w = Fraction(1)
        for n in c.space.names:
            if n not in coalition:
                w *= margs[n][ent[n]]
        if w:
            total += w * c(ent)
    return total


# Reports ----------------------------------------------------------------------

@dataclass
class ScoreReport:
    scores: dict  # feature -> Fraction, in feature order
    method: str
    distribution: str = "uniform"
    witnesses: dict = field(default_factory=dict)  # feature -> {feature: value} or None

    def to_json(self, approx: bool = False) -> dict:
        rows = []
        for f, s in self.scores.items():
            row = {"feature": f, "score": format_rational(s)}
            if approx:
                row["approx"] = f"{float(s):.15g}"
            if f in self.witnesses:
                w = self.witnesses[f]
                row["witness"] = None if w is None else {k: str(v) for k, v in w.items()}
            rows.append(row)
        return {"method": self.method, "distribution": self.distribution, "scores": rows}

    def to_csv(self, approx: bool = False) -> str:
        head = ["feature", "score", "method", "witness"] + (["approx"] if approx else [])
        lines = [",".join(head)]
        for f, s in self.scores.items():
            w = self.witnesses.get(f)
            wtxt = ";".join(f"{k}={v}" for k, v in w.items()) if w else ""
            cells = [_csv(f), format_rational(s), self.method, _csv(wtxt)]
            if approx:
                cells.append(f"{float(s):.15g}")
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def _csv(text):
    text = str(text)
    if any(ch in text for ch in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def shap_brute(c, e: Mapping, d: Optional[Distribution] = None,
               cap: int = DEFAULT_SHAP_CAP) -> ScoreReport:
    """Shap of every feature by full enumeration of games and entities."""
    c = as_classifier(c)
    d = Distribution.uniform() if d is None else d
    if len(c.space) > cap:
        raise CapExceeded(f"{len(c.space)} features exceed the brute-force cap {cap}",
                          reached=len(c.space))
    scores = shapley(game_from_classifier(c, e, d), cap=cap)
    return ScoreReport(scores, "shap-brute", d.kind)


# Exact Shap on dDBCs --------------------------------------------------------------

def _require_ddbc(circuit):
    if not isinstance(circuit, Circuit):
        raise UnsupportedError("shap_exact needs a circuit")
    if not circuit.certified:
        raise PreconditionError("shap_exact needs a certified dDBC; run check_decomposable "
                                "and check_deterministic, or compile a decision tree")


def _shap_weights(n):
    m = n - 1
    return [factorial(k) * factorial(m - k) for k in range(n)]


def _shap_uniform(circuit: Circuit, bits: dict) -> dict:
    n = len(circuit.features)
    m = n - 1
    weight = _shap_weights(n)
    base = distance_rows(circuit, bits)
    out = {}
    for f, name in enumerate(circuit.features):
        clean = {g: r for g, r in base.items() if f not in circuit.varsets[g]}
        per_value = []
        for v in (0, 1):
            cond = circuit.condition({name: v})
            rows = distance_rows(cond, bits, reuse=clean)
            cnt = rows[cond.output]
            width = len(cnt) - 1
            cnt = convolve(cnt, binomial_row(m - width))
            # sum over coalitions S of size k of #models agreeing with e on S
            per_value.append([sum(cnt[l] * comb(m - l, k) for l in range(m + 1)) for k in range(n)])
        same, other = per_value[bits[f]], per_value[1 - bits[f]]
        acc = 0
        for k in range(n):
            acc += weight[k] * (same[k] - other[k]) << k
        out[name] = Fraction(acc, factorial(n) << (m + 1))
    return out


def _subset_polys(circuit: Circuit, bits, scale, high, reuse=None):
    """Scaled generating polynomials R_g for a product distribution.

    ``scale[x]`` is the common denominator q_x of feature x's marginal and
    ``high[x]`` the scaled probability q_x * P(x = 1).  Row g is R_g times the
    product of q_x over Var(g).  ``reuse`` maps gate ids to known
    (polynomial, scale) pairs.
    """
    vs = circuit.varsets
    polys, qs = {}, {}
    for gid in _reachable(circuit, circuit.output):
        if reuse is not None and gid in reuse:
            polys[gid], qs[gid] = reuse[gid]
            continue
        g = circuit.gates[gid]
        k = g.kind
        if k == VAR:
            x = g.feature
            polys[gid], qs[gid] = [high[x], scale[x] * bits[x]], scale[x]
        elif k == CONST:
            polys[gid], qs[gid] = [g.value], 1
        elif k == NOT:
            c = g.children[0]
            row = binomial_row(len(vs[c]))
            polys[gid] = [qs[c] * b - p for b, p in zip(row, polys[c])]
            qs[gid] = qs[c]
        elif k == AND:
            acc, q = [1], 1
            for c in g.children:
                acc = convolve(acc, polys[c])
                q *= qs[c]
            polys[gid], qs[gid] = acc, q
        else:
            q = 1
            for x in vs[gid]:
                q *= scale[x]
            acc = [0] * (len(vs[gid]) + 1)
            for c in g.children:
                pad = q // qs[c]
                spread = convolve(polys[c], binomial_row(len(vs[gid]) - len(vs[c])))
                for i, x in enumerate(spread):
                    acc[i] += pad * x
            polys[gid], qs[gid] = acc, q
    return polys, qs


def _shap_product(circuit: Circuit, bits: dict, d: Distribution) -> dict:
    n = len(circuit.features)
    m = n - 1
    weight = _shap_weights(n)
    space = Classifier.from_circuit(circuit).space
    d = d.check(space)
    scale, high, low = {}, {}, {}
    for x, name in enumerate(circuit.features):
        (w0, w1), q = _marginal_weights(space, d, name)
        scale[x], high[x], low[x] = q, w1, w0
    polys, qs = _subset_polys(circuit, bits, scale, high)
    out = {}
    for f, name in enumerate(circuit.features):
        clean = {g: (polys[g], qs[g]) for g in polys if f not in circuit.varsets[g]}
        others = [x for x in range(n) if x != f]
        q_rest = 1
        for x in others:
            q_rest *= scale[x]
        per_value = []
        for v in (0, 1):
            cond = circuit.condition({name: v})
            cpolys, cqs = _subset_polys(cond, bits, scale, high, reuse=clean)
            r, q = cpolys[cond.output], cqs[cond.output]
            width = len(r) - 1
            r = convolve(r, binomial_row(m - width))
            pad = q_rest // q
            per_value.append([pad * x for x in r])
        same = per_value[bits[f]]
        acc = 0
        for k in range(n):
            mixed = low[f] * per_value[0][k] + high[f] * per_value[1][k]
            acc += weight[k] * (scale[f] * same[k] - mixed)
        out[name] = Fraction(acc, factorial(n) * scale[f] * q_rest)
    return out


def shap_exact(circuit: Circuit, e, d: Optional[Distribution] = None) -> ScoreReport:
    """Polynomial-time Shap on a certified dDBC (uniform or product distribution)."""
    _require_ddbc(circuit)
    d = Distribution.uniform() if d is None else d
    if d.kind == "empirical":
        raise UnsupportedError("shap_exact supports uniform and product distributions; "
                               "use shap_brute for empirical ones")
    bits = _entity_bits(circuit, e, needed=range(len(circuit.features)))
    if not circuit.features:
        return ScoreReport({}, "shap-exact", d.kind)
    if d.kind == "uniform":
        scores = _shap_uniform(circuit, bits)
    else:
        scores = _shap_product(circuit, bits, d)
    return ScoreReport(scores, "shap-exact", d.kind)


@dataclass(frozen=True)
class RedIdentity:
    """#SAT(L) == 2^n * (L(e) - sum of Shap), checked exactly."""

    holds: bool
    model_count: int
    label: int
    shap_sum: Fraction
    residual: Fraction


def verify_red_identity(circuit: Circuit, e) -> RedIdentity:
    """Check the count/Shap identity for a certified dDBC under the uniform distribution."""
    _require_ddbc(circuit)
    n = len(circuit.features)
    count = model_count(circuit) << (n - len(circuit.varsets[circuit.output]))
    label = evaluate(circuit, e)
    total = sum(shap_exact(circuit, e).scores.values(), Fraction(0))
    residual = Fraction(count) - (1 << n) * (label - total)
    return RedIdentity(residual == 0, count, label, total, residual)
