"""Enumeration oracles written independently of the library's search code."""

from fractions import Fraction
from itertools import product


def resp_by_entities(c, e, feature, d=None, label=1, include_original=False):
    """Resp straight from the definition, scanning every entity as a candidate e[Γ := w̄].

    A candidate keeps ``feature`` at e's value; Γ is the set of other features
    where it differs from e.  Returns (score, minimum |Γ| or None).
    """
    space = c.space
    names = space.names
    dom = space.domain(feature)
    if d is None or d.kind == "uniform":
        weight = {v: Fraction(1) for v in dom}
    else:
        weight = d.marginal(space, feature)
    values = [v for v in dom if include_original or v != e[feature]]
    best = {}
    for combo in product(*(d_ for _, d_ in space.features)):
        x = dict(zip(names, combo))
        if x[feature] != e[feature] or c(x) != label:
            continue
        size = sum(1 for n in names if n != feature and x[n] != e[n])
        total = sum(weight[v] for v in values)
        if total == 0:
            continue
        stay = sum(weight[v] for v in values if c({**x, feature: v}) == label)
        score = (1 - stay / total) / (1 + size)
        if score > 0:
            best[size] = max(best.get(size, Fraction(0)), score)
    if not best:
        return Fraction(0), None
    k = min(best)
    return best[k], k


def logical_causes_by_flips(setting):
    """Responsibility per intervenable atom by scanning every flip set."""
    names = [a for a, _ in setting.intervenable]
    holds = {}
    for bits in product((0, 1), repeat=len(names)):
        flipped = frozenset(n for n, b in zip(names, bits) if b)
        holds[flipped] = setting.holds_after(flipped)
    out = {}
    for v in names:
        sizes = [len(g) for g in holds if v not in g and holds[g] and not holds[g | {v}]]
        out[v] = Fraction(1, 1 + min(sizes)) if sizes else Fraction(0)
    return out
