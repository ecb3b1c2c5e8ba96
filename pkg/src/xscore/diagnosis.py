"""Consistency-based diagnosis, abduction and actual causes over logical theories."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Optional, Sequence

from .errors import CapExceeded, ParseError, PreconditionError
from .logic import And, Atom, Not, as_formula, atoms, consistent, entails, literal

log = logging.getLogger(__name__)

DEFAULT_COMPONENT_CAP = 20

ALL_MINIMAL = "all-minimal"
MINIMUM_ONLY = "minimum-only"


def _theory(formulas):
    return tuple(as_formula(f) for f in formulas)


def _check_cap(n, cap, what):
    if n > cap:
        raise CapExceeded(f"{n} {what} exceed the cap of {cap}", reached=n)


@dataclass(frozen=True)
class DiagnosisProblem:
    model: tuple
    components: tuple  # Ab atom names
    observation: tuple

    def __post_init__(self):
        object.__setattr__(self, "model", _theory(self.model))
        object.__setattr__(self, "observation", _theory(self.observation))
        object.__setattr__(self, "components", tuple(self.components))
        if len(set(self.components)) != len(self.components):
            raise ParseError("duplicate component atoms")

    @classmethod
    def from_json(cls, obj: Mapping) -> "DiagnosisProblem":
        for key in ("model", "components", "observation"):
            if not isinstance(obj.get(key), list):
                raise ParseError(f"diagnosis problem needs a '{key}' list")
        return cls(obj["model"], obj["components"], obj["observation"])

    def assumptions(self, abnormal) -> list:
        abnormal = set(abnormal)
        unknown = abnormal - set(self.components)
        if unknown:
            raise PreconditionError(f"not components: {sorted(unknown)}")
        return [literal(c, c in abnormal) for c in self.components]


@dataclass(frozen=True)
class Diagnosis:
    abnormal: frozenset
    minimal: bool = True
    minimum: bool = False

    def to_json(self) -> dict:
        return {"abnormal": sorted(self.abnormal), "minimal": self.minimal, "minimum": self.minimum}


def is_diagnosis(p: DiagnosisProblem, abnormal) -> bool:
    """Components outside ``abnormal`` are assumed to work normally."""
    return consistent(list(p.model) + list(p.observation) + p.assumptions(abnormal))


def is_minimal_diagnosis(p: DiagnosisProblem, abnormal) -> bool:
    abnormal = frozenset(abnormal)
    if not is_diagnosis(p, abnormal):
        return False
    return not any(is_diagnosis(p, abnormal - {c}) for c in abnormal)


def diagnoses(p: DiagnosisProblem, mode: str = ALL_MINIMAL, cap: int = DEFAULT_COMPONENT_CAP) -> list:
    """Minimal diagnoses, breadth-first by size, skipping supersets of found ones.

    Output order is size, then component order.  With ``minimum-only`` the
    search stops at the first size that has a diagnosis.
    """
    if mode not in (ALL_MINIMAL, MINIMUM_ONLY):
        raise ValueError(f"unknown mode {mode!r}")
    _check_cap(len(p.components), cap, "components")
    found = []
    least = None
    for k in range(len(p.components) + 1):
        if mode == MINIMUM_ONLY and least is not None:
            break
        for combo in combinations(p.components, k):
            cand = frozenset(combo)
            if any(f <= cand for f in found):
                continue
            if is_diagnosis(p, cand):
                found.append(cand)
                least = k if least is None else least
    return [Diagnosis(d, True, len(d) == least) for d in found]


@dataclass(frozen=True)
class AbductionProblem:
    theory: tuple
    hypotheses: tuple
    observation: tuple

    def __post_init__(self):
        object.__setattr__(self, "theory", _theory(self.theory))
        object.__setattr__(self, "observation", _theory(self.observation))
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))
        known = []
        for f in self.theory + self.observation:
            atoms(f, known)
        missing = [h for h in self.hypotheses if h not in known]
        if missing:
            raise ParseError(f"hypotheses {missing} occur in neither theory nor observation")

    @classmethod
    def from_json(cls, obj: Mapping) -> "AbductionProblem":
        for key in ("theory", "hypotheses", "observation"):
            if not isinstance(obj.get(key), list):
                raise ParseError(f"abduction problem needs a '{key}' list")
        return cls(obj["theory"], obj["hypotheses"], obj["observation"])


def is_explanation(p: AbductionProblem, chosen) -> bool:
    """``chosen`` plus the theory is consistent and entails every observation.

    Hypotheses not chosen are left unconstrained.
    """
    base = list(p.theory) + [Atom(h) for h in chosen]
    return consistent(base) and entails(base, And(*p.observation))


def abduce(p: AbductionProblem, cap: int = DEFAULT_COMPONENT_CAP) -> list:
    """Subset-minimal explanations, ordered by size then hypothesis order."""
    _check_cap(len(p.hypotheses), cap, "hypotheses")
    found = []
    for k in range(len(p.hypotheses) + 1):
        for combo in combinations(p.hypotheses, k):
            cand = frozenset(combo)
            if any(f <= cand for f in found):
                continue
            if is_explanation(p, cand):
                found.append(cand)
        if k == 0 and found:
            log.warning("the theory entails the observation without any hypothesis")
            return found
    return found


@dataclass(frozen=True)
class CausalSetting:
    """Theory plus exogenous facts, with intervenable atoms at base values.

    An intervention flips the value of some intervenable atoms; the remaining
    ones keep their base value.  ``observation`` must be entailed before any
    intervention.
    """

    theory: tuple
    exogenous: tuple  # literal formulas
    intervenable: tuple  # ((atom, base value), ...)
    observation: object

    def __post_init__(self):
        object.__setattr__(self, "theory", _theory(self.theory))
        object.__setattr__(self, "exogenous", _theory(self.exogenous))
        object.__setattr__(self, "observation", as_formula(self.observation))
        object.__setattr__(self, "intervenable", tuple((a, bool(v)) for a, v in self.intervenable))

    @classmethod
    def from_diagnosis(cls, theory, facts, observation, components) -> "CausalSetting":
        """Diagnosis-shaped setting: the Ab atoms are intervenable, normal at base."""
        return cls(theory, facts, tuple((c, False) for c in components), observation)

    @classmethod
    def from_json(cls, obj: Mapping) -> "CausalSetting":
        if "theory" not in obj or "observation" not in obj:
            raise ParseError("causal setting needs 'theory' and 'observation'")
        inter = obj.get("intervenable")
        if inter is None:
            inter = {c: False for c in obj.get("components", ())}
        if not isinstance(inter, Mapping):
            raise ParseError("'intervenable' must map atoms to base truth values")
        return cls(obj["theory"], obj.get("exogenous", ()), tuple(inter.items()), obj["observation"])

    def holds_after(self, flipped) -> bool:
        flipped = set(flipped)
        lits = [literal(a, (not v) if a in flipped else v) for a, v in self.intervenable]
        return entails(list(self.theory) + list(self.exogenous) + lits, self.observation)


@dataclass(frozen=True)
class LogicalCause:
    atom: str
    verdict: str  # counterfactual | actual | not-a-cause
    min_contingencies: tuple  # tuple of frozensets
    responsibility: Fraction

    def to_json(self) -> dict:
        from .classifier import format_rational
        return {"atom": self.atom, "verdict": self.verdict,
                "min_contingencies": [sorted(g) for g in self.min_contingencies],
                "responsibility": format_rational(self.responsibility)}


def actual_causes_logical(s: CausalSetting, cap: int = DEFAULT_COMPONENT_CAP) -> list:
    """Per intervenable atom: counterfactual, actual (with contingencies) or neither.

    Γ is a contingency for ``v`` when flipping Γ alone keeps the observation
    entailed and flipping Γ together with ``v`` breaks it.
    """
    names = [a for a, _ in s.intervenable]
    _check_cap(len(names), cap, "intervenable atoms")
    memo = {}

    def holds(flipped):
        key = frozenset(flipped)
        if key not in memo:
            memo[key] = s.holds_after(key)
        return memo[key]

    if not holds(()):
        raise PreconditionError("the observation is not entailed before interventions")
    out = []
    for v in names:
        rest = [a for a in names if a != v]
        found = []
        for k in range(len(rest) + 1):
            for combo in combinations(rest, k):
                gamma = frozenset(combo)
                if holds(gamma) and not holds(gamma | {v}):
                    found.append(gamma)
            if found:
                break
        if not found:
            out.append(LogicalCause(v, "not-a-cause", (), Fraction(0)))
        else:
            size = len(found[0])
            kind = "counterfactual" if size == 0 else "actual"
            out.append(LogicalCause(v, kind, tuple(found), Fraction(1, 1 + size)))
    return out
