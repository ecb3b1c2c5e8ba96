"""Feature schemas and entities.

An entity is a plain ``dict`` mapping feature name to a value from that
feature's domain.  Domains are ordered; the order fixes enumeration and
tie-breaking everywhere downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import InputError, ParseError


@dataclass(frozen=True)
class FeatureSpace:
    features: tuple  # ((name, (value, ...)), ...)

    def __post_init__(self):
        names = [name for name, _ in self.features]
        if len(set(names)) != len(names):
            raise ParseError("duplicate feature names in schema")
        for name, dom in self.features:
            if len(dom) == 0:
                raise ParseError(f"feature {name!r} has an empty domain")
            if len(set(dom)) != len(dom):
                raise ParseError(f"feature {name!r} has repeated domain values")

    @classmethod
    def of(cls, spec: Mapping[str, Sequence] | Iterable) -> "FeatureSpace":
        items = spec.items() if isinstance(spec, Mapping) else spec
        return cls(tuple((name, tuple(dom)) for name, dom in items))

    @classmethod
    def binary(cls, names: Iterable[str]) -> "FeatureSpace":
        return cls(tuple((name, (0, 1)) for name in names))

    @property
    def names(self) -> tuple:
        return tuple(name for name, _ in self.features)

    def __len__(self):
        return len(self.features)

    def __contains__(self, name):
        return any(n == name for n, _ in self.features)

    def domain(self, name: str) -> tuple:
        for n, dom in self.features:
            if n == name:
                return dom
        raise InputError(f"unknown feature {name!r}")

    def index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.features):
            if n == name:
                return i
        raise InputError(f"unknown feature {name!r}")

    @property
    def is_binary(self) -> bool:
        return all(set(dom) == {0, 1} for _, dom in self.features)

    def population(self) -> int:
        size = 1
        for _, dom in self.features:
            size *= len(dom)
        return size

    def entities(self) -> Iterator[dict]:
        """All entities, odometer order with the last feature varying fastest."""
        names = self.names
        for values in product(*(dom for _, dom in self.features)):
            yield dict(zip(names, values))

    def validate(self, e: Mapping) -> dict:
        out = {}
        for name, dom in self.features:
            if name not in e:
                raise InputError(f"entity is missing feature {name!r}")
            if e[name] not in dom:
                raise InputError(f"feature {name!r}: value {e[name]!r} not in domain {list(dom)}")
            out[name] = e[name]
        return out

    def coerce(self, raw: Mapping) -> dict:
        """Match raw (usually string) values against domain values by ``str``."""
        out = {}
        for name, dom in self.features:
            if name not in raw:
                raise InputError(f"entity is missing feature {name!r}")
            v = raw[name]
            if v in dom and type(v) is type(dom[dom.index(v)]):
                out[name] = v
                continue
            matches = [d for d in dom if str(d) == str(v)]
            if not matches:
                raise InputError(f"feature {name!r}: value {v!r} not in domain {list(dom)}")
            out[name] = matches[0]
        extra = set(raw) - set(self.names)
        if extra:
            raise InputError(f"entity mentions unknown features {sorted(extra)}")
        return out
