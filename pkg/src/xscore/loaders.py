"""Reading classifiers, entities and problems from files; bundled fixtures."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .circuit import Circuit, circuit_from_json
from .classifier import Classifier
from .compile import DecisionTree, cnf_to_circuit, parse_cnf, parse_dt
from .errors import InputError, ParseError
from .space import FeatureSpace


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("xscore") / "fixtures" / name))


def read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def load_json(path):
    text = read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def table_from_json(obj) -> Classifier:
    """``{"schema": {F: [values]}, "rows": [{F: v, ..., "label": 0|1}], "default": 0|1}``."""
    if not isinstance(obj.get("schema"), dict) or not isinstance(obj.get("rows"), list):
        raise ParseError("table JSON needs a 'schema' mapping and a 'rows' list")
    space = FeatureSpace.of({k: tuple(str(v) for v in dom) for k, dom in obj["schema"].items()})
    table = {}
    for row in obj["rows"]:
        if not isinstance(row, dict) or "label" not in row:
            raise ParseError(f"table row {row!r} needs a 'label'")
        e = space.coerce({k: v for k, v in row.items() if k != "label"})
        key = tuple(e[n] for n in space.names)
        if key in table:
            raise InputError(f"table lists entity {key} twice")
        table[key] = row["label"]
    return Classifier.from_table(space, table, obj.get("default"))


def parse_model(text: str, origin: str = "<input>"):
    """A circuit, decision tree, table classifier or DIMACS formula."""
    stripped = text.lstrip()
    if not stripped.startswith("{"):
        return cnf_to_circuit(parse_cnf(text))
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{origin}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if "gates" in obj:
        return circuit_from_json(obj)
    if "nodes" in obj:
        return parse_dt(obj)
    if "rows" in obj:
        return table_from_json(obj)
    raise ParseError(f"{origin}: not a circuit ('gates'), tree ('nodes') or table ('rows')")


def load_model(path):
    return parse_model(read_text(path), str(path))


def load_entity(path_or_json):
    """An entity from a JSON file, or from inline JSON text."""
    text = path_or_json
    if not str(path_or_json).lstrip().startswith("{"):
        text = read_text(path_or_json)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"entity is not valid JSON ({exc.msg})") from None
    if not isinstance(obj, dict):
        raise ParseError("an entity is a JSON object mapping features to values")
    return obj


def space_of(model) -> FeatureSpace:
    if isinstance(model, Circuit):
        return FeatureSpace.binary(model.features)
    if isinstance(model, DecisionTree):
        return model.schema
    return model.space
