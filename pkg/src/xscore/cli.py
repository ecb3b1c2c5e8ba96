"""Command-line interface: ``xscore <subcommand> ...`` (or ``python3 -m xscore``).

Exit codes: 0 success, 2 parse error, 3 precondition error, 4 cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from typing import Optional

from . import selftest
from .circuit import (Circuit, brute_force_count, check_decomposable,
                      check_deterministic, circuit_to_json, count_by_distance, evaluate,
                      model_count, models)
from .classifier import as_classifier, distribution_from_json
from .compile import DecisionTree, binarize_dt, compile_dt, one_hot
from .dbcausality import Instance, causes, causes_brute, parse_query
from .diagnosis import (ALL_MINIMAL, MINIMUM_ONLY, AbductionProblem, CausalSetting,
                        DiagnosisProblem, abduce, actual_causes_logical, diagnoses)
from .errors import CapExceeded, ParseError, PreconditionError, UnsupportedError, XScoreError
from .loaders import load_entity, load_json, load_model, space_of
from .resp import DEFAULT_MAX_EVALUATIONS, constraints_from_json, resp_report
from .shapley import DEFAULT_SHAP_CAP, shap_brute, shap_exact

log = logging.getLogger("xscore")


@dataclass
class RunConfig:
    command: str
    cap_features: int = DEFAULT_SHAP_CAP
    max_cardinality: Optional[int] = None
    max_evaluations: int = DEFAULT_MAX_EVALUATIONS
    fmt: str = "json"
    approx: bool = False

    def __post_init__(self):
        if self.cap_features < 1 or self.max_evaluations < 1:
            raise ParseError("caps must be positive")
        if self.max_cardinality is not None and self.max_cardinality < 0:
            raise ParseError("--max-cardinality must be nonnegative")


def _env_cap():
    raw = os.environ.get("XSCORE_CAP_FEATURES")
    if raw is None:
        return DEFAULT_SHAP_CAP
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"XSCORE_CAP_FEATURES must be an integer, got {raw!r}") from None


def _emit(obj):
    print(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False))


def _as_circuit(model, what):
    if isinstance(model, Circuit):
        return model
    if isinstance(model, DecisionTree):
        if not model.is_binary:
            raise UnsupportedError(f"{what} needs a binary tree or a circuit; "
                                   f"use 'compile' on the binarized tree")
        return compile_dt(model)
    raise UnsupportedError(f"{what} needs a circuit or a decision tree, not a table")


def _certify(c: Circuit, cfg) -> Circuit:
    """Run the structural checks on an uncertified circuit (they promote it on success)."""
    if not c.certified:
        log.info("circuit not certified; checking decomposability and determinism")
        dec = check_decomposable(c)
        if not dec.ok:
            raise PreconditionError(f"circuit is not decomposable: {dec.detail}")
        det = check_deterministic(c, budget=cfg.cap_features)
        if not det.ok:
            raise PreconditionError(f"circuit is not deterministic ({det.status}): {det.detail}")
    return c


def _bits(c: Circuit, raw):
    return {k: v for k, v in raw.items() if k in c.feature_index}


def cmd_eval(args, cfg):
    model = load_model(args.model)
    e = load_entity(args.entity)
    if isinstance(model, Circuit):
        label = evaluate(model, e)
    else:
        c = as_classifier(model)
        label = c(c.space.coerce(e))
    _emit({"label": label})


def cmd_count(args, cfg):
    c = _as_circuit(load_model(args.model), "count")
    scope = [c.features[i] for i in sorted(c.varsets[c.output])]
    out = {"mode": args.mode, "scope": scope, "features": list(c.features)}
    if args.mode == "by-distance":
        if args.entity is None:
            raise ParseError("--mode by-distance needs --entity")
        e = load_entity(args.entity)
        counts = list(count_by_distance(_certify(c, cfg), e).counts)
        out["counts"] = counts
        out["count"] = sum(counts)
    elif args.mode == "exact":
        out["count"] = model_count(_certify(c, cfg))
    else:
        out["count"] = brute_force_count(c, cap=cfg.cap_features)
        if args.list:
            out["models"] = [{k: m[k] for k in scope} for m in models(c, cap=cfg.cap_features)]
    out["count_all_features"] = out["count"] << (len(c.features) - len(scope))
    _emit(out)


def _report_out(report, cfg):
    if cfg.fmt == "csv":
        sys.stdout.write(report.to_csv(cfg.approx))
    else:
        _emit(report.to_json(cfg.approx))


def cmd_shap(args, cfg):
    model = load_model(args.model)
    e = load_entity(args.entity)
    d = distribution_from_json(load_json(args.dist) if args.dist else None)
    if args.method == "exact":
        c = _certify(_as_circuit(model, "exact Shap"), cfg)
        report = shap_exact(c, _bits(c, e), d.check(space_of(c)))
    else:
        c = as_classifier(model)
        report = shap_brute(c, c.space.coerce(e), d.check(c.space), cap=cfg.cap_features)
    _report_out(report, cfg)


def cmd_resp(args, cfg):
    c = as_classifier(load_model(args.model))
    e = c.space.coerce(load_entity(args.entity))
    d = distribution_from_json(load_json(args.dist) if args.dist else None)
    cons = constraints_from_json(load_json(args.constraints) if args.constraints else None, c.space)
    label = c(e) if args.label is None else args.label
    report = resp_report(c, e, d, args.feature or None, label=label,
                         include_original=args.include_original, constraints=cons,
                         max_cardinality=cfg.max_cardinality, max_evaluations=cfg.max_evaluations)
    _report_out(report, cfg)


def cmd_causes(args, cfg):
    db = Instance.from_json(load_json(args.instance))
    q = parse_query(args.query)
    reports = causes_brute(db, q) if args.brute else causes(db, q)
    _emit({"query": str(q), "causes": [r.to_json() for r in reports]})


def cmd_diagnose(args, cfg):
    obj = load_json(args.problem)
    if isinstance(obj, dict) and "theory" in obj and "intervenable" in obj:
        s = CausalSetting.from_json(obj)
        _emit({"causes": [r.to_json() for r in actual_causes_logical(s, cap=cfg.cap_features)]})
        return
    p = DiagnosisProblem.from_json(obj)
    found = diagnoses(p, args.mode, cap=cfg.cap_features)
    _emit({"mode": args.mode, "diagnoses": [d.to_json() for d in found]})


def cmd_abduce(args, cfg):
    p = AbductionProblem.from_json(load_json(args.problem))
    found = abduce(p, cap=cfg.cap_features)
    _emit({"explanations": [sorted(h) for h in found], "trivial": found == [frozenset()]})


def cmd_compile(args, cfg):
    model = load_model(args.model)
    if not isinstance(model, DecisionTree):
        raise UnsupportedError("compile needs a decision tree")
    dt = model if model.is_binary else binarize_dt(model)
    c = compile_dt(dt)
    out = {"features": list(c.features), "gates": len(c.gates), "binarized": dt is not model}
    if args.verify:
        if len(model.schema) > cfg.cap_features:
            raise CapExceeded(f"{len(model.schema)} features exceed the cap for --verify",
                              reached=len(model.schema))
        dec = check_decomposable(c)
        det = check_deterministic(c, budget=cfg.cap_features)
        mismatches = 0
        for e in model.schema.entities():
            x = e if dt is model else one_hot(model, e)
            if evaluate(c, x) != model.classify(e):
                mismatches += 1
        out["verify"] = {"decomposable": dec.ok, "deterministic": det.ok, "mismatches": mismatches,
                         "checked": model.schema.population(),
                         "ok": dec.ok and det.ok and mismatches == 0}
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(circuit_to_json(c), fh, indent=1, sort_keys=True)
            fh.write("\n")
        out["out"] = args.out
    else:
        out["circuit"] = circuit_to_json(c)
    _emit(out)


def cmd_selftest(args, cfg):
    if not selftest.run():
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="xscore", description=__doc__.splitlines()[0])
    p.add_argument("--cap-features", type=int, default=None,
                   help="enumeration cap (default from XSCORE_CAP_FEATURES, else %d)" % DEFAULT_SHAP_CAP)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eval", help="label of an entity")
    s.add_argument("model")
    s.add_argument("entity", help="entity JSON file or inline JSON")
    s.set_defaults(fn=cmd_eval)

    s = sub.add_parser("count", help="model counting")
    s.add_argument("model")
    s.add_argument("--mode", choices=["exact", "brute", "by-distance"], default="exact")
    s.add_argument("--entity")
    s.add_argument("--list", action="store_true", help="list the models (brute mode)")
    s.set_defaults(fn=cmd_count)

    for name, fn, helptext in (("shap", cmd_shap, "Shap scores"), ("resp", cmd_resp, "Resp scores")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("model")
        s.add_argument("entity")
        s.add_argument("--dist", help="distribution JSON (default uniform)")
        s.add_argument("--format", dest="fmt", choices=["json", "csv"], default="json")
        s.add_argument("--approx", action="store_true", help="add decimal approximations")
        s.set_defaults(fn=fn)
        if name == "shap":
            s.add_argument("--method", choices=["exact", "brute"], default="exact")
        else:
            s.add_argument("--feature", action="append", help="feature to score (repeatable)")
            s.add_argument("--constraints", help="constraints JSON")
            s.add_argument("--label", type=int, choices=[0, 1], help="label to explain (default L(e))")
            s.add_argument("--include-original", action="store_true",
                           help="let the original value take part in the expectation")
            s.add_argument("--max-cardinality", type=int)
            s.add_argument("--max-evaluations", type=int, default=DEFAULT_MAX_EVALUATIONS)

    s = sub.add_parser("causes", help="tuple causes for a Boolean conjunctive query")
    s.add_argument("instance")
    s.add_argument("query", help="e.g. 'Q :- S(x), R(x,y), S(y).'")
    s.add_argument("--brute", action="store_true", help="use the subset-enumeration oracle")
    s.set_defaults(fn=cmd_causes)

    s = sub.add_parser("diagnose", help="minimal diagnoses (or causes for a causal setting)")
    s.add_argument("problem")
    s.add_argument("--mode", choices=[ALL_MINIMAL, MINIMUM_ONLY], default=ALL_MINIMAL)
    s.set_defaults(fn=cmd_diagnose)

    s = sub.add_parser("abduce", help="subset-minimal abductive explanations")
    s.add_argument("problem")
    s.set_defaults(fn=cmd_abduce)

    s = sub.add_parser("compile", help="compile a decision tree into a dDBC")
    s.add_argument("model")
    s.add_argument("--out")
    s.add_argument("--verify", action="store_true")
    s.set_defaults(fn=cmd_compile)

    s = sub.add_parser("selftest", help="run the known-value regression table")
    s.set_defaults(fn=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        cap = args.cap_features if args.cap_features is not None else _env_cap()
        cfg = RunConfig(args.command, cap, getattr(args, "max_cardinality", None),
                        getattr(args, "max_evaluations", DEFAULT_MAX_EVALUATIONS),
                        getattr(args, "fmt", "json"), getattr(args, "approx", False))
        args.fn(args, cfg)
    except XScoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except SystemExit as exc:
        return int(exc.code or 0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
