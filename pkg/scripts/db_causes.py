"""Tuple causes of a conjunctive query, and the diagnoses of its denial encoding."""

import argparse

from xscore.dbcausality import Instance, causes, cbd_encoding, diagnosis_tuples, fact_str, parse_query
from xscore.diagnosis import diagnoses
from xscore.loaders import fixture_path, load_json


def show(name, path, query):
    db = Instance.from_json(load_json(path))
    q = parse_query(query)
    print(f"== {name}: {query}")
    for r in causes(db, q):
        gammas = " | ".join("{" + ", ".join(map(fact_str, sorted(g))) + "}" for g in r.min_contingencies)
        print(f"  {fact_str(r.fact):8s} {r.verdict:14s} resp={r.responsibility!s:4s} {gammas}")
    ds = diagnoses(cbd_encoding(db, q))
    for d in ds:
        print("  diagnosis:", ", ".join(map(fact_str, sorted(diagnosis_tuples(db, d.abnormal)))))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("instance", nargs="?", help="instance JSON (default: the two bundled instances)")
    ap.add_argument("--query", default="Q :- S(x), R(x,y), S(y).")
    args = ap.parse_args()
    if args.instance:
        show(args.instance, args.instance, args.query)
    else:
        show("D", fixture_path("db_D.json"), args.query)
        show("D'", fixture_path("db_D_prime.json"), args.query)


if __name__ == "__main__":
    main()
