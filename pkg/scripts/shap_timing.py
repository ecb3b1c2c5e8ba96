"""Time exact (circuit) against brute-force (enumeration) Shap as trees grow."""

import argparse
import random
import time

from xscore.compile import compile_dt
from xscore.generate import random_bits, random_dt, random_product
from xscore.shapley import shap_brute, shap_exact


def clock(fn, *args):
    start = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - start


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 6, 8, 10, 12, 14])
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--product", action="store_true", help="use random product distributions")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    print("n,gates,exact_s,brute_s,agree")
    for n in args.sizes:
        te = tb = 0.0
        gates = 0
        agree = True
        for _ in range(args.reps):
            dt = random_dt(rng, n, leaf_prob=0.1)
            c = compile_dt(dt)
            gates += len(c.gates)
            e = random_bits(rng, c.features)
            d = random_product(rng, dt.schema) if args.product else None
            a, t1 = clock(shap_exact, c, e, d)
            b, t2 = clock(shap_brute, c, e, d)
            te, tb = te + t1, tb + t2
            agree &= a.scores == b.scores
        print(f"{n},{gates // args.reps},{te / args.reps:.4f},{tb / args.reps:.4f},{agree}")


if __name__ == "__main__":
    main()
