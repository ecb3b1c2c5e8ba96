"""Check #SAT == 2^n (L(e) - sum Shap) on random compiled trees and time it per size."""

import argparse
import random
import time

from xscore.compile import compile_dt
from xscore.generate import random_bits, random_dt
from xscore.shapley import verify_red_identity


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trees", type=int, default=20, help="trees per feature count")
    ap.add_argument("--max-features", type=int, default=12)
    ap.add_argument("--entities", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    print("n,trees,checks,failures,seconds")
    for n in range(1, args.max_features + 1):
        start = time.perf_counter()
        failures = checks = 0
        for _ in range(args.trees):
            c = compile_dt(random_dt(rng, n))
            for _ in range(args.entities):
                checks += 1
                failures += not verify_red_identity(c, random_bits(rng, c.features)).holds
        print(f"{n},{args.trees},{checks},{failures},{time.perf_counter() - start:.3f}")


if __name__ == "__main__":
    main()
