"""Resp and Shap side by side on random categorical table classifiers."""

import argparse
import random

from xscore.generate import random_space, random_table
from xscore.resp import resp_report
from xscore.shapley import shap_brute


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tables", type=int, default=5)
    ap.add_argument("--features", type=int, default=4)
    ap.add_argument("--seed", type=int, default=2)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    print("table,feature,label,resp,shap")
    for t in range(args.tables):
        space = random_space(rng, args.features)
        c = random_table(rng, space)
        e = dict(zip(space.names, (rng.choice(dom) for _, dom in space.features)))
        label = c(e)
        resp = resp_report(c, e, label=label).scores
        shap = shap_brute(c, e).scores
        for f in space.names:
            print(f"{t},{f},{label},{resp[f]},{shap[f]}")


if __name__ == "__main__":
    main()
