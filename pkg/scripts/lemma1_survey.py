"""Distribution of the worst two-rows-deleted singular value over random LambdaMatrix draws."""
import argparse

import numpy as np

from nptlab.nullspace import lemma1_trials


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", nargs="+", default=["3,2", "4,2", "3,3", "5,2"], help="k,n pairs")
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--exhaustive-limit", type=int, default=5000)
    args = ap.parse_args()
    print(f"{'k':>2} {'n':>2} {'shape':>9} {'pairs':>8} {'min s':>10} {'median s':>10} {'min rel':>10} pass")
    for case in args.cases:
        k, n = (int(x) for x in case.split(","))
        rep = lemma1_trials(k, n, args.trials, seed=args.seed, exhaustive_limit=args.exhaustive_limit)
        med = float(np.median(rep.per_trial_min))
        print(f"{k:>2} {n:>2} {f'{rep.rows}x{rep.cols}':>9} {rep.pairs_tested:>8} {rep.min_singular_value:>10.2e} "
              f"{med:>10.2e} {rep.min_relative_singular_value:>10.2e} {rep.pass_}")


if __name__ == "__main__":
    main()
