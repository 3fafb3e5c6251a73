"""Bracket the n-copy threshold for a few constructions and print a table.

    python scripts/threshold_table.py --copies 1 2 --restarts 32
"""
import argparse
import json

import numpy as np

from nptlab.constructions import ConstructionSpec, Method
from nptlab.distillability import SeesawOptions, certificate_verify, epsilon_threshold

SPECS = {
    "MethodII-uniform-d3": ConstructionSpec(method=Method.METHOD_II, d1=3, schmidt_coeffs=[1 / np.sqrt(3)] * 3),
    "MethodII-skewed-d3": ConstructionSpec(method=Method.METHOD_II, d1=3, schmidt_coeffs=[0.8, 0.48, 0.36]),
    "MethodI-d3": ConstructionSpec(method=Method.METHOD_I, d1=3, schmidt_coeffs=[0.6, 0.8], alpha=0.5),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--copies", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--restarts", type=int, default=32)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", help="also write the rows to this file")
    args = ap.parse_args()
    opts = SeesawOptions(restarts=args.restarts, seed=args.seed)
    rows = []
    print(f"{'spec':<22} {'n':>2} {'lo':>10} {'hi':>10} {'f(hi)':>12} verified")
    for name, spec in SPECS.items():
        for n in args.copies:
            rep = epsilon_threshold(spec, n, opts)
            if not rep.detected:
                print(f"{name:<22} {n:>2} {'-':>10} {'-':>10} {'-':>12} {rep.message}")
                rows.append({"spec": name, "n": n, "detected": False})
                continue
            ok, _ = certificate_verify(rep.certificate_at_hi, spec, rep.hi)
            print(f"{name:<22} {n:>2} {rep.lo:>10.5f} {rep.hi:>10.5f} {rep.certificate_at_hi.value:>12.3e} {ok}")
            rows.append({"spec": name, "n": n, "detected": True, "lo": rep.lo, "hi": rep.hi, "verified": ok})
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
