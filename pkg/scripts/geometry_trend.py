"""Shell radii versus the separable-ball radius as d grows (blocks of Schmidt rank k)."""
import argparse

from nptlab.geometry import geometry_rows, trend_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--ds", type=int, nargs="+", default=[3, 6, 9, 12])
    ap.add_argument("--measure-up-to", type=int, default=9,
                    help="build the eps=0 endpoint explicitly for d up to this value")
    args = ap.parse_args()
    print(f"{'d':>3} {'m':>3} {'D':>5} {'r_m':>12} {'gurvits':>12} {'ratio':>8} {'ratio/D^1/4':>12}")
    for r in trend_table(args.k, args.ds):
        print(f"{r['d']:>3} {r['m']:>3} {r['D']:>5} {r['r_m']:>12.6e} {r['gurvits']:>12.6e} "
              f"{r['ratio']:>8.4f} {r['ratio_over_D_quarter']:>12.4f}")
    print()
    for d in args.ds:
        if d > args.measure_up_to:
            continue
        for r in geometry_rows(d, args.k):
            print(f"d={d} m={r['m']}: closed form {r['r_m']:.12f}, measured {r['measured']:.12f}")


if __name__ == "__main__":
    main()
