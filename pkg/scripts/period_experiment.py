"""Bare vs LFSR-perturbed cycle lengths at small precision.

    python3 scripts/period_experiment.py --precision 12 --order 5 --trials 50
"""

import argparse

from chaoslfsr.chaotic_maps import MapKind
from chaoslfsr.keystream import check_proposition1


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--precision", type=int, default=12)
    ap.add_argument("--order", type=int, default=5)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()

    print(f"{'map':4} {'bare med':>9} {'pert med':>9} {'ratio':>6} {'min pert':>9} {'% div Pz':>8}")
    for kind in MapKind:
        exp = check_proposition1(args.trials, args.precision, args.order, kind,
                                 seed=args.seed, workers=args.workers)
        bare, pert = exp.median("bare"), exp.median("pert")
        shortest = min(r.state_period for r in exp.perturbed)
        print(f"{kind.value:4} {bare:9g} {pert:9g} {pert / bare:6.1f} {shortest:9d} "
              f"{100 * exp.fraction_divisible:8.1f}")
        print(f"     bare log2 histogram {exp.histogram('bare')}")
        print(f"     pert log2 histogram {exp.histogram('pert')}")


if __name__ == "__main__":
    main()
