"""Randomness battery on perturbed keystreams vs the bare maps."""

import argparse
import random

import numpy as np

from chaoslfsr.chaotic_maps import FixedPointValue, MapKind
from chaoslfsr.cipher import keygen
from chaoslfsr.keystream import GeneratorState, ks_bits, random_map_params
from chaoslfsr.randstats import run_suite


def summarize(label, reports):
    passed = sum(r.all_pass for r in reports)
    worst = {}
    for rep in reports:
        for r in rep.results:
            worst[r.name] = min(worst.get(r.name, 1.0), min(r.p_values))
    cols = " ".join(f"{k}={v:.3g}" for k, v in worst.items())
    print(f"{label:22} {passed:2d}/{len(reports)} pass   min p: {cols}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--keys", type=int, default=10)
    ap.add_argument("--bits", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    nrng = np.random.default_rng(args.seed)

    for kind in MapKind:
        reps = [run_suite(ks_bits(keygen(kind, rng.getrandbits).generator(), args.bits)[0])
                for _ in range(args.keys)]
        summarize(f"{kind.value} + LFSR, n=32", reps)
        for n in (16, 32):
            reps = []
            for _ in range(args.keys):
                s = GeneratorState(random_map_params(kind, n, nrng),
                                   FixedPointValue(n, int(nrng.integers(1, 1 << n))), None)
                reps.append(run_suite(ks_bits(s, args.bits)[0]))
            summarize(f"{kind.value} bare, n={n}", reps)


if __name__ == "__main__":
    main()
