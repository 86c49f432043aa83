"""Render bare and perturbed keystream bits as black/white PGM bitmaps.

A short-period bare map shows up as vertical banding; the perturbed
generator looks like noise.
"""

import argparse
import random
from pathlib import Path

from chaoslfsr.chaotic_maps import FixedPointValue, StmParams
from chaoslfsr.cipher import keygen
from chaoslfsr.imageio import bitmap_render, pgm_write
from chaoslfsr.keystream import GeneratorState, ks_bits, measure_period
from chaoslfsr.lfsr import lfsr_new


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("bitmaps"))
    ap.add_argument("--width", type=int, default=256)
    ap.add_argument("--precision", type=int, default=12)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)
    n, nbits = args.precision, args.width * args.width

    # pick a bare small-precision STM whose cycle is short enough to see
    for _ in range(1000):
        params = StmParams(FixedPointValue(n, rng.randrange(1, 1 << n)))
        x0 = FixedPointValue(n, rng.randrange(1, 1 << n))
        rep = measure_period(params, x0)
        if rep.bit_period < args.width:
            break
    bare, _ = ks_bits(GeneratorState(params, x0, None), nbits)
    pert, _ = ks_bits(GeneratorState(params, x0, lfsr_new(5, seed=1)), nbits)
    full, _ = ks_bits(keygen("stm", rng.getrandbits).generator(), nbits)

    for name, bits in (("bare", bare), ("perturbed_k5", pert), ("key_n32_k31", full)):
        path = args.out / f"{name}.pgm"
        path.write_bytes(pgm_write(bitmap_render(bits, args.width)))
        print(f"wrote {path}")
    print(f"bare map: gamma={params.gamma.raw}/2^{n} x0={x0.raw} bit period={rep.bit_period}")


if __name__ == "__main__":
    main()
