"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 invalid key or file format,
3 randomness suite failed (``nist`` only).
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time

import numpy as np

from . import cipher, imageio, keystream, randstats
from .chaotic_maps import MapKind
from .cipher import InvalidKey

EXIT_USAGE = 1
EXIT_FORMAT = 2
EXIT_NIST_FAIL = 3

REUSE_WARNING = (
    "warning: this cipher has no nonce. Never encrypt two messages with the same key; "
    "a one-bit plaintext change flips exactly one ciphertext bit, and XORing two "
    "ciphertexts under one key reveals the XOR of the plaintexts."
)

MAP_HELP = (
    "chaotic map: stm (skew tent) or mlm (modified logistic). The map kind is NOT "
    "stored in the ciphertext; decrypt with the same --map and --key."
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_input(path: str | None) -> bytes:
    if path is None or path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"--in: cannot read {path}: {exc.strerror}") from None


def _write_output(path: str | None, data: bytes) -> None:
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise UsageError(f"--out: cannot write {path}: {exc.strerror}") from None


def _key(args) -> cipher.Key:
    return cipher.key_parse(args.key, MapKind(args.map))


def _positive(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


# --- subcommands ------------------------------------------------------------


def cmd_keygen(args) -> int:
    print(cipher.key_encode(cipher.keygen(MapKind(args.map))))
    return 0


def cmd_crypt(args) -> int:
    key = _key(args)
    print(REUSE_WARNING, file=sys.stderr)
    _write_output(args.out, cipher.encrypt(key, _read_input(args.inp)))
    return 0


def cmd_keystream(args) -> int:
    key = _key(args)
    bits, _ = keystream.ks_bits(key.generator(), args.bits)
    _write_output(args.out, np.packbits(bits).tobytes())
    return 0


def cmd_nist(args) -> int:
    data = _read_input(args.inp)
    nbits = 8 * len(data) if args.bits is None else args.bits
    if nbits == 0 or nbits > 8 * len(data):
        raise UsageError(f"--bits: need 1..{8 * len(data)} bits, got {nbits}")
    seq = randstats.BitSequence.from_bytes(data, nbits)
    report = randstats.run_suite(seq)
    sys.stdout.write(randstats.format_report(report, args.format))
    return 0 if report.all_pass else EXIT_NIST_FAIL


def cmd_period(args) -> int:
    k = None if args.lfsr_order == "none" else int(args.lfsr_order)
    try:
        exp = keystream.check_proposition1(args.trials, args.precision, k, MapKind(args.map),
                                           seed=args.seed, workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "x0_raw", "lfsr_seed", "bare_state_period", "bare_tail", "bare_bit_period",
                    "pert_state_period", "pert_tail", "pert_bit_period", "bit_period_multiple_of_Pz"])
        for t in exp.trials:
            p = t.perturbed
            w.writerow([t.trial, t.x0.raw, t.lfsr_seed, t.bare.state_period, t.bare.tail_length,
                        t.bare.bit_period, p.state_period if p else "", p.tail_length if p else "",
                        p.bit_period if p else "", p.multiple_of_Pz if p else ""])
        sys.stdout.write(buf.getvalue())
        return 0
    print(f"map={exp.kind.value} precision={exp.n} lfsr_order={k if k else 'none'} trials={args.trials}")
    print(f"bare: median state period {exp.median('bare'):g}, median bit period "
          f"{exp.median('bare', 'bit_period'):g}")
    print(f"bare histogram (floor log2 period: count): {exp.histogram('bare')}")
    if k is not None:
        print(f"Pz={exp.Pz}")
        print(f"perturbed: median state period {exp.median('pert'):g}, median bit period "
              f"{exp.median('pert', 'bit_period'):g}")
        print(f"perturbed histogram (floor log2 period: count): {exp.histogram('pert')}")
        divisible = sum(r.multiple_of_Pz for r in exp.perturbed)
        print(f"bit periods divisible by {exp.Pz}: {divisible}/{len(exp.perturbed)}")
        for t in exp.exceptions:
            print(f"exception: trial={t.trial} x0_raw={t.x0.raw} lfsr_seed={t.lfsr_seed} "
                  f"bit_period={t.perturbed.bit_period}")
    return 0


def cmd_image_encrypt(args) -> int:
    key = _key(args)
    img = imageio.pgm_read(_read_input(args.inp))
    print(REUSE_WARNING, file=sys.stderr)
    _write_output(args.out, imageio.pgm_write(imageio.encrypt_image(key, img)))
    return 0


def cmd_image_corr(args) -> int:
    a = imageio.pgm_read(_read_input(args.a))
    b = imageio.pgm_read(_read_input(args.b))
    try:
        r = imageio.corr2(a, b)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"{r:.6f}")
    return 0


def cmd_image_hist(args) -> int:
    counts = imageio.histogram(imageio.pgm_read(_read_input(args.inp)))
    for value, count in enumerate(counts):
        print(value, int(count))
    return 0


def cmd_bitmap(args) -> int:
    key = _key(args)
    bits, _ = keystream.ks_bits(key.generator(lfsr=not args.no_lfsr), args.bits)
    _write_output(args.out, imageio.pgm_write(imageio.bitmap_render(bits, args.width)))
    return 0


def cmd_bench(args) -> int:
    key = cipher.keygen(MapKind(args.map))
    keystream.ks_bits(key.generator(), 64)  # compile outside the timed region
    t0 = time.perf_counter()
    cipher.keystream(key, args.bytes)
    dt = time.perf_counter() - t0
    rate = args.bytes / dt if dt > 0 else float("inf")
    print(f"map={args.map} bytes={args.bytes} seconds={dt:.4f} bytes_per_second={rate:.0f}")
    return 0


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="chaoslfsr", description="Chaotic-map + LFSR stream ciphers.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_map(sp):
        sp.add_argument("--map", required=True, choices=["stm", "mlm"], help=MAP_HELP)

    def with_key(sp):
        with_map(sp)
        sp.add_argument("--key", required=True, help="24 hex characters (see `keygen`)")

    sp = sub.add_parser("keygen", help="print a fresh random key")
    with_map(sp)
    sp.set_defaults(func=cmd_keygen)

    for name in ("encrypt", "decrypt"):
        sp = sub.add_parser(name, help=f"{name} a file (XOR with the keystream)")
        with_key(sp)
        sp.add_argument("--in", dest="inp", help="input file (default stdin)")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.set_defaults(func=cmd_crypt)

    sp = sub.add_parser("keystream", help="write raw keystream bytes, first bit in the MSB")
    with_key(sp)
    sp.add_argument("--bits", type=_positive, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_keystream)

    sp = sub.add_parser("nist", help="run the randomness battery on a file's bits")
    sp.add_argument("--in", dest="inp", help="input file (default stdin)")
    sp.add_argument("--bits", type=_positive, help="use only the first N bits")
    sp.add_argument("--format", choices=["text", "kv"], default="text")
    sp.set_defaults(func=cmd_nist)

    sp = sub.add_parser("period", help="bare vs LFSR-perturbed period experiment")
    with_map(sp)
    sp.add_argument("--precision", type=int, default=12)
    sp.add_argument("--lfsr-order", default="5", choices=["none", "3", "5", "7"])
    sp.add_argument("--trials", type=_positive, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--format", choices=["text", "csv"], default="text")
    sp.set_defaults(func=cmd_period)

    sp = sub.add_parser("image-encrypt", help="encrypt the pixels of a P5 PGM image")
    with_key(sp)
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_image_encrypt)

    sp = sub.add_parser("image-corr", help="pixel correlation of two PGM images")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.set_defaults(func=cmd_image_corr)

    sp = sub.add_parser("image-hist", help="print the 256 gray-level counts of a PGM image")
    sp.add_argument("--in", dest="inp", required=True)
    sp.set_defaults(func=cmd_image_hist)

    sp = sub.add_parser("bitmap", help="render keystream bits as a black/white PGM")
    with_key(sp)
    sp.add_argument("--no-lfsr", action="store_true", help="bare chaotic map, no perturbation")
    sp.add_argument("--bits", type=_positive, required=True)
    sp.add_argument("--width", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_bitmap)

    sp = sub.add_parser("bench", help="measure keystream throughput")
    with_map(sp)
    sp.add_argument("--bytes", type=_positive, default=1 << 20)
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "width", 1) < 1:
        print("chaoslfsr: error: --width must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except InvalidKey as exc:
        print(f"chaoslfsr: error: --key: invalid {exc.field}: {exc.message}", file=sys.stderr)
        return EXIT_FORMAT
    except imageio.PgmError as exc:
        print(f"chaoslfsr: error: invalid image: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except UsageError as exc:
        print(f"chaoslfsr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
