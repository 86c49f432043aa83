"""A subset of the NIST SP 800-22 statistical tests.

Implemented: frequency (monobit), block frequency, runs, longest run of
ones, cumulative sums (forward and backward), serial, approximate entropy
and the discrete Fourier transform test. Formulas and constants follow
SP 800-22 Rev. 1a; each test passes when every p-value is >= 0.01.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .special import erfc, igamc, normal_cdf

ALPHA = 0.01


@dataclass(frozen=True, eq=False)
class BitSequence:
    """Bits packed MSB-first; padding bits past ``length`` are zero."""

    packed: bytes
    length: int

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ValueError("bit sequence must hold at least one bit")
        if len(self.packed) != (self.length + 7) // 8:
            raise ValueError("packed size does not match length")
        spare = 8 * len(self.packed) - self.length
        if spare and self.packed[-1] & ((1 << spare) - 1):
            raise ValueError("padding bits past length must be zero")

    @classmethod
    def from_bits(cls, bits) -> "BitSequence":
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.size and arr.max() > 1:
            raise ValueError("bits must be 0 or 1")
        return cls(np.packbits(arr).tobytes(), int(arr.size))

    @classmethod
    def from_string(cls, text: str) -> "BitSequence":
        text = "".join(text.split())
        if set(text) - {"0", "1"}:
            raise ValueError("bit string may contain only 0 and 1")
        return cls.from_bits(np.frombuffer(text.encode(), dtype=np.uint8) - ord("0"))

    @classmethod
    def from_bytes(cls, data: bytes, nbits: int | None = None) -> "BitSequence":
        if nbits is None:
            nbits = 8 * len(data)
        if not 0 < nbits <= 8 * len(data):
            raise ValueError(f"cannot take {nbits} bits from {len(data)} bytes")
        return cls.from_bits(np.unpackbits(np.frombuffer(data, dtype=np.uint8))[:nbits])

    @property
    def bits(self) -> np.ndarray:
        return np.unpackbits(np.frombuffer(self.packed, dtype=np.uint8), count=self.length)

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other) -> bool:
        return isinstance(other, BitSequence) and (self.packed, self.length) == (other.packed, other.length)

    def __hash__(self) -> int:
        return hash((self.packed, self.length))


@dataclass(frozen=True)
class TestResult:
    name: str
    p_value: float | tuple[float, ...]
    statistic: float | tuple[float, ...]

    __test__ = False  # not a pytest class

    @property
    def p_values(self) -> tuple[float, ...]:
        return self.p_value if isinstance(self.p_value, tuple) else (self.p_value,)

    @property
    def passed(self) -> bool:
        return min(self.p_values) >= ALPHA


@dataclass(frozen=True)
class TestReport:
    results: list[TestResult]
    sequence_length: int
    skipped: dict[str, str] = field(default_factory=dict)

    __test__ = False

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name: str) -> TestResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)


class SequenceTooShort(ValueError):
    pass


def _clip(p: float) -> float:
    return min(1.0, max(0.0, p))


# --- individual tests (no length policing; see run_test) --------------------


def monobit(bits: np.ndarray) -> TestResult:
    n = len(bits)
    s = 2 * int(bits.sum()) - n
    s_obs = abs(s) / math.sqrt(n)
    return TestResult("monobit", _clip(erfc(s_obs / math.sqrt(2))), s_obs)


def block_frequency(bits: np.ndarray, block_size: int = 128) -> TestResult:
    n_blocks = len(bits) // block_size
    if n_blocks < 1:
        raise SequenceTooShort(f"block_frequency needs at least one block of {block_size} bits")
    blocks = bits[: n_blocks * block_size].reshape(n_blocks, block_size)
    pi = blocks.sum(axis=1) / block_size
    chi2 = 4.0 * block_size * float(((pi - 0.5) ** 2).sum())
    return TestResult("block_frequency", _clip(igamc(n_blocks / 2, chi2 / 2)), chi2)


def runs(bits: np.ndarray) -> TestResult:
    n = len(bits)
    pi = bits.sum() / n
    if abs(pi - 0.5) >= 2 / math.sqrt(n):
        # frequency prerequisite failed; the runs statistic is not computed
        return TestResult("runs", 0.0, float("nan"))
    v_obs = 1 + int(np.count_nonzero(bits[1:] != bits[:-1]))
    num = abs(v_obs - 2 * n * pi * (1 - pi))
    den = 2 * math.sqrt(2 * n) * pi * (1 - pi)
    return TestResult("runs", _clip(erfc(num / den)), float(v_obs))


# (min length, block size M, class lower edge, class probabilities)
_LONGEST_RUN_TABLES = (
    (750_000, 10_000, 10, (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
    (6_272, 128, 4, (0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124)),
    (128, 8, 1, (0.2148, 0.3672, 0.2305, 0.1875)),
)


def _longest_runs(blocks: np.ndarray) -> np.ndarray:
    n_blocks, m = blocks.shape
    padded = np.zeros((n_blocks, m + 2), dtype=np.int8)
    padded[:, 1:-1] = blocks
    d = np.diff(padded, axis=1)
    out = np.zeros(n_blocks, dtype=np.int64)
    for i in range(n_blocks):
        starts = np.flatnonzero(d[i] == 1)
        if starts.size:
            ends = np.flatnonzero(d[i] == -1)
            out[i] = (ends - starts).max()
    return out


def longest_run(bits: np.ndarray) -> TestResult:
    n = len(bits)
    for min_len, m, lo, probs in _LONGEST_RUN_TABLES:
        if n >= min_len:
            break
    else:
        raise SequenceTooShort("longest_run needs at least 128 bits")
    n_blocks = n // m
    longest = _longest_runs(bits[: n_blocks * m].reshape(n_blocks, m))
    k = len(probs) - 1
    classes = np.clip(longest, lo, lo + k) - lo
    v = np.bincount(classes, minlength=k + 1)
    expected = n_blocks * np.asarray(probs)
    chi2 = float(((v - expected) ** 2 / expected).sum())
    return TestResult("longest_run", _clip(igamc(k / 2, chi2 / 2)), chi2)


def _c_div(a: int, b: int) -> int:
    """Integer division truncating toward zero, as in the reference C code."""
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _cusum_p(n: int, z: int) -> float:
    if z == 0:
        return 1.0
    rn = math.sqrt(n)
    s1 = 0.0
    for k in range(_c_div(_c_div(-n, z) + 1, 4), _c_div(_c_div(n, z) - 1, 4) + 1):
        s1 += normal_cdf((4 * k + 1) * z / rn) - normal_cdf((4 * k - 1) * z / rn)
    s2 = 0.0
    for k in range(_c_div(_c_div(-n, z) - 3, 4), _c_div(_c_div(n, z) - 1, 4) + 1):
        s2 += normal_cdf((4 * k + 3) * z / rn) - normal_cdf((4 * k + 1) * z / rn)
    return _clip(1.0 - s1 + s2)


def cusum(bits: np.ndarray, backward: bool = False) -> TestResult:
    x = 2 * bits.astype(np.int64) - 1
    if backward:
        x = x[::-1]
    z = int(np.abs(np.cumsum(x)).max())
    name = "cusum_backward" if backward else "cusum_forward"
    return TestResult(name, _cusum_p(len(bits), z), float(z))


def _psi2(bits: np.ndarray, m: int) -> float:
    if m <= 0:
        return 0.0
    n = len(bits)
    ext = np.concatenate([bits, bits[: m - 1]]).astype(np.int64)
    idx = np.zeros(n, dtype=np.int64)
    for j in range(m):
        idx = (idx << 1) | ext[j : j + n]
    counts = np.bincount(idx, minlength=1 << m).astype(np.float64)
    return float((1 << m) / n * (counts**2).sum() - n)


def serial(bits: np.ndarray, m: int = 2) -> TestResult:
    if m < 2:
        raise ValueError("serial test needs block length m >= 2")
    p0, p1, p2 = _psi2(bits, m), _psi2(bits, m - 1), _psi2(bits, m - 2)
    d1 = p0 - p1
    d2 = p0 - 2 * p1 + p2
    pv = (_clip(igamc(2 ** (m - 2), d1 / 2)), _clip(igamc(2 ** (m - 3), d2 / 2)))
    return TestResult("serial", pv, (d1, d2))


def _phi(bits: np.ndarray, m: int) -> float:
    n = len(bits)
    ext = np.concatenate([bits, bits[: m - 1]]).astype(np.int64)
    idx = np.zeros(n, dtype=np.int64)
    for j in range(m):
        idx = (idx << 1) | ext[j : j + n]
    c = np.bincount(idx, minlength=1 << m) / n
    c = c[c > 0]
    return float((c * np.log(c)).sum())


def approx_entropy(bits: np.ndarray, m: int = 2) -> TestResult:
    n = len(bits)
    apen = _phi(bits, m) - _phi(bits, m + 1)
    chi2 = 2.0 * n * (math.log(2) - apen)
    return TestResult("approx_entropy", _clip(igamc(2 ** (m - 1), chi2 / 2)), chi2)


def dft_moduli(bits: np.ndarray) -> np.ndarray:
    x = 2.0 * bits - 1.0
    return np.abs(np.fft.rfft(x))[: len(bits) // 2]


def dft(bits: np.ndarray) -> TestResult:
    n = len(bits)
    threshold = math.sqrt(math.log(1 / 0.05) * n)
    n0 = 0.95 * n / 2
    n1 = int(np.count_nonzero(dft_moduli(bits) < threshold))
    d = (n1 - n0) / math.sqrt(n * 0.95 * 0.05 / 4)
    return TestResult("dft", _clip(erfc(abs(d) / math.sqrt(2))), d)


# --- dispatch ---------------------------------------------------------------

KINDS = (
    "monobit",
    "block_frequency",
    "runs",
    "longest_run",
    "cusum_forward",
    "cusum_backward",
    "serial",
    "approx_entropy",
    "dft",
)

_MIN_LENGTH = {
    "monobit": 100,
    "block_frequency": 100,
    "runs": 2,
    "longest_run": 128,
    "cusum_forward": 1,
    "cusum_backward": 1,
    "dft": 1000,
}


def _check_length(kind: str, n: int, params: dict) -> None:
    if kind in ("serial", "approx_entropy"):
        m = params.get("m", 2)
        if not m < int(math.log2(n)) - 2:
            raise SequenceTooShort(f"{kind}: block length m={m} needs m < floor(log2 n) - 2 (n={n})")
        return
    need = max(_MIN_LENGTH[kind], params.get("block_size", 0))
    if n < need:
        raise SequenceTooShort(f"{kind} needs at least {need} bits, got {n}")


def _as_array(bits) -> np.ndarray:
    if isinstance(bits, BitSequence):
        return bits.bits
    return BitSequence.from_bits(bits).bits


def run_test(kind: str, bits, **params) -> TestResult:
    """Run one test with its minimum-length rules enforced.

    Parameters: ``block_size`` for block_frequency (default 128) and ``m``
    for serial and approx_entropy (default 2).
    """
    if kind not in KINDS:
        raise ValueError(f"unknown test {kind!r}; choose from {KINDS}")
    arr = _as_array(bits)
    _check_length(kind, len(arr), params)
    if kind == "monobit":
        return monobit(arr)
    if kind == "block_frequency":
        return block_frequency(arr, params.get("block_size", 128))
    if kind == "runs":
        return runs(arr)
    if kind == "longest_run":
        return longest_run(arr)
    if kind in ("cusum_forward", "cusum_backward"):
        return cusum(arr, backward=kind == "cusum_backward")
    if kind == "serial":
        return serial(arr, params.get("m", 2))
    if kind == "approx_entropy":
        return approx_entropy(arr, params.get("m", 2))
    return dft(arr)


def run_suite(bits, kinds: Sequence[str] = KINDS) -> TestReport:
    arr = _as_array(bits)
    seq = BitSequence.from_bits(arr)
    results, skipped = [], {}
    for kind in kinds:
        try:
            results.append(run_test(kind, seq))
        except SequenceTooShort as exc:
            skipped[kind] = str(exc)
    return TestReport(results, len(arr), skipped)


def _parts(r: TestResult) -> list[tuple[str, float]]:
    if isinstance(r.p_value, tuple):
        return [(f"{r.name}_{i + 1}", p) for i, p in enumerate(r.p_value)]
    return [(r.name, r.p_value)]


def format_report(report: TestReport, fmt: str = "text") -> str:
    """Text rows ``name p_value PASS|FAIL`` plus ``ALL PASS|FAIL``; ``fmt='kv'`` for key=value lines."""
    lines = []
    if fmt == "text":
        for r in report.results:
            for name, p in _parts(r):
                lines.append(f"{name} {p:.6f} {'PASS' if p >= ALPHA else 'FAIL'}")
        for name in report.skipped:
            lines.append(f"{name} - SKIP")
        lines.append(f"ALL {'PASS' if report.all_pass else 'FAIL'}")
    elif fmt == "kv":
        lines.append(f"sequence_length={report.sequence_length}")
        for r in report.results:
            for name, p in _parts(r):
                lines.append(f"{name}.p_value={p:.17g}")
                lines.append(f"{name}.pass={'true' if p >= ALPHA else 'false'}")
        for name, why in report.skipped.items():
            lines.append(f"{name}.skipped={why!r}")
        lines.append(f"all_pass={'true' if report.all_pass else 'false'}")
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return "\n".join(lines) + "\n"
