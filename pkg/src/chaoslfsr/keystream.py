"""Perturbed chaotic keystream generator and period tooling.

One step of the generator, from map state ``x`` and register ``r``::

    z  = r & 1                 # LFSR output, taken before the shift
    x~ = x ^ z                 # perturb the LSB
    w  = x~ & 1                # emitted keystream bit (= LSB(x) ^ z)
    x' = f(x~)                 # map step on the perturbed state

With ``lfsr=None`` the generator is the bare digitalized map: it emits
``LSB(x)`` and iterates ``x' = f(x)``.
"""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .chaotic_maps import (
    FixedPointValue,
    MapKind,
    MapParams,
    PrecisionMismatch,
    StmParams,
    map_step,
    mlm_params_from_raw,
    raw_step_function,
)
from .lfsr import LfsrState, lfsr_new, lfsr_step, lfsr_step_raw


@dataclass(frozen=True)
class GeneratorState:
    map: MapParams
    x: FixedPointValue
    lfsr: LfsrState | None
    steps: int = 0

    def __post_init__(self) -> None:
        if self.x.n != self.map.n:
            raise PrecisionMismatch(f"state has {self.x.n} bits but map parameters have {self.map.n}")


def ks_next_bit(s: GeneratorState) -> tuple[int, GeneratorState]:
    x = s.x
    lfsr = s.lfsr
    if lfsr is not None:
        z, lfsr = lfsr_step(lfsr)
        x = FixedPointValue(x.n, x.raw ^ z)
    return x.lsb, GeneratorState(s.map, map_step(x, s.map), lfsr, s.steps + 1)


def _kernel_args(s: GeneratorState):
    m = s.map
    n = m.n
    if n > _kernels.MAX_FAST_BITS:
        return None
    if s.lfsr is not None and s.lfsr.config.k > _kernels.MAX_FAST_ORDER:
        return None
    if isinstance(m, StmParams):
        params = (_kernels.STM, m.gamma.raw, 0, 0, 0)
    else:
        if m.gamma_raw >> 64:
            return None
        params = (_kernels.MLM, m.gamma_raw, m.eta1.raw, m.eta2.raw, m.d.raw)
    kind, gamma, e1, e2, d = params
    if s.lfsr is None:
        reg, fbmask, k, use = 1, 0, 1, False
    else:
        c = s.lfsr.config
        reg, fbmask, k, use = s.lfsr.register, c.feedback_mask, c.k, True
    u = np.uint64
    return (kind, u(s.x.raw), u(reg), u(n), u(gamma), u(e1), u(e2), u(d), u(fbmask), u(k), use)


def _python_bits(s: GeneratorState, out: np.ndarray) -> tuple[int, int | None]:
    f = raw_step_function(s.map)
    x = s.x.raw
    if s.lfsr is None:
        for i in range(out.shape[0]):
            out[i] = x & 1
            x = f(x)
        return x, None
    c = s.lfsr.config
    reg, mask, k = s.lfsr.register, c.feedback_mask, c.k
    for i in range(out.shape[0]):
        z = reg & 1
        reg = lfsr_step_raw(reg, mask, k)
        x ^= z
        out[i] = x & 1
        x = f(x)
    return x, reg


def ks_bits(s: GeneratorState, count: int) -> tuple[np.ndarray, GeneratorState]:
    """Emit ``count`` keystream bits as a uint8 array of 0/1 values."""
    if count < 0:
        raise ValueError("count must be non-negative")
    out = np.empty(count, dtype=np.uint8)
    if count == 0:
        return out, s
    args = _kernel_args(s)
    if args is not None:
        x, reg = _kernels.generate_bits(*args, out)
        x, reg = int(x), int(reg)
    else:
        x, reg = _python_bits(s, out)
    lfsr = None if s.lfsr is None else LfsrState(s.lfsr.config, reg)
    return out, GeneratorState(s.map, FixedPointValue(s.x.n, x), lfsr, s.steps + count)


def ks_bytes(s: GeneratorState, count: int) -> tuple[bytes, GeneratorState]:
    """Pack ``8*count`` keystream bits, first-emitted bit in the MSB of each byte."""
    bits, s = ks_bits(s, 8 * count)
    return np.packbits(bits).tobytes(), s


# --- period measurement ----------------------------------------------------


@dataclass(frozen=True)
class PeriodReport:
    state_period: int
    tail_length: int
    bit_period: int
    lfsr_period_Pz: int | None
    multiple_of_Pz: bool
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return not self.truncated


def minimal_cyclic_period(bits: np.ndarray) -> int:
    """Smallest ``p`` dividing ``len(bits)`` such that the cyclic sequence is p-periodic."""
    L = len(bits)
    if L == 0:
        raise ValueError("empty sequence")
    for p in _divisors(L):
        if p == L or np.array_equal(bits[p:], bits[: L - p]):
            return p
    return L


def _divisors(L: int) -> list[int]:
    small, large = [], []
    for i in range(1, math.isqrt(L) + 1):
        if L % i == 0:
            small.append(i)
            if i != L // i:
                large.append(L // i)
    return small + large[::-1]


def _cycle(map_params: MapParams, x0: FixedPointValue, lfsr: LfsrState | None, max_steps: int):
    s = GeneratorState(map_params, x0, lfsr)
    args = _kernel_args(s)
    if args is not None:
        lam, mu, _ = _kernels.brent(*args, max_steps)
        return int(lam), int(mu)
    return _python_brent(s, max_steps)


def _python_brent(s: GeneratorState, max_steps: int) -> tuple[int, int]:
    f = raw_step_function(s.map)
    if s.lfsr is None:
        def step(st):
            return (f(st[0]), 0)
        start = (s.x.raw, 0)
    else:
        c = s.lfsr.config
        mask, k = c.feedback_mask, c.k

        def step(st):
            x, reg = st
            return (f(x ^ (reg & 1)), lfsr_step_raw(reg, mask, k))
        start = (s.x.raw, s.lfsr.register)

    power = lam = 1
    tortoise, hare = start, step(start)
    steps = 1
    while tortoise != hare:
        if steps >= max_steps:
            return 0, 0
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = step(hare)
        steps += 1
        lam += 1
    tortoise = hare = start
    for _ in range(lam):
        hare = step(hare)
    mu = 0
    while tortoise != hare:
        tortoise, hare = step(tortoise), step(hare)
        mu += 1
    return lam, mu


def default_budget(n: int, lfsr: LfsrState | None) -> int:
    states = (1 << n) * (1 if lfsr is None else lfsr.config.period)
    return 4 * states + 16


@dataclass(frozen=True)
class CycleTrace:
    """Bits over exactly one cycle, starting at the first state on the cycle."""

    w: np.ndarray  # emitted bits
    y: np.ndarray  # LSB of the map state before perturbation
    z: np.ndarray  # LFSR output (zeros for the bare map)


def trace_cycle(map_params: MapParams, x0: FixedPointValue, lfsr: LfsrState | None,
                tail: int, period: int) -> CycleTrace:
    s = GeneratorState(map_params, x0, lfsr)
    _, s = ks_bits(s, tail)
    y = np.empty(period, dtype=np.uint8)
    z = np.zeros(period, dtype=np.uint8)
    f = raw_step_function(map_params)
    x = s.x.raw
    reg = None if s.lfsr is None else s.lfsr.register
    if reg is not None:
        c = s.lfsr.config
    for i in range(period):
        y[i] = x & 1
        if reg is not None:
            z[i] = reg & 1
            reg = lfsr_step_raw(reg, c.feedback_mask, c.k)
        x = f(x ^ int(z[i]))
    w, _ = ks_bits(s, period)
    return CycleTrace(w=w, y=y, z=z)


def measure_period(map_params: MapParams, x0: FixedPointValue, lfsr: LfsrState | None = None,
                   max_steps: int | None = None) -> PeriodReport:
    """Exact cycle structure of the generator started at ``x0``.

    Brent's algorithm runs on the composite (map state, register) state; the
    keystream bit period is then the smallest divisor of the state period
    under which one cycle of emitted bits repeats. A run that exhausts
    ``max_steps`` returns a report with ``truncated=True`` and zero periods.
    """
    if max_steps is None:
        max_steps = default_budget(map_params.n, lfsr)
    pz = None if lfsr is None else lfsr.config.period
    lam, mu = _cycle(map_params, x0, lfsr, max_steps)
    if lam == 0:
        return PeriodReport(0, 0, 0, pz, False, truncated=True)
    s = GeneratorState(map_params, x0, lfsr)
    _, s = ks_bits(s, mu)
    bits, _ = ks_bits(s, lam)
    bp = minimal_cyclic_period(bits)
    return PeriodReport(lam, mu, bp, pz, pz is not None and bp % pz == 0)


def _as_bits(pattern) -> np.ndarray:
    if isinstance(pattern, str):
        if not pattern or set(pattern) - {"0", "1"}:
            raise ValueError(f"pattern must be a non-empty string of 0/1, got {pattern!r}")
        return np.frombuffer(pattern.encode(), dtype=np.uint8) - ord("0")
    arr = np.asarray(pattern, dtype=np.uint8)
    if arr.size == 0:
        raise ValueError("empty pattern")
    return arr


def xor_period_oracle(y, z) -> int:
    """Minimal period of ``w = y ^ z`` for periodic ``y`` and ``z``.

    Each argument is one period of its sequence (a 0/1 string or array).
    The XOR is expanded over ``lcm(len(y), len(z))`` positions and searched
    directly. Note ``y == z`` gives the constant zero sequence, period 1:
    the prime-period lower bound needs ``y`` independent of ``z``.
    """
    y, z = _as_bits(y), _as_bits(z)
    L = math.lcm(len(y), len(z))
    w = np.tile(y, L // len(y)) ^ np.tile(z, L // len(z))
    for p in range(1, L + 1):
        if L % p == 0 and np.array_equal(np.roll(w, -p), w):
            return p
    return L


# --- period experiment -----------------------------------------------------


@dataclass(frozen=True)
class TrialResult:
    trial: int
    params: MapParams
    x0: FixedPointValue
    lfsr_seed: int
    bare: PeriodReport
    perturbed: PeriodReport | None


@dataclass
class PeriodExperiment:
    kind: MapKind
    n: int
    k: int | None
    trials: list[TrialResult] = field(default_factory=list)

    @property
    def Pz(self) -> int | None:
        return None if self.k is None else (1 << self.k) - 1

    @property
    def perturbed(self) -> list[PeriodReport]:
        return [t.perturbed for t in self.trials if t.perturbed is not None]

    @property
    def exceptions(self) -> list[TrialResult]:
        """Trials whose perturbed bit period is not a multiple of the LFSR period."""
        return [t for t in self.trials if t.perturbed is not None and not t.perturbed.multiple_of_Pz]

    @property
    def fraction_divisible(self) -> float:
        p = self.perturbed
        return sum(r.multiple_of_Pz for r in p) / len(p) if p else float("nan")

    def median(self, regime: str = "bare", what: str = "state_period") -> float:
        reps = [t.bare for t in self.trials] if regime == "bare" else self.perturbed
        return statistics.median(getattr(r, what) for r in reps)

    def histogram(self, regime: str = "bare", what: str = "state_period") -> dict[int, int]:
        """Counts of periods per power-of-two bucket, keyed by floor(log2(period))."""
        reps = [t.bare for t in self.trials] if regime == "bare" else self.perturbed
        out: dict[int, int] = {}
        for r in reps:
            b = getattr(r, what).bit_length() - 1
            out[b] = out.get(b, 0) + 1
        return dict(sorted(out.items()))


def random_map_params(kind: MapKind, n: int, rng: np.random.Generator, int_bits: int = 4) -> MapParams:
    one = 1 << n
    if kind is MapKind.STM:
        return StmParams(FixedPointValue(n, int(rng.integers(1, one))))
    lo, hi = 4 * one + 1, (one << int_bits)
    while True:
        g = int(rng.integers(lo, hi))
        try:
            return mlm_params_from_raw(g, n, int_bits)
        except ValueError:
            continue


def run_trial(trial: int, kind: MapKind, n: int, k: int | None, seed: int) -> TrialResult:
    rng = np.random.default_rng([seed, trial])
    params = random_map_params(kind, n, rng)
    x0 = FixedPointValue(n, int(rng.integers(1, 1 << n)))
    bare = measure_period(params, x0, None)
    if k is None:
        return TrialResult(trial, params, x0, 0, bare, None)
    lseed = int(rng.integers(1, 1 << k))
    pert = measure_period(params, x0, lfsr_new(k, seed=lseed))
    return TrialResult(trial, params, x0, lseed, bare, pert)


def check_proposition1(trials: int, n: int, k: int | None, kind: MapKind,
                       seed: int = 0, workers: int = 1) -> PeriodExperiment:
    """Measure bare and LFSR-perturbed periods over random keys.

    Trial ``i`` draws its key from ``default_rng([seed, i])`` so results do
    not depend on ``workers``.
    """
    if n > 16:
        raise ValueError("period experiments are exhaustive; use n <= 16")
    if k is not None and k not in (3, 5, 7):
        raise ValueError("period experiments support LFSR orders 3, 5, 7")
    exp = PeriodExperiment(kind, n, k)
    jobs = range(trials)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            exp.trials = list(pool.map(lambda i: run_trial(i, kind, n, k, seed), jobs))
    else:
        exp.trials = [run_trial(i, kind, n, k, seed) for i in jobs]
    return exp


__all__ = [
    "CycleTrace",
    "GeneratorState",
    "PeriodExperiment",
    "PeriodReport",
    "TrialResult",
    "check_proposition1",
    "ks_bits",
    "ks_bytes",
    "ks_next_bit",
    "measure_period",
    "minimal_cyclic_period",
    "trace_cycle",
    "xor_period_oracle",
]
