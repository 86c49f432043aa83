"""Fibonacci LFSRs of Mersenne-exponent order.

Tap mask convention: bit ``i`` of ``taps`` is the coefficient of ``x**(i+1)``
in the feedback polynomial ``x**k + ... + 1``. The ``x**k`` and constant
terms are implicit, so only bits ``0 .. k-2`` may be set.

Register bit ``j`` holds the sequence element ``s[t+j]``. A step emits bit 0,
then shifts right and inserts ``s[t+k] = s[t] ^ XOR(s[t+i] for x**i in taps)``
at bit ``k-1``. The output sequence therefore has the feedback polynomial as
its characteristic polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass

MERSENNE_ORDERS = (3, 5, 7, 13, 17, 19, 31, 61, 89)


def _mask_of(*exponents: int) -> int:
    m = 0
    for e in exponents:
        m |= 1 << (e - 1)
    return m


# One primitive polynomial per order, as the middle exponents of x^k + ... + 1.
DEFAULT_TAPS = {
    3: _mask_of(1),  # x^3 + x + 1
    5: _mask_of(2),  # x^5 + x^2 + 1
    7: _mask_of(1),  # x^7 + x + 1
    13: _mask_of(4, 3, 1),  # x^13 + x^4 + x^3 + x + 1
    17: _mask_of(3),  # x^17 + x^3 + 1
    19: _mask_of(5, 2, 1),  # x^19 + x^5 + x^2 + x + 1
    31: _mask_of(3),  # x^31 + x^3 + 1
    61: _mask_of(5, 2, 1),  # x^61 + x^5 + x^2 + x + 1
    89: _mask_of(38),  # x^89 + x^38 + 1
}

EXHAUSTIVE_MAX_ORDER = 19


# --- GF(2)[x] arithmetic on Python ints (bit i = coefficient of x^i) -------


def poly_from_taps(taps: int, k: int) -> int:
    return (1 << k) | (taps << 1) | 1


def gf2_mod(a: int, m: int) -> int:
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def gf2_mulmod(a: int, b: int, m: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a.bit_length() == m.bit_length():
            a ^= m
    return r


def gf2_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, gf2_mod(a, b)
    return a


def _prime_factors(k: int) -> list[int]:
    out, p = [], 2
    while p * p <= k:
        if k % p == 0:
            out.append(p)
            while k % p == 0:
                k //= p
        p += 1
    if k > 1:
        out.append(k)
    return out


def _x_pow_2j(j: int, m: int) -> int:
    """x**(2**j) mod m by repeated squaring."""
    r = gf2_mod(0b10, m)
    for _ in range(j):
        r = gf2_mulmod(r, r, m)
    return r


def is_irreducible(taps: int, k: int) -> bool:
    """Rabin's irreducibility test for ``x**k + taps + 1`` over GF(2)."""
    if k < 1 or taps < 0 or taps >> max(k - 1, 0):
        return False
    m = poly_from_taps(taps, k)
    if _x_pow_2j(k, m) != gf2_mod(0b10, m):
        return False
    for q in _prime_factors(k):
        h = _x_pow_2j(k // q, m) ^ 0b10
        if gf2_gcd(m, h) != 1:
            return False
    return True


# --- register --------------------------------------------------------------


@dataclass(frozen=True)
class LfsrConfig:
    k: int
    taps: int

    def __post_init__(self) -> None:
        if self.k not in MERSENNE_ORDERS:
            raise ValueError(f"LFSR order must be a Mersenne exponent in {MERSENNE_ORDERS}, got {self.k}")
        if self.taps <= 0 or self.taps >> (self.k - 1):
            raise ValueError(
                f"tap mask {self.taps:#x} must be nonzero and use only bits 0..{self.k - 2}"
            )

    @property
    def period(self) -> int:
        """Period of a primitive register of this order (2**k - 1, a prime)."""
        return (1 << self.k) - 1

    @property
    def feedback_mask(self) -> int:
        return (self.taps << 1) | 1

    @property
    def polynomial(self) -> str:
        terms = [f"x^{self.k}"]
        terms += [f"x^{i + 1}" if i else "x" for i in reversed(range(self.k - 1)) if self.taps >> i & 1]
        return " + ".join(terms + ["1"])


@dataclass(frozen=True)
class LfsrState:
    config: LfsrConfig
    register: int

    def __post_init__(self) -> None:
        if not 0 < self.register < (1 << self.config.k):
            raise ValueError(f"register must be a nonzero {self.config.k}-bit value, got {self.register}")


def default_config(k: int) -> LfsrConfig:
    if k not in DEFAULT_TAPS:
        raise ValueError(f"no default polynomial for order {k}; allowed {MERSENNE_ORDERS}")
    return LfsrConfig(k, DEFAULT_TAPS[k])


def lfsr_new(k: int, taps: int | None = None, seed: int = 1) -> LfsrState:
    """Create a register; ``taps=None`` picks the built-in primitive polynomial."""
    if k not in MERSENNE_ORDERS:
        raise ValueError(f"LFSR order must be a Mersenne exponent in {MERSENNE_ORDERS}, got {k}")
    if seed == 0:
        raise ValueError("LFSR seed must be nonzero (the all-zero register is a fixed point)")
    config = default_config(k) if taps is None else LfsrConfig(k, taps)
    if taps is not None and not is_irreducible(taps, k):
        raise ValueError(f"feedback polynomial {config.polynomial} is reducible")
    return LfsrState(config, seed)


def _parity(v: int) -> int:
    return bin(v).count("1") & 1


def lfsr_step_raw(register: int, feedback_mask: int, k: int) -> int:
    fb = _parity(register & feedback_mask)
    return (register >> 1) | (fb << (k - 1))


def lfsr_step(s: LfsrState) -> tuple[int, LfsrState]:
    c = s.config
    return s.register & 1, LfsrState(c, lfsr_step_raw(s.register, c.feedback_mask, c.k))


def lfsr_bits(s: LfsrState, count: int) -> tuple[list[int], LfsrState]:
    reg, c = s.register, s.config
    mask, k = c.feedback_mask, c.k
    out = []
    for _ in range(count):
        out.append(reg & 1)
        reg = lfsr_step_raw(reg, mask, k)
    return out, LfsrState(c, reg)


def lfsr_period(c: LfsrConfig) -> int:
    """Exhaustive period from register 1; only for ``k <= 19``."""
    if c.k > EXHAUSTIVE_MAX_ORDER:
        raise ValueError(f"exhaustive walk limited to k <= {EXHAUSTIVE_MAX_ORDER}; use is_irreducible")
    mask, k = c.feedback_mask, c.k
    reg = lfsr_step_raw(1, mask, k)
    p = 1
    while reg != 1:
        reg = lfsr_step_raw(reg, mask, k)
        p += 1
    return p
