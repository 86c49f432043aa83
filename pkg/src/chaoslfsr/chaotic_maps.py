"""Fixed-point skew tent map and modified logistic map.

States live in [0, 1) as unsigned ``n``-bit integers scaled by ``2**-n``.
Every division truncates and every result that would reach 1.0 saturates to
``2**n - 1``, so the maps are bit-exact on any platform.

The ``*_raw`` functions work on plain integers and are what the keystream
generator calls in its inner loop; the typed wrappers validate precision.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

MIN_BITS = 8
MAX_BITS = 64


class PrecisionMismatch(ValueError):
    pass


def _check_bits(n: int) -> None:
    if not isinstance(n, int) or not MIN_BITS <= n <= MAX_BITS:
        raise ValueError(f"precision must be an integer in [{MIN_BITS}, {MAX_BITS}], got {n!r}")


@dataclass(frozen=True)
class FixedPointValue:
    """A real in [0, 1) stored as ``raw / 2**n``."""

    n: int
    raw: int

    def __post_init__(self) -> None:
        _check_bits(self.n)
        if not 0 <= self.raw < (1 << self.n):
            raise ValueError(f"raw value {self.raw} out of range for {self.n} bits")

    @property
    def value(self) -> float:
        return self.raw / (1 << self.n)

    @property
    def exact(self) -> Fraction:
        return Fraction(self.raw, 1 << self.n)

    @property
    def lsb(self) -> int:
        return self.raw & 1

    def __repr__(self) -> str:
        return f"FixedPointValue(n={self.n}, raw={self.raw:#x} ~ {self.value:.10g})"


def fp_from_real(value, n: int = 32) -> FixedPointValue:
    """Round ``value`` in [0, 1) to the nearest ``n``-bit fixed-point number.

    Values that round up to 1.0 are clamped to ``2**n - 1``.
    """
    _check_bits(n)
    if not 0 <= value < 1:
        raise ValueError(f"value must lie in [0, 1), got {value!r}")
    raw = round(Fraction(value) * (1 << n))
    return FixedPointValue(n, min(raw, (1 << n) - 1))


class MapKind(enum.Enum):
    STM = "stm"
    MLM = "mlm"


@dataclass(frozen=True)
class StmParams:
    gamma: FixedPointValue

    def __post_init__(self) -> None:
        if self.gamma.raw == 0:
            raise ValueError("skew tent map gamma must lie in the open interval (0, 1)")

    kind = MapKind.STM

    @property
    def n(self) -> int:
        return self.gamma.n


@dataclass(frozen=True)
class MlmParams:
    """Modified logistic map constants at ``n`` fractional bits.

    ``gamma_raw`` carries ``int_bits`` integer bits on top of the ``n``
    fractional ones. Build instances with :func:`mlm_derive_constants` or
    :func:`mlm_params_from_raw` rather than by hand.
    """

    gamma_raw: int
    int_bits: int
    eta1: FixedPointValue
    eta2: FixedPointValue
    d: FixedPointValue
    floor_quarter: int

    kind = MapKind.MLM

    @property
    def n(self) -> int:
        return self.d.n

    @property
    def gamma(self) -> Fraction:
        return Fraction(self.gamma_raw, 1 << self.n)


MapParams = Union[StmParams, MlmParams]


def stm_params(gamma, n: int = 32) -> StmParams:
    return StmParams(fp_from_real(gamma, n))


def _round_div(num: int, den: int) -> int:
    # round half to even, integers only
    q, r = divmod(num, den)
    if 2 * r > den or (2 * r == den and q & 1):
        q += 1
    return q


def mlm_params_from_raw(gamma_raw: int, n: int = 32, int_bits: int = 4) -> MlmParams:
    """Derive the modified logistic map constants from an exact fixed-point gamma.

    The interval bounds are the two roots of ``gamma*x*(1-x) = floor(gamma/4)``,
    i.e. ``1/2 -+ sqrt(1/4 - floor(gamma/4)/gamma)``, both rounded to ``n``
    fractional bits. The lower root is taken symmetric to the upper one.
    """
    _check_bits(n)
    one = 1 << n
    if int_bits < 3 or int_bits + n > 128:
        raise ValueError(f"int_bits must be at least 3 (gamma > 4), got {int_bits}")
    if not 4 * one < gamma_raw < (one << int_bits):
        raise ValueError(f"gamma must lie in (4, {1 << int_bits}), got {gamma_raw / one}")
    quarter_span = one << 2
    rem = gamma_raw % quarter_span
    if rem == 0:
        raise ValueError("gamma must not be a multiple of 4 (mod-1 denominator would be 0)")
    floor_quarter = gamma_raw // quarter_span
    d_raw = _round_div(rem, 4)
    if d_raw == 0:
        raise ValueError("gamma too close to a multiple of 4: mod-1 denominator rounds to 0")
    d_raw = min(d_raw, one - 1)

    # sqrt(1/4 - q/gamma) = sqrt((gamma - 4q) / (4 gamma)), evaluated with
    # guard bits so the final rounding to n bits is exact in practice.
    guard = 16
    shift = n + guard
    num = (gamma_raw - 4 * floor_quarter * one) << (2 * shift)
    root = math.isqrt(num // (4 * gamma_raw))
    half = 1 << (shift - 1)
    eta1 = _round_div((half - root), 1 << guard)
    eta2 = _round_div((half + root), 1 << guard)
    eta2 = min(eta2, one - 1)
    if not 0 < eta1 < eta2 < one:
        raise ValueError("degenerate interval bounds for this gamma")
    return MlmParams(
        gamma_raw=gamma_raw,
        int_bits=int_bits,
        eta1=FixedPointValue(n, eta1),
        eta2=FixedPointValue(n, eta2),
        d=FixedPointValue(n, d_raw),
        floor_quarter=floor_quarter,
    )


def mlm_derive_constants(gamma, n: int = 32, int_bits: int = 4) -> MlmParams:
    """Round a real ``gamma`` to ``n`` fractional bits and derive the MLM constants."""
    _check_bits(n)
    g = Fraction(gamma)
    if g <= 4:
        raise ValueError(f"gamma must exceed 4, got {gamma!r}")
    if g >= (1 << int_bits):
        raise ValueError(f"gamma must be below 2**{int_bits}, got {gamma!r}")
    if g.denominator == 1 and g.numerator % 4 == 0:
        raise ValueError("gamma must not be a multiple of 4 (mod-1 denominator would be 0)")
    return mlm_params_from_raw(round(g * (1 << n)), n, int_bits)


def stm_step_raw(x: int, gamma: int, n: int) -> int:
    one = 1 << n
    if x <= gamma:
        y = (x << n) // gamma
    else:
        y = ((one - x) << n) // (one - gamma)
    return y if y < one else one - 1


def mlm_step_raw(x: int, gamma: int, eta1: int, eta2: int, d: int, n: int) -> int:
    one = 1 << n
    mask = one - 1
    # gamma * x * (1 - x) carries 3n fractional bits; keep the top n of them.
    v = ((gamma * x * (one - x)) >> (2 * n)) & mask
    if eta1 <= x <= eta2:
        y = (v << n) // d
        return y if y < one else mask
    return v


def _same_precision(x: FixedPointValue, n: int) -> None:
    if x.n != n:
        raise PrecisionMismatch(f"state has {x.n} bits but map parameters have {n}")


def stm_step(x: FixedPointValue, p: StmParams) -> FixedPointValue:
    _same_precision(x, p.n)
    return FixedPointValue(x.n, stm_step_raw(x.raw, p.gamma.raw, x.n))


def mlm_step(x: FixedPointValue, p: MlmParams) -> FixedPointValue:
    _same_precision(x, p.n)
    return FixedPointValue(
        x.n, mlm_step_raw(x.raw, p.gamma_raw, p.eta1.raw, p.eta2.raw, p.d.raw, x.n)
    )


def map_step(x: FixedPointValue, m: MapParams) -> FixedPointValue:
    if isinstance(m, StmParams):
        return stm_step(x, m)
    if isinstance(m, MlmParams):
        return mlm_step(x, m)
    raise TypeError(f"unknown map parameters {m!r}")


def raw_step_function(m: MapParams):
    """Return ``f(x_raw) -> x_raw`` with the parameters bound, for tight loops."""
    n = m.n
    if isinstance(m, StmParams):
        g = m.gamma.raw
        return lambda x: stm_step_raw(x, g, n)
    g, e1, e2, d = m.gamma_raw, m.eta1.raw, m.eta2.raw, m.d.raw
    return lambda x: mlm_step_raw(x, g, e1, e2, d, n)
