"""Key codec and XOR stream cipher.

Key text is 24 hex digits (96 bits, big-endian) with the top bit clear:

    bits 94..63  x0     raw 32-bit fixed point, nonzero
    bits 62..31  gamma  STM: raw 32-bit fixed point in (0, 1)
                        MLM: unsigned 4.28 fixed point in (4, 16), not a multiple of 4
    bits 30..0   seed   31-bit LFSR seed, nonzero

The map kind is not part of the key text; it travels alongside it.
"""

from __future__ import annotations

import secrets
import string
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .chaotic_maps import FixedPointValue, MapKind, MapParams, StmParams, mlm_params_from_raw
from .keystream import GeneratorState, ks_bytes
from .lfsr import lfsr_new

PRECISION = 32
LFSR_ORDER = 31
MLM_INT_BITS = 4
MLM_FRAC_BITS = 28
KEY_HEX_LEN = 24
KEY_BITS = 32 + 32 + LFSR_ORDER

_M32 = (1 << 32) - 1
_M31 = (1 << 31) - 1
_MLM_FOUR = 4 << MLM_FRAC_BITS
_MLM_QUARTER_SPAN = 1 << (MLM_FRAC_BITS + 2)


class InvalidKey(ValueError):
    """Invalid key text or key field; ``field`` names the offending part."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


def _gamma_problem(kind: MapKind, gamma_bits: int) -> str | None:
    if kind is MapKind.STM:
        return "gamma must lie in (0, 1)" if gamma_bits == 0 else None
    if gamma_bits <= _MLM_FOUR:
        return "gamma must lie in (4, 16)"
    if gamma_bits % _MLM_QUARTER_SPAN == 0:
        return "gamma multiple of 4"
    return None


@dataclass(frozen=True)
class Key:
    map_kind: MapKind
    x0_bits: int
    gamma_bits: int
    lfsr_seed: int

    def __post_init__(self) -> None:
        if not isinstance(self.map_kind, MapKind):
            raise InvalidKey("map", f"unknown map kind {self.map_kind!r}")
        if not 0 < self.x0_bits <= _M32:
            raise InvalidKey("x0", "x0 must be a nonzero 32-bit value")
        if not 0 <= self.gamma_bits <= _M32:
            raise InvalidKey("gamma", "gamma must be a 32-bit value")
        problem = _gamma_problem(self.map_kind, self.gamma_bits)
        if problem:
            raise InvalidKey("gamma", problem)
        if not 0 < self.lfsr_seed <= _M31:
            raise InvalidKey("seed", "LFSR seed must be a nonzero 31-bit value")

    @property
    def gamma(self) -> float:
        scale = PRECISION if self.map_kind is MapKind.STM else MLM_FRAC_BITS
        return self.gamma_bits / (1 << scale)

    def as_int(self) -> int:
        return (self.x0_bits << 63) | (self.gamma_bits << 31) | self.lfsr_seed

    def map_params(self) -> MapParams:
        if self.map_kind is MapKind.STM:
            return StmParams(FixedPointValue(PRECISION, self.gamma_bits))
        shift = PRECISION - MLM_FRAC_BITS
        return mlm_params_from_raw(self.gamma_bits << shift, PRECISION, MLM_INT_BITS)

    def generator(self, lfsr: bool = True) -> GeneratorState:
        """Fresh keystream generator; ``lfsr=False`` gives the bare map (diagnostics only)."""
        reg = lfsr_new(LFSR_ORDER, seed=self.lfsr_seed) if lfsr else None
        return GeneratorState(self.map_params(), FixedPointValue(PRECISION, self.x0_bits), reg)


def key_from_int(value: int, map_kind: MapKind) -> Key:
    if value >> KEY_BITS:
        raise InvalidKey("key", "top bit of the 96-bit key must be 0")
    return Key(map_kind, (value >> 63) & _M32, (value >> 31) & _M32, value & _M31)


def key_parse(text: str, map_kind: MapKind | str) -> Key:
    map_kind = MapKind(map_kind) if isinstance(map_kind, str) else map_kind
    text = text.strip()
    if len(text) != KEY_HEX_LEN:
        raise InvalidKey("key", f"expected {KEY_HEX_LEN} hex characters, got {len(text)}")
    if any(c not in string.hexdigits for c in text):
        raise InvalidKey("key", "key contains non-hex characters")
    return key_from_int(int(text, 16), map_kind)


def key_encode(k: Key) -> str:
    return f"{k.as_int():0{KEY_HEX_LEN}x}"


def keygen(map_kind: MapKind | str, randbits: Callable[[int], int] = secrets.randbits) -> Key:
    """Draw a valid key from ``randbits`` (the platform CSPRNG by default).

    Zero fields are re-drawn and the gamma field is rejection-sampled until
    valid, so the result is a deterministic function of the bit stream.
    """
    map_kind = MapKind(map_kind) if isinstance(map_kind, str) else map_kind

    def nonzero(bits: int) -> int:
        while True:
            v = randbits(bits)
            if v:
                return v

    x0 = nonzero(32)
    while True:
        gamma = randbits(32)
        if _gamma_problem(map_kind, gamma) is None:
            break
    seed = nonzero(31)
    return Key(map_kind, x0, gamma, seed)


def keystream(key: Key, count: int) -> bytes:
    data, _ = ks_bytes(key.generator(), count)
    return data


def encrypt(key: Key, data: bytes) -> bytes:
    """XOR ``data`` with the key's keystream. No header, no padding, no nonce."""
    if not isinstance(key, Key):
        raise TypeError("encrypt needs a Key; parse key text with key_parse first")
    if not data:
        return b""
    ks = np.frombuffer(keystream(key, len(data)), dtype=np.uint8)
    return (np.frombuffer(data, dtype=np.uint8) ^ ks).tobytes()


decrypt = encrypt
