"""Binary PGM images, pixel correlation, and bit-matrix rendering."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cipher import Key, encrypt
from .randstats import BitSequence


class PgmError(ValueError):
    pass


@dataclass(frozen=True)
class GrayImage:
    width: int
    height: int
    pixels: bytes

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image dimensions must be positive, got {self.width}x{self.height}")
        if len(self.pixels) != self.width * self.height:
            raise ValueError(f"expected {self.width * self.height} pixels, got {len(self.pixels)}")

    @classmethod
    def from_array(cls, arr) -> "GrayImage":
        a = np.asarray(arr)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        if a.min(initial=0) < 0 or a.max(initial=0) > 255:
            raise ValueError("pixel values must lie in [0, 255]")
        h, w = a.shape
        return cls(w, h, a.astype(np.uint8).tobytes())

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.pixels, dtype=np.uint8).reshape(self.height, self.width)


def _tokens(data: bytes, count: int, pos: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping # comments."""
    out = []
    n = len(data)
    while len(out) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise PgmError("truncated PGM header")
        out.append(data[start:pos])
    return out, pos


def pgm_read(data: bytes) -> GrayImage:
    """Parse a binary (P5) PGM with maxval 255. Trailing bytes are ignored."""
    if data[:2] != b"P5":
        raise PgmError(f"unsupported PGM magic {data[:2]!r}; only binary P5 is accepted")
    (w, h, maxval), pos = _tokens(data, 3, 2)
    try:
        width, height, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise PgmError(f"malformed PGM header: {exc}") from None
    if width < 1 or height < 1:
        raise PgmError(f"zero or negative dimensions {width}x{height}")
    if maxval != 255:
        raise PgmError(f"maxval must be 255, got {maxval}")
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise PgmError("missing whitespace after maxval")
    pos += 1
    size = width * height
    payload = data[pos : pos + size]
    if len(payload) < size:
        raise PgmError(f"truncated payload: expected {size} bytes, got {len(payload)}")
    return GrayImage(width, height, bytes(payload))


def pgm_write(img: GrayImage) -> bytes:
    return f"P5\n{img.width} {img.height}\n255\n".encode() + img.pixels


def corr2(a: GrayImage, b: GrayImage) -> float:
    """Pearson correlation over all pixels.

    Sums are exact integers; only the final ratio is floating point.
    """
    if (a.width, a.height) != (b.width, b.height):
        raise ValueError(f"image sizes differ: {a.width}x{a.height} vs {b.width}x{b.height}")
    x = np.frombuffer(a.pixels, dtype=np.uint8).astype(np.int64)
    y = np.frombuffer(b.pixels, dtype=np.uint8).astype(np.int64)
    n = x.size
    sx, sy = int(x.sum()), int(y.sum())
    sxx = n * int((x * x).sum()) - sx * sx
    syy = n * int((y * y).sum()) - sy * sy
    sxy = n * int((x * y).sum()) - sx * sy
    if sxx == 0 or syy == 0:
        raise ValueError("correlation undefined: an image has zero pixel variance")
    return sxy / math.sqrt(sxx * syy)


def encrypt_image(key: Key, img: GrayImage) -> GrayImage:
    """XOR the pixel payload with the keystream; dimensions are untouched."""
    return GrayImage(img.width, img.height, encrypt(key, img.pixels))


def bitmap_render(bits, width: int) -> GrayImage:
    """One pixel per bit, 1 -> black (0), 0 -> white (255), row-major."""
    if width < 1:
        raise ValueError("width must be at least 1")
    b = bits.bits if isinstance(bits, BitSequence) else np.asarray(bits, dtype=np.uint8)
    height = max(1, math.ceil(b.size / width))
    px = np.full(width * height, 255, dtype=np.uint8)
    px[: b.size] = np.where(b == 1, 0, 255)
    return GrayImage(width, height, px.tobytes())


def histogram(img: GrayImage) -> np.ndarray:
    return np.bincount(np.frombuffer(img.pixels, dtype=np.uint8), minlength=256)
