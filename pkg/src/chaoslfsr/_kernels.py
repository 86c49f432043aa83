"""Compiled inner loops for the perturbed generators.

Everything is uint64. Mixing signed and unsigned integers in numba promotes
to float64, so every constant below is wrapped in ``u64``.

Limits: precision n <= 32, LFSR order k <= 63, gamma_raw < 2**64. Callers
fall back to the pure-Python path outside these limits.
"""

import numpy as np
from numba import njit

u64 = np.uint64

STM = 0
MLM = 1
MAX_FAST_BITS = 32
MAX_FAST_ORDER = 63

_M32 = u64(0xFFFFFFFF)


@njit(cache=True, inline="always")
def _mulhi_shift(a, b, s):
    """((a * b) >> s) for 64x64-bit operands, 0 < s <= 64, via 32-bit limbs."""
    a0 = a & _M32
    a1 = a >> u64(32)
    b0 = b & _M32
    b1 = b >> u64(32)
    p00 = a0 * b0
    p01 = a0 * b1
    p10 = a1 * b0
    p11 = a1 * b1
    mid = (p00 >> u64(32)) + (p01 & _M32) + (p10 & _M32)
    lo = (p00 & _M32) | (mid << u64(32))
    hi = p11 + (p01 >> u64(32)) + (p10 >> u64(32)) + (mid >> u64(32))
    if s == u64(64):
        return hi
    return (lo >> s) | (hi << (u64(64) - s))


@njit(cache=True, inline="always")
def _map(kind, x, n, gamma, eta1, eta2, d):
    one = u64(1) << n
    top = one - u64(1)
    if kind == STM:
        if x <= gamma:
            y = (x << n) // gamma
        else:
            y = ((one - x) << n) // (one - gamma)
        if y > top:
            y = top
        return y
    v = _mulhi_shift(gamma, x * (one - x), u64(2) * n) & top
    if eta1 <= x and x <= eta2:
        y = (v << n) // d
        if y > top:
            y = top
        return y
    return v


@njit(cache=True, inline="always")
def _parity(v):
    v ^= v >> u64(32)
    v ^= v >> u64(16)
    v ^= v >> u64(8)
    v ^= v >> u64(4)
    v ^= v >> u64(2)
    v ^= v >> u64(1)
    return v & u64(1)


@njit(cache=True, inline="always")
def _advance(kind, x, reg, n, gamma, eta1, eta2, d, fbmask, k, use_lfsr):
    """One generator step: returns (emitted bit, next x, next register)."""
    if use_lfsr:
        z = reg & u64(1)
        fb = _parity(reg & fbmask)
        reg = (reg >> u64(1)) | (fb << (k - u64(1)))
        x = x ^ z
    w = x & u64(1)
    return w, _map(kind, x, n, gamma, eta1, eta2, d), reg


@njit(cache=True, nogil=True)
def generate_bits(kind, x, reg, n, gamma, eta1, eta2, d, fbmask, k, use_lfsr, out):
    for i in range(out.shape[0]):
        w, x, reg = _advance(kind, x, reg, n, gamma, eta1, eta2, d, fbmask, k, use_lfsr)
        out[i] = w
    return x, reg


@njit(cache=True, nogil=True)
def brent(kind, x0, reg0, n, gamma, eta1, eta2, d, fbmask, k, use_lfsr, max_steps):
    """Brent cycle detection on the composite (x, register) state.

    Returns (cycle length, tail length, steps used); lengths are 0 when the
    step budget ran out first.
    """
    steps = 0
    power = 1
    lam = 1
    tx, tr = x0, reg0
    _, hx, hr = _advance(kind, x0, reg0, n, gamma, eta1, eta2, d, fbmask, k, use_lfsr)
    steps += 1
    while tx != hx or tr != hr:
        if steps >= max_steps:
            return 0, 0, steps
        if power == lam:
            tx, tr = hx, hr
            power *= 2
            lam = 0
        _, hx, hr = _advance(kind, hx, hr, n, gamma, eta1, eta2, d, fbmask, k, use_lfsr)
        steps += 1
        lam += 1

    tx, tr = x0, reg0
    hx, hr = x0, reg0
    for _ in range(lam):
        _, hx, hr = _advance(kind, hx, hr, n, gamma, eta1, eta2, d, fbmask, k, use_lfsr)
    steps += lam
    mu = 0
    while tx != hx or tr != hr:
        _, tx, tr = _advance(kind, tx, tr, n, gamma, eta1, eta2, d, fbmask, k, use_lfsr)
        _, hx, hr = _advance(kind, hx, hr, n, gamma, eta1, eta2, d, fbmask, k, use_lfsr)
        steps += 2
        mu += 1
    return lam, mu, steps


@njit(cache=True, nogil=True)
def lfsr_first_return(reg0, fbmask, k, max_steps):
    """Steps until the register first returns to ``reg0`` (0 if not within budget)."""
    reg = reg0
    for i in range(1, max_steps + 1):
        fb = _parity(reg & fbmask)
        reg = (reg >> u64(1)) | (fb << (k - u64(1)))
        if reg == reg0:
            return i
    return 0
