"""Philox4x32-10 counter-based generator and Box-Muller normals.

Every Gaussian increment is a pure function of (seed, path, step, axis),
so any partition of paths over blocks or workers reproduces the same
ensemble bit for bit.
"""

import numpy as np

from ._accel import njit

__all__ = ["philox4x32", "philox4x32_scalar", "normals", "normal_scalar", "split_seed"]

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
ROUNDS = 10
_TWO_PI = 2.0 * np.pi
_INV53 = 2.0**-53


def split_seed(seed):
    """Two 32-bit key words of a 64-bit seed."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned value")
    return seed & 0xFFFFFFFF, seed >> 32


def philox4x32(c0, c1, c2, c3, k0, k1, rounds=ROUNDS):
    """Vectorized Philox4x32: four uint32 counter words (arrays) and a key.

    Words are carried in uint64 so the 32x32 -> 64 bit products are exact.
    """
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) & _MASK for c in (c0, c1, c2, c3))
    c0, c1, c2, c3 = np.broadcast_arrays(c0, c1, c2, c3)
    k0 = np.uint64(k0)
    k1 = np.uint64(k1)
    for r in range(rounds):
        if r:
            k0 = (k0 + _W0) & _MASK
            k1 = (k1 + _W1) & _MASK
        p0 = _M0 * c0
        p1 = _M1 * c2
        c0, c1, c2, c3 = (
            ((p1 >> _S32) ^ c1 ^ k0) & _MASK,
            p1 & _MASK,
            ((p0 >> _S32) ^ c3 ^ k1) & _MASK,
            p0 & _MASK,
        )
    return c0, c1, c2, c3


@njit(cache=True, nogil=True)
def philox4x32_scalar(c0, c1, c2, c3, k0, k1):
    """Scalar Philox4x32-10 for the compiled kernels (uint64-carried words)."""
    mask = np.uint64(0xFFFFFFFF)
    for r in range(10):
        if r:
            k0 = (k0 + np.uint64(0x9E3779B9)) & mask
            k1 = (k1 + np.uint64(0xBB67AE85)) & mask
        p0 = np.uint64(0xD2511F53) * c0
        p1 = np.uint64(0xCD9E8D57) * c2
        n0 = ((p1 >> np.uint64(32)) ^ c1 ^ k0) & mask
        n1 = p1 & mask
        n2 = ((p0 >> np.uint64(32)) ^ c3 ^ k1) & mask
        n3 = p0 & mask
        c0, c1, c2, c3 = n0, n1, n2, n3
    return c0, c1, c2, c3


def _uniform53(hi, lo):
    """Uniform on (0, 1) from two 32-bit words (53 significant bits)."""
    return ((hi >> np.uint64(5)).astype(np.float64) * 67108864.0 + (lo >> np.uint64(6)).astype(np.float64) + 0.5) * _INV53


def normals(path, step, axis_pair, k0, k1):
    """Two standard normals per counter ``(path, step, axis_pair, 0)``."""
    x0, x1, x2, x3 = philox4x32(path, step, axis_pair, 0, k0, k1)
    u1 = _uniform53(x0, x1)
    u2 = _uniform53(x2, x3)
    r = np.sqrt(-2.0 * np.log(u1))
    return r * np.cos(_TWO_PI * u2), r * np.sin(_TWO_PI * u2)


@njit(cache=True, nogil=True)
def normal_scalar(path, step, axis, k0, k1):
    """Normal number ``axis`` of (path, step); matches :func:`normals`."""
    x0, x1, x2, x3 = philox4x32_scalar(
        np.uint64(path), np.uint64(step), np.uint64(axis // 2), np.uint64(0), k0, k1
    )
    u1 = ((x0 >> np.uint64(5)) * 67108864.0 + (x1 >> np.uint64(6)) + 0.5) * 1.1102230246251565e-16
    u2 = ((x2 >> np.uint64(5)) * 67108864.0 + (x3 >> np.uint64(6)) + 0.5) * 1.1102230246251565e-16
    r = np.sqrt(-2.0 * np.log(u1))
    if axis % 2 == 0:
        return r * np.cos(6.283185307179586 * u2)
    return r * np.sin(6.283185307179586 * u2)
