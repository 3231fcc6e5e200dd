"""Monte Carlo path kernels: one compiled (numba) and one vectorized numpy.

Both walk a block of Brownian paths over the uniform grid ``t_k = k dt``,
evaluate ``M``, ``theta`` and ``a`` exactly from the heat-evolved test
function at every grid point, and accumulate per-path time integrals by
the trapezoidal rule on the fine grid and on the even-index subgrid.

Integral channels (``|theta|**2`` is written ``T``):

* plain: ``int M**e T dt`` for each exponent in ``e_plain``;
* cumulative: ``A_j = int M**e_A[j] T dt``;
* nested: ``int M**nest_e[i] T A_j**nest_n[i] dt`` with ``j = nest_j[i]``,
  where ``A_j`` is the running cumulative integral on the same grid;
* base: ``int T dt`` and ``int alpha dt`` with ``alpha = sum a_ij**2``,
  recorded at the checkpoints together with ``M``, ``theta`` and ``a``.

The last axis of every integral output is (fine, coarse).
"""

import numpy as np

from . import _accel
from ._accel import njit
from .philox import normal_scalar, normals

__all__ = ["KernelInputs", "KernelOutputs", "run_block"]


class KernelInputs:
    """Time-resolved bump parameters and the channel plan, as flat arrays."""

    def __init__(self, constant, amp, centers, prec, time_steps, e_plain, e_a, nest_e, nest_j, nest_n, checkpoints, key):
        self.constant = float(constant)
        self.amp = np.ascontiguousarray(amp, dtype=np.float64)  # (N+1, K)
        self.centers = np.ascontiguousarray(centers, dtype=np.float64)  # (K, d)
        self.prec = np.ascontiguousarray(prec, dtype=np.float64)  # (N+1, K, d)
        self.time_steps = int(time_steps)
        self.dt = 1.0 / self.time_steps
        self.e_plain = np.ascontiguousarray(e_plain, dtype=np.float64)
        self.e_a = np.ascontiguousarray(e_a, dtype=np.float64)
        self.nest_e = np.ascontiguousarray(nest_e, dtype=np.float64)
        self.nest_j = np.ascontiguousarray(nest_j, dtype=np.int64)
        self.nest_n = np.ascontiguousarray(nest_n, dtype=np.int64)
        self.checkpoints = np.ascontiguousarray(checkpoints, dtype=np.int64)
        self.k0 = np.uint64(key[0])
        self.k1 = np.uint64(key[1])

    @property
    def dimension(self):
        return self.centers.shape[1]


class KernelOutputs:
    """Per-path results for ``n`` paths."""

    def __init__(self, n, inp):
        d = inp.dimension
        nc = inp.checkpoints.size
        self.plain = np.zeros((n, inp.e_plain.size, 2))
        self.cumulative = np.zeros((n, inp.e_a.size, 2))
        self.nested = np.zeros((n, inp.nest_e.size, 2))
        self.snap_m = np.zeros((n, nc))
        self.snap_theta = np.zeros((n, nc, d))
        self.snap_a = np.zeros((n, nc, d, d))
        self.snap_cum = np.zeros((n, nc, 2, 2))  # (int T, int alpha) x (fine, coarse)
        self.snap_w = np.zeros((n, nc, d))

    def views(self, sl):
        out = KernelOutputs.__new__(KernelOutputs)
        for name in ("plain", "cumulative", "nested", "snap_m", "snap_theta", "snap_a", "snap_cum", "snap_w"):
            setattr(out, name, getattr(self, name)[sl])
        return out


@njit(cache=True, nogil=True)
def _block_numba(path_lo, n, k0, k1, c, amp, cen, prec, time_steps, e_plain, e_a, nest_e, nest_j, nest_n, ck,
                 plain, cumul, nested, snap_m, snap_theta, snap_a, snap_cum, snap_w):
    kb, d = cen.shape
    p1 = e_plain.size
    p2 = e_a.size
    p3 = nest_e.size
    nc = ck.size
    dt = 1.0 / time_steps
    sq = np.sqrt(dt)
    w = np.zeros(d)
    th = np.zeros(d)
    g = np.zeros(d)
    a = np.zeros((d, d))
    prev_p = np.zeros((p1, 2))
    prev_a = np.zeros((p2, 2))
    prev_n = np.zeros((p3, 2))
    prev_b = np.zeros((2, 2))
    cum_b = np.zeros((2, 2))
    for i in range(n):
        path = path_lo + i
        for l in range(d):
            w[l] = 0.0
        cum_b[:, :] = 0.0
        ci = 0
        for k in range(time_steps + 1):
            if k > 0:
                for l in range(d):
                    w[l] += sq * normal_scalar(path, k, l, k0, k1)
            m = c
            for l in range(d):
                th[l] = 0.0
                for r in range(d):
                    a[l, r] = 0.0
            for j in range(kb):
                quad = 0.0
                for l in range(d):
                    diff = w[l] - cen[j, l]
                    g[l] = prec[k, j, l] * diff
                    quad += g[l] * diff
                e = amp[k, j] * np.exp(-0.5 * quad)
                m += e
                for l in range(d):
                    th[l] -= e * g[l]
                    for r in range(d):
                        a[l, r] += e * g[l] * g[r]
                    a[l, l] -= e * prec[k, j, l]
            t2 = 0.0
            al = 0.0
            for l in range(d):
                t2 += th[l] * th[l]
                for r in range(d):
                    al += a[l, r] * a[l, r]
            lm = np.log(m)
            even = k % 2 == 0
            for j in range(p2):
                v = np.exp(e_a[j] * lm) * t2
                if k > 0:
                    cumul[i, j, 0] += 0.5 * dt * (prev_a[j, 0] + v)
                    if even:
                        cumul[i, j, 1] += dt * (prev_a[j, 1] + v)
                prev_a[j, 0] = v
                if even:
                    prev_a[j, 1] = v
            for j in range(p1):
                v = np.exp(e_plain[j] * lm) * t2
                if k > 0:
                    plain[i, j, 0] += 0.5 * dt * (prev_p[j, 0] + v)
                    if even:
                        plain[i, j, 1] += dt * (prev_p[j, 1] + v)
                prev_p[j, 0] = v
                if even:
                    prev_p[j, 1] = v
            for j in range(p3):
                base = np.exp(nest_e[j] * lm) * t2
                v = base * cumul[i, nest_j[j], 0] ** nest_n[j]
                if k > 0:
                    nested[i, j, 0] += 0.5 * dt * (prev_n[j, 0] + v)
                prev_n[j, 0] = v
                if even:
                    v = base * cumul[i, nest_j[j], 1] ** nest_n[j]
                    if k > 0:
                        nested[i, j, 1] += dt * (prev_n[j, 1] + v)
                    prev_n[j, 1] = v
            for b in range(2):
                v = t2 if b == 0 else al
                if k > 0:
                    cum_b[b, 0] += 0.5 * dt * (prev_b[b, 0] + v)
                    if even:
                        cum_b[b, 1] += dt * (prev_b[b, 1] + v)
                prev_b[b, 0] = v
                if even:
                    prev_b[b, 1] = v
            if ci < nc and k == ck[ci]:
                snap_m[i, ci] = m
                for l in range(d):
                    snap_w[i, ci, l] = w[l]
                    snap_theta[i, ci, l] = th[l]
                    for r in range(d):
                        snap_a[i, ci, l, r] = a[l, r]
                for b in range(2):
                    for s in range(2):
                        snap_cum[i, ci, b, s] = cum_b[b, s]
                ci += 1


def _block_numpy(path_lo, n, inp, out):
    d = inp.dimension
    n_steps = inp.time_steps
    dt = inp.dt
    sq = np.sqrt(dt)
    paths = np.arange(path_lo, path_lo + n, dtype=np.uint64)
    w = np.zeros((n, d))
    p1, p2, p3 = inp.e_plain.size, inp.e_a.size, inp.nest_e.size
    prev_p = np.zeros((n, p1, 2))
    prev_a = np.zeros((n, p2, 2))
    prev_n = np.zeros((n, p3, 2))
    prev_b = np.zeros((n, 2, 2))
    cum_b = np.zeros((n, 2, 2))
    eye = np.eye(d)
    ci = 0
    for k in range(n_steps + 1):
        if k > 0:
            for pair in range((d + 1) // 2):
                z0, z1 = normals(paths, k, pair, inp.k0, inp.k1)
                w[:, 2 * pair] += sq * z0
                if 2 * pair + 1 < d:
                    w[:, 2 * pair + 1] += sq * z1
        diff = w[:, None, :] - inp.centers[None]
        g = inp.prec[k][None] * diff
        e = inp.amp[k][None] * np.exp(-0.5 * np.sum(g * diff, axis=-1))
        m = inp.constant + e.sum(axis=1)
        th = -np.einsum("nk,nkl->nl", e, g)
        a = np.einsum("nk,nkl,nkr->nlr", e, g, g) - (e @ inp.prec[k])[:, :, None] * eye
        t2 = np.sum(th * th, axis=1)
        al = np.sum(a * a, axis=(1, 2))
        lm = np.log(m)
        even = k % 2 == 0
        step = [(0, 0.5 * dt)] + ([(1, dt)] if even else [])

        v = np.exp(lm[:, None] * inp.e_a[None]) * t2[:, None]
        for s, h in step:
            if k > 0:
                out.cumulative[:, :, s] += h * (prev_a[:, :, s] + v)
            prev_a[:, :, s] = v
        v = np.exp(lm[:, None] * inp.e_plain[None]) * t2[:, None]
        for s, h in step:
            if k > 0:
                out.plain[:, :, s] += h * (prev_p[:, :, s] + v)
            prev_p[:, :, s] = v
        base = np.exp(lm[:, None] * inp.nest_e[None]) * t2[:, None]
        for s, h in step:
            v = base * out.cumulative[:, inp.nest_j, s] ** inp.nest_n[None]
            if k > 0:
                out.nested[:, :, s] += h * (prev_n[:, :, s] + v)
            prev_n[:, :, s] = v
        v = np.stack([t2, al], axis=1)
        for s, h in step:
            if k > 0:
                cum_b[:, :, s] += h * (prev_b[:, :, s] + v)
            prev_b[:, :, s] = v
        if ci < inp.checkpoints.size and k == inp.checkpoints[ci]:
            out.snap_m[:, ci] = m
            out.snap_theta[:, ci] = th
            out.snap_a[:, ci] = a
            out.snap_cum[:, ci] = cum_b
            out.snap_w[:, ci] = w
            ci += 1


def run_block(path_lo, n, inp, out, backend=None):
    """Fill ``out`` (views of length n) for paths ``path_lo .. path_lo+n-1``."""
    backend = backend or _accel.backend()
    if backend == "numba":
        if not _accel.NUMBA_AVAILABLE:
            raise RuntimeError("numba backend requested but numba is not installed")
        _block_numba(
            path_lo, n, inp.k0, inp.k1, inp.constant, inp.amp, inp.centers, inp.prec, inp.time_steps,
            inp.e_plain, inp.e_a, inp.nest_e, inp.nest_j, inp.nest_n, inp.checkpoints,
            out.plain, out.cumulative, out.nested, out.snap_m, out.snap_theta, out.snap_a, out.snap_cum, out.snap_w,
        )
    elif backend == "numpy":
        _block_numpy(path_lo, n, inp, out)
    else:
        raise ValueError(f"unknown backend {backend!r}")
