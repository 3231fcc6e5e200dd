"""Fixed and refining quadrature rules used by the special-function and
deficit modules.

Three regimes show up repeatedly:

* smooth semi-infinite integrals with an algebraic endpoint singularity at
  zero and (at least algebraic) decay at infinity -- handled by the
  exp-sinh double-exponential rule with level refinement;
* integrals over ``[0, z]`` carrying the weight ``(z - v)**a * v**b``, i.e.
  the plus-part kink of the deficit functions -- handled by Gauss-Jacobi
  end panels plus geometrically graded Gauss-Legendre panels;
* plain smooth integrals on a bounded interval -- Gauss-Legendre.
"""

from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from scipy.special import roots_legendre

from .errors import DomainError, NumericalError

__all__ = [
    "QuadratureSpec",
    "DEFAULT_QUAD",
    "exp_sinh",
    "exp_sinh_power",
    "gauss_legendre",
    "gauss_jacobi",
    "kink_rule",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Node counts, truncation and tolerances for the three regimes.

    Attributes
    ----------
    rel_tol : target relative accuracy of refining rules.
    es_t_left, es_t_right : truncation of the exp-sinh parameter interval.
        ``exp(pi/2 sinh(6))`` is about ``1e137``, enough for the slowest
        algebraic tails met here.
    es_max_level : finest exp-sinh level (step ``2**-level``).
    kink_left, kink_panel, kink_right : Gauss-Jacobi / Gauss-Legendre node
        counts of the kinked ``[0, z]`` rule.
    kink_delta : the first panel is ``[0, kink_delta / rate]`` so that the
        integrand's rate-scaled argument stays below ``kink_delta`` there.
    phi_nodes : Gauss-Legendre nodes of the lambda-integral defining phi.
    """

    rel_tol: float = 1e-13
    es_t_left: float = 6.0
    es_t_right: float = 6.0
    es_max_level: int = 8
    kink_left: int = 60
    kink_panel: int = 30
    kink_right: int = 40
    kink_delta: float = 0.05
    phi_nodes: int = 128

    def __post_init__(self):
        if not 0 < self.rel_tol < 1e-6:
            raise DomainError("rel_tol must lie in (0, 1e-6)")


DEFAULT_QUAD = QuadratureSpec()


@lru_cache(maxsize=64)
def gauss_legendre(n):
    """Nodes and weights of the n-point Gauss-Legendre rule on [0, 1]."""
    x, w = roots_legendre(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=256)
def gauss_jacobi(n, b):
    """n-point rule for ``int_0^1 u**b g(u) du`` (b > -1).

    Computed in 34-digit arithmetic: double-precision Golub-Welsch loses
    about 1e-12 relative accuracy in the node nearest 0 once b approaches
    -1, which is where that node carries the largest weight.
    """
    if b <= -1:
        raise DomainError(f"Gauss-Jacobi exponent must exceed -1, got {b}")
    with mpmath.workdps(34):
        xs, ws = mpmath.gauss_quadrature(n, "jacobi", 0, mpmath.mpf(b))
        scale = mpmath.mpf(2) ** (-mpmath.mpf(b) - 1)
        u = np.array([float((x + 1) / 2) for x in xs])
        w = np.array([float(wi * scale) for wi in ws])
    order = np.argsort(u)
    u = u[order]
    w = w[order]
    u.setflags(write=False)
    w.setflags(write=False)
    return u, w


@lru_cache(maxsize=32)
def _es_level_nodes(level, t_left, t_right):
    """exp-sinh abscissae and weights first introduced at ``level``."""
    h = 2.0**-level
    if level == 0:
        k = np.arange(-int(np.floor(t_left)), int(np.floor(t_right)) + 1)
    else:
        kmin = int(np.ceil(-t_left / h))
        kmax = int(np.floor(t_right / h))
        k = np.arange(kmin, kmax + 1)
        k = k[k % 2 != 0]
    t = k * h
    e = 0.5 * np.pi * np.sinh(t)
    x = np.exp(e)
    w = 0.5 * np.pi * np.cosh(t) * x
    for arr in (t, x, w):
        arr.setflags(write=False)
    return t, x, w


def exp_sinh(f, spec=DEFAULT_QUAD, rel_tol=None, abs_tol=0.0, min_level=3):
    """Integrate ``f`` over ``(0, inf)`` with the exp-sinh rule.

    ``f`` receives a 1-d array of abscissae of length n and returns an array
    whose leading axis has length n; trailing axes are independent batch
    members. Refinement halves the step until every batch member changes by
    less than ``rel_tol`` (relative) or ``abs_tol``.

    Returns the integral with the batch shape.
    """
    tol = spec.rel_tol if rel_tol is None else rel_tol
    acc = None
    prev = None
    used = 0
    edge = None
    for level in range(spec.es_max_level + 1):
        t, x, w = _es_level_nodes(level, spec.es_t_left, spec.es_t_right)
        vals = np.asarray(f(x), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NumericalError("exp-sinh integrand is not finite", nodes=used + x.size)
        terms = vals * w.reshape((-1,) + (1,) * (vals.ndim - 1))
        part = terms.sum(axis=0)
        acc = part if acc is None else acc + part
        used += x.size
        if level == 0:
            # endpoint terms of the coarsest grid bound the truncation error
            edge = np.maximum(np.abs(terms[0]), np.abs(terms[-1]))
        cur = acc * 2.0**-level
        if prev is not None and level >= min_level:
            err = np.abs(cur - prev)
            if np.all(err <= np.maximum(tol * np.abs(cur), abs_tol)):
                if np.any(edge > np.maximum(tol * np.abs(cur), abs_tol)):
                    raise NumericalError("exp-sinh truncation tail not negligible", nodes=used)
                return cur
        prev = cur
    raise NumericalError("exp-sinh did not converge", nodes=used)


def exp_sinh_power(g, beta, spec=DEFAULT_QUAD, rel_tol=None, abs_tol=0.0):
    """``int_0^inf v**beta g(v) dv`` for ``beta > -1`` and g smooth at 0.

    Exponents close to -1 leave a left tail that the truncated exp-sinh
    rule cannot reach, so ``v = u**m`` with ``m = 1/(beta+1)`` is applied
    first, which turns the weight into the constant ``m``. Abscissae are
    clipped at 1e300; g must return 0 (not nan) where it vanishes.
    """
    if beta <= -1:
        raise DomainError(f"power {beta} is not integrable at 0")
    m = 1.0 / (beta + 1.0)

    def f(u):
        with np.errstate(over="ignore"):
            v = np.minimum(u**m, 1e300)
        return m * np.asarray(g(v), dtype=float)

    return exp_sinh(f, spec, rel_tol, abs_tol)


def kink_rule(z, a, b, rate, spec=DEFAULT_QUAD, n_geo=None):
    """Nodes and weights for ``int_0^z (z - v)**a v**b g(v) dv``.

    The interval is cut at ``z/2``. The left half starts with a Gauss-Jacobi
    panel absorbing ``v**b`` on ``[0, L]`` with ``L = min(z/2, delta/rate)``
    followed by ``n_geo`` geometrically graded Gauss-Legendre panels up to
    ``z/2``; the right half is one Gauss-Jacobi panel absorbing
    ``(z - v)**a``. Designed for ``g`` whose natural length scale is
    ``1/rate`` and that is smooth (not necessarily analytic) at 0.

    Parameters
    ----------
    z : array_like, shape (m,)
        Upper limits (>= 0). All members share one panel structure so that
        the rule, and hence its error, varies smoothly with ``z``.
    n_geo : int, optional
        Number of graded panels; by default enough for ``max(z)``.

    Returns
    -------
    v, wt : ndarray, shape (m, n)
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z < 0):
        raise DomainError("upper limit must be nonnegative")
    if a <= -1 or b <= -1:
        raise DomainError("kink exponents must exceed -1")
    v0 = spec.kink_delta / rate
    half = 0.5 * z
    left = np.minimum(half, v0)
    if n_geo is None:
        zmax = half.max() if z.size else 0.0
        n_geo = int(np.ceil(np.log2(zmax / v0))) if zmax > v0 else 0
    ul, wl = gauss_jacobi(spec.kink_left, b)
    ur, wr = gauss_jacobi(spec.kink_right, a)
    ug, wg = gauss_legendre(spec.kink_panel)

    cols_v = []
    cols_w = []
    # left Jacobi panel: weight v**b, smooth factor (z - v)**a
    v = left[:, None] * ul[None, :]
    wt = left[:, None] ** (b + 1.0) * wl[None, :] * (z[:, None] - v) ** a
    cols_v.append(v)
    cols_w.append(wt)
    if n_geo > 0:
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(left > 0, (half / np.where(left > 0, left, 1.0)) ** (1.0 / n_geo), 1.0)
        lo = left.copy()
        for _ in range(n_geo):
            hi = lo * ratio
            width = hi - lo
            v = lo[:, None] + width[:, None] * ug[None, :]
            with np.errstate(divide="ignore", invalid="ignore"):
                vb = np.where(v > 0, v, 1.0) ** b
            wt = width[:, None] * wg[None, :] * (z[:, None] - v) ** a * vb
            cols_v.append(v)
            cols_w.append(wt)
            lo = hi
    # right Jacobi panel: u = z - v in [0, z/2], weight u**a, smooth factor v**b
    u = half[:, None] * ur[None, :]
    v = z[:, None] - u
    with np.errstate(divide="ignore", invalid="ignore"):
        vb = np.where(v > 0, v, 1.0) ** b
    wt = half[:, None] ** (a + 1.0) * wr[None, :] * vb
    cols_v.append(v)
    cols_w.append(wt)
    v = np.concatenate(cols_v, axis=1)
    wt = np.concatenate(cols_w, axis=1)
    wt[z == 0, :] = 0.0
    return v, wt
