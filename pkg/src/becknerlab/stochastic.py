"""Monte Carlo verification of the pathwise identities behind the improved
Beckner, Hoelder and Poincare inequalities.

For a test function f and a standard Brownian motion W on [0, 1],

    M_t = (P_{1-t} f)(W_t),  theta_t = grad(P_{1-t} f)(W_t),
    a_t = Hess(P_{1-t} f)(W_t),

with ``P_s`` the heat semigroup, are evaluated exactly at the grid times
``t_k = k/N`` (no SDE scheme), so the only discretization error sits in
the trapezoidal time integrals. Each path also carries the same integrals
on the even-index subgrid (step 2/N); the difference between the two
estimates is the discretization allowance of every report.

Randomness comes from Philox4x32-10 keyed by the seed with counter
(path, step, axis pair, 0), and all reductions run over the full path
array in a fixed order, so ensembles and reports are bit-identical for a
given seed, whatever the block size or worker count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _accel
from .deficit import BecknerParams, HoelderParams, big_f_closed_form, u_table, v_table
from .errors import ConfigurationError, DomainError
from .functionals import NodalData, TestFunction
from .kernels import KernelInputs, KernelOutputs, run_block
from .philox import normals, split_seed
from .reports import CheckReport, mc_report

__all__ = [
    "McConfig",
    "ChannelPlan",
    "McEstimate",
    "PathEnsemble",
    "simulate",
    "default_plan",
    "verify_ito_identity",
    "verify_beckner_identity",
    "verify_hoelder_identity",
    "verify_h_recursion",
    "verify_h_chain",
    "verify_martingales",
    "verify_second_order_battery",
    "mc_suite",
]

CHECKPOINTS = (0.0, 0.25, 0.5, 0.75, 1.0)
ACCEPTANCE_PATHS = 1000
EXACT_TOL = 1e-10

ITO_EXPONENTS = (2.0, 1.2, 1.0)  # 1.2 = 2p - 2 at p = 1.6; 1 is the entropy
BECKNER_P = (4.0 / 3.0, 1.5, 1.7)
HOELDER_PQ = ((1.0, 2.0), (1.0, 1.5))
H_CASES = ((4.0 / 3.0, 1), (1.2, 1), (1.2, 2))
CLOSED_FORM_P = (4.0 / 3.0, 1.2)


@dataclass(frozen=True)
class McConfig:
    """Path count, grid, seed and execution options of one ensemble.

    ``time_steps`` must be a multiple of 8 so that the quarter-time
    checkpoints lie on both the fine grid and the even-index subgrid.
    ``block_size``, ``workers`` and ``backend`` change only how the work
    is scheduled, never the result.
    """

    path_count: int = 100_000
    time_steps: int = 1024
    seed: int = 0
    dimension: int = 1
    block_size: int = 4096
    workers: int = 1
    backend: str = None

    def __post_init__(self):
        if self.path_count < 2:
            raise ConfigurationError("path_count must be at least 2")
        if self.time_steps < 8 or self.time_steps % 8:
            raise ConfigurationError("time_steps must be a positive multiple of 8")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned value")
        if self.dimension < 1:
            raise ConfigurationError("dimension must be >= 1")
        if self.block_size < 1 or self.workers < 1:
            raise ConfigurationError("block_size and workers must be positive")
        if self.backend not in (None, "numba", "numpy"):
            raise ConfigurationError(f"unknown backend {self.backend!r}")

    @property
    def acceptance_grade(self):
        return self.path_count >= ACCEPTANCE_PATHS

    def times(self):
        return np.arange(self.time_steps + 1) / self.time_steps


@dataclass(frozen=True)
class ChannelPlan:
    """Which time integrals the kernel accumulates.

    beckner_p : p values with a cumulative channel ``A = int M**(2p-4) T``
        and nested channels ``int M**(2n-2-(2n-1)p) T A**n``, n = 1..nest_max.
    plain : exponents e of plain channels ``int M**e T``.
    """

    beckner_p: tuple = BECKNER_P + (1.2,)
    nest_max: int = 3
    plain: tuple = (0.0, -0.8, -1.0, -0.5)

    def kernel_arrays(self):
        e_a = [2.0 * p - 4.0 for p in self.beckner_p]
        nest_e, nest_j, nest_n = [], [], []
        for j, p in enumerate(self.beckner_p):
            for n in range(1, self.nest_max + 1):
                nest_e.append(2.0 * n - 2.0 - (2.0 * n - 1.0) * p)
                nest_j.append(j)
                nest_n.append(n)
        return list(self.plain), e_a, nest_e, nest_j, nest_n

    def has_p(self, p, n=1):
        return _find(self.beckner_p, p) is not None and n <= self.nest_max

    def has_plain(self, e):
        return _find(self.plain, e) is not None

    def extended(self, beckner_p=(), plain=(), nest_max=0):
        bp = list(self.beckner_p)
        for p in beckner_p:
            if _find(bp, p) is None:
                bp.append(float(p))
        pl = list(self.plain)
        for e in plain:
            if _find(pl, e) is None:
                pl.append(float(e))
        return ChannelPlan(tuple(bp), max(self.nest_max, nest_max), tuple(pl))


def _find(values, x, tol=1e-12):
    for i, v in enumerate(values):
        if abs(v - x) <= tol:
            return i
    return None


def random_pair(seed):
    """A seeded (p, q) with q > p for the submartingale bound."""
    rng = np.random.default_rng([int(seed) & 0xFFFFFFFF, int(seed) >> 32, 0xB0D])
    p = float(rng.uniform(0.5, 2.0))
    return p, p + float(rng.uniform(0.25, 1.5))


def default_plan(cfg):
    """Channels for every check in :func:`mc_suite`."""
    pr = random_pair(cfg.seed)
    plain = [r - 2.0 for r in ITO_EXPONENTS]
    for p, q in HOELDER_PQ + ((1.0, 2.0), pr):
        plain += [p - 2.0, q - 2.0]
    return ChannelPlan().extended(plain=plain)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    path_count: int

    @classmethod
    def of(cls, samples):
        x = np.asarray(samples, dtype=float)
        n = x.size
        se = float(np.std(x, ddof=1) / math.sqrt(n)) if n > 1 else math.inf
        return cls(float(np.mean(x)), se, n)


# ---------------------------------------------------------------------------
# simulation


def _kernel_inputs(f, cfg, plan):
    n = cfg.time_steps
    s = 1.0 - cfg.times()  # heat time still to run at t_k
    lam = f.precisions
    grow = 1.0 + s[:, None, None] * lam[None]
    prec = lam[None] / grow
    amp = f.amplitudes[None] * np.prod(grow, axis=2) ** -0.5
    e_plain, e_a, nest_e, nest_j, nest_n = plan.kernel_arrays()
    ck = np.rint(np.array(CHECKPOINTS) * n).astype(np.int64)
    return KernelInputs(f.constant, amp, f.centers, prec, n, e_plain, e_a, nest_e, nest_j, nest_n, ck,
                        split_seed(cfg.seed))


@dataclass
class PathEnsemble:
    """Per-path results of one simulation.

    Holds, for every path, ``M``, ``theta``, ``a`` and ``W`` at the
    checkpoint times, the running integrals of ``|theta|**2`` and
    ``alpha = sum a_ij**2`` there, and the channel integrals over [0, 1];
    all integrals on the fine grid (index 0) and the even subgrid (1).
    The Gaussian increments themselves are not stored; they are a pure
    function of the seed and available from :meth:`increments`.
    """

    f: TestFunction
    cfg: McConfig
    plan: ChannelPlan
    out: KernelOutputs
    checkpoints: tuple = CHECKPOINTS
    _tables: dict = field(default_factory=dict, repr=False)

    @property
    def path_count(self):
        return self.cfg.path_count

    def _ck(self, t):
        i = _find(self.checkpoints, t)
        if i is None:
            raise DomainError(f"t={t} is not a checkpoint time {self.checkpoints}")
        return i

    def m(self, t):
        return self.out.snap_m[:, self._ck(t)]

    def theta(self, t):
        return self.out.snap_theta[:, self._ck(t)]

    def a(self, t):
        return self.out.snap_a[:, self._ck(t)]

    def w(self, t):
        return self.out.snap_w[:, self._ck(t)]

    def theta_sq(self, t):
        return np.sum(self.theta(t) ** 2, axis=1)

    def alpha(self, t):
        return np.sum(self.a(t) ** 2, axis=(1, 2))

    def int_theta_sq(self, t, grid=0):
        return self.out.snap_cum[:, self._ck(t), 0, grid]

    def int_alpha(self, t, grid=0):
        return self.out.snap_cum[:, self._ck(t), 1, grid]

    def plain(self, e, grid=0):
        i = _find(self.plan.plain, e)
        if i is None:
            raise DomainError(f"no plain channel with exponent {e}")
        return self.out.plain[:, i, grid]

    def cumulative(self, p, grid=0):
        i = _find(self.plan.beckner_p, p)
        if i is None:
            raise DomainError(f"no cumulative channel for p={p}")
        return self.out.cumulative[:, i, grid]

    def nested(self, p, n, grid=0):
        j = _find(self.plan.beckner_p, p)
        if j is None or not 1 <= n <= self.plan.nest_max:
            raise DomainError(f"no nested channel for p={p}, n={n}")
        return self.out.nested[:, j * self.plan.nest_max + n - 1, grid]

    def estimate(self, samples):
        return McEstimate.of(samples)

    def increments(self, paths):
        """Gaussian increments ``(len(paths), N, d)`` of the given paths."""
        paths = np.asarray(paths, dtype=np.uint64)
        k0, k1 = split_seed(self.cfg.seed)
        n, d = self.cfg.time_steps, self.cfg.dimension
        out = np.empty((paths.size, n, d))
        sq = math.sqrt(1.0 / n)
        for k in range(1, n + 1):
            for pair in range((d + 1) // 2):
                z0, z1 = normals(paths, k, pair, k0, k1)
                out[:, k - 1, 2 * pair] = sq * z0
                if 2 * pair + 1 < d:
                    out[:, k - 1, 2 * pair + 1] = sq * z1
        return out

    def profile_table(self, kind, params, z_max):
        key = (kind, params, )
        tab = self._tables.get(key)
        if tab is None or tab.z_max < z_max:
            build = u_table if kind == "u" else v_table
            tab = build(params, max(z_max, 1e-3) * 1.01)
            self._tables[key] = tab
        return tab


def simulate(f, cfg, plan=None):
    """Simulate ``cfg.path_count`` paths of (M, theta, a) for f.

    Deterministic given ``cfg.seed``; results are cached per
    (f, cfg, plan) so that the verification routines share one ensemble.
    """
    if not isinstance(f, TestFunction):
        raise ConfigurationError("f must be a TestFunction")
    if f.dimension != cfg.dimension:
        raise ConfigurationError(f"function dimension {f.dimension} does not match config dimension {cfg.dimension}")
    plan = default_plan(cfg) if plan is None else plan
    return _simulate_cached(f, cfg, plan)


@lru_cache(maxsize=2)
def _simulate_cached(f, cfg, plan):
    inp = _kernel_inputs(f, cfg, plan)
    out = KernelOutputs(cfg.path_count, inp)
    backend = cfg.backend or _accel.backend()
    starts = range(0, cfg.path_count, cfg.block_size)

    def work(lo):
        n = min(cfg.block_size, cfg.path_count - lo)
        run_block(lo, n, inp, out.views(slice(lo, lo + n)), backend)

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            list(pool.map(work, starts))
    else:
        for lo in starts:
            work(lo)
    return PathEnsemble(f, cfg, plan, out)


def clear_cache():
    _simulate_cached.cache_clear()


# ---------------------------------------------------------------------------
# report helpers


def _inputs(ens, **extra):
    cfg = ens.cfg
    d = {"seed": int(cfg.seed), "paths": cfg.path_count, "steps": cfg.time_steps}
    d.update(extra)
    return d


def _paired(name, ens, lhs, rhs, lhs_c=None, rhs_c=None, offset=0.0, **extra):
    """Two-sided comparison of per-path samples ``lhs + offset`` and ``rhs``.

    The standard error is that of the per-path difference; the allowance
    is the change of the mean gap between the subgrid and the fine grid.
    """
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    gap = McEstimate.of(lhs - rhs)
    allowance = 0.0
    if lhs_c is not None or rhs_c is not None:
        lc = lhs if lhs_c is None else lhs_c
        rc = rhs if rhs_c is None else rhs_c
        allowance = abs(float(np.mean(lc) - np.mean(rc)) - gap.mean)
    return mc_report(name, float(np.mean(lhs)) + offset, float(np.mean(rhs)), gap.std_error, allowance,
                     _inputs(ens, **extra))


def _one_sided(name, ens, samples, value, samples_c=None, offset=0.0, **extra):
    """Monte Carlo mean of ``samples`` (+ offset) against a deterministic value."""
    est = McEstimate.of(samples)
    allowance = 0.0 if samples_c is None else abs(float(np.mean(samples_c)) - est.mean)
    return mc_report(name, est.mean + offset, value, est.std_error, allowance, _inputs(ens, **extra))


def _mc_ineq(name, ens, lhs, rhs, lhs_c=None, rhs_c=None, lhs_offset=0.0, rhs_offset=0.0, **extra):
    """``E lhs <= E rhs`` judged with slack ``3 (se + allowance)``."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    diff = McEstimate.of(rhs - lhs)
    allowance = 0.0
    if lhs_c is not None or rhs_c is not None:
        lc = lhs if lhs_c is None else lhs_c
        rc = rhs if rhs_c is None else rhs_c
        allowance = abs(float(np.mean(rc) - np.mean(lc)) - diff.mean)
    return CheckReport(
        name, float(np.mean(lhs)) + lhs_offset, float(np.mean(rhs)) + rhs_offset,
        3.0 * (diff.std_error + allowance), kind="inequality", se=diff.std_error, allowance=allowance,
        inputs=_inputs(ens, **extra),
    )


def _exact(name, ens, value, reference, **extra):
    tol = EXACT_TOL * max(1.0, abs(reference))
    return CheckReport(name, value, reference, tol, kind="identity", inputs=_inputs(ens, **extra))


def _require_grade(cfg):
    if not cfg.acceptance_grade:
        raise ConfigurationError(f"acceptance-grade runs need at least {ACCEPTANCE_PATHS} paths")


def _ensemble(f, cfg, need_p=(), need_plain=(), nest_max=0, ensemble=None):
    _require_grade(cfg)
    plan = default_plan(cfg)
    if ensemble is not None:
        plan = ensemble.plan
    if (any(not plan.has_p(p, nest_max or 1) for p in need_p)
            or any(not plan.has_plain(e) for e in need_plain) or nest_max > plan.nest_max):
        plan = plan.extended(need_p, need_plain, nest_max)
        ensemble = None
    return ensemble if ensemble is not None else simulate(f, cfg, plan)


# ---------------------------------------------------------------------------
# identities


def _phi(r, x):
    if abs(r - 1.0) < 1e-12:
        return x * np.log(x)
    return x**r


def verify_ito_identity(f, cfg, r, ensemble=None):
    """``E phi(M_1) - phi(M_0) = 1/2 int_0^1 E[phi''(M_s) |theta_s|**2] ds``
    for ``phi(x) = x**r`` (``x log x`` at r = 1)."""
    r = float(r)
    ens = _ensemble(f, cfg, need_plain=(r - 2.0,), ensemble=ensemble)
    coef = 0.5 if abs(r - 1.0) < 1e-12 else 0.5 * r * (r - 1.0)
    m0 = float(ens.m(0.0)[0])
    # phi(M_0) is subtracted path by path, before averaging
    lhs = _phi(r, ens.m(1.0)) - float(_phi(r, np.float64(m0)))
    return _paired(
        f"ito_identity[r={r:g}]", ens, lhs, coef * ens.plain(r - 2.0), None, coef * ens.plain(r - 2.0, 1), r=r,
    )


def verify_ito_vs_quadrature(f, cfg, p, ensemble=None, quad_data=None):
    """``(p-1) int_0^1 E[M^(2p-4) |theta|**2] ds`` against ``I_{2p-2}(f)``."""
    p = float(p)
    ens = _ensemble(f, cfg, need_plain=(2.0 * p - 4.0,), ensemble=ensemble)
    nd = quad_data or NodalData(f)
    return _one_sided(
        f"time_integral_vs_quadrature[p={p:g}]", ens, (p - 1.0) * ens.plain(2.0 * p - 4.0),
        nd.i_p(2.0 * p - 2.0), (p - 1.0) * ens.plain(2.0 * p - 4.0, 1), p=p,
    )


def _big_f_paths(ens, p, s, x):
    if any(abs(p - c) < 1e-12 for c in CLOSED_FORM_P):
        return big_f_closed_form(p, s, x)
    params = BecknerParams(p)
    z = s * x ** (2.0 - 2.0 * p)
    tab = ens.profile_table("u", params, float(np.max(z)))
    return x**p * tab(z)


def verify_beckner_identity(f, cfg, params, ensemble=None):
    """``int_0^1 E[M_s^-p |theta_s|**2 A_s] ds = E F(A_1, M_1)`` with
    ``A_t = int_0^t M^(2p-4) |theta|**2``; F in closed form at p = 4/3.

    ``params`` is a :class:`BecknerParams` or, for the closed forms, p.
    """
    p = params.p if isinstance(params, BecknerParams) else float(params)
    ens = _ensemble(f, cfg, need_p=(p,), ensemble=ensemble)
    m1 = ens.m(1.0)
    rhs = _big_f_paths(ens, p, ens.cumulative(p), m1)
    rhs_c = _big_f_paths(ens, p, ens.cumulative(p, 1), m1)
    return _paired(f"beckner_path_identity[p={p:g}]", ens, ens.nested(p, 1), rhs, ens.nested(p, 1, 1), rhs_c, p=p)


def _j_paths(ens, params, s, x):
    z = s / x**params.q
    tab = ens.profile_table("v", params, float(np.max(z)))
    return x**params.p * tab(z)


def verify_hoelder_identity(f, cfg, params, ensemble=None):
    """``int_0^1 E[M^(p-2) |theta|**2] ds = E J(int_0^1 M^(q-2) |theta|**2, M_1)``."""
    p, q = params.p, params.q
    ens = _ensemble(f, cfg, need_plain=(p - 2.0, q - 2.0), ensemble=ensemble)
    m1 = ens.m(1.0)
    rhs = _j_paths(ens, params, ens.plain(q - 2.0), m1)
    rhs_c = _j_paths(ens, params, ens.plain(q - 2.0, 1), m1)
    return _paired(
        f"hoelder_path_identity[p={p:g},q={q:g}]", ens, ens.plain(p - 2.0), rhs, ens.plain(p - 2.0, 1), rhs_c,
        p=p, q=q,
    )


def verify_hoelder_vs_quadrature(f, cfg, p, ensemble=None, quad_data=None):
    """``int_0^1 E[M^(p-2) |theta|**2] ds = (2/p) I_p(f)``."""
    p = float(p)
    ens = _ensemble(f, cfg, need_plain=(p - 2.0,), ensemble=ensemble)
    nd = quad_data or NodalData(f)
    return _one_sided(
        f"energy_integral_vs_quadrature[p={p:g}]", ens, ens.plain(p - 2.0), 2.0 / p * nd.i_p(p),
        ens.plain(p - 2.0, 1), p=p,
    )


def _h_moment(ens, p, n, grid):
    """``E[M_1^(2n+2-(2n+1)p) A_1^(n+1)]`` samples (without the 1/(n+1))."""
    return ens.m(1.0) ** (2.0 * n + 2.0 - (2.0 * n + 1.0) * p) * ens.cumulative(p, grid) ** (n + 1)


def verify_h_recursion(f, cfg, p, n, t=1.0, ensemble=None):
    """``H_{p,n} = E[M_t^(2n+2-(2n+1)p) A_t^(n+1)]/(n+1) + c_{p,n} H_{p,n+1}``
    with ``c_{p,n} = (2n+1)/(2n+2) (p-1) (2n+2-(2n+1)p)``, at t = 1."""
    p, n = float(p), int(n)
    if n not in (0, 1, 2):
        raise DomainError("n must be 0, 1 or 2")
    if abs(t - 1.0) > 1e-12:
        raise DomainError("the recursion is checked at t = 1, where the channel integrals end")
    ens = _ensemble(f, cfg, need_p=(p,), need_plain=(p - 2.0,) if n == 0 else (), nest_max=n + 1,
                    ensemble=ensemble)
    coef = (2.0 * n + 1.0) / (2.0 * n + 2.0) * (p - 1.0) * (2.0 * n + 2.0 - (2.0 * n + 1.0) * p)

    def h(k, grid):
        if k == 0:
            return ens.plain(p - 2.0, grid)
        return ens.nested(p, k, grid)

    def side(grid):
        return _h_moment(ens, p, n, grid) / (n + 1.0) + coef * h(n + 1, grid)

    return _paired(f"h_recursion[p={p:g},n={n}]", ens, h(n, 0), side(0), h(n, 1), side(1), p=p, n=n, coef=coef)


def verify_h_chain(f, cfg, p=1.2, ensemble=None):
    """Recursion at n = 1 and n = 2 combined:
    ``H_{p,1} = E[M^(4-3p) A^2]/2 + (p-1)(4-3p)/4 E[M^(6-5p) A^3]
    + 5 (p-1)**2 (4-3p)(6-5p)/8 H_{p,3}``; at p = 6/5 the last term vanishes."""
    p = float(p)
    ens = _ensemble(f, cfg, need_p=(p,), nest_max=3, ensemble=ensemble)
    c2 = (p - 1.0) * (4.0 - 3.0 * p) / 4.0
    c3 = 5.0 * (p - 1.0) ** 2 * (4.0 - 3.0 * p) * (6.0 - 5.0 * p) / 8.0

    def side(grid):
        return 0.5 * _h_moment(ens, p, 1, grid) + c2 * _h_moment(ens, p, 2, grid) + c3 * ens.nested(p, 3, grid)

    return _paired(f"h_chain[p={p:g}]", ens, ens.nested(p, 1), side(0), ens.nested(p, 1, 1), side(1),
                   p=p, c2=c2, c3=c3)


# ---------------------------------------------------------------------------
# martingale structure and the second-order battery


def verify_martingales(f, cfg, ensemble=None, quad_data=None):
    """Exactness at t = 0 against quadrature, ``E W_1 = 0``, and constant
    expectations of M, theta and a at the quarter times."""
    ens = _ensemble(f, cfg, ensemble=ensemble)
    nd = quad_data or NodalData(f)
    d = f.dimension
    reports = [_exact("t0_mass", ens, float(ens.m(0.0)[0]), nd.mass)]
    th0 = ens.theta(0.0)[0]
    a0 = ens.a(0.0)[0]
    for i in range(d):
        reports.append(_exact(f"t0_theta[{i}]", ens, float(th0[i]), float(nd.mean_grad[i])))
        for j in range(d):
            reports.append(_exact(f"t0_a[{i},{j}]", ens, float(a0[i, j]), float(nd.mean_hess[i, j])))
    reports.append(_exact("t0_alpha", ens, float(np.sum(a0**2)), float(np.sum(nd.mean_hess**2))))
    w1 = ens.w(1.0)
    for i in range(d):
        reports.append(_one_sided(f"brownian_mean[{i}]", ens, w1[:, i], 0.0))
    for t in CHECKPOINTS[1:]:
        reports.append(_one_sided(f"martingale_m[t={t:g}]", ens, ens.m(t), float(ens.m(0.0)[0]), t=t))
        for i in range(d):
            reports.append(_one_sided(f"martingale_theta[{i}][t={t:g}]", ens, ens.theta(t)[:, i], float(th0[i]), t=t))
            for j in range(d):
                reports.append(
                    _one_sided(f"martingale_a[{i},{j}][t={t:g}]", ens, ens.a(t)[:, i, j], float(a0[i, j]), t=t)
                )
    return reports


def verify_submartingale_bound(f, cfg, p, q, ensemble=None):
    """``int_0^1 E[M^(p-2) |theta|**2] <= E[M_1^(p-q) int_0^1 M^(q-2) |theta|**2]``."""
    p, q = float(p), float(q)
    ens = _ensemble(f, cfg, need_plain=(p - 2.0, q - 2.0), ensemble=ensemble)
    m1 = ens.m(1.0) ** (p - q)
    return _mc_ineq(
        f"submartingale_bound[p={p:g},q={q:g}]", ens, ens.plain(p - 2.0), m1 * ens.plain(q - 2.0),
        ens.plain(p - 2.0, 1), m1 * ens.plain(q - 2.0, 1), p=p, q=q,
    )


def verify_second_order_battery(f, cfg, ensemble=None):
    """Rates of ``E M_t**2`` and ``E |theta_t|**2``, monotonicity of alpha and
    of ``E |theta_t|**2``, convexity of ``E |theta_t|**2``, the two improved
    Poincare inequalities in expectation form, the alpha(0) bound, and the
    submartingale bound at (1, 2) and a seeded random pair."""
    ens = _ensemble(f, cfg, ensemble=ensemble)
    ts = CHECKPOINTS
    reports = []
    for t0, t1 in zip(ts[:-1], ts[1:]):
        h = t1 - t0
        dm = (ens.m(t1) ** 2 - ens.m(t0) ** 2) / h
        it = [(ens.int_theta_sq(t1, g) - ens.int_theta_sq(t0, g)) / h for g in (0, 1)]
        reports.append(_paired(f"second_moment_rate[{t0:g},{t1:g}]", ens, dm, it[0], None, it[1], t0=t0, t1=t1))
        dt2 = (ens.theta_sq(t1) - ens.theta_sq(t0)) / h
        ia = [(ens.int_alpha(t1, g) - ens.int_alpha(t0, g)) / h for g in (0, 1)]
        reports.append(_paired(f"gradient_energy_rate[{t0:g},{t1:g}]", ens, dt2, ia[0], None, ia[1], t0=t0, t1=t1))
        reports.append(_mc_ineq(f"alpha_monotone[{t0:g},{t1:g}]", ens, ens.alpha(t0), ens.alpha(t1), t0=t0, t1=t1))
        reports.append(
            _mc_ineq(f"gradient_energy_monotone[{t0:g},{t1:g}]", ens, ens.theta_sq(t0), ens.theta_sq(t1), t0=t0, t1=t1)
        )
    for t0, t1, t2 in zip(ts[:-2], ts[1:-1], ts[2:]):
        reports.append(
            _mc_ineq(f"gradient_energy_convex[{t1:g}]", ens, 2.0 * ens.theta_sq(t1),
                     ens.theta_sq(t0) + ens.theta_sq(t2), t=t1)
        )
    m0 = float(ens.m(0.0)[0])
    th0 = float(ens.theta_sq(0.0)[0])
    al0 = float(ens.alpha(0.0)[0])
    var = ens.m(1.0) ** 2
    g1 = ens.theta_sq(1.0)
    rhs1 = 0.5 * g1
    rhs2 = g1 / 3.0
    reports.append(_mc_ineq("poincare_improved_1_paths", ens, var, rhs1, lhs_offset=-m0**2, rhs_offset=0.5 * th0))
    reports.append(
        _mc_ineq("poincare_improved_2_paths", ens, var, rhs2, lhs_offset=-m0**2,
                 rhs_offset=2.0 * th0 / 3.0 + al0 / 6.0)
    )
    reports.append(
        _mc_ineq("poincare_improved_chain_paths", ens, rhs2, rhs1, lhs_offset=2.0 * th0 / 3.0 + al0 / 6.0,
                 rhs_offset=0.5 * th0)
    )
    reports.append(_mc_ineq("alpha0_bound_paths", ens, np.full(g1.shape, al0), g1, rhs_offset=-th0))
    for p, q in ((1.0, 2.0), random_pair(cfg.seed)):
        reports.append(verify_submartingale_bound(f, cfg, p, q, ensemble=ens))
    return reports


def mc_suite(f, cfg, quad_data=None):
    """Every Monte Carlo report for one test function on one ensemble."""
    ens = _ensemble(f, cfg)
    nd = quad_data or NodalData(f)
    reports = []
    for r in ITO_EXPONENTS:
        reports.append(verify_ito_identity(f, cfg, r, ensemble=ens))
    reports.append(verify_ito_vs_quadrature(f, cfg, 2.0, ensemble=ens, quad_data=nd))
    reports.append(verify_ito_vs_quadrature(f, cfg, 1.6, ensemble=ens, quad_data=nd))
    for p in BECKNER_P:
        params = p if any(abs(p - c) < 1e-12 for c in CLOSED_FORM_P) else BecknerParams(p)
        reports.append(verify_beckner_identity(f, cfg, params, ensemble=ens))
    for p, q in HOELDER_PQ:
        reports.append(verify_hoelder_identity(f, cfg, HoelderParams(p, q), ensemble=ens))
    reports.append(verify_hoelder_vs_quadrature(f, cfg, 1.0, ensemble=ens, quad_data=nd))
    for p, n in H_CASES:
        reports.append(verify_h_recursion(f, cfg, p, n, ensemble=ens))
    reports.append(verify_h_chain(f, cfg, 1.2, ensemble=ens))
    reports += verify_martingales(f, cfg, ensemble=ens, quad_data=nd)
    reports += verify_second_order_battery(f, cfg, ensemble=ens)
    return reports
