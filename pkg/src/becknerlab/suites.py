"""Deterministic verification suites assembled from the library, each a list
of :class:`~becknerlab.reports.CheckReport`.

Shared by the command line and the acceptance tests so both judge exactly
the same numbers.
"""

import math

import numpy as np
from scipy import integrate
from scipy import special as sc

from . import deficit as dfc
from . import specfun as sf
from .functionals import GaussQuadSpec, check_all, load_corpus
from .reports import CheckReport

__all__ = [
    "BECKNER_GRID",
    "HOELDER_GRID",
    "specfun_suite",
    "normalization_suite",
    "inrd_suite",
    "representation_suite",
    "laplace_suite",
    "pde_suite",
    "asymptotic_suite",
    "hoelder_limit_suite",
    "identities_suite",
    "inequality_suite",
]

BECKNER_GRID = (1.35, 1.5, 1.7, 1.9)
HOELDER_GRID = ((1.0, 2.0), (1.0, 1.5), (0.5, 1.0), (2.0, 3.0))
INRD_V = (0.1, 0.5, 1.0, 2.0, 10.0)
REPRESENTATION_Z = (0.1, 1.0, 5.0)
LAPLACE_ALPHA = (0.5, 1.0, 5.0)
PDE_S = (0.5, 1.0, 2.0)
PDE_X = (0.5, 1.0, 2.0)
HEAT_KERNEL = ((-1.0, 1.0), (-0.8, 2.0), (-0.6, 0.5))
ASYMPTOTIC_P = (1.5, 1.7)

PDE_STEP = 1e-3
PDE_TOL = 1e-4
PDE_MIN_ORDER = 1.8
CLOSED_FORM_TOL = 1e-12
# relative accuracy assumed for one evaluation when bounding the
# round-off floor of a difference stencil
F_EVAL_REL = 1e-15
G_EVAL_REL = 4e-15


def _identity(name, lhs, rhs, tol, **inputs):
    return CheckReport(name, lhs, rhs, tol, kind="identity", inputs=inputs)


def _ineq(name, lhs, rhs, tol=0.0, **inputs):
    return CheckReport(name, lhs, rhs, tol, kind="inequality", inputs=inputs)


def _rel_identity(name, lhs, rhs, rel, **inputs):
    return _identity(name, lhs, rhs, rel * max(abs(lhs), abs(rhs)), **inputs)


# ---------------------------------------------------------------------------
# special functions


def _reprk2(mu, z):
    """``K_mu(z)`` from ``2**(mu-1) z**mu int v**(mu-1) exp(-1/(4v) - z**2 v) dv``."""

    def g(t):  # v = e**t
        return math.exp(mu * t - 0.25 * math.exp(-t) - z * z * math.exp(t))

    val, _ = integrate.quad(g, -60.0, 40.0, epsabs=0.0, epsrel=1e-13, limit=400)
    return 2.0 ** (mu - 1.0) * z**mu * val


def specfun_suite(tolerance=None, seed=1234):
    """Gamma, erfc, Macdonald-function and moment checks against closed
    forms and independent oracles (scipy and direct quadrature).

    ``tolerance`` replaces every identity tolerance (fault injection).
    """

    def tol(t):
        return t if tolerance is None else tolerance

    rng = np.random.default_rng(seed)
    out = []
    out.append(_identity("gamma(1)", sf.gamma(1.0), 1.0, tol(1e-15)))
    out.append(_rel_identity("gamma(0.5)", sf.gamma(0.5), math.sqrt(math.pi), tol(1e-15)))
    for z in (0.1, 0.25, 0.5, 0.75, 0.9):
        lhs = sf.gamma(z) * sf.gamma(1.0 - z)
        out.append(_rel_identity(f"gamma_reflection[z={z:g}]", lhs, math.pi / math.sin(math.pi * z), tol(1e-10)))
    for z in (0.5, 1.0, 2.3):
        lhs = 2.0 ** (2.0 * z - 1.0) * sf.gamma(z) * sf.gamma(z + 0.5)
        out.append(_rel_identity(f"gamma_duplication[z={z:g}]", lhs, math.sqrt(math.pi) * sf.gamma(2.0 * z), tol(1e-10)))
    for z in (0.7, 3.2):
        out.append(_rel_identity(f"gamma_recurrence[z={z:g}]", sf.gamma(z + 1.0), z * sf.gamma(z), tol(1e-14)))

    out.append(_rel_identity("erfc_upper(0)", sf.erfc_upper(0.0), 0.5 * math.sqrt(math.pi), tol(1e-15)))
    ref, _ = integrate.quad(lambda z: math.exp(-z * z), 1.0, 10.0, epsabs=0.0, epsrel=1e-13)
    out.append(_rel_identity("erfc_upper(1)_vs_quadrature", sf.erfc_upper(1.0), ref, tol(1e-12)))
    out.append(_ineq("erfc_upper_decreasing", sf.erfc_upper(1.0), sf.erfc_upper(0.5)))

    out.append(
        _rel_identity("bessel_k(0.5,1)", sf.bessel_k(0.5, 1.0), math.sqrt(math.pi / 2.0) * math.exp(-1.0), tol(1e-13))
    )
    out.append(_rel_identity("bessel_k(1,1)_vs_second_representation", sf.bessel_k(1.0, 1.0), _reprk2(1.0, 1.0),
                             tol(1e-11)))
    for mu, x in zip(rng.uniform(-2.0, 2.0, 20), rng.uniform(0.1, 10.0, 20)):
        k_pos = sf.bessel_k(mu, x)
        out.append(_rel_identity(f"bessel_k_symmetry[mu={mu:.4f},x={x:.4f}]", sf.bessel_k(-mu, x), k_pos, tol(1e-14)))
    mus = np.array([-3.7, -1.0, -0.3, 0.0, 0.8, 2.5, 12.0])
    xs = np.array([1e-3, 0.1, 1.0, 7.5, 40.0, 300.0])
    mm, xx = np.meshgrid(mus, xs, indexing="ij")
    ours = sf.log_bessel_k(mm, xx)
    ref = np.log(sc.kve(mm, xx)) - xx
    out.append(
        _identity("log_bessel_k_vs_scipy_max_abs", float(np.max(np.abs(ours - ref))), 0.0, tol(1e-12),
                  orders=mus.tolist(), arguments=xs.tolist())
    )
    for mu in (-1.0, 0.0, 1.0):
        z = np.linspace(0.05, 8.0, 60)
        w = np.exp(-mu * np.log(z) + sf.log_bessel_k(mu, z))
        worst = float(np.max(np.diff(w) / w[1:]))
        out.append(_ineq(f"z^-mu_K_mu_nonincreasing[mu={mu:g}]", worst, 0.0, mu=mu))
    for mu in (0.8, -0.8):
        z = 1e-4
        lhs = z ** abs(mu) * sf.bessel_k(mu, z)
        rhs = 2.0 ** (abs(mu) - 1.0) * sf.gamma(abs(mu))
        out.append(_rel_identity(f"bessel_small_argument[mu={mu:g}]", lhs, rhs, 0.01 if tolerance is None else tolerance))

    out.append(_rel_identity("bessel_moment(1,0)", sf.bessel_moment(1.0, 0.0), 1.0, tol(1e-15)))
    nu = -1.0
    out.append(
        _rel_identity("bessel_moment(nu+2,nu)[nu=-1]", sf.bessel_moment(nu + 2.0, nu),
                      2.0**nu * math.sqrt(math.pi) * sf.gamma(nu + 1.5), tol(1e-14))
    )
    cases = [(2.5, -1.0)]
    while len(cases) < 11:
        kappa, mu = rng.uniform(-0.5, 4.0), rng.uniform(-2.0, 2.0)
        if kappa - abs(mu) > -0.5:
            cases.append((kappa, mu))
    for kappa, mu in cases:
        val, _ = integrate.quad(lambda lam: lam**kappa * sf.bessel_k(mu, lam), 0.0, math.inf,
                                epsabs=0.0, epsrel=1e-12, limit=400)
        out.append(_rel_identity(f"bessel_moment_vs_quadrature[kappa={kappa:.4f},mu={mu:.4f}]",
                                 sf.bessel_moment(kappa, mu), val, tol(1e-8)))
    return out


# ---------------------------------------------------------------------------
# deficit identities


def normalization_suite(beckner=BECKNER_GRID, hoelder=HOELDER_GRID, tol=1e-10):
    out = []
    for p in beckner:
        out.append(_identity(f"cpd_normalization[p={p:g}]", dfc.cpd_normalization(dfc.BecknerParams(p)), 1.0, tol, p=p))
    for p, q in hoelder:
        val = dfc.cpnubdd_normalization(dfc.HoelderParams(p, q))
        out.append(_identity(f"cpnubdd_normalization[p={p:g},q={q:g}]", val, 1.0, tol, p=p, q=q))
    return out


def inrd_suite(vs=INRD_V, rel=1e-10):
    out = []
    for v in vs:
        lhs, rhs, closed = dfc.inrd_sides(v)
        out.append(_rel_identity(f"inrd_sides[v={v:g}]", lhs, rhs, rel, v=v))
        out.append(_rel_identity(f"inrd_erfc_form[v={v:g}]", rhs, closed, rel, v=v))
    return out


def representation_suite(zs=REPRESENTATION_Z, beckner=BECKNER_GRID, hoelder=HOELDER_GRID, rel=1e-6):
    out = []
    z = np.array(zs)
    for p in beckner:
        par = dfc.BecknerParams(p)
        direct = dfc.big_f(par, z, 1.0)
        alt = dfc.u_alt(par, z)
        for zi, a, b in zip(zs, direct, alt):
            out.append(_identity(f"u_representation[p={p:g},z={zi:g}]", a, b, rel * max(1.0, abs(b)), p=p, z=zi))
    for p, q in hoelder:
        par = dfc.HoelderParams(p, q)
        direct = dfc.j_fun(par, z, 1.0)
        alt = dfc.v_alt(par, z)
        for zi, a, b in zip(zs, direct, alt):
            out.append(
                _identity(f"v_representation[p={p:g},q={q:g},z={zi:g}]", a, b, rel * max(1.0, abs(b)), p=p, q=q, z=zi)
            )
    return out


def laplace_suite(beckner=BECKNER_GRID, alphas=LAPLACE_ALPHA, rel=1e-8):
    out = []
    for p in beckner:
        par = dfc.BecknerParams(p)
        for a in alphas:
            lhs, rhs = dfc.laplace_sides_u(par, a)
            out.append(_rel_identity(f"laplace_transform_u[p={p:g},alpha={a:g}]", lhs, rhs, rel, p=p, alpha=a))
    return out


def _order_reports(tag, res_h, res_h2, floor_h2, h=PDE_STEP, scale=1.0, **inputs):
    """Residual bound at h and second-order decay under halving, unless the
    halved-step residual already sits at the round-off floor."""
    out = [_ineq(f"{tag}_residual", abs(res_h) / scale, PDE_TOL, h=h, **inputs)]
    if abs(res_h2) <= 4.0 * floor_h2:
        out.append(_ineq(f"{tag}_roundoff_limited", abs(res_h2), 4.0 * floor_h2, h=h / 2.0, **inputs))
    else:
        order = math.log2(abs(res_h) / abs(res_h2)) if res_h2 != 0 else math.inf
        out.append(_ineq(f"{tag}_order", PDE_MIN_ORDER, order, h=h, **inputs))
    return out


def _stencil_floor(value, coef_s, h, rel):
    """Round-off size of ``coef_s F_s + F_xx / 2`` from central differences."""
    return rel * abs(value) * (2.0 / h**2 + abs(coef_s) / h)


def pde_suite(beckner=BECKNER_GRID, hoelder=HOELDER_GRID, ss=PDE_S, xs=PDE_X, heat=HEAT_KERNEL, h=PDE_STEP):
    out = []
    for p in beckner:
        par = dfc.BecknerParams(p)
        for s in ss:
            for x in xs:
                r1 = dfc.pde_residual_f(par, s, x, h)
                r2 = dfc.pde_residual_f(par, s, x, h / 2.0)
                fv = float(dfc.big_f(par, s, x))
                floor = _stencil_floor(fv, x ** (2.0 * p - 4.0), h / 2.0, F_EVAL_REL)
                out += _order_reports(f"pde_f[p={p:g},s={s:g},x={x:g}]", r1, r2, floor, h, p=p, s=s, x=x)
    for p, q in hoelder:
        par = dfc.HoelderParams(p, q)
        for s in ss:
            for x in xs:
                r1 = dfc.pde_residual_j(par, s, x, h)
                r2 = dfc.pde_residual_j(par, s, x, h / 2.0)
                jv = float(dfc.j_fun(par, s, x))
                floor = _stencil_floor(jv, x ** (q - 2.0), h / 2.0, F_EVAL_REL)
                out += _order_reports(f"pde_j[p={p:g},q={q:g},s={s:g},x={x:g}]", r1, r2, floor, h, p=p, q=q, s=s, x=x)
    for nu, lam in heat:
        for s in ss:
            for y in xs:
                r1, g = dfc.heat_kernel_pde_residual(nu, s, y, lam, h)
                r2, _ = dfc.heat_kernel_pde_residual(nu, s, y, lam, h / 2.0)
                floor = _stencil_floor(g, 1.0 + abs(2.0 * nu + 1.0) / (2.0 * y), h / 2.0, G_EVAL_REL)
                out += _order_reports(f"pde_heat_kernel[nu={nu:g},lambda={lam:g},s={s:g},y={y:g}]", r1, r2, floor, h,
                                      scale=g, nu=nu, lam=lam, s=s, y=y)
    for p in (4.0 / 3.0, 1.2):
        for s in ss:
            for x in xs:
                r = dfc.pde_residual_f_closed_form(p, s, x)
                out.append(_ineq(f"pde_f_closed_form[p={p:.6g},s={s:g},x={x:g}]", abs(r), CLOSED_FORM_TOL, p=p, s=s, x=x))
    out.append(_ineq("bessel_ode[nu=-0.8,z=2]", dfc.bessel_ode_residual(-0.8, 2.0), 1e-6))
    out.append(_ineq("bessel_derivative[mu=-1,z=1.5]", dfc.bessel_derivative_gap(-1.0, 1.5), 1e-6))
    return out


def asymptotic_suite(ps=ASYMPTOTIC_P, rel=0.05):
    out = []
    for p in ps:
        par = dfc.BecknerParams(p)
        const = dfc.f_asymptotic_constant(par)
        r4 = dfc.f_asymptotic_ratio(par, 1e4, 1.0)
        r6 = dfc.f_asymptotic_ratio(par, 1e6, 1.0)
        out.append(_identity(f"f_asymptotic_ratio[p={p:g},s=1e6,x=1]", r6, const, rel * const, p=p))
        out.append(
            _ineq(f"f_asymptotic_approach[p={p:g}]", abs(r6 / const - 1.0), abs(r4 / const - 1.0), p=p,
                  ratio_1e4=r4, ratio_1e6=r6)
        )
        r60 = dfc.f_asymptotic_ratio(par, 1e6, 0.0)
        r62 = dfc.f_asymptotic_ratio(par, 1e6, 2.0)
        out.append(_ineq(f"f_asymptotic_x_independence[p={p:g}]", abs(r60 - r62) / const, rel, p=p,
                         ratio_x0=r60, ratio_x2=r62))
    return out


def hoelder_limit_suite(ps=(0.5, 1.0, 2.0)):
    out = []
    for p in ps:
        out.append(_identity(f"hoelder_constant_q_to_p[p={p:g}]", dfc.hoelder_constant(p, p + 1e-6), 1.0, 1e-3, p=p))
        out.append(_identity(f"hoelder_constant_q_to_inf[p={p:g}]", dfc.hoelder_constant(p, 1e6), 1.0, 1e-3, p=p))
    out.append(_identity("hoelder_constant[p=1,q=2]", dfc.hoelder_constant(1.0, 2.0), math.sqrt(math.pi / 2.0), 1e-12))
    return out


def identities_suite():
    """Normalizations, the phi identity, representation equivalence,
    Laplace transforms and the Hoelder-constant limits."""
    return normalization_suite() + inrd_suite() + representation_suite() + laplace_suite() + hoelder_limit_suite()


def inequality_suite(corpus=None, quad=None):
    """Every inequality report on every corpus function; names carry the
    function index as ``f###:``."""
    funcs, _ = load_corpus(corpus)
    quad = quad or GaussQuadSpec()
    out = []
    for i, f in enumerate(funcs):
        for r in check_all(f, quad):
            r.name = f"f{i:03d}:{r.name}"
            r.inputs["function"] = i
            out.append(r)
    return out
