"""Improvement functions F (Beckner family) and J (Hoelder family).

Both are weighted integrals over ``v`` of a plus-part power. With
``z = s x**(2-2p)`` (resp. ``z = s / x**q``) they reduce to one-variable
profiles,

    F(s, x) = x**p U(z),   U(z) = C_p int_0^z (z-v)**a v**b phi(c v) dv,
    J(s, x) = x**p V(z),   V(z) = C 2**(k+1) int_0^z (z-v)**(p/q) v**(-p/q) psi(v) dv,

which are evaluated with :func:`~becknerlab.quadrature.kink_rule`. The
Macdonald-function forms of U and V are implemented separately
(:func:`u_alt`, :func:`v_alt`) so the two can be compared.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from numpy.polynomial import chebyshev as C

from .errors import DomainError, NumericalError, RangeError
from .quadrature import DEFAULT_QUAD, exp_sinh, exp_sinh_power, gauss_legendre, kink_rule
from .specfun import bessel_moment, erfcx_upper, gamma, log_bessel_k

__all__ = [
    "BecknerParams",
    "HoelderParams",
    "DeficitGrid",
    "phi",
    "phi_closed_form",
    "inrd_sides",
    "inrd_identity_gap",
    "u_fun",
    "big_f",
    "big_f_closed_form",
    "u_alt",
    "u_alt_kernel",
    "cpd_normalization",
    "laplace_sides_u",
    "laplace_gap_u",
    "pde_residual_f",
    "pde_residual_f_closed_form",
    "f_asymptotic_ratio",
    "f_asymptotic_constant",
    "v_fun",
    "j_fun",
    "v_alt",
    "cpnubdd_normalization",
    "j_upper_bound",
    "pde_residual_j",
    "hoelder_constant",
    "heat_kernel_pde_residual",
    "bessel_ode_residual",
    "bessel_derivative_gap",
    "ProfileTable",
    "u_table",
    "v_table",
]

GUARD = 1e-3


@dataclass(frozen=True)
class BecknerParams:
    """Exponent data of the improved Beckner inequality, 4/3 < p < 2.

    Attributes
    ----------
    p : exponent, restricted to ``[4/3 + 1e-3, 2 - 1e-3]``.
    nu : ``-1/(2(p-1))``, lies in ``(-3/2, -1/2)``.
    c_p : normalizing constant of F, ``1/(Gamma(3/2-nu) Gamma(nu+3/2))``.
    c_p_prime : normalizing constant of the Bessel form of U.
    """

    p: float
    nu: float = field(init=False)
    c_p: float = field(init=False)
    c_p_prime: float = field(init=False)

    def __post_init__(self):
        p = float(self.p)
        if not (4.0 / 3.0 + GUARD <= p <= 2.0 - GUARD):
            raise DomainError(
                f"p={p} outside [4/3+{GUARD}, 2-{GUARD}]; closed forms exist for p=4/3 and p=6/5"
            )
        nu = -1.0 / (2.0 * (p - 1.0))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "c_p", 1.0 / (gamma(1.5 - nu) * gamma(nu + 1.5)))
        object.__setattr__(self, "c_p_prime", 2.0**-nu / (math.sqrt(math.pi) * gamma(nu + 1.5)))

    @property
    def a(self):
        """Exponent of the plus-part, ``p/(2(p-1))``, in (1, 2)."""
        return self.p / (2.0 * (self.p - 1.0))

    @property
    def b(self):
        """Exponent of v, ``(p-2)/(2(p-1))``, in (-1, 0)."""
        return (self.p - 2.0) / (2.0 * (self.p - 1.0))

    @property
    def c(self):
        """Argument scale of phi, ``(p-1)**2``."""
        return (self.p - 1.0) ** 2

    def c_p_sine(self):
        """C_p from its sine form; equal to ``c_p``."""
        p = self.p
        return (
            4.0 * (p - 1.0) ** 2 / (math.pi * p * (2.0 - p))
            * math.sin(0.5 * math.pi * (2.0 - p) / (p - 1.0))
        )


@dataclass(frozen=True)
class HoelderParams:
    """Exponent pair ``0 < p < q`` of the Hoelder-type inequality.

    Attributes
    ----------
    nu_prime : ``-1/q``.
    c_pq, c_pq_prime : normalizing constants of J and of the Bessel form of V.
    """

    p: float
    q: float
    nu_prime: float = field(init=False)
    c_pq: float = field(init=False)
    c_pq_prime: float = field(init=False)

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        if not (0 < p < q):
            raise DomainError(f"need 0 < p < q, got p={p}, q={q}")
        nu = -1.0 / q
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "nu_prime", nu)
        g1 = gamma(1.0 + p * nu)
        g2 = gamma(1.0 + (p - 1.0) * nu)
        object.__setattr__(
            self, "c_pq", 1.0 / (2.0 ** (2.0 * (p - 1.0) * nu + 1.0) * gamma(1.0 - p * nu) * g1 * g2)
        )
        object.__setattr__(self, "c_pq_prime", 1.0 / (2.0 ** ((2.0 * p - 1.0) * nu) * g1 * g2))

    @property
    def k(self):
        """Power of the rescaled lambda variable, ``2(p-1)nu' + 1``."""
        return 2.0 * (self.p - 1.0) * self.nu_prime + 1.0


@dataclass(frozen=True)
class DeficitGrid:
    """(s, x) grid and finite-difference step for PDE residual sweeps."""

    s_values: tuple
    x_values: tuple
    finite_difference_step: float = 1e-3

    def __post_init__(self):
        s = np.asarray(self.s_values, dtype=float)
        x = np.asarray(self.x_values, dtype=float)
        if s.size == 0 or x.size == 0:
            raise DomainError("grid sequences must be nonempty")
        if np.any(np.diff(s) <= 0) or np.any(np.diff(x) <= 0):
            raise DomainError("grid sequences must be strictly increasing")
        if np.any(s < 0) or np.any(x <= 0):
            raise DomainError("need s >= 0 and x > 0")
        if not self.finite_difference_step > 0:
            raise DomainError("finite-difference step must be positive")
        object.__setattr__(self, "s_values", tuple(s.tolist()))
        object.__setattr__(self, "x_values", tuple(x.tolist()))


def _scalar_out(out, *args):
    return float(np.asarray(out).item()) if all(np.ndim(a) == 0 for a in args) else out


# ---------------------------------------------------------------------------
# phi and the erfc identity


def phi(v, quad=DEFAULT_QUAD):
    """``phi(v) = int_0^inf lam exp(-lam - v lam**2/2) dlam`` for v >= 0.

    Gauss-Legendre on ``[0, lam_max]``, ``lam_max = min(40, 10/sqrt(v))``;
    beyond it the integrand is below ``exp(-40)`` (resp. ``exp(-50)``).
    """
    v_in = v
    v = np.asarray(v, dtype=float)
    if np.any(~(v >= 0)):
        raise DomainError("phi requires v >= 0")
    x, w = gauss_legendre(quad.phi_nodes)
    with np.errstate(divide="ignore"):
        lam_max = np.minimum(40.0, 10.0 / np.sqrt(v))
    lam = lam_max[..., None] * x
    vals = lam * np.exp(-lam - 0.5 * v[..., None] * lam * lam)
    out = lam_max * (vals @ w)
    return _scalar_out(out, v_in)


def phi_closed_form(v):
    """phi through the scaled complementary error function.

    ``phi(v) = 1/v - 4 (2v)**(-3/2) exp(1/(2v)) int_{1/sqrt(2v)}^inf e^{-z^2} dz``.
    Loses relative accuracy to cancellation for v below about 1e-2.
    """
    v_in = v
    v = np.asarray(v, dtype=float)
    if np.any(~(v >= 0)):
        raise DomainError("phi requires v >= 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        w = 2.0 * v
        out = 1.0 / v - 4.0 * w**-1.5 * erfcx_upper(1.0 / np.sqrt(w))
    out = np.where(v == 0, 1.0, out)
    return _scalar_out(out, v_in)


def inrd_sides(v, quad=DEFAULT_QUAD):
    """Both sides of the eta/lambda identity and its erfc evaluation at v.

    Returns ``(lhs, rhs, closed)`` with
    ``lhs = 2/sqrt(pi) int sqrt(eta) e^{-eta} / (1 + v eta) deta``,
    ``rhs = int lam e^{-lam} exp(-v lam^2 / 4) dlam`` (exp-sinh, independent
    of :func:`phi`), ``closed = 2/v - 4 v^{-3/2} e^{1/v} erfc_upper(1/sqrt(v))``.
    """
    v = float(v)
    if not v > 0:
        raise DomainError("v must be positive")
    lhs = exp_sinh(lambda e: 2.0 / math.sqrt(math.pi) * np.sqrt(e) * np.exp(-e) / (1.0 + v * e), quad)
    rhs = exp_sinh(lambda lam: lam * np.exp(-lam - 0.25 * v * lam * lam), quad)
    closed = 2.0 / v - 4.0 * v**-1.5 * erfcx_upper(1.0 / math.sqrt(v))
    return float(lhs), float(rhs), float(closed)


def inrd_identity_gap(v, quad=DEFAULT_QUAD):
    """Absolute difference of the two quadrature sides of the identity."""
    lhs, rhs, _ = inrd_sides(v, quad)
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# F and U


def u_fun(params, z, quad=DEFAULT_QUAD, n_geo=None):
    """Profile ``U(z) = F(z, 1)`` for an array of z >= 0."""
    z_in = z
    z = np.atleast_1d(np.asarray(z, dtype=float))
    v, wt = kink_rule(z.ravel(), params.a, params.b, params.c, quad, n_geo)
    out = params.c_p * np.sum(wt * phi(params.c * v, quad), axis=1)
    return _scalar_out(out.reshape(z.shape), z_in)


def _f_at_zero_x(params, quad=None):
    """``C_p int_0^inf v**b phi(c v) dv``, i.e. F(s, 0) / s**a.

    In closed form: integrating over v first gives
    ``Gamma(b+1) (2 / (c lam**2))**(b+1)``, and then the lambda integral
    is ``Gamma(-2b)``. (The v-integrand decays only like ``v**(b-1)``, too
    slowly for truncated quadrature once p nears 2.)
    """
    b, c = params.b, params.c
    return params.c_p * c ** (-b - 1.0) * 2.0 ** (b + 1.0) * gamma(b + 1.0) * gamma(-2.0 * b)


def big_f(params, s, x, quad=DEFAULT_QUAD):
    """Improvement function F(s, x) of the Beckner family (s, x >= 0).

    Broadcasts over ``s`` and ``x``; all points share one quadrature panel
    layout, so finite differences of the result are smooth.
    """
    s_in, x_in = s, x
    s, x = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(x, dtype=float))
    if np.any(~(s >= 0)) or np.any(~(x >= 0)):
        raise DomainError("F requires s, x >= 0")
    out = np.zeros(s.shape)
    pos = x > 0
    if np.any(pos):
        z = s[pos] * x[pos] ** (2.0 - 2.0 * params.p)
        out[pos] = x[pos] ** params.p * u_fun(params, z, quad)
    if np.any(~pos):
        out[~pos] = s[~pos] ** params.a * _f_at_zero_x(params, quad)
    return _scalar_out(out, s_in, x_in)


def big_f_closed_form(p, s, x):
    """Closed-form F at the two exponents below the guard band.

    ``p = 4/3``: ``s**2 / 2``; ``p = 6/5``: ``x**(2/5) s**2 / 2 + s**3 / 50``.
    """
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    if abs(p - 4.0 / 3.0) < 1e-12:
        out = 0.5 * s**2 + 0.0 * x
    elif abs(p - 1.2) < 1e-12:
        out = 0.5 * x**0.4 * s**2 + s**3 / 50.0
    else:
        raise DomainError(f"no closed form for p={p}")
    return float(out) if out.ndim == 0 else out


def _kappa_u(params, v, quad):
    """``int lam**(nu+2) K_nu(lam) exp(-c v lam**2 / 2) dlam`` for an array v."""
    nu, c = params.nu, params.c
    v = np.asarray(v, dtype=float)

    def f(lam):
        base = (nu + 2.0) * np.log(lam) + log_bessel_k(nu, lam)
        expo = base.reshape((-1,) + (1,) * v.ndim) - 0.5 * c * v[None] * (lam**2).reshape(
            (-1,) + (1,) * v.ndim
        )
        return np.exp(expo)

    return exp_sinh(f, quad)


def u_alt_kernel(params, z, quad=DEFAULT_QUAD):
    """``C_p' int lam**(nu+2) K_nu(lam) exp(-c z lam**2/2) dlam``, i.e. U''(z)."""
    z_in = z
    out = params.c_p_prime * _kappa_u(params, np.atleast_1d(np.asarray(z, dtype=float)), quad)
    return _scalar_out(out, z_in)


def u_alt(params, z, quad=DEFAULT_QUAD):
    """U(z) from the Macdonald-function representation.

    The double integral over ``0 < v < u < z`` collapses to
    ``C_p' int_0^z (z - v) kappa(v) dv``.
    """
    z_in = z
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(~(z >= 0)):
        raise DomainError("z must be nonnegative")
    v, wt = kink_rule(z.ravel(), 1.0, 0.0, 0.5 * params.c, quad)
    out = params.c_p_prime * np.sum(wt * _kappa_u(params, v, quad), axis=1)
    return _scalar_out(out.reshape(z.shape), z_in)


def cpd_normalization(params):
    """``C_p' int lam**(nu+2) K_nu(lam) dlam`` from the closed moment; equals 1."""
    return params.c_p_prime * bessel_moment(params.nu + 2.0, params.nu)


def laplace_sides_u(params, alpha, quad=DEFAULT_QUAD):
    """Laplace transforms at ``alpha`` of the Bessel form of U and of U.

    Left: ``2**(nu-1) C_p' alpha**(nu-3/2) int e^{-alpha v} v**(nu-1) m(v) dv``
    with ``m(v) = int lam**2/(1 + c lam**2/2) exp(-lam**2/(4v)) dlam``,
    evaluated after ``lam = 2 sqrt(v) mu``.
    Right: ``C_p Gamma(3/2-nu) alpha**(nu-3/2) int e^{-alpha v} v**(nu+1/2) phi(c v) dv``.
    """
    alpha = float(alpha)
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    nu, c = params.nu, params.c

    def m_scaled(v):
        # m(v) / v**(3/2)
        def g(mu):
            mu2 = (mu * mu)[:, None]
            return mu2 * np.exp(-mu2) / (1.0 + 2.0 * c * v[None, :] * mu2)

        return 8.0 * exp_sinh(g, quad)

    def damped(inner):
        def g(v):
            out = np.zeros_like(v)
            live = alpha * v < 745.0
            out[live] = np.exp(-alpha * v[live]) * inner(v[live])
            return out

        return g

    # both v-integrals carry the weight v**(nu+1/2), nu + 1/2 in (-1, 0)
    scale = alpha ** (nu - 1.5)
    left = exp_sinh_power(damped(m_scaled), nu + 0.5, quad)
    right = exp_sinh_power(damped(lambda v: phi(c * v, quad)), nu + 0.5, quad)
    lhs = 2.0 ** (nu - 1.0) * params.c_p_prime * scale * float(left)
    rhs = params.c_p * gamma(1.5 - nu) * scale * float(right)
    return lhs, rhs


def laplace_gap_u(params, alpha, quad=DEFAULT_QUAD):
    """Relative gap between the two Laplace transforms of U."""
    lhs, rhs = laplace_sides_u(params, alpha, quad)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


def _check_step(s, x, h):
    if not h > 0 or not s > h or not x > 2.0 * h:
        raise DomainError(f"degenerate step: need h > 0, s > h, x > 2h (s={s}, x={x}, h={h})")


def _stencil(fun, s, x, h):
    """F_s and F_xx by central differences from one batched evaluation."""
    ss = np.array([s + h, s - h, s, s, s])
    xx = np.array([x, x, x + h, x, x - h])
    val = fun(ss, xx)
    d_s = (val[0] - val[1]) / (2.0 * h)
    d_xx = (val[2] - 2.0 * val[3] + val[4]) / (h * h)
    return d_s, d_xx


def pde_residual_f(params, s, x, h=1e-3, quad=DEFAULT_QUAD):
    """Central-difference residual of ``F_s x**(2p-4) + F_xx / 2 - x**(-p) s``."""
    s, x = float(s), float(x)
    _check_step(s, x, h)
    p = params.p
    d_s, d_xx = _stencil(lambda a, b: big_f(params, a, b, quad), s, x, h)
    return d_s * x ** (2.0 * p - 4.0) + 0.5 * d_xx - x**-p * s


def pde_residual_f_closed_form(p, s, x):
    """PDE residual of the closed-form F using exact derivatives (p = 4/3 or 6/5)."""
    s, x = float(s), float(x)
    if abs(p - 4.0 / 3.0) < 1e-12:
        d_s, d_xx = s, 0.0
    elif abs(p - 1.2) < 1e-12:
        d_s = x**0.4 * s + 3.0 * s * s / 50.0
        d_xx = 0.5 * 0.4 * (-0.6) * x**-1.6 * s * s
    else:
        raise DomainError(f"no closed form for p={p}")
    return d_s * x ** (2.0 * p - 4.0) + 0.5 * d_xx - x**-p * s


def f_asymptotic_constant(params):
    """Limit of ``F(s, x) / s**(p/(2(p-1)))`` as s grows."""
    p = params.p
    return (
        2.0 ** ((3.0 * p - 2.0) / (2.0 * (p - 1.0)))
        * (p - 1.0) ** ((2.0 - p) / (p - 1.0))
        * gamma(1.0 / (2.0 * (p - 1.0)))
        / (math.sqrt(math.pi) * p * (2.0 - p))
    )


def f_asymptotic_ratio(params, s, x, quad=DEFAULT_QUAD):
    """``F(s, x) / s**(p/(2(p-1)))``."""
    s = float(s)
    if not s > 0:
        raise DomainError("s must be positive")
    try:
        scale = s**params.a
    except OverflowError:
        scale = math.inf
    if not math.isfinite(scale):
        raise RangeError(f"s**a overflows at s={s}")
    return big_f(params, s, x, quad) / scale


# ---------------------------------------------------------------------------
# J and V


def _psi(params, v, quad):
    """``int_0^inf mu**k exp(-mu**2) / (1 + q**2 v mu**2 / 2) dmu`` for array v."""
    k, q = params.k, params.q
    v = np.asarray(v, dtype=float)

    def f(mu):
        mu = mu.reshape((-1,) + (1,) * v.ndim)
        return mu**k * np.exp(-mu * mu) / (1.0 + 0.5 * q * q * v[None] * mu * mu)

    return exp_sinh(f, quad)


def v_fun(params, z, quad=DEFAULT_QUAD, n_geo=None):
    """Profile ``V(z) = J(z, 1)`` for an array of z >= 0.

    After ``lam = 2 sqrt(v) mu`` the inner integral of J becomes
    ``2**(k+1) v**((k+1)/2) psi(v)``, leaving the weight
    ``(z - v)**(p/q) v**(-p/q)``.
    """
    z_in = z
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(~(z >= 0)):
        raise DomainError("z must be nonnegative")
    r = params.p / params.q
    v, wt = kink_rule(z.ravel(), r, -r, 0.5 * params.q**2, quad, n_geo)
    out = params.c_pq * 2.0 ** (params.k + 1.0) * np.sum(wt * _psi(params, v, quad), axis=1)
    return _scalar_out(out.reshape(z.shape), z_in)


def _j_at_zero_x(params, quad=None):
    """J(s, 0) / s**(p/q) in closed form.

    With ``r = p/q`` and ``beta = q**2/2``,
    ``int_0^inf v**(-r) / (1 + beta v mu**2) dv = (beta mu**2)**(r-1) pi / sin(pi r)``
    and the remaining mu-integral is ``Gamma(1/q) / 2``.
    """
    r = params.p / params.q
    beta = 0.5 * params.q**2
    return (
        params.c_pq * 2.0 ** (params.k + 1.0) * beta ** (r - 1.0)
        * math.pi / math.sin(math.pi * r) * 0.5 * gamma(1.0 / params.q)
    )


def j_fun(params, s, x, quad=DEFAULT_QUAD):
    """Improvement function J(s, x) of the Hoelder family (s, x >= 0)."""
    s_in, x_in = s, x
    s, x = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(x, dtype=float))
    if np.any(~(s >= 0)) or np.any(~(x >= 0)):
        raise DomainError("J requires s, x >= 0")
    out = np.zeros(s.shape)
    pos = x > 0
    if np.any(pos):
        z = s[pos] / x[pos] ** params.q
        out[pos] = x[pos] ** params.p * v_fun(params, z, quad)
    if np.any(~pos):
        out[~pos] = s[~pos] ** (params.p / params.q) * _j_at_zero_x(params, quad)
    return _scalar_out(out, s_in, x_in)


def _kappa_v(params, u, quad):
    nu = params.nu_prime
    e = (2.0 * params.p - 1.0) * nu + 1.0
    q2 = params.q**2
    u = np.asarray(u, dtype=float)

    def f(lam):
        shape = (-1,) + (1,) * u.ndim
        base = e * np.log(lam) + log_bessel_k(nu, lam)
        return np.exp(base.reshape(shape) - q2 / 8.0 * u[None] * (lam**2).reshape(shape))

    return exp_sinh(f, quad)


def v_alt(params, z, quad=DEFAULT_QUAD):
    """V(z) from the Macdonald-function representation."""
    z_in = z
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(~(z >= 0)):
        raise DomainError("z must be nonnegative")
    u, wt = kink_rule(z.ravel(), 0.0, 0.0, params.q**2 / 8.0, quad)
    out = params.c_pq_prime * np.sum(wt * _kappa_v(params, u, quad), axis=1)
    return _scalar_out(out.reshape(z.shape), z_in)


def cpnubdd_normalization(params):
    """``C'_{p,nu'} int lam**((2p-1)nu'+1) K_nu'(lam) dlam``; equals 1."""
    nu = params.nu_prime
    return params.c_pq_prime * bessel_moment((2.0 * params.p - 1.0) * nu + 1.0, nu)


def j_upper_bound(params, s):
    """Upper bound of J(s, x) uniform in x."""
    s_in = s
    s = np.asarray(s, dtype=float)
    if np.any(~(s >= 0)):
        raise DomainError("s must be nonnegative")
    p, q = params.p, params.q
    const = 2.0 * gamma(1.0 + 1.0 / q) / (p * gamma(1.0 + 1.0 / q - p / q)) * (0.5 * q * q) ** (p / q)
    return _scalar_out(const * s ** (p / q), s_in)


def pde_residual_j(params, s, x, h=1e-3, quad=DEFAULT_QUAD):
    """Central-difference residual of ``J_s x**(q-2) + J_xx / 2 - x**(p-2)``."""
    s, x = float(s), float(x)
    _check_step(s, x, h)
    d_s, d_xx = _stencil(lambda a, b: j_fun(params, a, b, quad), s, x, h)
    return d_s * x ** (params.q - 2.0) + 0.5 * d_xx - x ** (params.p - 2.0)


def hoelder_constant(p, q):
    """``Gamma(1+1/q) / Gamma(1+1/q-p/q) q**(p/q)``, for 0 < p < q."""
    p, q = float(p), float(q)
    if not (0 < p < q):
        raise DomainError(f"need 0 < p < q, got p={p}, q={q}")
    return math.exp(
        math.lgamma(1.0 + 1.0 / q) - math.lgamma(1.0 + 1.0 / q - p / q) + (p / q) * math.log(q)
    )


# ---------------------------------------------------------------------------
# Bessel heat kernel


def _g_kernel(order, s, y, lam):
    return np.exp(-order * np.log(y) + log_bessel_k(order, lam * y) - 0.5 * lam * lam * s)


def heat_kernel_pde_residual(order, s, y, lam, h=1e-3):
    """Residual of ``g_s + g_yy/2 + (2 nu + 1)/(2y) g_y`` for
    ``g(s, y) = y**(-nu) K_nu(lam y) exp(-lam**2 s / 2)``.

    Returns ``(residual, g(s, y))``.
    """
    s, y, lam = float(s), float(y), float(lam)
    if min(s, y, lam) <= 0:
        raise DomainError("s, y, lambda must be positive")
    if not (h > 0 and y > 2.0 * h and s > h):
        raise DomainError("degenerate step")
    ss = np.array([s + h, s - h, s, s, s])
    yy = np.array([y, y, y + h, y, y - h])
    g = _g_kernel(order, ss, yy, lam)
    g_s = (g[0] - g[1]) / (2.0 * h)
    g_y = (g[2] - g[4]) / (2.0 * h)
    g_yy = (g[2] - 2.0 * g[3] + g[4]) / (h * h)
    res = g_s + 0.5 * g_yy + (2.0 * order + 1.0) / (2.0 * y) * g_y
    return float(res), float(g[3])


def bessel_ode_residual(order, z, h=1e-3):
    """Relative residual of ``(d^2 + (2nu+1)/z d) w = w`` for ``w = z**(-nu) K_nu(z)``."""
    z = float(z)
    if not (h > 0 and z > 2.0 * h):
        raise DomainError("degenerate step")
    zz = np.array([z + h, z, z - h])
    w = np.exp(-order * np.log(zz) + log_bessel_k(order, zz))
    d1 = (w[0] - w[2]) / (2.0 * h)
    d2 = (w[0] - 2.0 * w[1] + w[2]) / (h * h)
    return float(abs(d2 + (2.0 * order + 1.0) / z * d1 - w[1]) / w[1])


def bessel_derivative_gap(mu, z, h=1e-3):
    """Relative gap in ``d/dz (z**-mu K_mu) = -z**-mu K_{mu+1}``."""
    z = float(z)
    if not (h > 0 and z > 2.0 * h):
        raise DomainError("degenerate step")
    zz = np.array([z + h, z - h])
    w = np.exp(-mu * np.log(zz) + log_bessel_k(mu, zz))
    lhs = (w[0] - w[1]) / (2.0 * h)
    rhs = -math.exp(-mu * math.log(z) + log_bessel_k(mu + 1.0, z))
    return abs(lhs - rhs) / abs(rhs)


# ---------------------------------------------------------------------------
# tabulated profiles for path-wise evaluation


class ProfileTable:
    """Piecewise Chebyshev interpolant of a profile ``P(z)`` on ``[0, z_max]``.

    Tabulates ``P(z) / z**power`` (``power = 2`` for U, ``1`` for V; both
    quotients are smooth at 0) on the panels ``[0, z0]``,
    ``[z0, 2 z0]``, ``[2 z0, 4 z0]``, ... covering ``z_max``. Construction
    evaluates the profile in a single batch, then checks the interpolant
    against direct evaluation at the panel midpoints between nodes and
    raises :class:`NumericalError` if the relative error exceeds
    ``check_tol``.
    """

    def __init__(self, profile, z_max, power, z0=1.0, degree=32, check_tol=1e-10):
        self.z_max = float(z_max)
        self.power = power
        edges = [0.0, z0]
        while edges[-1] < self.z_max:
            edges.append(2.0 * edges[-1])
        self.edges = np.array(edges)
        npan = len(edges) - 1
        k = np.arange(degree + 1)
        nodes = np.cos(np.pi * (k + 0.5) / (degree + 1))
        mids = np.cos(np.pi * (k[:-1] + 1.0) / (degree + 1))
        lo, hi = self.edges[:-1, None], self.edges[1:, None]
        zn = lo + (hi - lo) * 0.5 * (nodes[None, :] + 1.0)
        zm = lo + (hi - lo) * 0.5 * (mids[None, :] + 1.0)
        vals = profile(np.concatenate([zn.ravel(), zm.ravel()]))
        fn = vals[: zn.size].reshape(zn.shape) / zn**power
        self.coef = np.array([C.chebfit(nodes, fn[i], degree) for i in range(npan)])
        direct = vals[zn.size :]
        approx = self(zm.ravel())
        err = np.max(np.abs(approx - direct) / np.abs(direct))
        self.max_rel_error = float(err)
        if not err <= check_tol:
            raise NumericalError(
                f"profile table error {err:.2e} exceeds {check_tol:.0e}", nodes=fn.size
            )

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if np.any(z < 0) or np.any(z > self.edges[-1]):
            raise DomainError("argument outside the tabulated range")
        flat = z.ravel()
        idx = np.clip(np.searchsorted(self.edges, flat, side="right") - 1, 0, len(self.coef) - 1)
        lo = self.edges[idx]
        hi = self.edges[idx + 1]
        t = 2.0 * (flat - lo) / (hi - lo) - 1.0
        out = np.empty_like(flat)
        for i in np.unique(idx):
            sel = idx == i
            out[sel] = C.chebval(t[sel], self.coef[i])
        return (out * flat**self.power).reshape(z.shape)


def u_table(params, z_max, quad=DEFAULT_QUAD, check_tol=1e-10):
    """:class:`ProfileTable` of U on ``[0, z_max]``."""
    return ProfileTable(lambda z: u_fun(params, z, quad), z_max, 2, z0=0.5 / params.c, check_tol=check_tol)


def v_table(params, z_max, quad=DEFAULT_QUAD, check_tol=1e-10):
    """:class:`ProfileTable` of V on ``[0, z_max]``."""
    return ProfileTable(lambda z: v_fun(params, z, quad), z_max, 1, z0=2.0 / params.q**2, check_tol=check_tol)
