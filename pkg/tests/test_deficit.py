import math

import mpmath
import numpy as np
import pytest
from scipy import integrate
from scipy import special as sc

from becknerlab import deficit as dfc
from becknerlab.errors import DomainError, RangeError

BECKNER = (1.4, 1.5, 1.7, 1.9)
HOELDER = ((1.0, 2.0), (1.0, 1.5), (0.5, 1.0), (2.0, 3.0))


@pytest.fixture(scope="module", params=BECKNER)
def bparams(request):
    return dfc.BecknerParams(request.param)


def test_params_invariants(bparams):
    assert -1.5 < bparams.nu < -0.5
    assert abs(bparams.c_p - bparams.c_p_sine()) <= 1e-12 * bparams.c_p
    assert bparams.nu + 2.0 - abs(bparams.nu) > -1.0


def test_guard_band():
    for p in (1.2, 4.0 / 3.0, 2.0, 2.5):
        with pytest.raises(DomainError):
            dfc.BecknerParams(p)
    with pytest.raises(DomainError):
        dfc.HoelderParams(2.0, 1.0)


def test_phi_values():
    assert abs(dfc.phi(0.0) - 1.0) <= 1e-13
    v = np.array([0.01, 0.3, 1.0, 7.0, 300.0])
    assert np.allclose(dfc.phi(v), dfc.phi_closed_form(v), rtol=1e-12, atol=0)
    assert dfc.phi(10.0) < dfc.phi(1.0)
    with pytest.raises(DomainError):
        dfc.phi(-1.0)


@pytest.mark.parametrize("v", [0.1, 0.5, 1.0, 2.0, 10.0])
def test_inrd(v):
    lhs, rhs, closed = dfc.inrd_sides(v)
    assert abs(lhs - rhs) <= 1e-10 * max(lhs, rhs)
    assert abs(rhs - closed) <= 1e-10 * rhs
    assert dfc.inrd_identity_gap(v) <= 1e-10 * max(lhs, rhs)


def test_big_f_zero_s(bparams):
    assert np.all(dfc.big_f(bparams, 0.0, np.array([0.0, 0.5, 3.0])) == 0.0)


def test_big_f_dense_oracle():
    # F(1, 1) at p = 3/2 straight from the defining double integral over
    # (v, lam), with v = w**2 removing the v**(-1/2) endpoint singularity
    par = dfc.BecknerParams(1.5)
    mpmath.mp.dps = 20

    def g(w, lam):
        return 2 * (1 - w * w) ** 1.5 * lam * mpmath.exp(-lam - w * w * lam * lam / 8)

    ref = par.c_p * float(mpmath.quad(g, [0, 1], [0, 1, 10, mpmath.inf]))
    assert abs(dfc.big_f(par, 1.0, 1.0) - ref) <= 1e-10 * ref


def test_big_f_scaling():
    par = dfc.BecknerParams(1.6)
    s, x = 2.0, 0.5
    u = dfc.big_f(par, x ** (2 - 2 * 1.6) * s, 1.0)
    assert abs(dfc.big_f(par, s, x) - x**1.6 * u) <= 1e-13 * u


def test_big_f_monotone_positive(bparams):
    s = np.array([0.1, 0.5, 1.0, 2.0, 5.0])
    x = np.array([0.0, 0.25, 0.5, 1.0, 2.0, 4.0])
    grid = dfc.big_f(bparams, s[:, None], x[None, :])
    assert np.all(grid > 0)
    assert np.all(np.diff(grid, axis=0) >= -1e-9)
    assert np.all(np.diff(grid, axis=1) <= 1e-9)


def test_big_f_at_zero_x_continuity(bparams):
    # F(s, 0) in closed form is the limit of F(s, x); the gap closes like x**(2-p)
    at = dfc.big_f(bparams, 1.0, 0.0)
    xs = np.array([1e-2, 1e-4, 1e-6, 1e-8])
    gap = np.abs(dfc.big_f(bparams, 1.0, xs) - at) / at
    assert np.all(np.diff(gap) < 0)
    scaled = gap / xs ** (2.0 - bparams.p)
    assert abs(scaled[-1] / scaled[-2] - 1.0) <= 0.12


def test_big_f_domain(bparams):
    with pytest.raises(DomainError):
        dfc.big_f(bparams, -1.0, 1.0)


def test_closed_forms():
    s, x = 1.7, 0.6
    assert dfc.big_f_closed_form(4.0 / 3.0, s, x) == 0.5 * s * s
    assert abs(dfc.big_f_closed_form(1.2, s, x) - (0.5 * x**0.4 * s * s + s**3 / 50)) <= 1e-15
    with pytest.raises(DomainError):
        dfc.big_f_closed_form(1.5, s, x)


@pytest.mark.parametrize("z", [0.1, 1.0, 5.0])
def test_u_alt_matches(bparams, z):
    alt = dfc.u_alt(bparams, z)
    assert abs(dfc.big_f(bparams, z, 1.0) - alt) <= 1e-6 * max(1.0, alt)


def test_u_alt_zero(bparams):
    assert dfc.u_alt(bparams, 0.0) == 0.0


def test_u_alt_second_derivative():
    par = dfc.BecknerParams(1.5)
    nu, c = par.nu, par.c
    h = 1e-3
    u = dfc.u_alt(par, np.array([1.0 - h, 1.0, 1.0 + h]))
    fd = (u[0] - 2 * u[1] + u[2]) / h**2
    ref, _ = integrate.quad(lambda t: t ** (nu + 2) * sc.kv(nu, t) * math.exp(-0.5 * c * t * t), 0, np.inf,
                            epsabs=0, epsrel=1e-12, limit=200)
    ref *= par.c_p_prime
    assert abs(fd - ref) <= 1e-5 * ref


@pytest.mark.parametrize("p", [1.35, 1.5, 1.7, 1.9])
def test_cpd_normalization(p):
    assert abs(dfc.cpd_normalization(dfc.BecknerParams(p)) - 1.0) <= 1e-10


@pytest.mark.parametrize("pq", HOELDER)
def test_cpnubdd_normalization(pq):
    assert abs(dfc.cpnubdd_normalization(dfc.HoelderParams(*pq)) - 1.0) <= 1e-10


@pytest.mark.parametrize("p,alpha", [(1.5, 1.0), (1.7, 0.5), (1.4, 5.0)])
def test_laplace_gap(p, alpha):
    assert dfc.laplace_gap_u(dfc.BecknerParams(p), alpha) <= 1e-8
    with pytest.raises(DomainError):
        dfc.laplace_gap_u(dfc.BecknerParams(p), 0.0)


def test_pde_residual_f_second_order():
    par = dfc.BecknerParams(1.5)
    r1 = dfc.pde_residual_f(par, 1.0, 1.0, 1e-3)
    r2 = dfc.pde_residual_f(par, 1.0, 1.0, 5e-4)
    assert abs(r1) <= 1e-4
    assert abs(r1) >= 3.5 * abs(r2)


def test_pde_closed_form_residuals():
    for p in (4.0 / 3.0, 1.2):
        for s in (0.3, 1.0, 4.0):
            for x in (0.2, 1.0, 3.0):
                assert abs(dfc.pde_residual_f_closed_form(p, s, x)) <= 1e-12


def test_pde_degenerate_step():
    par = dfc.BecknerParams(1.5)
    with pytest.raises(DomainError):
        dfc.pde_residual_f(par, 1.0, 1e-3, 1e-3)
    with pytest.raises(DomainError):
        dfc.pde_residual_j(dfc.HoelderParams(1, 2), 1e-4, 1.0, 1e-3)


def test_asymptotic_constant_hand_value():
    par = dfc.BecknerParams(1.5)
    assert abs(dfc.f_asymptotic_constant(par) - 2**1.5 * 4 / (3 * math.sqrt(math.pi))) <= 1e-14


def test_asymptotic_approach():
    par = dfc.BecknerParams(1.5)
    const = dfc.f_asymptotic_constant(par)
    e4 = abs(dfc.f_asymptotic_ratio(par, 1e4, 1.0) / const - 1)
    e6 = abs(dfc.f_asymptotic_ratio(par, 1e6, 1.0) / const - 1)
    assert e6 < e4
    gap = abs(dfc.f_asymptotic_ratio(par, 1e6, 0.0) - dfc.f_asymptotic_ratio(par, 1e6, 2.0)) / const
    assert gap <= 5e-2


def test_asymptotic_overflow():
    par = dfc.BecknerParams(1.9)
    with pytest.raises(RangeError):
        dfc.f_asymptotic_ratio(par, 1e300, 1.0)


def test_j_dense_oracle():
    par = dfc.HoelderParams(1.0, 2.0)
    mpmath.mp.dps = 20

    # v = w**2: (1 - w**2)**(1/2) w**(-3) 2w  times  int lam/(1+lam**2/2) exp(-lam**2/(4 w**2))
    def g(w, lam):
        return 2 * mpmath.sqrt(1 - w * w) / (w * w) * lam / (1 + lam * lam / 2) * mpmath.exp(-lam * lam / (4 * w * w))

    ref = par.c_pq * float(mpmath.quad(g, [0, 0.5, 1], [0, 1, 4, mpmath.inf]))
    assert abs(dfc.j_fun(par, 1.0, 1.0) - ref) <= 1e-9 * ref


def test_j_scaling_and_zero():
    par = dfc.HoelderParams(1.0, 2.0)
    s, x = 3.0, 0.7
    v = dfc.j_fun(par, s / x**2, 1.0)
    assert abs(dfc.j_fun(par, s, x) - x * v) <= 1e-13 * v
    assert dfc.j_fun(par, 0.0, 0.4) == 0.0
    assert dfc.v_alt(par, 0.0) == 0.0


@pytest.mark.parametrize("pq", HOELDER)
@pytest.mark.parametrize("z", [0.1, 0.5, 1.0, 5.0])
def test_v_alt_matches(pq, z):
    par = dfc.HoelderParams(*pq)
    alt = dfc.v_alt(par, z)
    assert abs(dfc.j_fun(par, z, 1.0) - alt) <= 1e-6 * max(1.0, alt)


@pytest.mark.parametrize("pq", [(1.0, 2.0), (1.0, 1.5), (0.5, 1.0)])
def test_v_below_identity(pq):
    z = np.geomspace(1e-3, 100.0, 40)
    assert np.all(dfc.v_fun(dfc.HoelderParams(*pq), z) <= z)


def test_j_bounds():
    par = dfc.HoelderParams(1.0, 1.5)
    rng = np.random.default_rng(5)
    s = rng.uniform(0.0, 10.0, 50) + 1e-9
    x = rng.uniform(0.0, 5.0, 50) + 1e-9
    j = dfc.j_fun(par, s, x)
    assert np.all(j <= dfc.j_upper_bound(par, s))
    assert np.all(j <= x ** (1.0 - 1.5) * s * (1 + 1e-12))
    assert abs(dfc.j_upper_bound(dfc.HoelderParams(1, 2), 1.0) - math.sqrt(2 * math.pi)) <= 1e-14
    assert dfc.j_upper_bound(par, 0.0) == 0.0


def test_j_initial_condition():
    par = dfc.HoelderParams(1.0, 2.0)
    ratios = [dfc.j_fun(par, s, 1.0) / s for s in (1e-8, 1e-6, 1e-4)]
    assert max(ratios) <= 1.0


def test_pde_residual_j():
    par = dfc.HoelderParams(1.0, 2.0)
    assert abs(dfc.pde_residual_j(par, 1.0, 1.0, 1e-3)) <= 1e-4
    par = dfc.HoelderParams(1.0, 1.5)
    r1 = dfc.pde_residual_j(par, 2.0, 0.8, 1e-3)
    r2 = dfc.pde_residual_j(par, 2.0, 0.8, 5e-4)
    assert abs(r1) >= 3.5 * abs(r2)


def test_hoelder_constant():
    assert abs(dfc.hoelder_constant(1, 2) - math.sqrt(math.pi / 2)) <= 1e-12
    assert abs(dfc.hoelder_constant(1, 1 + 1e-6) - 1) <= 1e-4
    assert abs(dfc.hoelder_constant(1, 1e6) - 1) <= 1e-3
    with pytest.raises(DomainError):
        dfc.hoelder_constant(2, 2)


def test_heat_kernel_and_ode():
    res, g = dfc.heat_kernel_pde_residual(-1.0, 1.0, 1.0, 1.0, 1e-3)
    assert abs(res) <= 1e-5 * g
    assert dfc.bessel_ode_residual(-0.8, 2.0) <= 1e-6
    assert dfc.bessel_derivative_gap(-1.0, 1.5) <= 1e-6
    with pytest.raises(DomainError):
        dfc.heat_kernel_pde_residual(-1.0, 1.0, 1.0, 0.0)


def test_profile_tables():
    par = dfc.BecknerParams(1.5)
    tab = dfc.u_table(par, 40.0)
    z = np.linspace(0.0, 40.0, 37)[1:]
    assert np.allclose(tab(z), dfc.u_fun(par, z), rtol=1e-10, atol=0)
    hp = dfc.HoelderParams(1.0, 1.5)
    tab = dfc.v_table(hp, 10.0)
    z = np.linspace(0.0, 10.0, 23)[1:]
    assert np.allclose(tab(z), dfc.v_fun(hp, z), rtol=1e-10, atol=0)
    with pytest.raises(DomainError):
        tab(np.array([1e6]))
