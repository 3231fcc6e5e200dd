import numpy as np
import pytest

from becknerlab import _accel
from becknerlab import stochastic as st
from becknerlab.deficit import BecknerParams, HoelderParams
from becknerlab.errors import ConfigurationError
from becknerlab.functionals import NodalData, TestFunction

SEED = 20240917
ONE_BUMP = TestFunction.from_bumps(1, 0.5, [(2.0, [0.7], 0.9)])
TWO_D = TestFunction.from_bumps(2, 0.8, [(1.5, [0.4, -0.3], 0.7), (0.6, [-1.0, 1.0], 1.4)])
CONSTANT = TestFunction(1, 2.0)


def _cfg(f, paths=8000, steps=128, **kw):
    return st.McConfig(path_count=paths, time_steps=steps, seed=SEED, dimension=f.dimension, **kw)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        st.McConfig(time_steps=100)
    with pytest.raises(ConfigurationError):
        st.McConfig(seed=-1)
    with pytest.raises(ConfigurationError):
        st.McConfig(backend="gpu")
    assert st.McConfig().times()[[0, -1]].tolist() == [0.0, 1.0]


def test_dimension_mismatch():
    with pytest.raises(ConfigurationError):
        st.simulate(ONE_BUMP, st.McConfig(path_count=100, time_steps=8, dimension=2))


def test_small_runs_are_not_acceptance_grade():
    cfg = st.McConfig(path_count=500, time_steps=8)
    with pytest.raises(ConfigurationError):
        st.verify_ito_identity(ONE_BUMP, cfg, 2.0)


def test_worker_and_block_invariance():
    a = st.simulate(TWO_D, _cfg(TWO_D, 3000, 64))
    b = st.simulate(TWO_D, _cfg(TWO_D, 3000, 64, workers=3, block_size=257))
    for name in ("plain", "cumulative", "nested", "snap_m", "snap_theta", "snap_a", "snap_cum", "snap_w"):
        assert np.array_equal(getattr(a.out, name), getattr(b.out, name)), name


@pytest.mark.skipif(not _accel.NUMBA_AVAILABLE, reason="numba not installed")
def test_backends_give_same_ensemble():
    a = st.simulate(TWO_D, _cfg(TWO_D, 500, 32, backend="numba"))
    b = st.simulate(TWO_D, _cfg(TWO_D, 500, 32, backend="numpy"))
    assert np.allclose(a.out.nested, b.out.nested, rtol=1e-12, atol=0)
    assert np.allclose(a.out.snap_a, b.out.snap_a, rtol=1e-12, atol=1e-15)


def test_path_values_are_exact():
    cfg = _cfg(TWO_D, 1000, 64)
    ens = st.simulate(TWO_D, cfg)
    w1 = np.sum(ens.increments(np.arange(20)), axis=1)
    assert np.allclose(w1, ens.w(1.0)[:20], rtol=0, atol=1e-12)
    for t in (0.25, 0.75):
        g = TWO_D.heat_evolve(1.0 - t)
        w = ens.w(t)[:50]
        assert np.allclose(ens.m(t)[:50], g(w), rtol=1e-14, atol=0)
        assert np.allclose(ens.theta(t)[:50], g.gradient(w), rtol=1e-12, atol=1e-15)
        assert np.allclose(ens.a(t)[:50], g.hessian(w), rtol=1e-12, atol=1e-15)
    assert np.all(ens.out.snap_m >= TWO_D.constant)


def test_brownian_marginals():
    ens = st.simulate(TWO_D, _cfg(TWO_D, 20000, 16))
    for t in (0.25, 0.5, 1.0):
        w = ens.w(t)
        se = np.sqrt(t / w.shape[0])
        assert np.all(np.abs(w.mean(axis=0)) < 4 * se)
        assert np.all(np.abs(w.var(axis=0) / t - 1.0) < 4 * np.sqrt(2.0 / w.shape[0]))


def test_constant_function_degenerates():
    cfg = _cfg(CONSTANT, 1000, 16)
    reps = st.mc_suite(CONSTANT, cfg)
    assert all(r.passed for r in reps)
    assert st.verify_beckner_identity(CONSTANT, cfg, BecknerParams(1.5)).lhs == 0.0
    assert st.verify_hoelder_identity(CONSTANT, cfg, HoelderParams(1.0, 2.0)).rhs == 0.0


def test_t0_values_exact():
    nd = NodalData(TWO_D)
    reps = st.verify_martingales(TWO_D, _cfg(TWO_D, 1000, 16), quad_data=nd)
    exact = [r for r in reps if r.name.startswith("t0_")]
    assert len(exact) == 1 + 2 + 4 + 1
    assert all(r.passed and r.tolerance <= 1e-10 * max(1.0, abs(r.rhs)) for r in exact)


@pytest.mark.parametrize("f", [ONE_BUMP, TWO_D], ids=["1d", "2d"])
def test_suite_passes_at_moderate_scale(f):
    reps = st.mc_suite(f, _cfg(f, 20000, 128))
    failed = [(r.name, r.lhs, r.rhs, r.tolerance) for r in reps if not r.passed]
    assert not failed
    assert all(r.kind != "mc" or r.se > 0 for r in reps if "t0_" not in r.name)


def test_ito_identity_matches_quadrature():
    cfg = _cfg(ONE_BUMP, 20000, 128)
    nd = NodalData(ONE_BUMP)
    r = st.verify_ito_vs_quadrature(ONE_BUMP, cfg, 2.0, quad_data=nd)
    assert r.rhs == pytest.approx(nd.i_p(2.0), rel=1e-14)
    assert r.passed


def test_closed_form_h_recursion_coefficients():
    # at p = 4/3 the second term of the recursion vanishes; at p = 6/5 the
    # n = 1 coefficient is 1/50 of the cube moment after chaining
    cfg = _cfg(ONE_BUMP, 5000, 64)
    assert st.verify_h_recursion(ONE_BUMP, cfg, 4.0 / 3.0, 1).inputs["coef"] == pytest.approx(0.0, abs=1e-15)
    assert st.verify_h_chain(ONE_BUMP, cfg, 1.2).passed


def test_time_steps_change_less_than_one_se():
    # each time-integral estimate moves by < 1 SE between N and N/2
    ens = st.simulate(TWO_D, _cfg(TWO_D, 20000, 256))
    o = ens.out
    for arr in (o.plain, o.cumulative, o.nested):
        fine, coarse = arr[..., 0], arr[..., 1]
        se = fine.std(axis=0, ddof=1) / np.sqrt(fine.shape[0])
        assert np.all(np.abs(fine.mean(axis=0) - coarse.mean(axis=0)) < se)


def test_random_pair_range():
    for seed in range(20):
        p, q = st.random_pair(seed)
        assert 0.5 <= p <= 2.0 and p + 0.25 <= q <= p + 1.5
    assert st.random_pair(3) == st.random_pair(3)


def test_seed_changes_ensemble():
    a = st.simulate(ONE_BUMP, _cfg(ONE_BUMP, 1000, 16))
    b = st.simulate(ONE_BUMP, st.McConfig(path_count=1000, time_steps=16, seed=SEED + 1))
    assert not np.array_equal(a.out.snap_w, b.out.snap_w)
