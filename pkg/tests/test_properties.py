"""Property-based checks; the acceptance suite replays these and counts the examples."""

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from rislink.channel import ChannelParams, laguerre_params, log_snr_cdf
from rislink.metrics import log_outage_probability
from rislink.montecarlo import McConfig, simulate_snr_samples
from rislink.specfun import digamma, gen_hypergeom_pfq, ln_gamma, reg_lower_inc_gamma

EXAMPLES = {"count": 0}


def _tick():
    EXAMPLES["count"] += 1


shapes = st.floats(0.5, 10.0)
omegas = st.floats(0.1, 5.0)
elements = st.integers(1, 64)
pos_log = st.floats(-4.0, 5.0)  # log10 of a positive quantity


@settings(max_examples=1200)
@given(st.floats(1e-6, 1.0))
def test_2f1_log_identity(y):
    _tick()
    assert math.isclose(y * gen_hypergeom_pfq([1, 1], [2], -y), math.log1p(y), rel_tol=1e-12)


@settings(max_examples=1200)
@given(st.floats(1e-2, 1e3))
def test_digamma_recurrence(x):
    _tick()
    lhs, rhs = digamma(x + 1), digamma(x) + 1 / x
    assert math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-12)


@settings(max_examples=800)
@given(st.floats(1e-3, 1e3))
def test_ln_gamma_recurrence(x):
    _tick()
    assert math.isclose(ln_gamma(x + 1), ln_gamma(x) + math.log(x), rel_tol=1e-12, abs_tol=1e-12)


@settings(max_examples=1500)
@given(st.floats(0.05, 500.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_inc_gamma_monotone_in_x(s, u1, u2):
    _tick()
    hi = 2 * s + 50
    x1, x2 = sorted((u1 * hi, u2 * hi))
    assert reg_lower_inc_gamma(s, x1) <= reg_lower_inc_gamma(s, x2) * (1 + 1e-13)


@settings(max_examples=1000)
@given(st.floats(0.05, 500.0), st.floats(0.0, 3.0))
def test_inc_gamma_normalization(s, ratio):
    _tick()
    x = s * ratio
    p = reg_lower_inc_gamma(s, x)
    assert 0.0 <= p <= 1.0
    assert abs(p + special.gammaincc(s, x) - 1.0) <= 1e-10
    assert reg_lower_inc_gamma(s, 0.0) == 0.0


@settings(max_examples=1500)
@given(shapes, shapes, omegas, omegas, elements, pos_log, pos_log, st.floats(-3.0, 3.0))
def test_cdf_scale_invariance(m1, m2, o1, o2, n, lg, lgb, lk):
    _tick()
    lp = laguerre_params(ChannelParams(m1, m2, o1, o2, n))
    g, gb, k = 10.0 ** lg, 10.0 ** lgb, 10.0 ** lk
    a = log_snr_cdf(g, gb, lp)
    b = log_snr_cdf(k * g, k * gb, lp)
    # the ratio g/gb is reproduced to a few ulps; P(s, x) amplifies that by ~s
    assert math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-9 * (lp.a + 2))


@settings(max_examples=1000)
@given(shapes, shapes, omegas, omegas, elements, pos_log, pos_log, st.floats(1e-3, 3.0))
def test_pout_decreasing_in_snr(m1, m2, o1, o2, n, lgo, lgb, step):
    _tick()
    lp = laguerre_params(ChannelParams(m1, m2, o1, o2, n))
    go = 10.0 ** lgo
    assert log_outage_probability(go, 10.0 ** (lgb + step), lp) <= log_outage_probability(
        go, 10.0 ** lgb, lp)


@settings(max_examples=1000)
@given(shapes, shapes, omegas, omegas, elements, pos_log, pos_log, st.floats(1e-3, 3.0))
def test_pout_increasing_in_threshold(m1, m2, o1, o2, n, lgo, lgb, step):
    _tick()
    lp = laguerre_params(ChannelParams(m1, m2, o1, o2, n))
    gb = 10.0 ** lgb
    assert log_outage_probability(10.0 ** (lgo + step), gb, lp) >= log_outage_probability(
        10.0 ** lgo, gb, lp)


@settings(max_examples=1000)
@given(shapes, shapes, omegas, omegas, st.integers(1, 63), st.floats(-4.0, 2.0))
def test_pout_decreasing_in_elements(m1, m2, o1, o2, n, lratio):
    _tick()
    p = ChannelParams(m1, m2, o1, o2, n)
    go, gb = 10.0 ** lratio, 1.0
    lo = log_outage_probability(go, gb, laguerre_params(p))
    hi = log_outage_probability(go, gb, laguerre_params(p.with_n(n + 1)))
    if lo < 0:
        assert hi < lo
    else:
        assert hi <= lo


@settings(max_examples=200)
@given(st.integers(1, 600), st.integers(1, 200), st.integers(0, 2 ** 64 - 1),
       st.integers(2, 4), shapes, elements)
def test_mc_determinism_across_workers(trials, chunk, seed, workers, m, n):
    _tick()
    p = ChannelParams.symmetric(m, 1.0, n)
    cfg = McConfig(trials, seed, chunk)
    a = simulate_snr_samples(p, 1.0, cfg, workers=1)
    b = simulate_snr_samples(p, 1.0, cfg, workers=workers)
    assert np.array_equal(a, b)


PROPERTY_TESTS = [
    test_2f1_log_identity,
    test_digamma_recurrence,
    test_ln_gamma_recurrence,
    test_inc_gamma_monotone_in_x,
    test_inc_gamma_normalization,
    test_cdf_scale_invariance,
    test_pout_decreasing_in_snr,
    test_pout_increasing_in_threshold,
    test_pout_decreasing_in_elements,
    test_mc_determinism_across_workers,
]
