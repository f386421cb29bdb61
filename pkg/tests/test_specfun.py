import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from rislink.errors import ConvergenceError, DomainError, PoleError
from rislink.specfun import (
    SeriesControl,
    digamma,
    gen_hypergeom_pfq,
    ln_gamma,
    log_reg_lower_inc_gamma,
    pfq_with_peak,
    q_function,
    reg_lower_inc_gamma,
)

EULER = 0.5772156649015329


# ln_gamma

def test_ln_gamma_one_is_zero():
    assert ln_gamma(1.0) == 0.0


def test_ln_gamma_half():
    assert ln_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-14)


def test_ln_gamma_recurrence_from_fractional_base():
    base = 1.0498
    expected = ln_gamma(base) + sum(math.log(base + k) for k in range(6))
    assert ln_gamma(7.0498) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("x", np.geomspace(1e-3, 1e4, 60))
def test_ln_gamma_against_mpmath(x):
    ref = float(mpmath.loggamma(mpmath.mpf(x)))
    assert abs(ln_gamma(x) - ref) <= 1e-12 * max(1.0, abs(ref))


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5, math.inf, math.nan])
def test_ln_gamma_domain(x):
    with pytest.raises(DomainError):
        ln_gamma(x)


# regularized lower incomplete gamma

def test_inc_gamma_at_zero():
    assert reg_lower_inc_gamma(3.3, 0.0) == 0.0


def test_inc_gamma_unit_shape():
    assert reg_lower_inc_gamma(1.0, 1.0) == pytest.approx(1 - math.exp(-1), rel=1e-14)


def test_inc_gamma_against_quadrature():
    s, x = 7.0498, 3.0
    val, _ = integrate.quad(lambda t: t ** (s - 1) * math.exp(-t), 0, x, epsabs=0, epsrel=1e-13)
    assert reg_lower_inc_gamma(s, x) == pytest.approx(val / math.gamma(s), rel=1e-11)


@pytest.mark.parametrize("s", [0.3, 1.0, 2.5, 7.0498, 40.0, 150.0, 500.0])
@pytest.mark.parametrize("ratio", [0.01, 0.3, 0.9, 1.0, 1.1, 2.0, 5.0])
def test_inc_gamma_against_mpmath(s, ratio):
    x = s * ratio
    ref = mpmath.gammainc(mpmath.mpf(s), 0, mpmath.mpf(x), regularized=True)
    assert reg_lower_inc_gamma(s, x) == pytest.approx(float(ref), rel=1e-10)


@pytest.mark.parametrize("s,x", [(400.0, 1.0), (50.0, 1e-3), (8.0, 1e-40)])
def test_log_inc_gamma_deep_tail(s, x):
    ref = mpmath.log(mpmath.gammainc(mpmath.mpf(s), 0, mpmath.mpf(x), regularized=True))
    assert log_reg_lower_inc_gamma(s, x) == pytest.approx(float(ref), rel=1e-12)


def test_inc_gamma_array_matches_scalar():
    s = 4.2
    xs = np.array([0.0, 0.1, 1.0, 4.0, 5.2, 9.0, 60.0, np.inf])
    arr = reg_lower_inc_gamma(s, xs)
    for x, v in zip(xs, arr):
        assert v == pytest.approx(reg_lower_inc_gamma(s, float(x)), rel=1e-14, abs=0)


def test_inc_gamma_infinite_argument():
    assert reg_lower_inc_gamma(2.0, math.inf) == 1.0


@pytest.mark.parametrize("s,x", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.1), (1.0, math.nan)])
def test_inc_gamma_domain(s, x):
    with pytest.raises(DomainError):
        reg_lower_inc_gamma(s, x)


# generalized hypergeometric

def test_pfq_at_zero_is_one():
    assert gen_hypergeom_pfq([1.3, 2.0], [0.7], 0.0) == 1.0
    assert gen_hypergeom_pfq([], [], 0.0) == 1.0


def test_2f1_log_identity():
    assert gen_hypergeom_pfq([1, 1], [2], -1.0) == pytest.approx(math.log(2.0), rel=1e-12)


def _brute_pfq(upper, lower, x, dps=60):
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        term = mpmath.mpf(1)
        total = mpmath.mpf(1)
        k = 0
        while True:
            num = mpmath.fprod(mpmath.mpf(a) + k for a in upper)
            den = mpmath.fprod(mpmath.mpf(b) + k for b in lower)
            term = term * num / den * x / (k + 1)
            total += term
            k += 1
            if abs(term) < mpmath.mpf(10) ** (-dps + 5) * abs(total) and k > 10:
                return float(total)


def test_2f2_against_brute_force_sum():
    upper, lower = [4.02, 4.52], [0.5, 5.02]
    assert gen_hypergeom_pfq(upper, lower, 0.3) == pytest.approx(
        _brute_pfq(upper, lower, 0.3), rel=1e-13)


@pytest.mark.parametrize("upper,lower,x", [
    ([1.5], [2.5], -7.0),
    ([0.7, 1.2], [3.1, 0.4], 2.5),
    ([1, 1], [2, -2.5, -2.0 + 0.5], -0.2),
    ([3.0], [0.5, 4.0], -30.0),
    ([0.5, 1.5], [2.0], 0.9),
])
def test_pfq_against_mpmath(upper, lower, x):
    ref = float(mpmath.hyper(upper, lower, x))
    assert gen_hypergeom_pfq(upper, lower, x) == pytest.approx(ref, rel=1e-10)


def test_2f1_pfaff_branch():
    ref = float(mpmath.hyp2f1(0.3, 1.7, 2.2, -0.97))
    assert gen_hypergeom_pfq([0.3, 1.7], [2.2], -0.97) == pytest.approx(ref, rel=1e-12)


def test_terminating_series_is_polynomial():
    # 2F1(-3, b; c; x) is a cubic
    b, c, x = 1.5, 2.5, 3.0
    poly = sum(math.comb(3, k) * (-1) ** k * mpmath.rf(b, k) / mpmath.rf(c, k) * x ** k
               for k in range(4))
    assert gen_hypergeom_pfq([-3, b], [c], x) == pytest.approx(float(poly), rel=1e-14)


@pytest.mark.parametrize("lower", [[0.0], [-2.0], [1.0, -5.0]])
def test_pfq_pole(lower):
    with pytest.raises(PoleError):
        gen_hypergeom_pfq([1.0], lower, 0.5)


def test_pfq_divergent_shapes():
    with pytest.raises(DomainError):
        gen_hypergeom_pfq([1, 1, 1], [2], 0.1)
    with pytest.raises(DomainError):
        gen_hypergeom_pfq([1, 1], [2], 1.5)


def test_pfq_term_budget():
    with pytest.raises(ConvergenceError):
        gen_hypergeom_pfq([1.0], [2.0], 50.0, SeriesControl(max_terms=5))


def test_pfq_generic_arithmetic_keeps_mpf():
    ctx = mpmath.MPContext()
    ctx.dps = 40
    val, peak = pfq_with_peak([ctx.mpf(1), ctx.mpf(1)], [ctx.mpf(2)], ctx.mpf(-1),
                              SeriesControl(rel_tol=ctx.mpf(10) ** -42, abs_tol=ctx.mpf(10) ** -80))
    assert isinstance(val, ctx.mpf)
    assert abs(val - ctx.log(2)) < ctx.mpf(10) ** -35
    assert peak > 0


def test_peak_reports_cancellation():
    val, peak = pfq_with_peak([1.0], [1.0], -20.0)  # exp(-20) summed from huge terms
    assert peak / abs(val) > 1e15


@pytest.mark.parametrize("kw", [{"max_terms": 0}, {"rel_tol": 0.0}, {"abs_tol": -1.0},
                                {"max_terms": 2.5}])
def test_series_control_validation(kw):
    with pytest.raises(DomainError):
        SeriesControl(**kw)


# digamma

def test_digamma_constants():
    assert digamma(1.0) == pytest.approx(-EULER, rel=1e-14)
    assert digamma(2.0) == pytest.approx(1 - EULER, rel=1e-14)


def test_digamma_central_difference():
    h = 1e-6
    fd = (ln_gamma(8.05 + h) - ln_gamma(8.05 - h)) / (2 * h)
    assert digamma(8.05) == pytest.approx(fd, rel=1e-8)


@pytest.mark.parametrize("x", [1e-3, 0.37, 3.0, 77.7, 1e5])
def test_digamma_against_mpmath(x):
    assert digamma(x) == pytest.approx(float(mpmath.digamma(x)), rel=1e-12)


def test_digamma_domain():
    with pytest.raises(DomainError):
        digamma(0.0)


# Q function

def test_q_function_values():
    assert q_function(0.0) == 0.5
    for x in (-3.0, 0.4, 2.0, 8.0, 30.0):
        assert q_function(x) == pytest.approx(float(mpmath.erfc(x / mpmath.sqrt(2)) / 2), rel=1e-13)


def test_q_function_array_and_underflow():
    xs = np.array([0.0, 1.0, 5.0, 60.0])
    out = q_function(xs)
    assert out.shape == xs.shape
    assert np.all(np.diff(out) <= 0)
    assert q_function(1e3) == 0.0
