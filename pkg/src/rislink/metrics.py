"""Outage probability, average symbol error probability and ergodic capacity.

Quadrature is the reference evaluator for ASEP and capacity.  The
hypergeometric closed forms are faster but fragile: the ASEP form subtracts
two nearly equal 2F2 terms when ``a`` is large, and the capacity form has
``csc``/``sec`` poles at integer ``a``.  The closed forms therefore run in
double precision first and move to an extended-precision context when the
observed cancellation would eat into the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from scipy import integrate, optimize

from .channel import LaguerreParams, log_snr_cdf
from .errors import (
    ConvergenceError,
    DomainError,
    PoleProximityError,
    QuadratureError,
    RisError,
)
from .specfun import (
    DEFAULT_SERIES,
    SeriesControl,
    digamma,
    log_reg_lower_inc_gamma,
    pfq_with_peak,
)

__all__ = [
    "ModulationParams",
    "BPSK",
    "AsymptoticGains",
    "outage_probability",
    "log_outage_probability",
    "asymptotic_gains",
    "asymptotic_outage",
    "asep_quadrature",
    "asep_closed_form",
    "capacity_quadrature",
    "capacity_closed_form",
    "POLE_GUARD",
]

POLE_GUARD = 1e-3
_PROB_SLACK = 1e-9
# Digits we are willing to lose to cancellation before switching precision.
_MAX_LOST_DIGITS = 4.0
_TARGET_DIGITS = 20
_MAX_PRECISION_ROUNDS = 6
_MAX_DPS = 3000
_MP_MAX_TERMS = 200_000


@dataclass(frozen=True)
class ModulationParams:
    """Constants ``(p, q)`` of the conditional error ``p * Q(sqrt(2 q gamma))``."""

    p: float = 1.0
    q: float = 1.0

    def __post_init__(self):
        if not (self.p > 0 and math.isfinite(self.p)):
            raise DomainError(f"p must be > 0, got {self.p}")
        if not (self.q > 0 and math.isfinite(self.q)):
            raise DomainError(f"q must be > 0, got {self.q}")


BPSK = ModulationParams(1.0, 1.0)


@dataclass(frozen=True)
class AsymptoticGains:
    """High-SNR outage ``(coding_gain * gamma_bar) ** -diversity_order``."""

    diversity_order: float
    coding_gain: float


def _check_positive(name, v):
    if not (v > 0 and math.isfinite(v)):
        raise DomainError(f"{name} must be finite and > 0, got {v}")


def _clamp_probability(v: float, what: str) -> float:
    if not (-_PROB_SLACK < v < 1.0 + _PROB_SLACK):
        raise RisError(f"{what} produced {v!r}, outside [0, 1]")
    return min(max(v, 0.0), 1.0)


# ---------------------------------------------------------------------------
# Outage
# ---------------------------------------------------------------------------

def log_outage_probability(gamma_out: float, gamma_bar: float, lp: LaguerreParams) -> float:
    """Natural log of :func:`outage_probability`."""
    if not gamma_out >= 0:
        raise DomainError(f"gamma_out must be >= 0, got {gamma_out}")
    _check_positive("gamma_bar", gamma_bar)
    return log_snr_cdf(gamma_out, gamma_bar, lp)


def outage_probability(gamma_out: float, gamma_bar: float, lp: LaguerreParams) -> float:
    """``Pr[gamma <= gamma_out]`` under the gamma-fit SNR law."""
    return _clamp_probability(math.exp(log_outage_probability(gamma_out, gamma_bar, lp)), "outage")


def asymptotic_gains(gamma_out: float, lp: LaguerreParams) -> AsymptoticGains:
    """Diversity order ``(a+1)/2`` and coding gain ``b**2 * Gamma(a+2)**(2/(a+1)) / gamma_out``.

    The factorial ``(a+1)!`` is taken as ``Gamma(a+2)`` so that non-integer
    ``a`` is handled.
    """
    _check_positive("gamma_out", gamma_out)
    s = lp.a + 1.0
    log_gc = 2.0 * math.log(lp.b) + 2.0 * math.lgamma(lp.a + 2.0) / s - math.log(gamma_out)
    return AsymptoticGains(diversity_order=0.5 * s, coding_gain=math.exp(log_gc))


def asymptotic_outage(gamma_out: float, gamma_bar: float, lp: LaguerreParams) -> float:
    """Leading high-SNR term of the outage probability.

    This is an asymptote, not a probability: it is returned unclamped and
    exceeds one at low SNR.
    """
    _check_positive("gamma_bar", gamma_bar)
    g = asymptotic_gains(gamma_out, lp)
    return math.exp(-g.diversity_order * (math.log(g.coding_gain) + math.log(gamma_bar)))


# ---------------------------------------------------------------------------
# Quadrature helpers
# ---------------------------------------------------------------------------

def _quad(f, lo, hi, what, epsrel=1e-11, epsabs=0.0):
    out = integrate.quad(f, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=400, full_output=1)
    if len(out) == 4:
        val, err, _, msg = out
        # quad flags roundoff even when the bound is far below our target
        if not (math.isfinite(val) and err <= max(1e-9 * abs(val), 1e-300)):
            raise QuadratureError(
                f"{what}: quadrature did not converge ({msg.strip()}); estimate={val:.6g}, "
                f"error bound={err:.3g}",
                estimate=val,
                abserr=err,
            )
    return out[0]


def asep_quadrature(mod: ModulationParams, gamma_bar: float, lp: LaguerreParams) -> float:
    """ASEP by direct integration of ``exp(-q g) g**-0.5 F(g)``.

    With ``g = t**2`` the endpoint singularity disappears:
    ``ASEP = p sqrt(q/pi) * int_0^inf exp(-q t^2) P(a+1, t / (b sqrt(gb))) dt``.
    The integrand is rescaled by its peak so that very small error rates do
    not underflow.
    """
    _check_positive("gamma_bar", gamma_bar)
    shape = lp.a + 1.0
    scale = lp.b * math.sqrt(gamma_bar)
    q = mod.q

    def log_f(t):
        return -q * t * t + log_reg_lower_inc_gamma(shape, t / scale)

    # log_f is concave (log-concave CDF times a Gaussian), so the mode is unique
    # and lies below sqrt(shape / 2q).
    hi = math.sqrt(max(shape, 1.0) / (2.0 * q)) * 2.0
    res = optimize.minimize_scalar(lambda t: -log_f(t), bounds=(hi * 1e-9, hi),
                                   method="bounded", options={"xatol": hi * 1e-10})
    t_peak = float(res.x)
    g_peak = log_f(t_peak)
    t_hi = math.sqrt(t_peak * t_peak + (60.0 - log_reg_lower_inc_gamma(shape, t_peak / scale)) / q)

    def f(t):
        return math.exp(log_f(t) - g_peak) if t > 0 else 0.0

    total = _quad(f, 0.0, t_peak, "asep") + _quad(f, t_peak, t_hi, "asep")
    log_asep = math.log(mod.p) + 0.5 * math.log(q / math.pi) + g_peak + math.log(total)
    return _clamp_probability(math.exp(log_asep), "asep_quadrature")


def capacity_quadrature(gamma_bar: float, lp: LaguerreParams) -> float:
    """Ergodic capacity in bit/s/Hz, ``E[log2(1 + gamma)]``, by quadrature.

    Substituting ``gamma = (b sqrt(gb) t)**2`` turns the integral into an
    expectation of ``log1p(gb b^2 t^2)`` under a unit-scale gamma law of
    shape ``a + 1``.
    """
    _check_positive("gamma_bar", gamma_bar)
    a = lp.a
    c = gamma_bar * lp.b * lp.b
    log_norm = math.lgamma(a + 1.0)

    def f(t):
        if t <= 0:
            return 0.0
        return math.log1p(c * t * t) * math.exp(a * math.log(t) - t - log_norm)

    split = max(a, 1.0)
    t_hi = (a + 1.0) + 12.0 * math.sqrt(a + 1.0) + 50.0
    total = _quad(f, 0.0, split, "capacity") + _quad(f, split, t_hi, "capacity")
    return total / math.log(2.0)


# ---------------------------------------------------------------------------
# Closed forms with precision control
# ---------------------------------------------------------------------------

class _FloatOps:
    num = float
    pi = math.pi
    log = staticmethod(math.log)
    exp = staticmethod(math.exp)
    sqrt = staticmethod(math.sqrt)
    sin = staticmethod(math.sin)
    cos = staticmethod(math.cos)
    loggamma = staticmethod(math.lgamma)
    digamma = staticmethod(digamma)

    def __init__(self, max_terms: int):
        # Sum to full double precision; truncation error is amplified by
        # whatever cancellation follows.
        self.ctl = SeriesControl(max_terms=max_terms, rel_tol=1e-17)


class _MpOps:
    """Arithmetic on a private mpmath context (no global precision changes)."""

    def __init__(self, dps: int, max_terms: int):
        ctx = mpmath.MPContext()
        ctx.dps = dps
        self.num = ctx.mpf
        self.pi = ctx.pi
        self.log = ctx.log
        self.exp = ctx.exp
        self.sqrt = ctx.sqrt
        self.sin = ctx.sin
        self.cos = ctx.cos
        self.loggamma = ctx.loggamma
        self.digamma = ctx.digamma
        tiny = ctx.mpf(10) ** -(dps + 2)
        self.ctl = SeriesControl(max_terms=max_terms, rel_tol=tiny, abs_tol=tiny ** 2)


def _pfq_with_peak(ops, upper, lower, x):
    return pfq_with_peak(upper, lower, x, ops.ctl)


def _lost_digits(value, magnitude) -> float:
    if value == 0 or value != value:
        return math.inf
    return max(0.0, float(mpmath.log10(abs(magnitude) / abs(value))))


def _log10_peak_term(upper, lower, x, max_terms: int) -> float:
    # log10 of the largest pFq series term, scanned in log space (x > 0)
    log_term = peak = 0.0
    for k in range(max_terms):
        ratio = x / (k + 1)
        for ai in upper:
            ratio *= ai + k
        for bj in lower:
            ratio /= bj + k
        if ratio <= 0:
            break
        log_term += math.log10(ratio)
        peak = max(peak, log_term)
        if k > 0 and ratio < 1:
            break
    return peak


def _evaluate(kernel, args, ctl: SeriesControl, what: str, min_lost: float = 0.0):
    """Run ``kernel(ops, *args) -> (value, magnitude)`` at sufficient precision.

    ``magnitude`` bounds the terms that were added together, so
    ``log10(magnitude / |value|)`` is the number of digits cancelled.
    ``min_lost`` is an a-priori lower bound on that count; when it already
    exceeds the precision budget the evaluation is abandoned immediately.
    """
    if min_lost + _TARGET_DIGITS > _MAX_DPS:
        raise ConvergenceError(
            f"{what}: needs more than {_MAX_DPS} digits ({min_lost:.0f} cancelled); use quadrature"
        )
    lost = math.inf
    if min_lost <= _MAX_LOST_DIGITS:
        try:
            value, magnitude = kernel(_FloatOps(ctl.max_terms), *args)
            lost = _lost_digits(value, magnitude)
            if lost <= _MAX_LOST_DIGITS and math.isfinite(value):
                return value
        except (ConvergenceError, OverflowError, ZeroDivisionError):
            pass
    else:
        lost = min_lost

    dps = 30 if not math.isfinite(lost) else int(lost) + _TARGET_DIGITS + 10
    for _ in range(_MAX_PRECISION_ROUNDS):
        if dps > _MAX_DPS:
            break
        ops = _MpOps(dps, max_terms=max(ctl.max_terms, _MP_MAX_TERMS))
        value, magnitude = kernel(ops, *args)
        lost = _lost_digits(value, magnitude)
        if dps - lost >= _TARGET_DIGITS:
            return value
        dps = max(2 * dps, int(lost) + _TARGET_DIGITS + 10) if math.isfinite(lost) else 2 * dps
    raise ConvergenceError(f"{what}: cancellation not resolved within {_MAX_DPS} digits; use quadrature")


def _asep_bracket(ops, a, b, q, gamma_bar):
    # Bracketed difference of the two 2F2 terms, with Gamma(a/2 + 1) factored out.
    a = ops.num(a)
    s = ops.num(b) * ops.sqrt(ops.num(gamma_bar))
    q = ops.num(q)
    x = 1 / (4 * s * s * q)
    h = a / 2
    f1, pk1 = _pfq_with_peak(ops, [h + ops.num(0.5), h + 1], [ops.num(0.5), h + ops.num(1.5)], x)
    f2, pk2 = _pfq_with_peak(ops, [h + 1, h + ops.num(1.5)], [ops.num(1.5), h + 2], x)
    ratio = ops.exp(ops.loggamma((a + 3) / 2) - ops.loggamma(h + 1))
    u = (a + 2) * s * ops.sqrt(q)
    v = (a + 1) * ratio
    return u * f1 - v * f2, max(u * pk1, v * pk2)


def asep_closed_form(mod: ModulationParams, gamma_bar: float, lp: LaguerreParams,
                     ctl: SeriesControl = DEFAULT_SERIES) -> float:
    """ASEP from the 2F2 closed form.

    Both 2F2 series take the argument ``1 / (4 b^2 gb q)``.  When ``a`` is
    large their weighted difference cancels many digits, so the bracket is
    re-evaluated in extended precision as needed; the gamma and power
    prefactors are combined in log space.

    Raises
    ------
    ConvergenceError
        If a series fails to converge; fall back to :func:`asep_quadrature`.
    """
    _check_positive("gamma_bar", gamma_bar)
    a, b = lp.a, lp.b
    p, q = mod.p, mod.q
    s = b * math.sqrt(gamma_bar)
    log_pref = (
        math.log(p) - (a / 2 + 1) * math.log(q) - (a + 2) * math.log(s)
        - math.log(2 * math.sqrt(math.pi) * (a + 1) * (a + 2))
        - math.lgamma(a + 1) + math.lgamma(a / 2 + 1)
    )
    # ASEP <= p/2 caps the bracket, so the largest weighted term tells how
    # many digits must cancel at least.
    x = 1.0 / (4.0 * s * s * q)
    h = a / 2
    log10_terms = max(
        math.log10((a + 2) * s * math.sqrt(q))
        + _log10_peak_term([h + 0.5, h + 1], [0.5, h + 1.5], x, _MP_MAX_TERMS),
        math.log10(a + 1) + (math.lgamma((a + 3) / 2) - math.lgamma(h + 1)) / math.log(10)
        + _log10_peak_term([h + 1, h + 1.5], [1.5, h + 2], x, _MP_MAX_TERMS),
    )
    log10_bracket_max = (math.log(p / 2) - log_pref) / math.log(10)
    min_lost = max(0.0, log10_terms - log10_bracket_max)
    bracket = _evaluate(_asep_bracket, (a, b, q, gamma_bar), ctl, "asep_closed_form", min_lost)
    if not bracket > 0:
        raise ConvergenceError(f"asep_closed_form: non-positive bracket {bracket}")
    log_asep = log_pref + float(mpmath.log(bracket))
    return _clamp_probability(math.exp(log_asep), "asep_closed_form")


def _capacity_terms(ops, a, b, gamma_bar):
    a = ops.num(a)
    b = ops.num(b)
    gb = ops.num(gamma_bar)
    pi = ops.pi
    x = -1 / (4 * b * b * gb)
    log_inv = -ops.log(b * ops.sqrt(gb))  # ln(1 / (b sqrt(gb)))
    # Gamma(a-1) / Gamma(a+1) = 1 / (a (a-1))
    r = 1 / (a * (a - 1))
    half = ops.num(0.5)
    f23, pk23 = _pfq_with_peak(ops, [1, 1], [2, 1 - a / 2, 3 * half - a / 2], x)
    f12a, pk12a = _pfq_with_peak(ops, [a / 2 + 1], [3 * half, a / 2 + 2], x)
    f12b, pk12b = _pfq_with_peak(ops, [a / 2 + half], [half, a / 2 + 3 * half], x)
    log_g1 = ops.loggamma(a + 1)
    c1 = r / (b * b * gb)
    c2 = pi * ops.exp((-a - 2) * ops.log(b) + (-a / 2 - 1) * ops.log(gb) - log_g1) / (
        ops.sin(pi * a / 2) * (a + 2))
    c3 = pi * ops.exp((-a - 1) * ops.log(b) + (-a / 2 - half) * ops.log(gb) - log_g1) / (
        ops.cos(pi * a / 2) * (a + 1))
    c4 = r * (-2 * a * a * log_inv + 2 * a * log_inv + 2 * (a - 1) * a * ops.digamma(a + 1))
    total = c1 * f23 + c2 * f12a + c3 * f12b + c4
    magnitude = max(abs(c1) * pk23, abs(c2) * pk12a, abs(c3) * pk12b, abs(c4))
    return total, magnitude


def capacity_closed_form(gamma_bar: float, lp: LaguerreParams,
                         ctl: SeriesControl = DEFAULT_SERIES) -> float:
    """Ergodic capacity (bit/s/Hz) from the 2F3 / 1F2 / digamma closed form.

    Raises
    ------
    PoleProximityError
        If ``a`` is within ``POLE_GUARD`` of an integer, where the
        ``csc(pi a / 2)`` or ``sec(pi a / 2)`` term blows up.  Use
        :func:`capacity_quadrature` there.
    """
    _check_positive("gamma_bar", gamma_bar)
    a = lp.a
    if abs(a - round(a)) < POLE_GUARD:
        raise PoleProximityError(
            f"a={a!r} is within {POLE_GUARD} of an integer; use capacity_quadrature"
        )
    total = _evaluate(_capacity_terms, (a, lp.b, gamma_bar), ctl, "capacity_closed_form")
    return float(total) / math.log(2.0)
