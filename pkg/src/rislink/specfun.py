"""Special functions used by the closed-form link metrics.

Everything here is pure and thread-safe.  Scalar routines return Python
floats; the incomplete gamma and Q functions also broadcast over numpy
arrays so that Monte Carlo post-processing can evaluate millions of points.

:func:`gen_hypergeom_pfq` is written against the generic number protocol
(``+ - * / abs``), so it evaluates in whatever arithmetic its arguments
carry.  Passing ``mpmath`` numbers from a private context gives an
extended-precision evaluation without touching global state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special as _sp

from .errors import ConvergenceError, DomainError, PoleError

__all__ = [
    "SeriesControl",
    "DEFAULT_SERIES",
    "ln_gamma",
    "reg_lower_inc_gamma",
    "log_reg_lower_inc_gamma",
    "gen_hypergeom_pfq",
    "pfq_with_peak",
    "digamma",
    "q_function",
]

_EPS = np.finfo(float).eps
_FPMIN = 1e-300
_INC_GAMMA_MAX_ITER = 100_000


@dataclass(frozen=True)
class SeriesControl:
    """Truncation control for hypergeometric series."""

    max_terms: int = 10_000
    rel_tol: float = 1e-12
    abs_tol: float = 1e-300

    def __post_init__(self):
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise DomainError(f"max_terms must be a positive integer, got {self.max_terms}")
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")


DEFAULT_SERIES = SeriesControl()


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"ln_gamma requires a finite x > 0, got {x}")
    return math.lgamma(x)


def digamma(x: float) -> float:
    """Digamma function (0th polygamma) for ``x > 0``."""
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"digamma requires a finite x > 0, got {x}")
    return float(_sp.digamma(x))


def q_function(x):
    """Gaussian tail probability ``Q(x) = erfc(x / sqrt(2)) / 2``.

    Accepts scalars or arrays.  Large positive arguments underflow quietly
    to zero.
    """
    out = 0.5 * _sp.erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# Regularized lower incomplete gamma
# ---------------------------------------------------------------------------

def _check_inc_gamma_args(s, x):
    s = float(s)
    if not math.isfinite(s) or s <= 0:
        raise DomainError(f"incomplete gamma requires s > 0, got {s}")
    xa = np.asarray(x, dtype=float)
    if np.any(np.isnan(xa)) or np.any(xa < 0):
        raise DomainError("incomplete gamma requires x >= 0")
    return s, xa


def _log_p_series(s, x):
    # P(s,x) = x^s e^-x / Gamma(s+1) * sum_k x^k / ((s+1)...(s+k))
    term = np.ones_like(x)
    total = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    denom = s
    for _ in range(_INC_GAMMA_MAX_ITER):
        denom += 1.0
        term = np.where(active, term * x / denom, term)
        total = np.where(active, total + term, total)
        active &= term > total * _EPS * 0.5
        if not active.any():
            break
    else:
        raise ConvergenceError(f"incomplete gamma series did not converge for s={s}")
    return s * np.log(x) - x - math.lgamma(s + 1.0) + np.log(total)


def _log_q_contfrac(s, x):
    # Modified Lentz evaluation of the continued fraction for Q(s, x).
    b = x + 1.0 - s
    c = np.full_like(x, 1.0 / _FPMIN)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, _INC_GAMMA_MAX_ITER):
        an = -i * (i - s)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = b + an / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) > _EPS
        if not active.any():
            break
    else:
        raise ConvergenceError(f"incomplete gamma continued fraction did not converge for s={s}")
    return s * np.log(x) - x - math.lgamma(s) + np.log(h)


def _log_p_scalar(s: float, x: float) -> float:
    # Pure-Python twin of the array kernels; quadrature calls this pointwise.
    if x == 0:
        return -math.inf
    if math.isinf(x):
        return 0.0
    if x < s + 1.0:
        term = total = 1.0
        denom = s
        for _ in range(_INC_GAMMA_MAX_ITER):
            denom += 1.0
            term *= x / denom
            total += term
            if term <= total * _EPS * 0.5:
                break
        else:
            raise ConvergenceError(f"incomplete gamma series did not converge for s={s}")
        return s * math.log(x) - x - math.lgamma(s + 1.0) + math.log(total)
    b = x + 1.0 - s
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _INC_GAMMA_MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) <= _EPS:
            break
    else:
        raise ConvergenceError(f"incomplete gamma continued fraction did not converge for s={s}")
    q = math.exp(s * math.log(x) - x - math.lgamma(s) + math.log(h))
    return math.log1p(-min(q, 1.0))


def log_reg_lower_inc_gamma(s: float, x):
    """Natural log of the regularized lower incomplete gamma ``P(s, x)``.

    Stays accurate where ``P`` itself would underflow, which the deep
    outage tails and the high-SNR quadratures rely on.
    """
    s, xa = _check_inc_gamma_args(s, x)
    if xa.ndim == 0:
        return _log_p_scalar(s, float(xa))
    scalar = False
    xa = np.atleast_1d(xa)
    out = np.empty_like(xa)
    zero = xa == 0
    inf = np.isinf(xa)
    use_series = (xa < s + 1.0) & ~zero
    use_cf = ~use_series & ~zero & ~inf
    out[zero] = -np.inf
    out[inf] = 0.0
    if use_series.any():
        out[use_series] = _log_p_series(s, xa[use_series])
    if use_cf.any():
        q = np.exp(_log_q_contfrac(s, xa[use_cf]))
        out[use_cf] = np.log1p(-np.minimum(q, 1.0))
    return float(out[0]) if scalar else out


def reg_lower_inc_gamma(s: float, x):
    """Regularized lower incomplete gamma ``P(s, x) = gamma(s, x) / Gamma(s)``.

    Uses the power series for ``x < s + 1`` and the Legendre continued
    fraction for the complement otherwise.  Broadcasts over array ``x``.
    """
    out = log_reg_lower_inc_gamma(s, x)
    return math.exp(out) if isinstance(out, float) else np.exp(out)


# ---------------------------------------------------------------------------
# Generalized hypergeometric series
# ---------------------------------------------------------------------------

def _is_nonpositive_int(v) -> bool:
    f = float(v)
    return f <= 0 and f == math.floor(f)


def gen_hypergeom_pfq(upper: Sequence, lower: Sequence, x, ctl: SeriesControl = DEFAULT_SERIES):
    """Generalized hypergeometric function ``pFq(upper; lower; x)``.

    Sums the defining series by term-ratio recursion.  Entire cases
    (``p <= q``) are summed directly.  For ``p == q + 1`` the series needs
    ``|x| <= 1``; 2F1 at ``x < -1/2`` is first mapped by the Pfaff
    transformation so arguments down to ``-1`` converge geometrically.

    Raises
    ------
    PoleError
        If a lower parameter is a nonpositive integer.
    ConvergenceError
        If ``ctl.max_terms`` terms are summed without meeting the tolerance.
    """
    return pfq_with_peak(upper, lower, x, ctl)[0]


def pfq_with_peak(upper: Sequence, lower: Sequence, x, ctl: SeriesControl = DEFAULT_SERIES):
    """Like :func:`gen_hypergeom_pfq` but also return the largest term magnitude.

    ``peak / |value|`` measures how many digits the summation cancelled.
    """
    upper = list(upper)
    lower = list(lower)
    for bj in lower:
        if _is_nonpositive_int(bj):
            raise PoleError(f"lower parameter {bj} is a nonpositive integer")
    terminating = any(_is_nonpositive_int(ai) for ai in upper)
    p, q = len(upper), len(lower)
    one = x - x + 1  # unit in the caller's arithmetic
    if x == 0:
        return one, one

    if not terminating:
        if p > q + 1:
            raise DomainError(f"{p}F{q} series diverges for nonzero x")
        if p == q + 1:
            if abs(x) > 1:
                raise DomainError(f"{p}F{q} series requires |x| <= 1, got {x}")
            if p == 2 and float(x) < -0.5:
                a1, a2 = upper
                (c,) = lower
                pref = (1 - x) ** (-a1)
                val, peak = pfq_with_peak([a1, c - a2], [c], x / (x - 1), ctl)
                return pref * val, abs(pref) * peak

    # Do not stop while a parameter can still change sign and make a term
    # transiently small.
    k_min = 0
    for v in upper + lower:
        if float(v) < 0:
            k_min = max(k_min, math.ceil(-float(v)) + 1)

    term = one
    total = one
    peak = one
    for k in range(ctl.max_terms):
        ratio = x / (k + 1)
        for ai in upper:
            ratio = ratio * (ai + k)
        for bj in lower:
            ratio = ratio / (bj + k)
        term = term * ratio
        total = total + term
        if total - total != 0:
            raise ConvergenceError(f"{p}F{q} series overflowed at x={float(x):.6g}")
        mag = abs(term)
        if mag > peak:
            peak = mag
        if term == 0:
            break
        if k >= k_min and abs(ratio) < 1 and mag <= ctl.rel_tol * abs(total) + ctl.abs_tol:
            break
    else:
        raise ConvergenceError(
            f"{p}F{q} series not converged after {ctl.max_terms} terms at x={float(x):.6g}"
        )
    if isinstance(total, (float, int, np.floating)):
        return float(total), float(peak)
    return total, peak
