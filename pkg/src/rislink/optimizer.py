"""Smallest number of RIS elements meeting an outage target.

Three solvers are provided:

* ``exact``: search over integer ``N`` using the closed-form outage, which
  is strictly decreasing in ``N``.
* ``log_approx``: replace the incomplete gamma function by the Jameson
  upper bound ``P(s, x) <= (e x / s)**s``, set it equal to the target and
  solve ``s (1 + ln x - ln s) = ln P_th`` for the continuous shape ``s = a+1``.
* ``quadratic``: approximate ``s ln s`` in that equation by the fixed fit
  ``0.001248 s**2 + 5.825 s - 131.4`` and take the positive quadratic root.

The continuous ``s`` is mapped back to an element count by
:func:`n_from_a`, which rounds up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.optimize import brentq

from .channel import ChannelParams, laguerre_params, per_element_shape
from .errors import DomainError, NoRootError
from .metrics import log_outage_probability

__all__ = [
    "OptProblem",
    "OptResult",
    "QUAD_FIT",
    "n_from_a",
    "optimal_n_exact",
    "optimal_n_log",
    "optimal_n_quadratic",
    "percent_error",
    "jameson_bound",
    "log_equation_residual",
]

# s ln s ~ c2 s^2 + c1 s + c0
QUAD_FIT = (0.001248, 5.825, -131.4)
DEFAULT_N_MAX = 512
# absorbs rounding in (a+1)/(c-1) when the quotient is an exact integer
_CEIL_SLACK = 1e-9


@dataclass(frozen=True)
class OptProblem:
    m1: float
    m2: float
    omega1: float
    omega2: float
    gamma_bar: float
    gamma_out: float
    pout_threshold: float
    n_max: int = DEFAULT_N_MAX

    def __post_init__(self):
        # validates the fading parameters
        ChannelParams(self.m1, self.m2, self.omega1, self.omega2, 1)
        if not (self.gamma_bar > 0 and math.isfinite(self.gamma_bar)):
            raise DomainError(f"gamma_bar must be finite and > 0, got {self.gamma_bar}")
        if not (self.gamma_out > 0 and math.isfinite(self.gamma_out)):
            raise DomainError(f"gamma_out must be finite and > 0, got {self.gamma_out}")
        if not 0 < self.pout_threshold < 1:
            raise DomainError(f"pout_threshold must lie in (0, 1), got {self.pout_threshold}")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise DomainError(f"n_max must be an integer >= 1, got {self.n_max}")
        object.__setattr__(self, "n_max", int(self.n_max))

    def channel(self, n: int = 1) -> ChannelParams:
        return ChannelParams(self.m1, self.m2, self.omega1, self.omega2, n)

    def log_pout(self, n: int) -> float:
        lp = laguerre_params(self.channel(n))
        return log_outage_probability(self.gamma_out, self.gamma_bar, lp)

    def log_x(self) -> float:
        """``ln(sqrt(gamma_out / gamma_bar) / b)``; ``b`` does not depend on ``N``."""
        b = laguerre_params(self.channel(1)).b
        return 0.5 * (math.log(self.gamma_out) - math.log(self.gamma_bar)) - math.log(b)


@dataclass(frozen=True)
class OptResult:
    n_opt: int
    a_plus_one: float
    achieved_pout: float
    method: str
    feasible: bool
    diagnostics: dict = field(default_factory=dict, compare=False)


def n_from_a(a_plus_one: float, params, n_max: int = DEFAULT_N_MAX) -> int:
    """Element count whose fitted shape first reaches ``a_plus_one``.

    ``a + 1 = N (c - 1)`` with ``c - 1 = E(Z_i)**2 / Var(Z_i)``, so the
    result is ``ceil((a + 1) / (c - 1))`` clamped to ``[1, n_max]``.
    ``params`` is anything with ``m1, m2, omega1, omega2`` attributes.
    """
    if not (a_plus_one > 0 and math.isfinite(a_plus_one)):
        raise DomainError(f"a_plus_one must be finite and > 0, got {a_plus_one}")
    if int(n_max) != n_max or n_max < 1:
        raise DomainError(f"n_max must be an integer >= 1, got {n_max}")
    shape = per_element_shape(ChannelParams(params.m1, params.m2, params.omega1, params.omega2, 1))
    if not shape > 0:
        raise DomainError("per-element shape c - 1 must be positive")
    quotient = a_plus_one / shape
    n = math.ceil(quotient * (1.0 - _CEIL_SLACK))
    return int(min(max(n, 1), n_max))


def _result(prob: OptProblem, n: int, method: str, diagnostics: dict) -> OptResult:
    lp = laguerre_params(prob.channel(n))
    log_p = prob.log_pout(n)
    return OptResult(
        n_opt=n,
        a_plus_one=diagnostics.pop("a_plus_one", lp.a + 1.0),
        achieved_pout=math.exp(log_p),
        method=method,
        feasible=log_p <= math.log(prob.pout_threshold),
        diagnostics=diagnostics,
    )


def optimal_n_exact(prob: OptProblem) -> OptResult:
    """Least ``N`` in ``[1, n_max]`` whose closed-form outage meets the target.

    Galloping search followed by bisection; relies on outage decreasing in
    ``N``.  When even ``n_max`` fails, ``n_max`` is returned with
    ``feasible=False``.
    """
    target = math.log(prob.pout_threshold)
    evaluations = {}

    def ok(n):
        if n not in evaluations:
            evaluations[n] = prob.log_pout(n)
        return evaluations[n] <= target

    if ok(1):
        return _result(prob, 1, "exact", {"evaluations": 1})
    lo, hi = 1, 2
    while hi < prob.n_max and not ok(hi):
        lo, hi = hi, min(2 * hi, prob.n_max)
    if not ok(hi):
        res = _result(prob, prob.n_max, "exact", {"evaluations": len(evaluations)})
        return res
    # invariant: lo infeasible, hi feasible
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return _result(prob, hi, "exact", {"evaluations": len(evaluations)})


def log_equation_residual(a_plus_one: float, log_x: float, log_pth: float) -> float:
    """``s (1 + ln x - ln s) - ln P_th`` at ``s = a_plus_one``."""
    s = a_plus_one
    return s * (1.0 + log_x - math.log(s)) - log_pth


def optimal_n_log(prob: OptProblem) -> OptResult:
    """Solve the bound equation ``s (1 + ln x - ln s) = ln P_th`` for ``s``.

    The left side rises from 0 to its maximum ``x`` at ``s = x`` and then
    falls without bound, crossing zero at ``s = e x``.  A negative target
    therefore has exactly one root, which lies above ``e x``.
    """
    log_x = prob.log_x()
    log_pth = math.log(prob.pout_threshold)

    def f(s):
        return log_equation_residual(s, log_x, log_pth)

    lo = math.exp(1.0 + log_x)
    if not (lo > 0 and math.isfinite(lo)):
        raise NoRootError(f"bound equation has no finite root (ln x = {log_x})")
    hi = 2.0 * lo
    while f(hi) > 0:
        hi *= 2.0
        if not math.isfinite(hi):
            raise NoRootError("bound equation root could not be bracketed")
    s = brentq(f, lo, hi, xtol=1e-300, rtol=4 * 2.0**-52, maxiter=500)
    residual = f(s)
    n = n_from_a(s, prob, prob.n_max)
    return _result(prob, n, "log_approx", {
        "a_plus_one": s,
        "residual": residual,
        "log_x": log_x,
        "clamped": s / per_element_shape(prob.channel(1)) > prob.n_max,
    })


def optimal_n_quadratic(prob: OptProblem) -> OptResult:
    """Positive root of ``c2 s^2 + (c1 - 1 - ln x) s + c0 + ln P_th = 0``.

    Obtained from the bound equation with ``s ln s`` replaced by the fit in
    :data:`QUAD_FIT`.  Both roots are kept in ``diagnostics``.
    """
    c2, c1, c0 = QUAD_FIT
    log_x = prob.log_x()
    qa = c2
    qb = c1 - 1.0 - log_x
    qc = c0 + math.log(prob.pout_threshold)
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0:
        raise NoRootError(f"quadratic has negative discriminant {disc}")
    # cancellation-free pair of roots
    t = -0.5 * (qb + math.copysign(math.sqrt(disc), qb))
    roots = sorted([t / qa, qc / t]) if t != 0 else [-math.sqrt(-qc / qa), math.sqrt(-qc / qa)]
    positive = [r for r in roots if r > 0]
    if not positive:
        raise NoRootError(f"quadratic has no positive root (roots {roots})")
    s = positive[0]
    n = n_from_a(s, prob, prob.n_max)
    return _result(prob, n, "quadratic", {
        "a_plus_one": s,
        "roots": tuple(roots),
        "discriminant": disc,
        "log_x": log_x,
        "clamped": s / per_element_shape(prob.channel(1)) > prob.n_max,
    })


def percent_error(n_method: int, n_exact: int) -> float:
    """``|n_method - n_exact| / n_exact * 100``."""
    if n_exact < 1:
        raise DomainError(f"n_exact must be >= 1, got {n_exact}")
    return abs(n_method - n_exact) / n_exact * 100.0


def jameson_bound(s: float, x: float) -> float:
    """Upper bound ``(e x / s)**s`` on ``P(s, x)``, valid for ``x <= s``."""
    if not s > 0:
        raise DomainError(f"s must be > 0, got {s}")
    if not x >= 0:
        raise DomainError(f"x must be >= 0, got {x}")
    if x == 0:
        return 0.0
    return math.exp(s * (1.0 + math.log(x) - math.log(s)))
