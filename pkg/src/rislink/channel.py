"""Scenario parameters and the gamma-type (first Laguerre term) SNR statistics.

The coherent RIS sum ``Z = sum_i alpha_i * beta_i`` over ``N`` elements is
approximated by a gamma density with shape ``a + 1`` and scale ``b`` whose
mean and variance match those of ``Z``.  The end-to-end SNR is
``gamma = gamma_bar * Z**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .specfun import ln_gamma, log_reg_lower_inc_gamma, reg_lower_inc_gamma

__all__ = [
    "ChannelParams",
    "LaguerreParams",
    "SnrPoint",
    "db_to_linear",
    "linear_to_db",
    "product_moments",
    "per_element_shape",
    "laguerre_params",
    "laguerre_params_printed",
    "snr_pdf",
    "log_snr_pdf",
    "snr_cdf",
    "log_snr_cdf",
]


def db_to_linear(x_db):
    """Power ratio from decibels, ``10 ** (x_db / 10)``."""
    if np.ndim(x_db):
        return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)
    return 10.0 ** (float(x_db) / 10.0)


def linear_to_db(x):
    if np.ndim(x):
        return 10.0 * np.log10(np.asarray(x, dtype=float))
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class ChannelParams:
    """Nakagami-m parameters of both hops plus the RIS element count."""

    m1: float
    m2: float
    omega1: float
    omega2: float
    n: int = 1

    def __post_init__(self):
        for name in ("m1", "m2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.5):
                raise DomainError(f"{name} must be >= 0.5, got {v}")
        for name in ("omega1", "omega2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be > 0, got {v}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be an integer >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    def with_n(self, n: int) -> "ChannelParams":
        return ChannelParams(self.m1, self.m2, self.omega1, self.omega2, n)

    @classmethod
    def symmetric(cls, m: float, omega: float, n: int = 1) -> "ChannelParams":
        """Both hops share ``m`` and ``omega``."""
        return cls(m, m, omega, omega, n)


@dataclass(frozen=True)
class LaguerreParams:
    """Shape-like ``a`` and scale-like ``b`` of the fitted gamma density of Z."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > -1):
            raise DomainError(f"a must be > -1, got {self.a}")
        if not (math.isfinite(self.b) and self.b > 0):
            raise DomainError(f"b must be > 0, got {self.b}")


@dataclass(frozen=True)
class SnrPoint:
    """An instantaneous SNR ``gamma`` observed at average SNR ``gamma_bar``."""

    gamma_bar: float
    gamma: float

    def __post_init__(self):
        if not (self.gamma_bar > 0 and math.isfinite(self.gamma_bar)):
            raise DomainError(f"gamma_bar must be > 0, got {self.gamma_bar}")
        if not self.gamma >= 0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma}")

    @classmethod
    def from_db(cls, gamma_bar_db: float, gamma_db: float) -> "SnrPoint":
        return cls(db_to_linear(gamma_bar_db), db_to_linear(gamma_db))


def _log_mean_ratio(params: ChannelParams) -> float:
    # log of G(m1+1/2) G(m2+1/2) / (sqrt(m1 m2) G(m1) G(m2)), i.e. E(Z_i)/sqrt(O1 O2)
    m1, m2 = params.m1, params.m2
    return (
        ln_gamma(m1 + 0.5) + ln_gamma(m2 + 0.5)
        - ln_gamma(m1) - ln_gamma(m2)
        - 0.5 * (math.log(m1) + math.log(m2))
    )


def product_moments(params: ChannelParams) -> tuple[float, float]:
    """Mean and variance of one product ``Z_i = alpha_i * beta_i``.

    Returns ``(E(Z_i), Var(Z_i))`` with ``Var = O1*O2 - E**2``, since
    ``E(alpha**2) = O1`` and ``E(beta**2) = O2``.  The gamma ratios are
    formed in log space.
    """
    log_r = _log_mean_ratio(params)
    scale = math.sqrt(params.omega1 * params.omega2)
    mean = scale * math.exp(log_r)
    # 1 - r**2 without cancellation when r -> 1 (large m)
    variance = params.omega1 * params.omega2 * -math.expm1(2.0 * log_r)
    return mean, variance


def per_element_shape(params: ChannelParams) -> float:
    """Contribution of one element to ``a + 1``: ``E(Z_i)**2 / Var(Z_i)``.

    ``a + 1 = N * per_element_shape``; the element count is ignored here.
    """
    log_r = _log_mean_ratio(params)
    return math.exp(2.0 * log_r) / -math.expm1(2.0 * log_r)


def laguerre_params(params: ChannelParams) -> LaguerreParams:
    """Moment-matched ``(a, b)`` for the sum of ``params.n`` products."""
    mean, variance = product_moments(params)
    n = params.n
    a = n * mean * mean / variance - 1.0
    b = variance / mean
    return LaguerreParams(a, b)


def laguerre_params_printed(params: ChannelParams) -> LaguerreParams:
    """``(a, b)`` from the explicit gamma-function expressions.

    Independent transcription used to cross-check :func:`laguerre_params`.
    """
    m1, m2, o1, o2, n = params.m1, params.m2, params.omega1, params.omega2, params.n
    g = math.gamma
    d = m1 * m2 * g(m1) ** 2 * g(m2) ** 2
    h = g(m1 + 0.5) ** 2 * g(m2 + 0.5) ** 2
    a = m1 * m2 * n * g(m1) ** 2 * g(m2) ** 2 / (d - h) - n - 1
    b = (d - h) / (
        math.sqrt(m1 / o1) * g(m1) * g(m1 + 0.5) * math.sqrt(m2 / o2) * g(m2) * g(m2 + 0.5)
    )
    return LaguerreParams(a, b)


def _check_gamma_bar(gamma_bar):
    if not (gamma_bar > 0 and math.isfinite(gamma_bar)):
        raise DomainError(f"gamma_bar must be finite and > 0, got {gamma_bar}")


def log_snr_pdf(gamma, gamma_bar: float, lp: LaguerreParams):
    """Log of :func:`snr_pdf`; broadcasts over array ``gamma``."""
    _check_gamma_bar(gamma_bar)
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0) or np.any(np.isnan(g)):
        raise DomainError("gamma must be >= 0")
    a, b = lp.a, lp.b
    if np.any(g == 0) and a < 1:
        raise DomainError(f"SNR density is singular at gamma=0 for a={a} < 1")
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratio = np.log(g) - math.log(gamma_bar)
        out = (
            0.5 * a * log_ratio
            - np.exp(0.5 * log_ratio) / b
            - math.log(2.0) - (a + 1.0) * math.log(b) - math.lgamma(a + 1.0)
            - 0.5 * (math.log(gamma_bar) + np.log(g))
        )
    if a == 1:
        # finite nonzero limit at the origin
        out = np.where(g == 0, -math.log(2.0 * b * b * gamma_bar), out)
    elif a > 1:
        out = np.where(g == 0, -np.inf, out)
    return float(out) if out.ndim == 0 else out


def snr_pdf(gamma, gamma_bar: float, lp: LaguerreParams):
    """Density of the end-to-end SNR (per unit linear SNR).

    ``(g/gb)^(a/2) exp(-sqrt(g/gb)/b) / (2 b^(a+1) Gamma(a+1) sqrt(gb g))``.
    """
    out = np.exp(log_snr_pdf(gamma, gamma_bar, lp))
    return float(out) if np.ndim(out) == 0 else out


def _cdf_arg(gamma, gamma_bar, lp):
    _check_gamma_bar(gamma_bar)
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0) or np.any(np.isnan(g)):
        raise DomainError("gamma must be >= 0")
    x = np.sqrt(g / gamma_bar) / lp.b
    return float(x) if x.ndim == 0 else x


def snr_cdf(gamma, gamma_bar: float, lp: LaguerreParams):
    """CDF of the end-to-end SNR: ``P(a + 1, sqrt(gamma / gamma_bar) / b)``."""
    return reg_lower_inc_gamma(lp.a + 1.0, _cdf_arg(gamma, gamma_bar, lp))


def log_snr_cdf(gamma, gamma_bar: float, lp: LaguerreParams):
    """Natural log of :func:`snr_cdf`, usable deep in the lower tail."""
    return log_reg_lower_inc_gamma(lp.a + 1.0, _cdf_arg(gamma, gamma_bar, lp))
