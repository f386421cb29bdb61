"""Monte Carlo simulation of the RIS end-to-end SNR.

Every trial draws ``N`` independent Nakagami-m envelope pairs, forms the
coherent sum ``Z = sum(alpha_i * beta_i)`` and reports ``gamma_bar * Z**2``.

Trials are split into chunks of ``chunk_size``.  Each chunk has its own
random stream derived from ``(seed, chunk_index)``, and per-chunk summary
statistics are merged in chunk order.  The output is therefore identical
for any number of worker threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np
from scipy.special import ndtr

from .channel import ChannelParams, product_moments
from .errors import DomainError
from .metrics import ModulationParams
from .specfun import q_function

__all__ = [
    "McConfig",
    "McEstimate",
    "mc_workers",
    "iter_z_chunks",
    "simulate_z_samples",
    "simulate_snr_samples",
    "mc_outage",
    "mc_asep",
    "mc_capacity",
    "clt_baseline_cdf",
]

WORKERS_ENV = "RIS_MC_WORKERS"
# Cap on envelope draws held in memory at once per chunk.
_BLOCK_DRAWS = 1 << 21


@dataclass(frozen=True)
class McConfig:
    trials: int = 1_000_000
    seed: int = 0
    chunk_size: int = 65_536

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError(f"trials must be a positive integer, got {self.trials}")
        if int(self.chunk_size) != self.chunk_size or self.chunk_size < 1:
            raise DomainError(f"chunk_size must be a positive integer, got {self.chunk_size}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    @property
    def n_chunks(self) -> int:
        return -(-self.trials // self.chunk_size)

    def chunk_trials(self, index: int) -> int:
        return min(self.chunk_size, self.trials - index * self.chunk_size)


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with its standard error ``std / sqrt(trials_used)``."""

    value: float
    std_error: float
    trials_used: int


def mc_workers() -> int:
    """Worker threads for simulations; ``RIS_MC_WORKERS`` overrides the default."""
    raw = os.environ.get(WORKERS_ENV)
    if raw is None or raw.strip() == "":
        return max(1, min(4, os.cpu_count() or 1))
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise DomainError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return n


def _nakagami(rng: np.random.Generator, m: float, omega: float, shape) -> np.ndarray:
    # envelope = sqrt(G), G ~ Gamma(shape=m, scale=omega/m), so E[envelope^2] = omega
    return np.sqrt(rng.gamma(m, omega / m, size=shape))


def _chunk_z(params: ChannelParams, cfg: McConfig, index: int) -> np.ndarray:
    n = cfg.chunk_trials(index)
    # separate streams for the two hops so block size does not change the draws
    rng_a = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg.seed, spawn_key=(index, 0))))
    rng_b = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg.seed, spawn_key=(index, 1))))
    rows = max(1, _BLOCK_DRAWS // params.n)
    z = np.empty(n)
    for start in range(0, n, rows):
        stop = min(n, start + rows)
        alpha = _nakagami(rng_a, params.m1, params.omega1, (stop - start, params.n))
        beta = _nakagami(rng_b, params.m2, params.omega2, (stop - start, params.n))
        z[start:stop] = np.einsum("ij,ij->i", alpha, beta)
    return z


def iter_z_chunks(params: ChannelParams, cfg: McConfig, workers: int | None = None) -> Iterator[np.ndarray]:
    """Yield the per-chunk samples of ``Z`` in chunk order."""
    workers = workers or mc_workers()
    indices = range(cfg.n_chunks)
    if workers == 1:
        for i in indices:
            yield _chunk_z(params, cfg, i)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(lambda i: _chunk_z(params, cfg, i), indices)


def simulate_z_samples(params: ChannelParams, cfg: McConfig, workers: int | None = None) -> np.ndarray:
    """All ``cfg.trials`` samples of the coherent sum ``Z``."""
    return np.concatenate(list(iter_z_chunks(params, cfg, workers)))


def simulate_snr_samples(params: ChannelParams, gamma_bar: float, cfg: McConfig,
                         workers: int | None = None) -> np.ndarray:
    """Samples of the end-to-end SNR ``gamma_bar * Z**2`` (linear)."""
    if not (gamma_bar > 0 and math.isfinite(gamma_bar)):
        raise DomainError(f"gamma_bar must be finite and > 0, got {gamma_bar}")
    z = simulate_z_samples(params, cfg, workers)
    return gamma_bar * z * z


def _chunk_stats(values: np.ndarray) -> tuple[int, float, float]:
    n = values.size
    mean = float(values.mean())
    m2 = float(((values - mean) ** 2).sum())
    return n, mean, m2


def _merge(a, b):
    # Chan et al. pairwise update of (count, mean, sum of squared deviations)
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, sa + sb + delta * delta * na * nb / n


def _estimate(params: ChannelParams, gamma_bar: float, cfg: McConfig,
              statistic: Callable[[np.ndarray], np.ndarray], workers: int | None) -> McEstimate:
    if not (gamma_bar > 0 and math.isfinite(gamma_bar)):
        raise DomainError(f"gamma_bar must be finite and > 0, got {gamma_bar}")
    workers = workers or mc_workers()

    def run(i):
        z = _chunk_z(params, cfg, i)
        return _chunk_stats(statistic(gamma_bar * z * z))

    if workers == 1:
        stats = [run(i) for i in range(cfg.n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(run, range(cfg.n_chunks)))
    total = stats[0]
    for s in stats[1:]:
        total = _merge(total, s)
    n, mean, m2 = total
    std = math.sqrt(m2 / (n - 1)) if n > 1 else 0.0
    return McEstimate(value=mean, std_error=std / math.sqrt(n), trials_used=n)


def mc_outage(params: ChannelParams, gamma_bar: float, gamma_out: float, cfg: McConfig,
              workers: int | None = None) -> McEstimate:
    """Fraction of simulated SNRs at or below ``gamma_out``."""
    if not gamma_out >= 0:
        raise DomainError(f"gamma_out must be >= 0, got {gamma_out}")
    return _estimate(params, gamma_bar, cfg, lambda g: (g <= gamma_out).astype(float), workers)


def mc_asep(params: ChannelParams, gamma_bar: float, mod: ModulationParams, cfg: McConfig,
            workers: int | None = None) -> McEstimate:
    """Average of the conditional error ``p * Q(sqrt(2 q gamma))`` over simulated SNRs."""
    return _estimate(params, gamma_bar, cfg,
                     lambda g: mod.p * q_function(np.sqrt(2.0 * mod.q * g)), workers)


def mc_capacity(params: ChannelParams, gamma_bar: float, cfg: McConfig,
                workers: int | None = None) -> McEstimate:
    """Average of ``log2(1 + gamma)`` over simulated SNRs."""
    return _estimate(params, gamma_bar, cfg, lambda g: np.log1p(g) / math.log(2.0), workers)


def clt_baseline_cdf(params: ChannelParams, gamma_bar: float, gamma):
    """SNR CDF under a Gaussian (central limit) model of ``Z``.

    ``Phi((sqrt(gamma/gamma_bar) - N E[Z_i]) / sqrt(N Var[Z_i]))``.  The
    Gaussian mass at ``Z < 0`` is left in place (no renormalization), as in
    the naive usage this baseline represents, so ``F(0) > 0``.
    """
    if not (gamma_bar > 0 and math.isfinite(gamma_bar)):
        raise DomainError(f"gamma_bar must be finite and > 0, got {gamma_bar}")
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise DomainError("gamma must be >= 0")
    mean, var = product_moments(params)
    out = ndtr((np.sqrt(g / gamma_bar) - params.n * mean) / math.sqrt(params.n * var))
    return float(out) if out.ndim == 0 else out
