#!/usr/bin/env python3
"""
Monte-Carlo estimator of E[f(X_T, Y_T)] in transformed coordinates,
where X is driven by noise independent of the variance noise:

    dX = mu_X(Y) dt + rho_bar sqrt(Y) dB
    dY = (a - b Y) dt + sigma sqrt(Y) dW

Paths use full-truncation Euler (the positive part of Y enters every
coefficient), so the scheme is well defined whether or not the Feller
condition holds.

Random numbers come from the counter-based Philox generator. Paths are
split into fixed-size blocks and block b draws from the counter stream
(seed, b), so results do not depend on the number of worker threads.
Normals are produced by inverse-CDF transformation of uniforms.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import ndtri

from model.params import HestonParams, to_transformed, mu_x
from model.payoff import payoff_transformed
from runtime.workers import resolve_workers

logger = logging.getLogger(__name__)

# Base (non-antithetic) paths per RNG block; part of the reproducibility contract
PATH_BLOCK = 8192

_TINY = 2.0 ** -54


@dataclass(frozen=True)
class McConfig:
    """
    Monte-Carlo settings

    Args:
        n_paths: Total number of paths (antithetic partners included)
        n_steps: Euler steps up to maturity
        seed: 64-bit seed keying the Philox streams
        antithetic: Pair every path with its sign-flipped partner
    """
    n_paths: int
    n_steps: int
    seed: int = 20240101
    antithetic: bool = True

    def __post_init__(self):
        if self.n_paths < 2:
            raise ValueError(f"n_paths must be >= 2, got {self.n_paths}")
        if self.antithetic and self.n_paths % 2:
            raise ValueError(f"n_paths must be even with antithetic variates, got {self.n_paths}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def base_paths(self) -> int:
        return self.n_paths // 2 if self.antithetic else self.n_paths


@dataclass(frozen=True)
class McEstimate:
    """Discounted price estimate with its standard error"""
    mean: float
    stderr: float
    n_effective: int


def block_generator(seed: int, block: int) -> np.random.Generator:
    """Independent Philox stream for one path block"""
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, block]))


def _simulate_block(p: HestonParams, x0: float, y0: float, T: float, cfg: McConfig,
                    block: int, count: int):
    rng = block_generator(cfg.seed, block)
    dt = T / cfg.n_steps
    sqrt_dt = math.sqrt(dt)
    width = 2 * count if cfg.antithetic else count

    x = np.full(width, float(x0))
    y = np.full(width, float(y0))
    for _ in range(cfg.n_steps):
        u = rng.random((2, count))
        z = ndtri(np.clip(u, _TINY, 1.0 - _TINY))
        if cfg.antithetic:
            z = np.concatenate([z, -z], axis=1)
        y_pos = np.maximum(y, 0.0)
        assert (y_pos >= 0.0).all()
        vol = np.sqrt(y_pos) * sqrt_dt
        x += mu_x(y_pos, p) * dt + p.rho_bar * vol * z[1]
        y += (p.a - p.b * y_pos) * dt + p.sigma * vol * z[0]
    return x, np.maximum(y, 0.0)


def simulate_terminal(p: HestonParams, x0: float, y0: float, T: float, cfg: McConfig,
                      workers: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Terminal samples (X_T, Y_T+) of all paths.

    With antithetic variates the first half holds the base paths and the
    second half their partners, so path j pairs with path j + n_paths/2.
    Blocks run on `workers` threads (None reads HESTON_THREADS, then the
    CPU count); the samples do not depend on the thread count.
    """
    if not y0 >= 0:
        raise ValueError(f"y0 must be >= 0, got {y0}")
    if not T > 0:
        raise ValueError(f"T must be > 0, got {T}")

    started = time.perf_counter()
    total = cfg.base_paths
    blocks = [(b, min(PATH_BLOCK, total - b * PATH_BLOCK)) for b in range((total + PATH_BLOCK - 1) // PATH_BLOCK)]

    def run(block):
        index, count = block
        result = _simulate_block(p, x0, y0, T, cfg, index, count)
        logger.debug(f"MC block {index} done ({count} base paths)")
        return count, result

    workers = resolve_workers(workers)
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(run, blocks))
    else:
        results = [run(block) for block in blocks]

    if cfg.antithetic:
        x_t = np.concatenate([r[0][:c] for c, r in results] + [r[0][c:] for c, r in results])
        y_t = np.concatenate([r[1][:c] for c, r in results] + [r[1][c:] for c, r in results])
    else:
        x_t = np.concatenate([r[0] for _, r in results])
        y_t = np.concatenate([r[1] for _, r in results])

    logger.info(f"Simulated {cfg.n_paths} paths x {cfg.n_steps} steps in {time.perf_counter() - started:.2f}s")
    return x_t, y_t


def estimate(values: np.ndarray, antithetic: bool) -> McEstimate:
    """Mean and standard error; antithetic partners are averaged first"""
    values = np.asarray(values, dtype=float)
    if antithetic:
        half = len(values) // 2
        contributions = 0.5 * (values[:half] + values[half:])
    else:
        contributions = values
    n = len(contributions)
    if n < 2:
        raise ValueError("need at least two independent contributions")
    mean = float(np.mean(contributions))
    stderr = float(np.std(contributions, ddof=1) / math.sqrt(n))
    return McEstimate(mean=mean, stderr=stderr, n_effective=n)


def mc_price(f, p: HestonParams, s0: float, y0: float, T: float, cfg: McConfig,
             workers: Optional[int] = None) -> McEstimate:
    """Discounted Monte-Carlo price e^{-rT} E[f(S_T, Y_T)]"""
    x_t, y_t = simulate_terminal(p, to_transformed(s0, y0, p), y0, T, cfg, workers)
    values = math.exp(-p.r * T) * np.broadcast_to(payoff_transformed(f, x_t, y_t, p), x_t.shape)
    result = estimate(values, cfg.antithetic)
    logger.info(f"MC price {result.mean:.8g} +/- {result.stderr:.2g} ({result.n_effective} contributions)")
    return result
