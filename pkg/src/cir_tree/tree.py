#!/usr/bin/env python3
"""
Recombining binomial Markov chain approximating the CIR variance process
on the time grid n*T/N.

Node values follow the square-root lattice
    y^n_k = (sqrt(y0) + sigma/2 (2k - n) sqrt(h))^2, truncated at 0,
and every node jumps to the closest children bracketing y + mu_Y(y) h,
with the up-probability matching the first moment (clamped to [0, 1]).
"""

import logging
import math
import time
from dataclasses import dataclass
from typing import List

import numpy as np

from model.params import HestonParams, mu_y

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CIRTree:
    """
    Variance lattice with per-node jump targets and probabilities

    Args:
        N: Number of time steps
        h: Step size T/N
        levels: levels[n] holds the n+1 node values of level n
        k_up: k_up[n][k] child index of the up jump from node (n, k), n < N
        k_down: k_down[n][k] child index of the down jump
        p_up: p_up[n][k] probability of the up jump
    """
    N: int
    h: float
    levels: List[np.ndarray]
    k_up: List[np.ndarray]
    k_down: List[np.ndarray]
    p_up: List[np.ndarray]

    @property
    def y0(self) -> float:
        return float(self.levels[0][0])

    @property
    def node_count(self) -> int:
        return sum(len(level) for level in self.levels)

    @property
    def y_max(self) -> float:
        return max(float(level[-1]) for level in self.levels)

    def distinct_values(self) -> np.ndarray:
        """Sorted distinct node variances over the whole tree"""
        return np.unique(np.concatenate(self.levels))

    def rows(self):
        """Yield (n, k, y, k_u, k_d, p_u); the last level has no jumps (None)"""
        for n, level in enumerate(self.levels):
            for k, y in enumerate(level):
                if n < self.N:
                    yield n, k, float(y), int(self.k_up[n][k]), int(self.k_down[n][k]), float(self.p_up[n][k])
                else:
                    yield n, k, float(y), None, None, None


def node_value(y0: float, sigma: float, h: float, n: int, k):
    """Value of lattice node (n, k); k may be an index array"""
    root = math.sqrt(y0) + 0.5 * sigma * (2 * np.asarray(k, dtype=float) - n) * math.sqrt(h)
    value = np.where(root > 0, root * root, 0.0)
    return float(value) if value.ndim == 0 else value


def _level_values(y0: float, sigma: float, h: float, n: int) -> np.ndarray:
    if n == 0:
        return np.array([float(y0)])
    return node_value(y0, sigma, h, n, np.arange(n + 1))


def jump_indices(level: np.ndarray, next_level: np.ndarray, p: HestonParams, h: float):
    """
    Up/down child indices for every node of a level.

    k_u is the smallest k* in [k+1, n+1] with target <= y^{n+1}_{k*} (n+1 if none),
    k_d the largest k* in [0, k] with target >= y^{n+1}_{k*} (0 if none), where
    target = y + mu_Y(y) h. Both searches are binary searches over the sorted
    next level.
    """
    n = len(level) - 1
    k = np.arange(n + 1)
    target = level + mu_y(level, p) * h

    first_above = np.searchsorted(next_level, target, side='left')
    k_u = np.maximum(first_above, k + 1)
    k_u = np.minimum(k_u, n + 1)

    last_below = np.searchsorted(next_level, target, side='right') - 1
    k_d = np.minimum(last_below, k)
    k_d = np.maximum(k_d, 0)

    return k_u.astype(np.int64), k_d.astype(np.int64)


def jump_prob(level: np.ndarray, next_level: np.ndarray, k_u: np.ndarray, k_d: np.ndarray,
              p: HestonParams, h: float) -> np.ndarray:
    """
    Up-probabilities of a level, clamped to [0, 1].

    Children with equal value (both truncated to 0) get p_u = 1; the two
    jumps land on the same state so the law of the chain is unaffected.
    """
    y_up = next_level[k_u]
    y_dn = next_level[k_d]
    num = mu_y(level, p) * h + level - y_dn
    den = y_up - y_dn
    degenerate = den <= 0
    ratio = np.divide(num, den, out=np.ones_like(num), where=~degenerate)
    return np.clip(ratio, 0.0, 1.0)


def build_tree(y0: float, p: HestonParams, N: int, T: float) -> CIRTree:
    """Build the full recombining tree with N steps up to maturity T"""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if not T > 0:
        raise ValueError(f"T must be > 0, got {T}")
    if not y0 >= 0:
        raise ValueError(f"y0 must be >= 0, got {y0}")

    started = time.perf_counter()
    h = T / N
    levels = [_level_values(y0, p.sigma, h, n) for n in range(N + 1)]
    k_up, k_down, p_up = [], [], []
    for n in range(N):
        k_u, k_d = jump_indices(levels[n], levels[n + 1], p, h)
        k_up.append(k_u)
        k_down.append(k_d)
        p_up.append(jump_prob(levels[n], levels[n + 1], k_u, k_d, p, h))

    tree = CIRTree(N=N, h=h, levels=levels, k_up=k_up, k_down=k_down, p_up=p_up)
    logger.debug(f"CIR tree built: N={N}, nodes={tree.node_count}, "
                 f"y_max={tree.y_max:.6g} in {time.perf_counter() - started:.3f}s")
    return tree


def forward_probabilities(tree: CIRTree) -> List[np.ndarray]:
    """Marginal law of the chain at every level, started from y0"""
    probs = [np.ones(1)]
    for n in range(tree.N):
        nxt = np.zeros(n + 2)
        cur = probs[-1]
        np.add.at(nxt, tree.k_up[n], cur * tree.p_up[n])
        np.add.at(nxt, tree.k_down[n], cur * (1.0 - tree.p_up[n]))
        probs.append(nxt)
    return probs


def chain_moment(tree: CIRTree, n: int, order: float = 1.0) -> float:
    """E[(Y_n)^order] under the chain"""
    if not 0 <= n <= tree.N:
        raise ValueError(f"level must be in [0, {tree.N}], got {n}")
    probs = forward_probabilities(tree)[n]
    return float(np.dot(probs, tree.levels[n] ** order))
