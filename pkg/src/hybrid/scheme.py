#!/usr/bin/env python3
"""
Backward hybrid recursion: a tree step in the variance direction followed
by one implicit finite-difference step in the log-price direction.

    u_N(x, y) = f(x, y)
    u_n(x, y) = E[ Pi(y) u_{n+1}(., Y_{n+1})(x) | Y_n = y ],  n = N-1..0
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from model.params import HestonParams, to_transformed
from model.payoff import payoff_transformed
from cir_tree.tree import CIRTree, build_tree
from fd.grid import SpatialGrid, build_grid, DEFAULT_K_STD
from fd.operator import TridiagonalOperator, assemble_operator, apply_inverse
from runtime.workers import resolve_workers

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SchemeConfig:
    """
    Discretization of the hybrid scheme

    Args:
        N: Number of time steps (h = T/N)
        dx: Log-price spacing
        T: Maturity
        k_std: Grid half-width in frozen-coefficient standard deviations
    """
    N: int
    dx: float
    T: float
    k_std: float = DEFAULT_K_STD

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if not self.dx > 0:
            raise ValueError(f"dx must be > 0, got {self.dx}")
        if not self.T > 0:
            raise ValueError(f"T must be > 0, got {self.T}")
        if not self.k_std >= 1:
            raise ValueError(f"k_std must be >= 1, got {self.k_std}")

    @property
    def h(self) -> float:
        return self.T / self.N


@dataclass(frozen=True)
class ValueSurface:
    """
    Values of one tree level over the grid

    Args:
        level: Time index n
        values: Array of shape (n+1, grid size); row k belongs to node (n, k)
    """
    level: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[0] != self.level + 1:
            raise ValueError(f"surface at level {self.level} needs {self.level + 1} rows, "
                             f"got shape {self.values.shape}")


def build_operators(tree: CIRTree, p: HestonParams, grid: SpatialGrid) -> Dict[float, TridiagonalOperator]:
    """One operator per distinct node variance, keyed by the exact value"""
    return {float(y): assemble_operator(float(y), p, tree.h, grid) for y in tree.distinct_values()}


def terminal_surface(tree: CIRTree, grid: SpatialGrid, f, p: HestonParams) -> ValueSurface:
    """Payoff on the grid for every node of the last level"""
    x = grid.points
    rows = [np.broadcast_to(payoff_transformed(f, x, float(y), p), x.shape) for y in tree.levels[tree.N]]
    return ValueSurface(level=tree.N, values=np.array(rows, dtype=float))


def backward_step(surface: ValueSurface, tree: CIRTree, operators: Dict[float, TridiagonalOperator],
                  n: int, executor: Optional[ThreadPoolExecutor] = None) -> ValueSurface:
    """
    One step from level n+1 to level n: mix the two children with the
    tree probabilities, then apply Pi(y^n_k) once (Pi is linear).
    """
    if surface.level != n + 1:
        raise ValueError(f"expected surface at level {n + 1}, got {surface.level}")

    p_u = tree.p_up[n][:, None]
    mixed = p_u * surface.values[tree.k_up[n]] + (1.0 - p_u) * surface.values[tree.k_down[n]]

    def solve(k):
        y = float(tree.levels[n][k])
        try:
            op = operators[y]
        except KeyError:
            raise RuntimeError(f"no operator assembled for node ({n}, {k}) with y={y!r}") from None
        return apply_inverse(op, mixed[k])

    if executor is None:
        rows = [solve(k) for k in range(n + 1)]
    else:
        rows = list(executor.map(solve, range(n + 1)))
    return ValueSurface(level=n, values=np.array(rows))


class HybridScheme:
    """
    Discretization shared by every payoff priced on it: tree, grid and
    operator cache for one (params, y0, S0, config) combination
    """

    def __init__(self, p: HestonParams, y0: float, s0: float, cfg: SchemeConfig,
                 workers: Optional[int] = None):
        """
        Build tree, grid and operators

        Args:
            p: Model parameters
            y0: Initial variance
            s0: Spot price
            cfg: Scheme discretization
            workers: Threads for the per-level node sweep (None = HESTON_THREADS / CPU count)
        """
        if not s0 > 0:
            raise ValueError(f"S0 must be > 0, got {s0}")
        if not y0 >= 0:
            raise ValueError(f"y0 must be >= 0, got {y0}")
        self.params = p
        self.y0 = float(y0)
        self.s0 = float(s0)
        self.cfg = cfg
        self.workers = resolve_workers(workers)

        started = time.perf_counter()
        self.tree = build_tree(y0, p, cfg.N, cfg.T)
        x0 = to_transformed(s0, y0, p)
        self.grid = build_grid(x0, cfg.dx, self.tree.y_max, p, cfg.T, cfg.k_std)
        self.operators = build_operators(self.tree, p, self.grid)
        logger.info(f"Hybrid scheme ready: N={cfg.N}, h={cfg.h:.6g}, dx={cfg.dx:.6g}, "
                    f"grid={self.grid.size} points, nodes={self.tree.node_count}, "
                    f"operators={len(self.operators)} "
                    f"({time.perf_counter() - started:.2f}s)")

    def root_vector(self, f) -> np.ndarray:
        """u^h_0(., y0) over the whole grid (undiscounted)"""
        started = time.perf_counter()
        surface = terminal_surface(self.tree, self.grid, f, self.params)
        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                surface = self._sweep(surface, executor)
        else:
            surface = self._sweep(surface, None)
        logger.debug(f"Backward induction done in {time.perf_counter() - started:.2f}s")
        return surface.values[0]

    def _sweep(self, surface: ValueSurface, executor) -> ValueSurface:
        for n in range(self.tree.N - 1, -1, -1):
            surface = backward_step(surface, self.tree, self.operators, n, executor)
            if n % 50 == 0:
                logger.debug(f"Level {n} done")
        return surface

    @property
    def discount_factor(self) -> float:
        return math.exp(-self.params.r * self.cfg.T)

    def spot_value(self, root: np.ndarray) -> float:
        """Discounted root value at the spot (grid center)"""
        return self.discount_factor * float(root[self.grid.center_index])

    def price(self, f) -> float:
        """Discounted value at the spot"""
        return self.spot_value(self.root_vector(f))


def price_surface(f, p: HestonParams, y0: float, s0: float, cfg: SchemeConfig,
                  workers: Optional[int] = None) -> np.ndarray:
    """Root value vector over the grid centered at the transformed spot"""
    return HybridScheme(p, y0, s0, cfg, workers).root_vector(f)


def price(f, p: HestonParams, y0: float, s0: float, cfg: SchemeConfig,
          workers: Optional[int] = None) -> float:
    """Discounted hybrid price e^{-rT} u^h_0(x0, y0)"""
    return HybridScheme(p, y0, s0, cfg, workers).price(f)
