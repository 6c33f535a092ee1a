#!/usr/bin/env python3
"""
Uniform transformed log-price grid centered at the transformed spot
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from model.params import HestonParams, mu_x

logger = logging.getLogger(__name__)

# Half-width in standard deviations of the frozen-coefficient Gaussian
DEFAULT_K_STD = 6.0


@dataclass(frozen=True)
class SpatialGrid:
    """
    Grid {x0 + i*dx : i = -M..M}

    Args:
        x0: Center, always grid point index M (offset 0)
        dx: Spacing
        half_count: M
    """
    x0: float
    dx: float
    half_count: int

    def __post_init__(self):
        if not self.dx > 0:
            raise ValueError(f"dx must be > 0, got {self.dx}")
        if self.half_count < 1:
            raise ValueError(f"half_count must be >= 1, got {self.half_count}")

    @property
    def size(self) -> int:
        return 2 * self.half_count + 1

    @property
    def center_index(self) -> int:
        return self.half_count

    @property
    def points(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(-self.half_count, self.half_count + 1)


def truncation_half_width(y_max: float, p: HestonParams, T: float, k_std: float = DEFAULT_K_STD) -> float:
    """Drift excursion plus k_std standard deviations at the largest variance"""
    return abs(mu_x(y_max, p)) * T + k_std * p.rho_bar * math.sqrt(y_max * T)


def build_grid(x0: float, dx: float, y_max: float, p: HestonParams, T: float,
               k_std: float = DEFAULT_K_STD) -> SpatialGrid:
    """Grid centered at x0 wide enough for the largest variance of the tree"""
    width = truncation_half_width(y_max, p, T, k_std)
    half_count = max(1, math.ceil(width / dx))
    grid = SpatialGrid(x0=float(x0), dx=float(dx), half_count=half_count)
    logger.debug(f"Spatial grid: x0={x0:.6g}, dx={dx:.6g}, half-width={width:.6g}, points={grid.size}")
    return grid
