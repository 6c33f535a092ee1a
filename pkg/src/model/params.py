#!/usr/bin/env python3
"""
Heston model parameters and the decorrelating change of coordinates
(s, y) -> (log s - (rho/sigma) y, y)
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HestonParams:
    """
    Risk-neutral Heston parameters

    Args:
        r: Risk-free rate (1/time)
        delta: Dividend yield (1/time)
        a: CIR drift constant, a > 0
        b: CIR mean-reversion speed (any sign accepted)
        sigma: Vol-of-vol, sigma > 0
        rho: Correlation between asset and variance noise, -1 < rho < 1
    """
    r: float
    delta: float
    a: float
    b: float
    sigma: float
    rho: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"a must be > 0, got {self.a}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if not -1.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie in the open interval (-1, 1), got {self.rho}")
        for name in ("r", "delta", "b"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)}")

    @property
    def rho_bar(self) -> float:
        """sqrt(1 - rho^2), the weight of the noise independent of the variance"""
        return math.sqrt(1.0 - self.rho * self.rho)

    @property
    def shift(self) -> float:
        """rho/sigma, the variance loading of the transformed log-price"""
        return self.rho / self.sigma

    def feller_satisfied(self) -> bool:
        """True when sigma^2 <= 2a (variance never reaches 0)"""
        return self.sigma * self.sigma <= 2.0 * self.a


def to_transformed(s, y, p: HestonParams):
    """Map asset price and variance to the transformed log-price x = log s - (rho/sigma) y"""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr <= 0):
        raise ValueError(f"asset price must be > 0, got {s}")
    x = np.log(s_arr) - p.shift * np.asarray(y, dtype=float)
    return float(x) if x.ndim == 0 else x


def from_transformed(x, y, p: HestonParams):
    """Inverse of to_transformed: s = exp(x + (rho/sigma) y)"""
    s = np.exp(np.asarray(x, dtype=float) + p.shift * np.asarray(y, dtype=float))
    return float(s) if s.ndim == 0 else s


def mu_x(y, p: HestonParams):
    """Drift of the transformed log-price; affine in y and of either sign"""
    return (p.r - p.delta - p.shift * p.a) + (p.shift * p.b - 0.5) * y


def mu_y(y, p: HestonParams):
    """CIR drift a - b y"""
    return p.a - p.b * y
