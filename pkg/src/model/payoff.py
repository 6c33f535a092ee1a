#!/usr/bin/env python3
"""
European payoff definitions, evaluated in asset space (s, y) or in the
transformed log-price coordinates used by the pricers
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import numpy as np

from .params import HestonParams, from_transformed

logger = logging.getLogger(__name__)


class PayoffKind(Enum):
    """Built-in payoff families"""
    CALL = "call"
    PUT = "put"
    DIGITAL = "digital"
    CONSTANT = "constant"
    IDENTITY_ASSET = "identity"
    TABLE = "table"


@dataclass(frozen=True)
class Payoff:
    """
    Terminal payoff f(s, y). Build instances through the class-method
    factories so the invariants of each family are checked.
    """
    kind: PayoffKind
    strike: float = 0.0
    lower: float = 0.0
    upper: float = math.inf
    value: float = 0.0
    table_s: Tuple[float, ...] = field(default=())
    table_v: Tuple[float, ...] = field(default=())

    @classmethod
    def call(cls, strike: float) -> "Payoff":
        if not strike >= 0:
            raise ValueError(f"call strike must be >= 0, got {strike}")
        return cls(PayoffKind.CALL, strike=float(strike))

    @classmethod
    def put(cls, strike: float) -> "Payoff":
        if not strike >= 0:
            raise ValueError(f"put strike must be >= 0, got {strike}")
        return cls(PayoffKind.PUT, strike=float(strike))

    @classmethod
    def digital(cls, lower: float, upper: float = math.inf) -> "Payoff":
        # c == d is rejected: the indicator of an empty set is not a useful payoff
        if not (0.0 <= lower < upper):
            raise ValueError(f"digital requires 0 <= c < d <= inf, got c={lower}, d={upper}")
        return cls(PayoffKind.DIGITAL, lower=float(lower), upper=float(upper))

    @classmethod
    def constant(cls, value: float) -> "Payoff":
        if not math.isfinite(value):
            raise ValueError(f"constant payoff must be finite, got {value}")
        return cls(PayoffKind.CONSTANT, value=float(value))

    @classmethod
    def identity_asset(cls) -> "Payoff":
        return cls(PayoffKind.IDENTITY_ASSET)

    @classmethod
    def table(cls, s_points, values) -> "Payoff":
        s_points = tuple(float(s) for s in s_points)
        values = tuple(float(v) for v in values)
        if len(s_points) < 2 or len(s_points) != len(values):
            raise ValueError("table payoff needs >= 2 (s, value) points of equal count")
        if any(b <= a for a, b in zip(s_points, s_points[1:])):
            raise ValueError("table payoff asset prices must be strictly increasing")
        return cls(PayoffKind.TABLE, table_s=s_points, table_v=values)

    def asset_value(self, s, y=0.0):
        """Evaluate the payoff at asset price s (array-friendly)"""
        s = np.asarray(s, dtype=float)
        if self.kind == PayoffKind.CALL:
            out = np.maximum(s - self.strike, 0.0)
        elif self.kind == PayoffKind.PUT:
            out = np.maximum(self.strike - s, 0.0)
        elif self.kind == PayoffKind.DIGITAL:
            # half-open [c, d): the lower boundary is in the money
            out = ((s >= self.lower) & (s < self.upper)).astype(float)
        elif self.kind == PayoffKind.CONSTANT:
            out = np.full(np.broadcast(s, np.asarray(y)).shape, self.value)
        elif self.kind == PayoffKind.IDENTITY_ASSET:
            out = s.copy()
        elif self.kind == PayoffKind.TABLE:
            out = np.interp(s, self.table_s, self.table_v)
        else:
            raise ValueError(f"Unknown payoff kind: {self.kind}")
        return float(out) if np.ndim(out) == 0 else out

    def transformed(self, x, y, p: HestonParams):
        """Evaluate at transformed coordinates (x, y)"""
        if self.kind == PayoffKind.CONSTANT:
            return self.asset_value(np.asarray(x, dtype=float), y)
        return self.asset_value(from_transformed(x, y, p), y)

    def describe(self) -> str:
        if self.kind in (PayoffKind.CALL, PayoffKind.PUT):
            return f"{self.kind.value}:{self.strike:g}"
        if self.kind == PayoffKind.DIGITAL:
            return f"digital:{self.lower:g}:{self.upper:g}"
        if self.kind == PayoffKind.CONSTANT:
            return f"constant:{self.value:g}"
        if self.kind == PayoffKind.TABLE:
            return f"table[{len(self.table_s)} points]"
        return self.kind.value


def payoff_transformed(f, x, y, p: HestonParams):
    """
    Evaluate a payoff (Payoff or any object exposing transformed(x, y, p),
    e.g. a mollified payoff) at transformed coordinates
    """
    return f.transformed(x, y, p)
