#!/usr/bin/env python3
"""
Run configuration: defaults, `key = value` config files and command-line
flags (flags win over the file, the file wins over defaults)
"""

import argparse
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from model.params import HestonParams
from model.payoff import Payoff
from hybrid.scheme import SchemeConfig
from mc_oracle.simulator import McConfig
from smoothing.mollifier import mollify

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid or missing configuration value, attributed to its key"""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class RunMode(Enum):
    """Available run modes"""
    PRICE = "price"
    MC = "mc"
    CONVERGE = "converge"
    TREE_DUMP = "tree-dump"


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_ladder(text: str) -> Tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part.strip())


# key -> (converter, validity check, constraint description)
_KEYS = {
    "mode":       (str, lambda v: v in [m.value for m in RunMode], "one of price, mc, converge, tree-dump"),
    "payoff":     (str, lambda v: bool(v), "a payoff spec such as put:100"),
    "s0":         (float, lambda v: v > 0, "must be > 0"),
    "y0":         (float, lambda v: v >= 0, "must be >= 0"),
    "r":          (float, math.isfinite, "must be finite"),
    "delta":      (float, math.isfinite, "must be finite"),
    "a":          (float, lambda v: v > 0, "must be > 0"),
    "b":          (float, math.isfinite, "must be finite"),
    "sigma":      (float, lambda v: v > 0, "must be > 0"),
    "rho":        (float, lambda v: -1.0 < v < 1.0, "must lie in the open interval (-1, 1)"),
    "t":          (float, lambda v: v > 0, "must be > 0"),
    "n":          (int, lambda v: v >= 1, "must be >= 1"),
    "dx":         (float, lambda v: v > 0, "must be > 0"),
    "k_std":      (float, lambda v: v >= 1, "must be >= 1"),
    "paths":      (int, lambda v: v >= 2, "must be >= 2"),
    "steps":      (int, lambda v: v >= 1, "must be >= 1"),
    "seed":       (int, lambda v: 0 <= v < 2 ** 64, "must be a 64-bit unsigned integer"),
    "antithetic": (_parse_bool, lambda v: True, "must be true or false"),
    "ladder":     (_parse_ladder, lambda v: len(v) >= 3 and all(b > a > 0 for a, b in zip(v, v[1:])),
                   "must list at least 3 increasing positive step counts"),
    "dx_factor":  (float, lambda v: v > 0, "must be > 0"),
    "mollify":    (float, lambda v: v >= 1, "must be >= 1"),
    "quadrature": (int, lambda v: v >= 2, "must be >= 2"),
    "output":     (str, lambda v: bool(v), "must be a path"),
    "surface":    (str, lambda v: bool(v), "must be a path"),
    "threads":    (int, lambda v: v >= 1, "must be >= 1"),
}

DEFAULTS = {
    "delta": "0",
    "k_std": "6",
    "paths": "100000",
    "steps": "200",
    "seed": "20240101",
    "antithetic": "true",
    "ladder": "25,50,100,200",
    "dx_factor": "1",
    "quadrature": "33",
}

_MODEL_KEYS = ("y0", "a", "b", "sigma", "t")
_REQUIRED = {
    RunMode.PRICE: _MODEL_KEYS + ("payoff", "s0", "r", "rho", "n", "dx"),
    RunMode.MC: _MODEL_KEYS + ("payoff", "s0", "r", "rho"),
    RunMode.CONVERGE: _MODEL_KEYS + ("payoff", "s0", "r", "rho"),
    RunMode.TREE_DUMP: _MODEL_KEYS + ("n",),
}


@dataclass(frozen=True)
class RunConfig:
    """Fully validated configuration of one run"""
    mode: RunMode
    params: HestonParams
    y0: float
    T: float
    payoff: object = None
    s0: Optional[float] = None
    scheme: Optional[SchemeConfig] = None
    mc: Optional[McConfig] = None
    ladder: Tuple[int, ...] = ()
    dx_factor: float = 1.0
    k_std: float = 6.0
    n: Optional[int] = None
    output: Optional[str] = None
    surface: Optional[str] = None
    threads: Optional[int] = None
    verbose: bool = False


def build_parser() -> argparse.ArgumentParser:
    """Command-line flags; every value flag is parsed as text and validated per key"""
    parser = argparse.ArgumentParser(
        prog="heston-hybrid",
        description="Hybrid tree/finite-difference pricer for the Heston model"
    )
    parser.add_argument('-v', '--verbose', action='store_true', help='Enable verbose logging')
    parser.add_argument('-c', '--config', type=str, help='Path to a key = value configuration file')
    for key in _KEYS:
        flag = "--" + key.replace("_", "-")
        if key == "antithetic":
            parser.add_argument(flag, dest=key, nargs="?", const="true", default=None,
                                help='Antithetic variates (default: true)')
            parser.add_argument("--no-antithetic", dest=key, action="store_const", const="false")
        else:
            parser.add_argument(flag, dest=key, default=None, metavar=key.upper())
    return parser


def read_config_file(path) -> Dict[str, Tuple[str, int]]:
    """
    Parse a `key = value` file ('#' comments, blank lines ignored).

    Returns:
        key -> (raw value, line number)
    """
    entries = {}
    with open(path, "r", encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(text, f"line {number}: expected 'key = value'")
            key, value = (part.strip() for part in text.split("=", 1))
            key = key.replace("-", "_")
            if key not in _KEYS:
                raise ConfigError(key, f"line {number}: unknown key in {path}")
            entries[key] = (value, number)
    return entries


def _convert(key: str, raw: str, origin: str):
    converter, check, constraint = _KEYS[key]
    try:
        value = converter(raw)
    except ValueError:
        raise ConfigError(key, f"invalid value {raw!r} ({origin}); {constraint}") from None
    if not check(value):
        raise ConfigError(key, f"value {raw!r} ({origin}) {constraint}")
    return value


def parse_payoff(spec: str) -> Payoff:
    """call:K, put:K, digital:C[:D], constant:V, identity, table:PATH"""
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    args = rest.split(":") if rest else []
    try:
        if kind == "call" and len(args) == 1:
            return Payoff.call(float(args[0]))
        if kind == "put" and len(args) == 1:
            return Payoff.put(float(args[0]))
        if kind == "digital" and len(args) in (1, 2):
            upper = float(args[1]) if len(args) == 2 else math.inf
            return Payoff.digital(float(args[0]), upper)
        if kind == "constant" and len(args) == 1:
            return Payoff.constant(float(args[0]))
        if kind == "identity" and not args:
            return Payoff.identity_asset()
        if kind == "table" and rest:
            table = np.loadtxt(Path(rest), delimiter=",", comments="#", ndmin=2)
            return Payoff.table(table[:, 0], table[:, 1])
    except ValueError as e:
        raise ConfigError("payoff", f"{spec!r}: {e}") from None
    raise ConfigError("payoff", f"unrecognized payoff spec {spec!r}")


def parse_config(argv: Sequence[str], config_file: Optional[str] = None) -> RunConfig:
    """
    Build a RunConfig from flags and an optional config file

    Args:
        argv: Command-line arguments (without the program name)
        config_file: Config file path; --config in argv takes precedence
    """
    args = build_parser().parse_args(list(argv))

    values = {key: _convert(key, raw, "default") for key, raw in DEFAULTS.items()}
    path = args.config or config_file
    if path:
        for key, (raw, number) in read_config_file(path).items():
            values[key] = _convert(key, raw, f"{path}:{number}")
    for key in _KEYS:
        raw = getattr(args, key)
        if raw is not None:
            values[key] = _convert(key, raw, "--" + key.replace("_", "-"))

    if "mode" not in values:
        raise ConfigError("mode", "missing required key")
    mode = RunMode(values["mode"])
    for key in _REQUIRED[mode]:
        if key not in values:
            raise ConfigError(key, f"missing required key for mode {mode.value}")

    params = HestonParams(r=values.get("r", 0.0), delta=values["delta"], a=values["a"],
                          b=values["b"], sigma=values["sigma"], rho=values.get("rho", 0.0))

    payoff = None
    if "payoff" in values and mode != RunMode.TREE_DUMP:
        payoff = parse_payoff(values["payoff"])
        if "mollify" in values:
            payoff = mollify(payoff, values["mollify"], values["quadrature"])

    scheme = None
    if mode == RunMode.PRICE:
        scheme = SchemeConfig(N=values["n"], dx=values["dx"], T=values["t"], k_std=values["k_std"])

    mc = None
    if mode == RunMode.MC:
        if values["antithetic"] and values["paths"] % 2:
            raise ConfigError("paths", f"value {values['paths']} must be even with antithetic variates")
        mc = McConfig(n_paths=values["paths"], n_steps=values["steps"], seed=values["seed"],
                      antithetic=values["antithetic"])

    return RunConfig(
        mode=mode,
        params=params,
        y0=values["y0"],
        T=values["t"],
        payoff=payoff,
        s0=values.get("s0"),
        scheme=scheme,
        mc=mc,
        ladder=values["ladder"],
        dx_factor=values["dx_factor"],
        k_std=values["k_std"],
        n=values.get("n"),
        output=values.get("output"),
        surface=values.get("surface"),
        threads=values.get("threads"),
        verbose=args.verbose,
    )
