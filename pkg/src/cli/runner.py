#!/usr/bin/env python3
"""
Run modes of the command-line front end; every mode emits one CSV table
"""

import csv
import io
import logging
import sys
import time
from typing import Iterable, List, Sequence

from model.params import from_transformed
from cir_tree.tree import build_tree
from hybrid.scheme import HybridScheme
from hybrid.convergence import convergence_study
from mc_oracle.simulator import mc_price
from .config import RunConfig, RunMode

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def fmt(value) -> str:
    """12 significant digits; integers and text pass through"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buffer.getvalue()


class ExperimentRunner:
    """
    Executes one configured run:
    - price: hybrid price at the spot
    - mc: Monte-Carlo oracle estimate
    - converge: self-convergence ladder
    - tree-dump: CIR lattice with jumps and probabilities
    """

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self._handlers = {
            RunMode.PRICE: self._run_price,
            RunMode.MC: self._run_mc,
            RunMode.CONVERGE: self._run_converge,
            RunMode.TREE_DUMP: self._run_tree_dump,
        }

    def run(self) -> int:
        """Run the configured mode and write its CSV; returns the exit code"""
        cfg = self.cfg
        logger.info("=" * 60)
        logger.info(f"Heston hybrid pricer - mode {cfg.mode.value}")
        logger.info("=" * 60)
        self._report_regime()

        started = time.perf_counter()
        try:
            text = self._handlers[cfg.mode]()
        except OSError as e:
            logger.error(f"I/O failure during {cfg.mode.value}: {e}")
            return EXIT_IO
        logger.info(f"Mode {cfg.mode.value} finished in {time.perf_counter() - started:.2f}s")

        try:
            if cfg.output:
                with open(cfg.output, "w", encoding="utf-8", newline="") as handle:
                    handle.write(text)
                logger.info(f"Wrote {cfg.output}")
            else:
                sys.stdout.write(text)
                sys.stdout.flush()
        except OSError as e:
            logger.error(f"Failed to write output: {e}")
            return EXIT_IO
        return EXIT_OK

    def _report_regime(self):
        p = self.cfg.params
        feller = p.feller_satisfied()
        logger.info(f"Feller condition sigma^2 <= 2a: {'satisfied' if feller else 'violated'} "
                    f"({p.sigma ** 2:.6g} vs {2 * p.a:.6g})")
        if not feller:
            logger.warning("Feller condition violated: the variance process reaches 0")
        if p.b <= 0:
            logger.warning(f"b = {p.b:g} <= 0: variance is not mean-reverting, moment bounds degrade")

    def _run_price(self) -> str:
        cfg = self.cfg
        scheme = HybridScheme(cfg.params, cfg.y0, cfg.s0, cfg.scheme, cfg.threads)
        root = scheme.root_vector(cfg.payoff)
        value = scheme.spot_value(root)
        logger.info(f"Hybrid price: {value:.12g}")
        if cfg.surface:
            self._write_surface(scheme, root)
        return to_csv(["price", "h", "dx", "n", "feller"],
                      [[value, cfg.scheme.h, cfg.scheme.dx, cfg.scheme.N, cfg.params.feller_satisfied()]])

    def _write_surface(self, scheme: HybridScheme, root):
        x = scheme.grid.points
        s = from_transformed(x, self.cfg.y0, self.cfg.params)
        with open(self.cfg.surface, "w", encoding="utf-8", newline="") as handle:
            handle.write(to_csv(["x", "s", "value"],
                                zip(x.tolist(), s.tolist(), (scheme.discount_factor * root).tolist())))
        logger.info(f"Wrote root surface to {self.cfg.surface}")

    def _run_mc(self) -> str:
        cfg = self.cfg
        result = mc_price(cfg.payoff, cfg.params, cfg.s0, cfg.y0, cfg.T, cfg.mc, cfg.threads)
        return to_csv(["mean", "stderr", "n_paths", "seed"],
                      [[result.mean, result.stderr, cfg.mc.n_paths, cfg.mc.seed]])

    def _run_converge(self) -> str:
        cfg = self.cfg
        rows = convergence_study(cfg.payoff, cfg.params, cfg.y0, cfg.s0, cfg.T, cfg.ladder,
                                 dx_factor=cfg.dx_factor, k_std=cfg.k_std, workers=cfg.threads)
        table: List[list] = []
        for row in rows:
            order = "exact" if row.exact else row.order
            table.append([row.n, row.h, row.dx, row.price, row.delta, order])
        return to_csv(["n", "h", "dx", "price", "delta", "order"], table)

    def _run_tree_dump(self) -> str:
        cfg = self.cfg
        tree = build_tree(cfg.y0, cfg.params, cfg.n, cfg.T)
        logger.info(f"Tree: N={tree.N}, nodes={tree.node_count}, y_max={tree.y_max:.6g}")
        return to_csv(["n", "k", "y", "k_u", "k_d", "p_u"], tree.rows())


def run(cfg: RunConfig) -> int:
    """Execute a validated configuration; returns the process exit code"""
    return ExperimentRunner(cfg).run()
