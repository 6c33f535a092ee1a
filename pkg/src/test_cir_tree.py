#!/usr/bin/env python3
"""
Tests for the recombining CIR lattice
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from model import HestonParams, mu_y
from cir_tree import (build_tree, node_value, jump_indices, jump_prob,
                      forward_probabilities, chain_moment)


def make_params(**overrides):
    values = dict(r=0.05, delta=0.0, a=0.02, b=0.5, sigma=0.2, rho=0.0)
    values.update(overrides)
    return HestonParams(**values)


def test_node_value_examples():
    assert node_value(0.04, 0.2, 0.25, 1, 1) == pytest.approx(0.0625, abs=1e-15)
    assert node_value(0.04, 0.2, 0.25, 1, 0) == pytest.approx(0.0225, abs=1e-15)
    assert node_value(0.01, 2.0, 1.0, 1, 0) == 0.0


def test_running_example_tree():
    tree = build_tree(0.04, make_params(), N=1, T=0.25)
    assert tree.levels[0].tolist() == [0.04]
    np.testing.assert_allclose(tree.levels[1], [0.0225, 0.0625], atol=1e-15)
    assert tree.k_up[0][0] == 1
    assert tree.k_down[0][0] == 0
    assert tree.p_up[0][0] == pytest.approx(0.4375, abs=1e-12)


def test_jump_fallbacks_and_clamp():
    level = np.array([0.04])
    next_level = np.array([0.0225, 0.0625])
    h = 0.25

    # target far above every child: k_u falls back to n+1
    high = make_params(a=10.0, b=0.0)
    k_u, k_d = jump_indices(level, next_level, high, h)
    assert (k_u[0], k_d[0]) == (1, 0)
    assert jump_prob(level, next_level, k_u, k_d, high, h)[0] == 1.0

    # target below every child: k_d falls back to 0 and p_u clamps to 0
    low = make_params(a=0.001, b=100.0)
    k_u, k_d = jump_indices(level, next_level, low, h)
    assert (k_u[0], k_d[0]) == (1, 0)
    assert jump_prob(level, next_level, k_u, k_d, low, h)[0] == 0.0


def test_zero_start_collapses_low_nodes():
    tree = build_tree(0.0, make_params(), N=6, T=1.0)
    for n, level in enumerate(tree.levels):
        assert np.all(level[: n // 2 + 1] == 0.0)
        assert np.all(level[n // 2 + 1:] > 0.0)


def test_node_count():
    assert build_tree(0.04, make_params(), N=100, T=1.0).node_count == 5151


@pytest.mark.parametrize("overrides", [
    dict(sigma=0.2),
    dict(sigma=0.9, a=0.01),          # Feller violated
    dict(sigma=0.3, b=-0.2),          # explosive drift
    dict(sigma=1.5, a=0.5, b=3.0),
])
def test_tree_invariants(overrides):
    p = make_params(**overrides)
    tree = build_tree(0.04, p, N=60, T=2.0)
    for n, level in enumerate(tree.levels):
        assert len(level) == n + 1
        assert np.all(level >= 0)
        assert np.all(np.diff(level) >= 0)
    for n in range(tree.N):
        k = np.arange(n + 1)
        assert np.all(tree.k_down[n] <= k)
        assert np.all(tree.k_up[n] >= k + 1)
        assert np.all(tree.k_up[n] <= n + 1)
        assert np.all((tree.p_up[n] >= 0) & (tree.p_up[n] <= 1))


@pytest.mark.parametrize("overrides", [dict(sigma=0.3), dict(sigma=0.15), dict(sigma=0.9, a=0.01)])
def test_first_moment_at_unclamped_nodes(overrides):
    p = make_params(**overrides)
    tree = build_tree(0.04, p, N=80, T=1.0)
    checked = 0
    for n in range(tree.N):
        y, nxt = tree.levels[n], tree.levels[n + 1]
        target = y + mu_y(y, p) * tree.h
        y_up, y_dn = nxt[tree.k_up[n]], nxt[tree.k_down[n]]
        den = y_up - y_dn
        with np.errstate(divide="ignore", invalid="ignore"):
            raw = (target - y_dn) / den
        unclamped = (den > 0) & (raw >= 0) & (raw <= 1)
        p_u = tree.p_up[n]
        residual = p_u * y_up + (1 - p_u) * y_dn - target
        assert np.all(np.abs(residual[unclamped]) <= 1e-12)
        checked += int(unclamped.sum())
    assert checked > 0


def test_martingale_drift_sanity():
    # a = b*y0 makes y0 the stationary mean; no truncation at these sizes
    y0, b = 0.04, 0.5
    p = make_params(a=b * y0, b=b, sigma=0.1)
    tree = build_tree(y0, p, N=8, T=0.5)
    assert all(np.all(level > 0) for level in tree.levels)
    for n in range(tree.N):
        y, nxt = tree.levels[n], tree.levels[n + 1]
        raw = (y + mu_y(y, p) * tree.h - nxt[tree.k_down[n]]) / (nxt[tree.k_up[n]] - nxt[tree.k_down[n]])
        assert np.all((raw >= 0) & (raw <= 1))
    for n in range(tree.N + 1):
        assert chain_moment(tree, n, 1) == pytest.approx(y0, abs=1e-14)


def test_forward_probabilities_sum_to_one():
    tree = build_tree(0.04, make_params(sigma=0.5), N=40, T=1.0)
    probs = forward_probabilities(tree)
    assert probs[0].tolist() == [1.0]
    for level in probs:
        assert level.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(level >= 0)


def test_chain_moments_stay_bounded_in_n():
    p = make_params(sigma=0.3, a=0.02, b=0.5)
    second = [chain_moment(build_tree(0.04, p, N=n, T=1.0), n, 2) for n in (25, 50, 100, 200)]
    assert max(second) < 2.0 * min(second)


def test_build_tree_validation():
    with pytest.raises(ValueError):
        build_tree(0.04, make_params(), N=0, T=1.0)
    with pytest.raises(ValueError):
        build_tree(-0.01, make_params(), N=5, T=1.0)
    with pytest.raises(ValueError):
        build_tree(0.04, make_params(), N=5, T=0.0)


def test_rows_dump_format():
    tree = build_tree(0.04, make_params(), N=1, T=0.25)
    rows = list(tree.rows())
    assert rows[0][:5] == (0, 0, 0.04, 1, 0)
    assert rows[0][5] == pytest.approx(0.4375)
    assert rows[1][3:] == (None, None, None)
