#!/usr/bin/env python3
"""
Tests for the log-price grid and the implicit upwinded operator
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from model import HestonParams, mu_x
from cir_tree import build_tree
from fd import (SpatialGrid, TridiagonalOperator, build_grid, alpha, beta,
                assemble_operator, apply_inverse, inverse_norm_bound)


def make_params(**overrides):
    values = dict(r=0.05, delta=0.0, a=0.02, b=0.5, sigma=0.3, rho=0.0)
    values.update(overrides)
    return HestonParams(**values)


def random_operator(rng, n):
    lower = rng.uniform(-1.0, 1.0, n)
    upper = rng.uniform(-1.0, 1.0, n)
    lower[0] = 0.0
    upper[-1] = 0.0
    diag = np.abs(lower) + np.abs(upper) + rng.uniform(0.1, 2.0, n)
    diag *= rng.choice([-1.0, 1.0], n)
    return TridiagonalOperator(lower=lower, diag=diag, upper=upper)


def test_grid_layout():
    grid = SpatialGrid(x0=0.7, dx=0.1, half_count=4)
    assert grid.size == 9
    assert grid.points[grid.center_index] == 0.7
    assert np.all(np.diff(grid.points) > 0)
    np.testing.assert_allclose(np.diff(grid.points), 0.1, atol=1e-14)
    with pytest.raises(ValueError):
        SpatialGrid(x0=0.0, dx=0.0, half_count=3)


def test_grid_width_covers_largest_variance():
    p = make_params(rho=-0.7)
    grid = build_grid(4.6, 0.01, 2.0, p, 1.0, k_std=6.0)
    width = abs(mu_x(2.0, p)) + 6.0 * p.rho_bar * np.sqrt(2.0)
    assert grid.half_count * grid.dx >= width - 1e-12
    assert (grid.half_count - 1) * grid.dx < width


def test_alpha_beta_examples():
    p = make_params(r=0.05, delta=0.0, rho=0.0)
    assert alpha(0.04, p, 0.01, 0.1) == pytest.approx(0.003, abs=1e-15)
    assert beta(0.04, p, 0.01, 0.1) == pytest.approx(0.02, abs=1e-15)
    assert beta(0.0, p, 0.01, 0.1) == 0.0
    assert beta(0.04, make_params(rho=0.999999), 0.01, 0.1) < 1e-7
    q = make_params(r=0.0, rho=-0.7)
    for y in (0.0, 0.04, 1.0):
        assert np.sign(alpha(y, q, 0.01, 0.1)) == np.sign(mu_x(y, q))


def test_assemble_interior_example():
    grid = SpatialGrid(x0=0.0, dx=0.1, half_count=5)
    op = assemble_operator(0.04, make_params(r=0.05, rho=0.0), 0.01, grid)
    i = 4
    assert op.lower[i] == pytest.approx(-0.02, abs=1e-15)
    assert op.diag[i] == pytest.approx(1.043, abs=1e-14)
    assert op.upper[i] == pytest.approx(-0.023, abs=1e-15)
    assert op.row_sums()[i] == pytest.approx(1.0, abs=1e-14)


def test_assemble_pure_transport_and_pure_diffusion():
    grid = SpatialGrid(x0=0.0, dx=0.1, half_count=5)
    transport = assemble_operator(0.0, make_params(r=0.05), 0.01, grid)
    a = 0.1 * 0.05
    assert (transport.lower[3], transport.upper[3]) == (0.0, pytest.approx(-a))
    assert transport.diag[3] == pytest.approx(1.0 + a)

    # r = y/2 with rho = 0 kills the drift
    symmetric = assemble_operator(0.04, make_params(r=0.02), 0.01, grid)
    b = beta(0.04, make_params(r=0.02), 0.01, 0.1)
    assert alpha(0.04, make_params(r=0.02), 0.01, 0.1) == 0.0
    assert (symmetric.lower[3], symmetric.diag[3], symmetric.upper[3]) == \
        (pytest.approx(-b), pytest.approx(1 + 2 * b), pytest.approx(-b))


@pytest.mark.parametrize("y", [0.0, 0.01, 0.04, 0.5, 3.0, 12.0])
@pytest.mark.parametrize("rho", [-0.9, -0.3, 0.0, 0.6])
def test_operator_m_matrix_structure(y, rho):
    grid = SpatialGrid(x0=0.0, dx=0.02, half_count=40)
    op = assemble_operator(y, make_params(rho=rho), 0.005, grid)
    assert np.all(op.lower <= 0) and np.all(op.upper <= 0) and np.all(op.diag > 0)
    assert np.all(op.diag >= 1 + np.abs(op.lower) + np.abs(op.upper) - 1e-14)
    np.testing.assert_allclose(op.row_sums(), 1.0, atol=1e-14)
    assert inverse_norm_bound(op) <= 1 + 1e-12


@pytest.mark.parametrize("y", [3.0, 12.0, 50.0, 400.0])
@pytest.mark.parametrize("rho", [-0.9, -0.3, 0.0, 0.6])
def test_row_sums_exact_at_large_variance(y, rho):
    grid = SpatialGrid(x0=0.0, dx=0.02, half_count=40)
    op = assemble_operator(y, make_params(rho=rho), 0.005, grid)
    assert np.all(op.row_sums() == 1.0)
    assert np.all(op.diag - np.abs(op.lower) - np.abs(op.upper) == 1.0)
    assert inverse_norm_bound(op) == 1.0
    assert op.lower[5] == pytest.approx(-beta(y, make_params(rho=rho), 0.005, 0.02)
                                        - max(-alpha(y, make_params(rho=rho), 0.005, 0.02), 0.0), rel=1e-14)


def test_apply_inverse_preserves_constants():
    grid = SpatialGrid(x0=0.0, dx=0.01, half_count=300)
    for y in (0.0, 0.04, 5.0):
        op = assemble_operator(y, make_params(rho=-0.7), 0.005, grid)
        w = apply_inverse(op, np.full(grid.size, 3.25))
        np.testing.assert_allclose(w, 3.25, atol=1e-12)


def test_apply_inverse_matches_dense_solver():
    rng = np.random.default_rng(11)
    for _ in range(500):
        n = int(rng.integers(2, 65))
        op = random_operator(rng, n)
        v = rng.normal(size=n)
        w = apply_inverse(op, v)
        np.testing.assert_allclose(w, np.linalg.solve(op.to_dense(), v), atol=1e-10, rtol=0)
        assert np.max(np.abs(op.matvec(w) - v)) <= 1e-10 * (1 + np.max(np.abs(v)))


def test_inverse_positivity_and_monotonicity():
    rng = np.random.default_rng(5)
    grid = SpatialGrid(x0=0.0, dx=0.05, half_count=20)
    for y in (0.0, 0.04, 0.8):
        op = assemble_operator(y, make_params(rho=-0.5), 0.01, grid)
        assert np.all(np.linalg.inv(op.to_dense()) >= -1e-15)
        v = rng.uniform(0.0, 1.0, grid.size)
        u = v + rng.uniform(0.0, 1.0, grid.size)
        assert np.all(apply_inverse(op, v) >= 0)
        assert np.all(apply_inverse(op, u) - apply_inverse(op, v) >= -1e-15)


def test_norm_bound_on_every_tree_operator():
    p = make_params(sigma=0.3, rho=-0.7)
    tree = build_tree(0.04, p, N=100, T=1.0)
    grid = build_grid(np.log(100.0), 0.05, tree.y_max, p, 1.0)
    operators = [assemble_operator(float(y), p, tree.h, grid) for y in tree.distinct_values()]
    assert all(inverse_norm_bound(op) <= 1 + 1e-12 for op in operators)

    rng = np.random.default_rng(3)
    for _ in range(1000):
        op = operators[int(rng.integers(len(operators)))]
        v = rng.uniform(-1.0, 1.0, grid.size)
        v /= np.max(np.abs(v))
        assert np.max(np.abs(apply_inverse(op, v))) <= 1 + 1e-10


def test_apply_inverse_rejects_wrong_length():
    op = assemble_operator(0.04, make_params(), 0.01, SpatialGrid(x0=0.0, dx=0.1, half_count=3))
    with pytest.raises(ValueError):
        apply_inverse(op, np.zeros(5))


def test_boundary_rows_follow_drift_direction():
    grid = SpatialGrid(x0=0.0, dx=0.1, half_count=5)
    rightward = assemble_operator(0.0, make_params(r=0.05), 0.01, grid)
    a = alpha(0.0, make_params(r=0.05), 0.01, 0.1)
    assert rightward.upper[0] == pytest.approx(-a) and rightward.diag[0] == pytest.approx(1 + a)
    assert (rightward.lower[-1], rightward.diag[-1], rightward.upper[-1]) == (0.0, 1.0, 0.0)

    leftward = assemble_operator(0.0, make_params(r=-0.05), 0.01, grid)
    assert (leftward.lower[0], leftward.diag[0], leftward.upper[0]) == (0.0, 1.0, 0.0)
    assert leftward.lower[-1] == pytest.approx(-a) and leftward.diag[-1] == pytest.approx(1 + a)
