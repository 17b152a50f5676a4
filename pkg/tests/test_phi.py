"""Almost periodic components: support, periodicity, bounds."""

import math

import numpy as np
import pytest

from heislat.phi import (
    build_phi,
    component_vanishes,
    partial_sum_phi,
    phi_truncated,
    phi_value,
    sup_bound,
    tail_bound_for,
)


def test_component_support():
    assert not component_vanishes(1)
    assert not component_vanishes(2)
    assert not component_vanishes(5)
    assert not component_vanishes(10)
    assert component_vanishes(3)   # prime 3 mod 4
    assert component_vanishes(4)   # not squarefree
    assert component_vanishes(9)
    assert component_vanishes(21)


def test_vanishing_component_is_zero():
    for q in (3, 4):
        trunc = build_phi(q, 3, 16, 16)
        t = np.linspace(0, 5, 50)
        assert np.max(np.abs(trunc(t))) == 0.0


def test_truncation_period():
    trunc = build_phi(3, 1, 4, 8)
    assert trunc.period == 12  # lcm(1..4)
    t = np.linspace(0, 12, 37)
    assert np.max(np.abs(trunc(t) - trunc(t + 12))) < 1e-10


def test_grid_values_match_pointwise():
    for q, m in [(3, 1), (4, 2), (3, 5)]:
        trunc = build_phi(q, m, 4, 8)
        n = trunc.period * 16
        grid = trunc.grid_values(n)
        t = np.arange(n) * (trunc.period / n)
        assert np.max(np.abs(grid - trunc(t))) < 1e-9


def test_grid_values_requires_multiple_of_period():
    trunc = build_phi(3, 1, 4, 8)
    with pytest.raises(ValueError):
        trunc.grid_values(trunc.period * 16 + 1)


def test_phi_value_wrapper():
    t = np.array([0.3, 1.7])
    direct = build_phi(3, 2, 32, 32)(t)
    assert np.allclose(phi_value(3, 2, t, 32, 32), direct)
    assert np.allclose(phi_truncated(3, 2, t, 32, 32), direct)


def test_truncation_converges_in_d():
    t = np.linspace(0, 3, 40)
    coarse = build_phi(3, 1, 8, 64)(t)
    fine = build_phi(3, 1, 64, 64)(t)
    finer = build_phi(3, 1, 128, 64)(t)
    assert np.max(np.abs(finer - fine)) < np.max(np.abs(finer - coarse))


def test_tail_bound_decreasing():
    for q, m in [(3, 1), (4, 5)]:
        b1 = tail_bound_for(q, m, 8, 64)
        b2 = tail_bound_for(q, m, 32, 64)
        b3 = tail_bound_for(q, m, 128, 64)
        assert b1 > b2 > b3 >= 0


def test_sup_bound_dominates_samples():
    for q, m in [(3, 1), (3, 2), (4, 5)]:
        trunc = build_phi(q, m, 10, 32)
        grid = trunc.grid_values(trunc.period * 64)
        assert sup_bound(q, m) >= np.max(np.abs(grid)) * (1 - 1e-12)


def test_partial_sum_finite_and_additive():
    x = np.array([1.1, 2.2])
    one = partial_sum_phi(3, 1, x, 32, 32)
    two = partial_sum_phi(3, 2, x, 32, 32)
    expect = one + build_phi(3, 2, 32, 32)(math.sqrt(2) * x * x)
    assert np.allclose(two, expect, atol=1e-12)
