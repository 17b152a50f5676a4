"""Truncated trigonometric approximation of the normalized error."""

import math

import numpy as np
import pytest

from heislat.voronoi import (
    build_S_terms,
    coeff_aH,
    eval_S_qH,
    eval_S_star_qH,
    eval_S_streaming,
    eval_T_sums,
    iter_S_rows,
    lam,
    mean_square_gap,
    tau,
    tau_star,
)


def test_tau_reference_values():
    assert tau(0.0) == pytest.approx(1 / math.pi, abs=1e-15)
    assert tau(1.0) == 0.0
    assert tau(0.5) == pytest.approx(1 / (2 * math.pi), abs=1e-15)


def test_tau_monotone_on_unit_interval():
    grid = np.linspace(0, 1, 101)
    vals = [tau(t) for t in grid]
    assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))


def test_lam_period_four():
    for h in range(1, 50):
        assert lam(h) == (1 if h % 4 == 0 else (-1 if h % 4 == 2 else 0))


def test_coeff_aH_smallest_modulus():
    for q in (3, 4):
        for H in (10.0, 25.0):
            assert coeff_aH(q, 1, 1, H) == pytest.approx(tau(1 / (int(H) + 1)) / 2, rel=1e-13)


def test_streaming_matches_materialized():
    x = np.array([2.3, 5.7, 11.1, 17.9])
    for q in (3, 4):
        dense = eval_S_qH(q, 60.0, x)
        stream = eval_S_streaming(q, 60.0, x)
        assert np.max(np.abs(dense - stream)) < 1e-12


def test_rows_cover_all_terms():
    # the materialized list keeps exactly the nonzero streamed coefficients
    terms = build_S_terms(3, 30.0)
    n_nonzero = sum(int(np.count_nonzero(c)) for _, c, _ in iter_S_rows(3, 30.0))
    assert n_nonzero == len(terms.freq)


def test_terms_grow_with_H():
    small = build_S_terms(3, 20.0)
    large = build_S_terms(3, 80.0)
    assert len(large.freq) > len(small.freq)


def test_star_sum_finite():
    x = np.array([1.5, 3.2])
    for q in (3, 4):
        vals = eval_S_star_qH(q, 40.0, x)
        assert np.all(np.isfinite(vals))


def test_t_sums_keys_and_finiteness():
    x = np.array([2.0, 4.0])
    out = eval_T_sums(3, 50.0, x)
    assert set(out) == {"t_chi", "t_chi_upper", "t_star"}
    for v in out.values():
        assert np.all(np.isfinite(v))


def test_mean_square_gap_small_scale(tables_q3):
    # crude sanity at small X: the truncation leaves only a modest residual
    gap = mean_square_gap(3, tables_q3, 10, n_samples=40)
    assert 0 <= gap < 10.0
