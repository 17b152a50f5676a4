"""Property-based invariants over randomized inputs."""

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from heislat.arithmetic import (
    chi4,
    frak_r,
    mobius,
    r2,
    r2_weighted,
    r2_weighted_chi,
    two_square_reps,
)
from heislat.moments import q2_closed
from heislat.phi import build_phi, component_vanishes

q_strategy = st.integers(min_value=3, max_value=6)


@given(m=st.integers(1, 400), d=st.integers(1, 12), s=st.integers(1, 8), q=q_strategy)
@settings(max_examples=200, deadline=None)
def test_weight_scaling_law(m, d, s, q):
    assert r2_weighted(m * s * s, d * s, q) == r2_weighted(m, d, q)


@given(m=st.integers(1, 400), d=st.integers(1, 12), s=st.integers(1, 8), q=q_strategy)
@settings(max_examples=200, deadline=None)
def test_twisted_weight_scaling_law(m, d, s, q):
    assert r2_weighted_chi(m * s * s, d * s, q) == chi4(s) * r2_weighted_chi(m, d, q)


@given(m=st.integers(1, 1000), d=st.integers(1, 20), q=q_strategy)
@settings(max_examples=200, deadline=None)
def test_twisted_weight_dominated(m, d, q):
    assert abs(r2_weighted_chi(m, d, q)) <= r2_weighted(m, d, q) + 1e-12


@given(m=st.integers(1, 1000), d=st.integers(1, 20), q=q_strategy)
@settings(max_examples=200, deadline=None)
def test_weight_dominated_by_r2(m, d, q):
    # each representation weight (a^2/m)^((q-1)/2) is at most 1
    assert 0.0 <= r2_weighted(m, d, q) <= r2(m) + 1e-12


@given(m=st.integers(1, 500), q=q_strategy)
@settings(max_examples=100, deadline=None)
def test_frak_r_zero_at_2_mod_4(m, q):
    assert frak_r(m, 4 * m % 4 + 2, q) == 0.0
    assert frak_r(m, 6, q) == 0.0


@given(n=st.integers(1, 3000))
@settings(max_examples=200, deadline=None)
def test_reps_consistent_with_r2(n):
    total = sum((2 if a else 1) * (2 if b else 1) for a, b in two_square_reps(n))
    assert total == r2(n)


@given(n=st.integers(1, 2000))
@settings(max_examples=200, deadline=None)
def test_mobius_square_kills(n):
    assert mobius(4 * n) == 0
    assert mobius(9 * n) == 0


@given(m=st.integers(1, 60))
@settings(max_examples=60, deadline=None)
def test_vanishing_support_consistency(m):
    if component_vanishes(m):
        assert q2_closed(3, m, _estimate_error=False).value == 0.0
        trunc = build_phi(3, m, 8, 8)
        assert np.max(np.abs(trunc(np.linspace(0, 3, 10)))) == 0.0


@given(m=st.sampled_from([1, 2, 5, 10, 13]), t=st.floats(-50, 50), q=q_strategy)
@settings(max_examples=100, deadline=None)
def test_phi_periodic(m, t, q):
    trunc = build_phi(q, m, 6, 16)
    a, b = float(trunc(t)), float(trunc(t + trunc.period))
    assert math.isclose(a, b, rel_tol=1e-7, abs_tol=1e-7)
