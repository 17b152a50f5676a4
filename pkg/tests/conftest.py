"""Shared fixtures: precomputed shell tables reused across the session."""

import pytest

from heislat.arithmetic import build_r2q_prefix


@pytest.fixture(scope="session")
def tables_q3():
    return build_r2q_prefix(3, 40000)


@pytest.fixture(scope="session")
def tables_q3_small():
    return build_r2q_prefix(3, 2000)


@pytest.fixture(scope="session")
def tables_q4_small():
    return build_r2q_prefix(4, 2000)
