"""Acceptance suite: one test per criterion, one pass/fail line each."""

import pytest

from heislat import acceptance


@pytest.mark.parametrize(
    "name,check", acceptance.CRITERIA, ids=[name for name, _ in acceptance.CRITERIA]
)
def test_criterion(name, check, capsys):
    passed, detail = check()
    with capsys.disabled():
        print(f"\n{'PASS' if passed else 'FAIL'}  criterion {name}: {detail}")
    assert passed, f"criterion {name}: {detail}"
