"""Acceptance criteria 1-9: prints one PASS/FAIL line per criterion and asserts each.

A criterion passes only when its check succeeds within its time limit.
"""
import pytest

from steinbench import acceptance


@pytest.mark.parametrize("n", [c.number for c in acceptance.CRITERIA])
def test_criterion(n, capsys):
    r = acceptance.run_all({n})[0]
    with capsys.disabled():
        print("\n" + r.line())
    assert r.ok, r.to_json()
