"""The acceptance matrix: every criterion at its stated tolerance and time limit."""

import pytest

from adg import repro
from adg.field import Field

from conftest import ACCEPTANCE_LINES

IDS = [c[0] for c in repro.CRITERIA]


@pytest.mark.parametrize("cid", IDS)
def test_criterion(cid):
    row = repro.run_row(cid)
    line = (f"criterion {row.id:>2} [{row.verdict.upper()}] {row.name}: {row.actual} "
            f"({row.elapsed_s:.1f}s of {row.limit_s}s)")
    ACCEPTANCE_LINES.append((cid, line))
    print(line)
    assert row.passed, line
    assert row.elapsed_s <= row.limit_s


def test_matrix_size():
    assert len(repro.CRITERIA) == repro.MATRIX_SIZE == 11
    assert IDS == list(range(1, 12))


def test_injected_mul_sign_bug_is_caught(monkeypatch):
    original = Field._generic_mul

    def negated(self, a, b):
        return self._generic_neg(original(self, a, b))

    monkeypatch.setattr(Field, "_generic_mul", negated)
    rows = [repro.run_row(cid) for cid in (11, 1)]
    assert not all(r.passed for r in rows)
