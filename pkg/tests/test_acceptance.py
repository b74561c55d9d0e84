"""Acceptance gate: every headline check, one pass/fail line each."""

import pytest

from qthue import acceptance


@pytest.mark.parametrize("name", [name for name, _ in acceptance.CRITERIA])
def test_criterion(name, capsys):
    fn = dict(acceptance.CRITERIA)[name]
    ok, detail = fn()
    with capsys.disabled():
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, detail


def test_run_all_emits_one_line_per_criterion(monkeypatch):
    fake = [("alpha", lambda: (True, "fine")), ("beta", lambda: (False, "broken"))]
    monkeypatch.setattr(acceptance, "CRITERIA", fake)
    lines = []
    assert not acceptance.run_all(emit=lines.append)
    assert lines == ["PASS alpha: fine", "FAIL beta: broken"]
