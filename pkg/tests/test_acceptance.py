"""Acceptance battery: one pass/fail line per criterion.

Run under pytest (lines appear in the terminal summary) or directly:

    python3 tests/test_acceptance.py
"""
import time

import pytest

from opschur import cli, verify

SEED = verify.DEFAULT_SEED
# wall-clock budgets in seconds; kept out of the verify report so it stays reproducible
TIME_LIMITS = {1: 30.0, 6: 60.0}

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []


def run_criterion(number):
    t0 = time.perf_counter()
    res = verify.CHECKS[number](SEED)
    elapsed = time.perf_counter() - t0
    ok = res.passed
    note = ""
    if number in TIME_LIMITS:
        within = elapsed < TIME_LIMITS[number]
        ok = ok and within
        note = f" runtime {elapsed:.1f}s (limit {TIME_LIMITS[number]:.0f}s)"
    line = f"criterion {number:>2} {res.name:<30} {'PASS' if ok else 'FAIL'}{note}"
    return ok, line, res


def full_report_twice(tmp_dir):
    paths = [tmp_dir / "verify_a.txt", tmp_dir / "verify_b.txt"]
    codes = [cli.main(["verify", "all", "--seed", str(SEED), "--out", str(p)]) for p in paths]
    return codes, [p.read_bytes() for p in paths]


@pytest.mark.parametrize("number", [n for n in sorted(verify.CHECKS) if n != 12])
def test_criterion(number):
    ok, line, res = run_criterion(number)
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, res.detail


def test_criterion_12_full_report_deterministic(tmp_path):
    codes, (a, b) = full_report_twice(tmp_path)
    inner = verify.CHECKS[12](SEED)
    ok = a == b and inner.passed and codes == [0, 0]
    line = f"criterion 12 {'determinism':<30} {'PASS' if ok else 'FAIL'} (two full verify runs, {len(a)} bytes each)"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert a == b
    assert inner.passed
    assert codes == [0, 0]


if __name__ == "__main__":
    import pathlib
    import sys
    import tempfile

    all_ok = True
    for n in sorted(verify.CHECKS):
        if n == 12:
            with tempfile.TemporaryDirectory() as d:
                codes, (a, b) = full_report_twice(pathlib.Path(d))
            ok = a == b and codes == [0, 0]
            print(f"criterion 12 {'determinism':<30} {'PASS' if ok else 'FAIL'}", flush=True)
        else:
            ok, line, _ = run_criterion(n)
            print(line, flush=True)
        all_ok &= ok
    sys.exit(0 if all_ok else 1)
