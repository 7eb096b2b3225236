"""Criterion 12: full-suite wall clock (this file sorts last)."""

import time


def test_criterion_12_wall_clock(request):
    elapsed = time.perf_counter() - request.config._suite_start
    assert elapsed < 600.0
    print(f"PASS criterion 12: suite wall clock {elapsed:.1f}s < 600s")
