"""Tests for verify.py — property suites."""

from __future__ import annotations

import pytest

from resolvent_krylov.verify import SUITES, run_suite


class TestSuites:
    @pytest.mark.parametrize("name", list(SUITES))
    def test_suite_passes(self, name):
        results = run_suite(name)
        failed = [r for r in results if not r.passed]
        assert not failed, failed
        assert results

    def test_exactness_is_deterministic(self):
        first = run_suite("exactness", seed=7)
        second = run_suite("exactness", seed=7)
        assert first == second
        assert all(r.passed for r in first)

    def test_smoothing_checks_eight_orders(self):
        names = [r.name for r in run_suite("smoothing")]
        assert sum(name.startswith("holomorphy") for name in names) == 8

    def test_smoothing_rates_cover_three_orders(self):
        names = [r.name for r in run_suite("smoothing")]
        assert [n for n in names if n.startswith("scaled")] == [
            f"scaled smoothing error ratio q={q}" for q in (1, 2, 3)
        ]

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            run_suite("nope")
