"""Tests for smoothing.py — smoothing operators and their coefficients."""

from __future__ import annotations

import numpy as np
import pytest

from resolvent_krylov.experiments import schrodinger_operator
from resolvent_krylov.operators import (
    DiagonalOperator,
    assemble_fd_laplacian,
    assemble_fd_laplacian_1d,
    make_wave_block_operator,
)
from resolvent_krylov.smoothing import (
    DegenerateInputError,
    apply_smoother,
    h_coefficients,
    h_coefficients_by_sum,
    holomorphy_defect,
    is_holomorphic,
    smoother_norm_estimate,
    smoothing_rate_study,
)
from tests.conftest import make_dissipative_operator


class TestCoefficients:
    def test_first_orders(self):
        assert h_coefficients(1).coefficients == (1,)
        assert h_coefficients(2).coefficients == (3, -2)
        assert h_coefficients(3).coefficients == (10, -15, 6)

    def test_powers(self):
        assert list(h_coefficients(3).powers) == [3, 4, 5]

    @pytest.mark.parametrize("q", range(1, 9))
    def test_holomorphy_and_unit_sum(self, q):
        coeffs = h_coefficients(q)
        assert sum(coeffs.coefficients) == 1
        defect = holomorphy_defect(coeffs)
        assert defect[:q] == [0] * q
        assert is_holomorphic(coeffs)

    @pytest.mark.parametrize("q", range(1, 13))
    def test_sum_formula_agrees(self, q):
        assert h_coefficients_by_sum(q) == h_coefficients(q)

    def test_order_out_of_range(self):
        with pytest.raises(ValueError):
            h_coefficients(0)
        with pytest.raises(ValueError):
            h_coefficients(13)


class TestApplySmoother:
    @pytest.mark.parametrize("n", [4, 16, 64])
    def test_zero_operator_reproduces_input(self, n):
        op = DiagonalOperator(np.zeros(3))
        v = np.array([1.0, -2.0, 0.5])
        np.testing.assert_array_equal(apply_smoother(op, v, n, 3), v)

    def test_scalar_formula(self):
        entries = np.array([-0.5, -3.0, -10.0])
        op = DiagonalOperator(entries)
        v = np.ones(3)
        n, q = 9, 2
        r = 3.0 / (3.0 - entries)
        np.testing.assert_allclose(apply_smoother(op, v, n, q), 3 * r**2 - 2 * r**3, rtol=1e-14)

    def test_rejects_nonpositive_n(self):
        with pytest.raises(ValueError):
            apply_smoother(DiagonalOperator(np.zeros(2)), np.ones(2), 0, 1)


class TestSmoothingRate:
    def test_first_order_rate_on_fd_laplacian(self):
        lap = assemble_fd_laplacian_1d(255)
        x = lap.spacing * np.arange(1, 256)
        study = smoothing_rate_study(lap, x**2 * (1 - x) ** 2, 1, [4, 16, 64, 256, 1024])
        scaled = [value for _, value in study]
        assert max(scaled) / min(scaled) <= 10.0

    def test_second_order_rate_on_smooth_modes(self):
        lap = assemble_fd_laplacian_1d(255)
        x = lap.spacing * np.arange(1, 256)
        v = np.sin(np.pi * x) + 0.01 * np.sin(3 * np.pi * x)
        study = smoothing_rate_study(lap, v, 2, [256, 1024, 4096, 16384])
        scaled = [value for _, value in study]
        assert max(scaled) / min(scaled) <= 10.0

    def test_third_order_rate_on_lowest_mode(self):
        # sampled sin(pi x) is an exact grid eigenvector, so only the scalar rate enters
        lap = assemble_fd_laplacian_1d(255)
        x = lap.spacing * np.arange(1, 256)
        study = smoothing_rate_study(lap, np.sin(np.pi * x), 3, [1024, 4096, 16384, 65536])
        scaled = [value for _, value in study]
        assert max(scaled) / min(scaled) <= 10.0
        assert scaled == sorted(scaled)

    def test_degenerate_input(self):
        with pytest.raises(DegenerateInputError):
            smoothing_rate_study(DiagonalOperator(np.zeros(3)), np.ones(3), 1, [4])


class TestNormEstimate:
    def test_diagonal_operator(self):
        op = DiagonalOperator(np.array([-0.5, -1.0, -4.0]))
        assert smoother_norm_estimate(op, 4, 1) == pytest.approx(0.8, rel=1e-8)

    def test_bounded_for_dissipative_generator(self):
        lap = assemble_fd_laplacian_1d(31)
        for q in (1, 2, 3):
            assert smoother_norm_estimate(lap, 16, q, iterations=20) < 2.0 ** (2 * q)

    @pytest.mark.parametrize("q", [1, 2])
    def test_norm_varies_little_with_n(self, q):
        op = schrodinger_operator(32)
        bound = sum(abs(h) for h in h_coefficients(q).coefficients)
        estimates = [smoother_norm_estimate(op, n, q) for n in (4, 16, 64, 256, 1024)]
        assert max(estimates) / min(estimates) <= 10.0
        assert max(estimates) <= bound + 1e-12

    def test_wave_operator_is_accepted(self):
        wave = make_wave_block_operator(assemble_fd_laplacian(4))
        bound = sum(abs(h) for h in h_coefficients(2).coefficients)
        assert 0 < smoother_norm_estimate(wave, 16, 2) <= bound + 1e-12

    def test_rejects_non_normal_operator(self):
        with pytest.raises(ValueError, match="normal"):
            smoother_norm_estimate(make_dissipative_operator(10), 16, 1)
