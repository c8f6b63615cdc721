"""Seeded property suites behind ``rkrylov verify``."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .experiments import schrodinger_operator, wave_initial_data
from .krylov import check_rational_exactness, rational_arnoldi
from .matfun import phi_dense, phi_series_oracle
from .operators import (
    MatrixOperator,
    assemble_fd_laplacian,
    assemble_fd_laplacian_1d,
    make_wave_block_operator,
    random_dissipative_matrix,
)
from .reference import exact_wave_dst
from .smoothing import (
    h_coefficients,
    h_coefficients_by_sum,
    is_holomorphic,
    smoothing_rate_study,
)

logger = logging.getLogger(__name__)

EXACTNESS_TOL = 1e-10
ORTHONORMALITY_TOL = 1e-12
PHI_IDENTITY_TOL = 1e-11
ORACLE_TOL = 1e-13
ENERGY_TOL = 1e-11
SMOOTHING_RATIO_LIMIT = 10.0


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    detail: str


def _result(name: str, value: float, limit: float) -> PropertyResult:
    return PropertyResult(name, bool(value <= limit), f"{value:.3e} (limit {limit:.0e})")


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b, 2) / max(1.0, np.linalg.norm(b, 2)))


def exactness_suite(seed: int = 0) -> list[PropertyResult]:
    """Rational exactness, orthonormality and Galerkin dissipativity on random matrices."""
    rng = np.random.default_rng(seed)
    n, gamma, tau = 12, 1.0, 1.0
    worst_exact = worst_ortho = worst_diss = 0.0
    for _ in range(20):
        dim = int(rng.integers(20, 101))
        op = MatrixOperator(random_dissipative_matrix(dim, rng))
        v = rng.standard_normal(dim)
        dec = rational_arnoldi(op, v, n, gamma, tau)
        for k in range(1, dec.m):
            worst_exact = max(worst_exact, check_rational_exactness(dec, op, k))
        worst_ortho = max(worst_ortho, float(np.max(np.abs(dec.gram() - np.eye(dec.m)))))
        sym = (dec.projected + dec.projected.conj().T) / 2
        top = float(np.max(np.linalg.eigvalsh(sym)))
        worst_diss = max(worst_diss, top / max(1.0, np.linalg.norm(dec.projected, 2)))
    return [
        _result("rational exactness k <= n-1", worst_exact, EXACTNESS_TOL),
        _result("basis orthonormality", worst_ortho, ORTHONORMALITY_TOL),
        _result("projected dissipativity", worst_diss, ORTHONORMALITY_TOL),
    ]


def _random_matrix(rng: np.random.Generator, m: int, norm: float) -> np.ndarray:
    h = rng.standard_normal((m, m))
    return norm * h / np.linalg.norm(h, 2)


def phi_suite(seed: int = 0) -> list[PropertyResult]:
    rng = np.random.default_rng(seed)
    recurrence = taylor = oracle = contraction = 0.0
    for _ in range(10):
        m = int(rng.integers(2, 9))
        h = _random_matrix(rng, m, rng.uniform(0.1, 5.0))
        eye = np.eye(m)
        for j in range(7):
            current = phi_dense(h, j)
            following = phi_dense(h, j + 1)
            recurrence = max(
                recurrence, _relative(h @ following + eye / math.factorial(j), current)
            )
            for q in range(1, 5):
                head = sum(
                    np.linalg.matrix_power(h, i) / math.factorial(i + j) for i in range(q)
                )
                tail = np.linalg.matrix_power(h, q) @ phi_dense(h, j + q)
                taylor = max(taylor, _relative(head + tail, current))

        small = _random_matrix(rng, m, rng.uniform(0.1, 1.0))
        for j in range(7):
            oracle = max(oracle, _relative(phi_dense(small, j), phi_series_oracle(small, j)))

        dim = int(rng.integers(2, 9))
        a = random_dissipative_matrix(dim, rng)
        for j in range(4):
            excess = np.linalg.norm(phi_dense(a, j), 2) - 1.0 / math.factorial(j)
            contraction = max(contraction, float(excess))
    return [
        _result("phi recurrence", recurrence, PHI_IDENTITY_TOL),
        _result("phi Taylor split", taylor, PHI_IDENTITY_TOL),
        _result("phi series oracle", oracle, ORACLE_TOL),
        _result("phi contraction on dissipative H", contraction, ORTHONORMALITY_TOL),
    ]


def smoothing_suite(seed: int = 0) -> list[PropertyResult]:
    results = []
    for q in range(1, 9):
        coeffs = h_coefficients(q)
        ok = is_holomorphic(coeffs) and sum(coeffs.coefficients) == 1
        results.append(PropertyResult(f"holomorphy q={q}", ok, str(coeffs.coefficients)))
    mismatched = [
        q for q in range(1, 13) if h_coefficients(q) != h_coefficients_by_sum(q)
    ]
    results.append(
        PropertyResult(
            "coefficient formulas agree q<=12",
            not mismatched,
            f"mismatch at q={mismatched}" if mismatched else "identical",
        )
    )

    lap = assemble_fd_laplacian_1d(255)
    x = lap.spacing * np.arange(1, 256)
    studies = {
        1: (x**2 * (1 - x) ** 2, [4, 16, 64, 256, 1024]),
        2: (np.sin(np.pi * x) + 0.01 * np.sin(3 * np.pi * x), [256, 1024, 4096, 16384]),
        3: (np.sin(np.pi * x), [1024, 4096, 16384, 65536]),
    }
    for q, (v, n_values) in studies.items():
        scaled = [value for _, value in smoothing_rate_study(lap, v, q, n_values)]
        ratio = max(scaled) / min(scaled)
        results.append(
            _result(f"scaled smoothing error ratio q={q}", ratio, SMOOTHING_RATIO_LIMIT)
        )
    return results


def dissipativity_suite(seed: int = 0) -> list[PropertyResult]:
    rng = np.random.default_rng(seed)
    laplacian = assemble_fd_laplacian(12)
    wave = make_wave_block_operator(laplacian)
    operators = {
        "schrodinger": schrodinger_operator(64),
        "laplacian-1d": assemble_fd_laplacian_1d(40),
        "laplacian-2d": laplacian,
        "wave": wave,
        "matrix": MatrixOperator(random_dissipative_matrix(30, rng)),
    }
    results = []
    for name, op in operators.items():
        worst = residual = 0.0
        for _ in range(5):
            v = rng.standard_normal(op.dimension).astype(op.dtype)
            scale = max(1.0, op.norm_estimate())
            worst = max(worst, op.dissipativity(v) / scale)
            x = op.solve_shifted(1.5, 0.3, v)
            r = 1.5 * x - 0.3 * op.apply(x) - v
            residual = max(residual, float(np.linalg.norm(r) / np.linalg.norm(v)))
        results.append(_result(f"{name}: Re(Av, v) <= 0", worst, ORTHONORMALITY_TOL))
        results.append(_result(f"{name}: shifted solve residual", residual, EXACTNESS_TOL))

    skew = 0.0
    smallest = np.inf
    for _ in range(5):
        v = rng.standard_normal(wave.dimension)
        av = wave.apply(v)
        denom = wave.space.norm(v) * wave.space.norm(av)
        skew = max(skew, abs(wave.space.inner(v, av).real) / denom)
        smallest = min(smallest, wave.space.norm(v))
    results.append(_result("wave energy skewness", skew, ORTHONORMALITY_TOL))
    results.append(
        PropertyResult("wave energy positivity", bool(smallest > 0), f"min norm {smallest:.3e}")
    )

    y0 = wave_initial_data(12, 2, laplacian)
    drift = abs(wave.space.norm(exact_wave_dst(12, 0.7, y0)) - wave.space.norm(y0))
    results.append(_result("exact wave energy conservation", drift, ENERGY_TOL))
    return results


SUITES: dict[str, Callable[[int], list[PropertyResult]]] = {
    "exactness": exactness_suite,
    "phi": phi_suite,
    "smoothing": smoothing_suite,
    "dissipativity": dissipativity_suite,
}


def run_suite(name: str, seed: int = 0) -> list[PropertyResult]:
    if name == "all":
        return [r for suite in SUITES.values() for r in suite(seed)]
    if name not in SUITES:
        raise ValueError(f"unknown suite '{name}'; choose from {', '.join(SUITES)} or all")
    logger.info("running %s suite (seed %d)", name, seed)
    return SUITES[name](seed)
