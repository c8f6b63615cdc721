"""Explicit smoothing operators H_{n,q} = sum_k h_k^q (sqrt(n)/(sqrt(n) - A))^k.

The coefficients make 1 - sum_k h_k^q (1-z)^{-k} vanish to order q at z = 0, so
H_{n,q} v approaches v at the rate n^{-q/2} ||A^q v||.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .operators import InnerProductSpace, LinearOperator, SolverConfig

MAX_SMOOTHING_ORDER = 12


class DegenerateInputError(ValueError):
    pass


@dataclass(frozen=True)
class SmootherCoefficients:
    q: int
    coefficients: tuple[int, ...]

    @property
    def powers(self) -> range:
        return range(self.q, 2 * self.q)

    def items(self):
        return zip(self.powers, self.coefficients)


def _check_order(q: int) -> None:
    if not 1 <= q <= MAX_SMOOTHING_ORDER:
        raise ValueError(f"smoothing order q must lie in 1..{MAX_SMOOTHING_ORDER}, got {q}")


def h_coefficients(q: int) -> SmootherCoefficients:
    """h_k^q = C(2q-1, k) C(k-1, k-q) (-1)^(k-q), k = q..2q-1."""
    _check_order(q)
    coeffs = tuple(
        math.comb(2 * q - 1, k) * math.comb(k - 1, k - q) * (-1) ** (k - q)
        for k in range(q, 2 * q)
    )
    return SmootherCoefficients(q=q, coefficients=coeffs)


def h_coefficients_by_sum(q: int) -> SmootherCoefficients:
    """Same coefficients from C(2q-1, k) * sum_{l=0}^{k-q} C(k, l) (-1)^l."""
    _check_order(q)
    coeffs = tuple(
        math.comb(2 * q - 1, k)
        * sum(math.comb(k, l) * (-1) ** l for l in range(k - q + 1))
        for k in range(q, 2 * q)
    )
    return SmootherCoefficients(q=q, coefficients=coeffs)


def holomorphy_defect(coeffs: SmootherCoefficients) -> list[int]:
    """Taylor coefficients c_0..c_q of 1 - sum_k h_k (1-z)^{-k}, in exact integers.

    (1-z)^{-k} = sum_m C(m+k-1, k-1) z^m.
    """
    result = []
    for m in range(coeffs.q + 1):
        c = 1 if m == 0 else 0
        c -= sum(h * math.comb(m + k - 1, k - 1) for k, h in coeffs.items())
        result.append(c)
    return result


def is_holomorphic(coeffs: SmootherCoefficients) -> bool:
    defect = holomorphy_defect(coeffs)
    return all(c == 0 for c in defect[:-1]) and defect[-1] != 0


def apply_smoother(
    op: LinearOperator,
    v: np.ndarray,
    n: int,
    q: int,
    cfg: Optional[SolverConfig] = None,
) -> np.ndarray:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    coeffs = h_coefficients(q)
    shift = math.sqrt(n)
    power = np.asarray(v)
    result = np.zeros_like(power, dtype=np.result_type(power, op.dtype, float))
    for k in range(1, 2 * q):
        power = shift * op.solve_shifted(shift, 1.0, power, cfg)
        if k >= q:
            result = result + coeffs.coefficients[k - q] * power
    return result


def smoothing_rate_study(
    op: LinearOperator,
    v: np.ndarray,
    q: int,
    n_values: list[int],
    cfg: Optional[SolverConfig] = None,
    space: Optional[InnerProductSpace] = None,
) -> list[tuple[int, float]]:
    """(n, n^{q/2} ||H_{n,q} v - v|| / ||A^q v||) for each n."""
    space = space or op.space
    power = np.asarray(v)
    for _ in range(q):
        power = op.apply(power)
    denom = space.norm(power)
    if denom == 0:
        raise DegenerateInputError("A^q v vanishes; the scaled error is undefined")
    return [
        (n, n ** (q / 2) * space.norm(apply_smoother(op, v, n, q, cfg) - v) / denom)
        for n in n_values
    ]


def smoother_norm_estimate(
    op: LinearOperator,
    n: int,
    q: int,
    cfg: Optional[SolverConfig] = None,
    iterations: int = 50,
    seed: int = 0,
) -> float:
    """Power-iteration estimate of ||H_{n,q}|| in op.space.

    H_{n,q} is a rational function of A, so for normal A its norm equals its spectral
    radius, which the iteration converges to. Other operators are rejected.
    """
    if not op.normal:
        raise ValueError(
            f"norm estimate needs an operator normal in its inner product, got {type(op).__name__}"
        )
    space = op.space
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(op.dimension).astype(op.dtype)
    x = x / space.norm(x)
    estimate = 0.0
    for _ in range(iterations):
        y = apply_smoother(op, x, n, q, cfg)
        estimate = space.norm(y)
        if estimate == 0:
            return 0.0
        x = y / estimate
    return estimate
