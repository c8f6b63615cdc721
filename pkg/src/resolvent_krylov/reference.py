from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
import scipy.fft

from .matfun import phi_action, phi_scalar
from .operators import LinearOperator, SolverConfig, laplacian_eigenvalues


class ReferenceMethod(str, Enum):
    DIAGONAL_EXACT = "diagonal-exact"
    DST_EXACT = "dst-exact"
    DENSE_EIG = "dense-eig"


@dataclass(frozen=True, eq=False)
class ReferenceSolution:
    vector: np.ndarray
    method: ReferenceMethod
    certified_accuracy: float


def exact_diagonal_phi(
    entries: np.ndarray, tau: float, v: np.ndarray, j: int = 0
) -> np.ndarray:
    """Componentwise phi_j(tau a_k) v_k."""
    entries = np.asarray(entries)
    v = np.asarray(v)
    if entries.shape != v.shape:
        raise ValueError(f"entries {entries.shape} and vector {v.shape} differ in shape")
    values = phi_scalar(tau * entries, j)
    if not (np.iscomplexobj(entries) or np.iscomplexobj(v)):
        values = values.real
    return values * v


def exact_wave_dst(d: int, tau: float, y0: np.ndarray, j: int = 0) -> np.ndarray:
    """phi_j(tau A) y0 for the FD wave block operator, mode by mode in the sine basis.

    Each mode evolves under M = tau [[0, 1], [-w^2, 0]] with eigenvalues +-i theta,
    theta = tau w; for j = 0 this is the rotation
    [[cos, sin/w], [-w sin, cos]].
    """
    if d < 2:
        raise ValueError(f"sine-transform propagation needs d >= 2, got {d}")
    y0 = np.asarray(y0)
    n = d * d
    if y0.shape != (2 * n,):
        raise ValueError(f"block vector for d={d} needs length {2 * n}, got {y0.shape}")
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    if tau == 0:
        return y0 / math.factorial(j) if j else y0.copy()

    h = 1.0 / (d + 1)
    omega = np.sqrt(-laplacian_eigenvalues((d, d), h))
    u = scipy.fft.dstn(y0[:n].reshape(d, d), type=1, norm="ortho")
    p = scipy.fft.dstn(y0[n:].reshape(d, d), type=1, norm="ortho")

    theta = tau * omega
    if j == 0:
        c, s = np.cos(theta), np.sin(theta)
        u_new = c * u + (s / omega) * p
        p_new = -omega * s * u + c * p
    else:
        plus = phi_scalar(1j * theta, j)
        # f(M) = even * I + odd * M, M = tau [[0, 1], [-w^2, 0]]
        even = plus.real
        odd = plus.imag / theta
        u_new = even * u + odd * tau * p
        p_new = -odd * tau * omega**2 * u + even * p

    y1 = scipy.fft.idstn(u_new, type=1, norm="ortho").ravel()
    y2 = scipy.fft.idstn(p_new, type=1, norm="ortho").ravel()
    return np.concatenate([y1, y2])


def dense_reference(op: LinearOperator, tau: float, v: np.ndarray, j: int = 0) -> np.ndarray:
    """phi_j(tau A) v from the dense matrix; small problems only."""
    return phi_action(tau * op.to_dense(), j, np.asarray(v))


def implicit_euler(
    op: LinearOperator,
    v: np.ndarray,
    tau: float,
    n: int,
    cfg: Optional[SolverConfig] = None,
) -> np.ndarray:
    """(I - (tau/n) A)^{-n} v by n uniform backward Euler substeps."""
    if n < 1:
        raise ValueError(f"step count must be positive, got {n}")
    x = np.asarray(v)
    for _ in range(n):
        x = op.solve_shifted(1.0, tau / n, x, cfg)
    return x
