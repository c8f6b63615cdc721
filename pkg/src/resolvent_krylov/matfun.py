"""Dense exponential and phi-function kernels for small projected matrices."""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg

MAX_PHI_INDEX = 16


def _check_square(h: np.ndarray) -> np.ndarray:
    h = np.atleast_2d(np.asarray(h))
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValueError("matrix has non-finite entries")
    return h


def _check_index(j: int) -> None:
    if not 0 <= j <= MAX_PHI_INDEX:
        raise ValueError(f"phi index must lie in 0..{MAX_PHI_INDEX}, got {j}")


def expm_dense(h: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a degree-13 Pade core."""
    return scipy.linalg.expm(_check_square(h))


def phi_dense(h: np.ndarray, j: int) -> np.ndarray:
    """phi_j(H) from one block-augmented exponential.

    The (j+1)m x (j+1)m matrix [[H, I, 0..], [0, 0, I, ..], ..., [0, .., 0]]
    has exp whose top block row is [e^H, phi_1(H), ..., phi_j(H)].
    """
    h = _check_square(h)
    _check_index(j)
    if j == 0:
        return expm_dense(h)
    m = h.shape[0]
    size = (j + 1) * m
    aug = np.zeros((size, size), dtype=np.result_type(h, float))
    aug[:m, :m] = h
    for block in range(j):
        rows = slice(block * m, (block + 1) * m)
        cols = slice((block + 1) * m, (block + 2) * m)
        aug[rows, cols] = np.eye(m)
    return scipy.linalg.expm(aug)[:m, j * m :]


def phi_action(h: np.ndarray, j: int, c: np.ndarray) -> np.ndarray:
    """phi_j(H) c from the (m+j) x (m+j) augmented matrix [[H, c, 0], [0, J]]."""
    h = _check_square(h)
    _check_index(j)
    c = np.asarray(c)
    if j == 0:
        return expm_dense(h) @ c
    m = h.shape[0]
    aug = np.zeros((m + j, m + j), dtype=np.result_type(h, c, float))
    aug[:m, :m] = h
    aug[:m, m] = c
    aug[m : m + j - 1, m + 1 : m + j] = np.eye(j - 1)
    return scipy.linalg.expm(aug)[:m, m + j - 1]


def phi_series_oracle(h: np.ndarray, j: int, terms: int = 60) -> np.ndarray:
    """Truncated Taylor series sum_{k=0}^{terms} H^k / (k+j)!."""
    h = _check_square(h)
    if j < 0:
        raise ValueError(f"phi index must be nonnegative, got {j}")
    if terms < 40:
        raise ValueError(f"oracle needs at least 40 terms, got {terms}")
    if np.linalg.norm(h, 2) > 2.0:
        raise ValueError("series oracle is only certified for ||H|| <= 2")
    term = np.eye(h.shape[0], dtype=np.result_type(h, float)) / math.factorial(j)
    total = term.copy()
    for k in range(1, terms + 1):
        term = term @ h / (k + j)
        total = total + term
    return total


def phi_scalar(z, j: int) -> np.ndarray:
    """Elementwise phi_j(z) for real or complex z."""
    _check_index(j)
    z = np.asarray(z, dtype=complex)
    if j == 0:
        return np.exp(z)
    shape = z.shape
    z = z.ravel()
    radius = max(1.0, float(j))
    small = np.abs(z) < radius
    out = np.empty_like(z)

    zs = z[small]
    # |z| < 16 here, so 80 terms leave a remainder far below rounding
    term = np.full_like(zs, 1.0 / math.factorial(j))
    total = term.copy()
    for k in range(1, 80):
        term = term * zs / (k + j)
        total = total + term
    out[small] = total

    zl = z[~small]
    value = np.exp(zl)
    for k in range(j):
        value = (value - 1.0 / math.factorial(k)) / zl
    out[~small] = value
    return out.reshape(shape)
