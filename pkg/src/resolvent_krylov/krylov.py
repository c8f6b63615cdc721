from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import scipy.linalg

from .matfun import phi_action
from .operators import InnerProductSpace, LinearOperator, SolverConfig

logger = logging.getLogger(__name__)

BREAKDOWN_TOLERANCE = 1e-12


class ZeroVectorError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RationalKrylovDecomposition:
    """Orthonormal basis of K_m((gamma - tau A)^{-1}, v) and H = V^* (tau A) V."""

    basis: np.ndarray
    projected: np.ndarray
    gamma: float
    tau: float
    beta: float
    space: InnerProductSpace
    breakdown_step: Optional[int] = None

    @property
    def m(self) -> int:
        return self.basis.shape[1]

    @property
    def breakdown(self) -> bool:
        return self.breakdown_step is not None

    @property
    def initial_vector(self) -> np.ndarray:
        return self.beta * self.basis[:, 0]

    def truncated(self, n: int) -> RationalKrylovDecomposition:
        """Leading n-dimensional subspace; nested spaces share their projection."""
        if n < 1:
            raise ValueError(f"prefix length must be positive, got {n}")
        if n >= self.m:
            return self
        return replace(
            self,
            basis=self.basis[:, :n],
            projected=self.projected[:n, :n],
            breakdown_step=None,
        )

    def gram(self) -> np.ndarray:
        return self.space.gram(self.basis)


def rational_arnoldi(
    op: LinearOperator,
    v: np.ndarray,
    n: int,
    gamma: float,
    tau: float,
    cfg: Optional[SolverConfig] = None,
    space: Optional[InnerProductSpace] = None,
) -> RationalKrylovDecomposition:
    if n < 1:
        raise ValueError(f"subspace dimension must be positive, got {n}")
    space = space or op.space
    v = np.asarray(v)
    beta = space.norm(v)
    if beta == 0:
        raise ZeroVectorError("initial vector is zero")

    dtype = np.result_type(v, op.dtype, float)
    basis = np.zeros((op.dimension, n), dtype=dtype)
    # metric-applied basis, so each projection coefficient costs one vdot
    weighted = np.zeros_like(basis)
    basis[:, 0] = v / beta
    weighted[:, 0] = space.weight * space.metric(basis[:, 0])
    m = n
    breakdown_step = None

    for k in range(1, n):
        w = op.solve_shifted(gamma, tau, basis[:, k - 1], cfg).astype(dtype, copy=False)
        norm_before = space.norm(w)
        for _ in range(2):
            for i in range(k):
                w = w - np.vdot(weighted[:, i], w) * basis[:, i]
        norm_after = space.norm(w)
        if norm_after <= BREAKDOWN_TOLERANCE * norm_before:
            m = k
            breakdown_step = k
            logger.debug("lucky breakdown at step %d", k)
            break
        basis[:, k] = w / norm_after
        weighted[:, k] = space.weight * space.metric(basis[:, k])

    basis = basis[:, :m]
    applied = np.column_stack([tau * op.apply(basis[:, i]) for i in range(m)])
    projected = weighted[:, :m].conj().T @ applied
    return RationalKrylovDecomposition(
        basis=basis,
        projected=projected,
        gamma=gamma,
        tau=tau,
        beta=beta,
        space=space,
        breakdown_step=breakdown_step,
    )


def krylov_phi_approx(dec: RationalKrylovDecomposition, j: int) -> np.ndarray:
    """beta * V phi_j(H) e_1, the Galerkin approximation of phi_j(tau A) v."""
    e1 = np.zeros(dec.m, dtype=dec.projected.dtype)
    e1[0] = 1.0
    return dec.beta * (dec.basis @ phi_action(dec.projected, j, e1))


def check_rational_exactness(
    dec: RationalKrylovDecomposition,
    op: LinearOperator,
    k: int,
    cfg: Optional[SolverConfig] = None,
) -> float:
    """Relative error of the projected evaluation of (gamma - tau A)^{-k} v.

    Exact (to rounding) for k <= m-1; k = m checks one step past exactness.
    """
    if not 0 <= k <= dec.m:
        raise ValueError(f"power k must lie in 0..{dec.m}, got {k}")
    if k == 0:
        return 0.0
    exact = dec.initial_vector
    for _ in range(k):
        exact = op.solve_shifted(dec.gamma, dec.tau, exact, cfg)

    lu = scipy.linalg.lu_factor(dec.gamma * np.eye(dec.m) - dec.projected)
    coeffs = np.zeros(dec.m, dtype=dec.projected.dtype)
    coeffs[0] = 1.0
    for _ in range(k):
        coeffs = scipy.linalg.lu_solve(lu, coeffs)
    projected = dec.beta * (dec.basis @ coeffs)

    return dec.space.norm(exact - projected) / dec.space.norm(exact)
