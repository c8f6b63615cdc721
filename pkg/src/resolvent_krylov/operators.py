from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
import scipy.fft
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

logger = logging.getLogger(__name__)


class SolverFailureError(Exception):
    def __init__(self, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"Shifted solve did not converge in {iterations} iterations "
            f"(relative residual {residual:.3e})"
        )


class DomainError(ValueError):
    pass


class Field(str, Enum):
    REAL = "real"
    COMPLEX = "complex"


class SolverMethod(str, Enum):
    DIRECT = "direct"
    DST = "dst"
    CG = "cg"


class InnerProductForm(str, Enum):
    SCALED_EUCLIDEAN = "scaled-euclidean"
    WAVE_ENERGY = "wave-energy"


@dataclass(frozen=True)
class SolverConfig:
    method: SolverMethod = SolverMethod.DIRECT
    tolerance: float = 1e-12
    max_iterations: int = 10_000

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be positive, got {self.max_iterations}")


@dataclass(frozen=True, eq=False)
class InnerProductSpace:
    """Weighted inner product (x, y) = weight * x^H M y.

    M is the identity for the scaled Euclidean form and blockdiag(-L, I) for the
    wave energy form built on the negative definite Laplacian L.
    """

    dimension: int
    weight: float = 1.0
    laplacian: Optional[sp.csr_matrix] = None

    @classmethod
    def scaled_euclidean(cls, dimension: int, weight: float = 1.0) -> InnerProductSpace:
        return cls(dimension=dimension, weight=weight)

    @classmethod
    def wave_energy(cls, laplacian: sp.csr_matrix, weight: float) -> InnerProductSpace:
        n = laplacian.shape[0]
        return cls(dimension=2 * n, weight=weight, laplacian=laplacian)

    @property
    def form(self) -> InnerProductForm:
        if self.laplacian is None:
            return InnerProductForm.SCALED_EUCLIDEAN
        return InnerProductForm.WAVE_ENERGY

    def metric(self, v: np.ndarray) -> np.ndarray:
        """Apply M to a vector or to the columns of a matrix."""
        if self.laplacian is None:
            return v
        n = self.laplacian.shape[0]
        return np.concatenate([-(self.laplacian @ v[:n]), v[n:]], axis=0)

    def inner(self, v: np.ndarray, w: np.ndarray) -> complex:
        return self.weight * np.vdot(self.metric(v), w)

    def norm(self, v: np.ndarray) -> float:
        return float(np.sqrt(max(self.inner(v, v).real, 0.0)))

    def gram(self, vectors: np.ndarray) -> np.ndarray:
        return self.weight * (self.metric(vectors).conj().T @ vectors)


class LinearOperator(ABC):
    """Stiff operator A with apply and shifted-resolvent solves (gamma - tau*A)^{-1}."""

    default_method: SolverMethod = SolverMethod.DIRECT
    # A commutes with its adjoint in self.space
    normal: bool = False

    def __init__(self, dimension: int, field: Field, space: InnerProductSpace):
        if dimension < 1:
            raise ValueError(f"dimension must be positive, got {dimension}")
        self.dimension = dimension
        self.field = field
        self.space = space

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(complex) if self.field == Field.COMPLEX else np.dtype(float)

    @abstractmethod
    def apply(self, v: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def to_dense(self) -> np.ndarray: ...

    @abstractmethod
    def norm_estimate(self) -> float: ...

    @abstractmethod
    def _solve(
        self, gamma: float, tau: float, w: np.ndarray, cfg: SolverConfig
    ) -> np.ndarray: ...

    def solve_shifted(
        self,
        gamma: float,
        tau: float,
        w: np.ndarray,
        cfg: Optional[SolverConfig] = None,
    ) -> np.ndarray:
        """Return x with gamma*x - tau*A x = w."""
        if gamma <= 0:
            raise DomainError(f"shift gamma must be positive, got {gamma}")
        if tau <= 0:
            raise DomainError(f"step tau must be positive, got {tau}")
        w = np.asarray(w)
        if w.shape != (self.dimension,):
            raise ValueError(
                f"dimension mismatch: expected ({self.dimension},), got {w.shape}"
            )
        cfg = cfg or SolverConfig(method=self.default_method)
        return self._solve(gamma, tau, w, cfg)

    def dissipativity(self, v: np.ndarray) -> float:
        """Re (Av, v) / ||v||^2 in the designated inner product."""
        nv = self.space.norm(v)
        if nv == 0:
            return 0.0
        return float(self.space.inner(v, self.apply(v)).real) / nv**2

    def _unsupported(self, cfg: SolverConfig) -> ValueError:
        return ValueError(
            f"solver method '{cfg.method.value}' is not available for "
            f"{type(self).__name__}"
        )


class DiagonalOperator(LinearOperator):
    default_method = SolverMethod.DIRECT
    normal = True

    def __init__(self, entries: np.ndarray, space: Optional[InnerProductSpace] = None):
        entries = np.asarray(entries)
        if entries.ndim != 1:
            raise ValueError("diagonal entries must be a vector")
        field = Field.COMPLEX if np.iscomplexobj(entries) else Field.REAL
        super().__init__(
            len(entries), field, space or InnerProductSpace.scaled_euclidean(len(entries))
        )
        self.entries = entries

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.entries * v

    def to_dense(self) -> np.ndarray:
        return np.diag(self.entries)

    def norm_estimate(self) -> float:
        return float(np.max(np.abs(self.entries), initial=0.0))

    def _solve(self, gamma, tau, w, cfg):
        if cfg.method != SolverMethod.DIRECT:
            raise self._unsupported(cfg)
        return w / (gamma - tau * self.entries)


class MatrixOperator(LinearOperator):
    """General matrix with LU-based shifted solves in the Euclidean inner product."""

    default_method = SolverMethod.DIRECT

    def __init__(self, matrix, space: Optional[InnerProductSpace] = None):
        n, m = matrix.shape
        if n != m:
            raise ValueError(f"matrix must be square, got {matrix.shape}")
        field = Field.COMPLEX if np.iscomplexobj(matrix) else Field.REAL
        super().__init__(n, field, space or InnerProductSpace.scaled_euclidean(n))
        self.matrix = matrix
        self._factors: dict[tuple[float, float], object] = {}

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray() if sp.issparse(self.matrix) else np.array(self.matrix)

    def norm_estimate(self) -> float:
        if sp.issparse(self.matrix):
            return float(spla.norm(self.matrix, 1))
        return float(np.linalg.norm(self.matrix, 1))

    def _solve(self, gamma, tau, w, cfg):
        if cfg.method != SolverMethod.DIRECT:
            raise self._unsupported(cfg)
        key = (gamma, tau)
        if key not in self._factors:
            if sp.issparse(self.matrix):
                shifted = gamma * sp.identity(self.dimension, format="csc") - tau * self.matrix
                self._factors[key] = spla.splu(sp.csc_matrix(shifted))
            else:
                shifted = gamma * np.eye(self.dimension) - tau * self.matrix
                self._factors[key] = scipy.linalg.lu_factor(shifted)
        factor = self._factors[key]
        if sp.issparse(self.matrix):
            if self.field == Field.COMPLEX:
                return factor.solve(w.astype(complex))
            return _splu_solve(factor, w)
        return scipy.linalg.lu_solve(factor, w)


class SparseSymmetricOperator(LinearOperator):
    """Finite-difference Dirichlet Laplacian on a tensor grid of the unit cube.

    The tensor structure (grid, spacing) enables the sine-transform solver.
    """

    default_method = SolverMethod.DST
    normal = True

    def __init__(self, matrix: sp.csr_matrix, grid: tuple[int, ...], spacing: float):
        n = int(np.prod(grid))
        if matrix.shape != (n, n):
            raise ValueError(
                f"dimension mismatch: grid {grid} needs a {n}x{n} matrix, got {matrix.shape}"
            )
        super().__init__(
            n,
            Field.REAL,
            InnerProductSpace.scaled_euclidean(n, weight=spacing ** len(grid)),
        )
        self.matrix = sp.csr_matrix(matrix)
        self.grid = tuple(grid)
        self.spacing = spacing
        self._factors: dict[tuple[float, float], spla.SuperLU] = {}

    @property
    def eigenvalues(self) -> np.ndarray:
        return laplacian_eigenvalues(self.grid, self.spacing)

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def norm_estimate(self) -> float:
        return float(spla.norm(self.matrix, 1))

    def _solve(self, gamma, tau, w, cfg):
        if cfg.method == SolverMethod.DST and min(self.grid) > 1:
            return self._solve_dst(gamma, tau, w)
        if cfg.method == SolverMethod.CG:
            return self._solve_cg(gamma, tau, w, cfg)
        return self._solve_direct(gamma, tau, w)

    def _shifted(self, gamma: float, tau: float) -> sp.csr_matrix:
        return gamma * sp.identity(self.dimension, format="csr") - tau * self.matrix

    def _solve_dst(self, gamma, tau, w):
        denom = gamma - tau * self.eigenvalues

        def solve_real(x: np.ndarray) -> np.ndarray:
            coeffs = scipy.fft.dstn(x.reshape(self.grid), type=1, norm="ortho")
            return scipy.fft.idstn(coeffs / denom, type=1, norm="ortho").ravel()

        return _apply_real_map(solve_real, w)

    def _solve_direct(self, gamma, tau, w):
        key = (gamma, tau)
        if key not in self._factors:
            self._factors[key] = spla.splu(sp.csc_matrix(self._shifted(gamma, tau)))
        return _splu_solve(self._factors[key], w)

    def _solve_cg(self, gamma, tau, w, cfg):
        shifted = self._shifted(gamma, tau)
        bnorm = np.linalg.norm(w)
        if bnorm == 0:
            return np.zeros_like(w)
        iterations = 0

        def count(_):
            nonlocal iterations
            iterations += 1

        x, info = spla.cg(
            shifted,
            w,
            rtol=cfg.tolerance,
            atol=0.0,
            maxiter=cfg.max_iterations,
            callback=count,
        )
        residual = float(np.linalg.norm(w - shifted @ x) / bnorm)
        if info != 0:
            raise SolverFailureError(residual, iterations)
        logger.debug("CG converged in %d iterations (residual %.2e)", iterations, residual)
        return x


class WaveBlockOperator(LinearOperator):
    """First-order wave operator [[0, I], [L, 0]] in the energy inner product."""

    default_method = SolverMethod.DST
    normal = True

    def __init__(self, laplacian: SparseSymmetricOperator):
        self.laplacian = laplacian
        n = laplacian.dimension
        weight = laplacian.spacing ** len(laplacian.grid)
        super().__init__(
            2 * n, Field.REAL, InnerProductSpace.wave_energy(laplacian.matrix, weight)
        )

    def apply(self, v: np.ndarray) -> np.ndarray:
        n = self.laplacian.dimension
        return np.concatenate([v[n:], self.laplacian.apply(v[:n])])

    def to_dense(self) -> np.ndarray:
        n = self.laplacian.dimension
        return np.block(
            [
                [np.zeros((n, n)), np.eye(n)],
                [self.laplacian.to_dense(), np.zeros((n, n))],
            ]
        )

    def norm_estimate(self) -> float:
        return max(1.0, self.laplacian.norm_estimate())

    def _solve(self, gamma, tau, w, cfg):
        # Schur complement: (gamma^2 - tau^2 L) x1 = gamma b1 + tau b2
        n = self.laplacian.dimension
        b1, b2 = w[:n], w[n:]
        x1 = self.laplacian.solve_shifted(gamma**2, tau**2, gamma * b1 + tau * b2, cfg)
        x2 = (gamma * x1 - b1) / tau
        return np.concatenate([x1, x2])


def laplacian_eigenvalues(grid: tuple[int, ...], spacing: float) -> np.ndarray:
    """Eigenvalues of the Dirichlet FD Laplacian, shaped like the grid."""
    total = np.zeros(grid)
    for axis, d in enumerate(grid):
        j = np.arange(1, d + 1)
        lam = -(4.0 / spacing**2) * np.sin(j * np.pi * spacing / 2) ** 2
        shape = [1] * len(grid)
        shape[axis] = d
        total = total + lam.reshape(shape)
    return total


def _second_difference(d: int) -> sp.csr_matrix:
    return sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(d, d), format="csr")


def assemble_fd_laplacian(d: int) -> SparseSymmetricOperator:
    """Five-point Laplacian (T_d x I_d + I_d x T_d)/h^2 on (0,1)^2, h = 1/(d+1)."""
    if d < 1:
        raise ValueError(f"grid size d must be at least 1, got {d}")
    h = 1.0 / (d + 1)
    t = _second_difference(d)
    eye = sp.identity(d, format="csr")
    matrix = ((sp.kron(t, eye) + sp.kron(eye, t)) / h**2).tocsr()
    matrix.sort_indices()
    return SparseSymmetricOperator(matrix, (d, d), h)


def assemble_fd_laplacian_1d(d: int) -> SparseSymmetricOperator:
    """Three-point Laplacian T_d/h^2 on (0,1), h = 1/(d+1)."""
    if d < 1:
        raise ValueError(f"grid size d must be at least 1, got {d}")
    h = 1.0 / (d + 1)
    matrix = (_second_difference(d) / h**2).tocsr()
    matrix.sort_indices()
    return SparseSymmetricOperator(matrix, (d,), h)


def make_wave_block_operator(laplacian: LinearOperator) -> WaveBlockOperator:
    if not isinstance(laplacian, SparseSymmetricOperator):
        raise ValueError("wave block operator needs a sparse symmetric Laplacian")
    return WaveBlockOperator(laplacian)


def random_dissipative_matrix(
    dim: int, rng: np.random.Generator, complex_entries: bool = False
) -> np.ndarray:
    """A = (S - S^H)/2 - G G^H / dim, so Re (Ax, x) <= 0."""
    s = rng.standard_normal((dim, dim))
    g = rng.standard_normal((dim, dim))
    if complex_entries:
        s = s + 1j * rng.standard_normal((dim, dim))
        g = g + 1j * rng.standard_normal((dim, dim))
    return (s - s.conj().T) / 2 - (g @ g.conj().T) / dim


def _splu_solve(factor, w: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(w):
        return factor.solve(w.real) + 1j * factor.solve(w.imag)
    return factor.solve(w)


def _apply_real_map(fn, w: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(w):
        return fn(w.real) + 1j * fn(w.imag)
    return fn(w)
