"""Resolvent Krylov approximation of exp(tau A) v and phi_j(tau A) v."""

__version__ = "0.1.0"

from .experiments import (
    ConvergenceRecord,
    DegenerateFitError,
    InsufficientPointsError,
    Method,
    ProblemName,
    ProblemSetup,
    RateEstimate,
    build_problem,
    estimate_rate,
    grid_independence_check,
    run_convergence,
    run_sweep,
)
from .krylov import (
    RationalKrylovDecomposition,
    ZeroVectorError,
    check_rational_exactness,
    krylov_phi_approx,
    rational_arnoldi,
)
from .matfun import expm_dense, phi_action, phi_dense, phi_scalar, phi_series_oracle
from .operators import (
    DiagonalOperator,
    DomainError,
    InnerProductSpace,
    LinearOperator,
    MatrixOperator,
    SolverConfig,
    SolverFailureError,
    SolverMethod,
    SparseSymmetricOperator,
    WaveBlockOperator,
    assemble_fd_laplacian,
    assemble_fd_laplacian_1d,
    make_wave_block_operator,
)
from .reference import exact_diagonal_phi, exact_wave_dst, implicit_euler
from .smoothing import DegenerateInputError, apply_smoother, h_coefficients, smoothing_rate_study
from .store import RunLedger, RunManifest, TransactionalLedger

__all__ = [
    "ConvergenceRecord",
    "DegenerateFitError",
    "DegenerateInputError",
    "DiagonalOperator",
    "DomainError",
    "InnerProductSpace",
    "InsufficientPointsError",
    "LinearOperator",
    "MatrixOperator",
    "Method",
    "ProblemName",
    "ProblemSetup",
    "RateEstimate",
    "RationalKrylovDecomposition",
    "RunLedger",
    "RunManifest",
    "SolverConfig",
    "SolverFailureError",
    "SolverMethod",
    "SparseSymmetricOperator",
    "TransactionalLedger",
    "WaveBlockOperator",
    "ZeroVectorError",
    "apply_smoother",
    "assemble_fd_laplacian",
    "assemble_fd_laplacian_1d",
    "build_problem",
    "check_rational_exactness",
    "estimate_rate",
    "exact_diagonal_phi",
    "exact_wave_dst",
    "expm_dense",
    "grid_independence_check",
    "h_coefficients",
    "implicit_euler",
    "krylov_phi_approx",
    "make_wave_block_operator",
    "phi_action",
    "phi_dense",
    "phi_scalar",
    "phi_series_oracle",
    "rational_arnoldi",
    "run_convergence",
    "run_sweep",
    "smoothing_rate_study",
]
