from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Iterable, Optional

import numpy as np
import scipy.fft

from .krylov import krylov_phi_approx, rational_arnoldi
from .matfun import MAX_PHI_INDEX
from .operators import (
    DiagonalOperator,
    LinearOperator,
    SolverConfig,
    SolverMethod,
    SparseSymmetricOperator,
    assemble_fd_laplacian,
    make_wave_block_operator,
)
from .reference import (
    ReferenceMethod,
    ReferenceSolution,
    exact_diagonal_phi,
    exact_wave_dst,
    implicit_euler,
)

logger = logging.getLogger(__name__)

NOISE_FLOOR = 10 * np.finfo(float).eps
GRID_RATIO_FLOOR = 1e-12


class InsufficientPointsError(ValueError):
    pass


class DegenerateFitError(ValueError):
    pass


class ProblemName(str, Enum):
    SCHRODINGER = "schrodinger"
    WAVE_FD = "wave-fd"


class Method(str, Enum):
    KRYLOV = "krylov"
    EULER = "euler"


@dataclass(frozen=True)
class ProblemSetup:
    name: ProblemName
    size: int
    tau: float
    gamma: float = 1.0
    q: int = 2
    solver: Optional[SolverConfig] = None
    phi_index: int = 0

    def __post_init__(self):
        if self.name == ProblemName.SCHRODINGER:
            if self.size < 8 or self.size % 2:
                raise ValueError(f"Schrodinger grid size must be even and >= 8, got {self.size}")
        elif self.size < 2:
            raise ValueError(f"wave grid size d must be >= 2, got {self.size}")
        if self.q < 1:
            raise ValueError(f"smoothness index q must be >= 1, got {self.q}")
        if self.tau <= 0 or self.gamma <= 0:
            raise ValueError("tau and gamma must be positive")
        if not 0 <= self.phi_index <= MAX_PHI_INDEX:
            raise ValueError(f"phi index must lie in 0..{MAX_PHI_INDEX}")

    @property
    def solver_config(self) -> SolverConfig:
        return self.solver or default_solver(self.name)

    @property
    def dimension(self) -> int:
        if self.name == ProblemName.SCHRODINGER:
            return self.size
        return 2 * self.size**2


@dataclass(frozen=True)
class ConvergenceRecord:
    method: Method
    problem: ProblemName
    dim: int
    tau: float
    gamma: float
    q: int
    n: int
    error: float

    def to_row(self) -> dict:
        row = asdict(self)
        row["method"] = self.method.value
        row["problem"] = self.problem.value
        return row

    @classmethod
    def from_row(cls, row: dict) -> ConvergenceRecord:
        return cls(
            method=Method(row["method"]),
            problem=ProblemName(row["problem"]),
            dim=int(row["dim"]),
            tau=float(row["tau"]),
            gamma=float(row["gamma"]),
            q=int(row["q"]),
            n=int(row["n"]),
            error=float(row["error"]),
        )


@dataclass(frozen=True)
class RateEstimate:
    slope: float
    window: tuple[int, int]
    residual: float


@dataclass(frozen=True, eq=False)
class Problem:
    setup: ProblemSetup
    operator: LinearOperator
    initial: np.ndarray
    reference: ReferenceSolution


def schrodinger_profile(x, q: int) -> np.ndarray:
    """u_0^q on [0, 2pi]: C^{2q} but not C^{2q+1} as a periodic function."""
    x = np.asarray(x, dtype=float)
    scale = (2 / np.pi) ** (4 * q)
    left = scale * (x - np.pi) ** (2 * q) * x ** (2 * q)
    right = scale * (x - np.pi) ** (2 * q) * (x - 2 * np.pi) ** (2 * q)
    return np.where(x <= np.pi, left, right)


def schrodinger_initial_data(N: int, q: int) -> np.ndarray:
    """Fourier coefficients psi_k, k = -N/2..N/2-1, of u_0^q sampled at 2 pi m / N."""
    if N < 8 or N % 2:
        raise ValueError(f"N must be even and >= 8, got {N}")
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    x = 2 * np.pi * np.arange(N) / N
    return scipy.fft.fftshift(scipy.fft.fft(schrodinger_profile(x, q))) / N


def schrodinger_operator(N: int) -> DiagonalOperator:
    """Diagonal generator with entries -i k^2, k = -N/2..N/2-1."""
    k = np.arange(-N // 2, N // 2)
    return DiagonalOperator(-1j * k.astype(float) ** 2)


def wave_profile(d: int, q: int) -> np.ndarray:
    """g_0^q(x, y) = x^{2q}(1-x)^{2q} y^{2q}(1-y)^{2q} on the interior grid, row-major."""
    h = 1.0 / (d + 1)
    x = h * np.arange(1, d + 1)
    p = x ** (2 * q) * (1 - x) ** (2 * q)
    return np.outer(p, p).ravel()


def wave_initial_data(
    d: int, q: int, laplacian: Optional[SparseSymmetricOperator] = None
) -> np.ndarray:
    """[g; g] normalised to unit discrete energy norm."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    laplacian = laplacian or assemble_fd_laplacian(d)
    g = wave_profile(d, q)
    y = np.concatenate([g, g])
    space = make_wave_block_operator(laplacian).space
    return y / space.norm(y)


def build_problem(setup: ProblemSetup) -> Problem:
    j = setup.phi_index
    if setup.name == ProblemName.SCHRODINGER:
        op = schrodinger_operator(setup.size)
        v = schrodinger_initial_data(setup.size, setup.q)
        reference = ReferenceSolution(
            vector=exact_diagonal_phi(op.entries, setup.tau, v, j),
            method=ReferenceMethod.DIAGONAL_EXACT,
            certified_accuracy=1e-14,
        )
    else:
        laplacian = assemble_fd_laplacian(setup.size)
        op = make_wave_block_operator(laplacian)
        v = wave_initial_data(setup.size, setup.q, laplacian)
        reference = ReferenceSolution(
            vector=exact_wave_dst(setup.size, setup.tau, v, j),
            method=ReferenceMethod.DST_EXACT,
            certified_accuracy=1e-12,
        )
    return Problem(setup=setup, operator=op, initial=v, reference=reference)


def run_convergence(
    setup: ProblemSetup,
    n_values: Iterable[int],
    method: Method,
    problem: Optional[Problem] = None,
) -> list[ConvergenceRecord]:
    n_values = sorted(set(n_values))
    if not n_values or n_values[0] < 1:
        raise ValueError("n values must be positive integers")
    problem = problem or build_problem(setup)
    op, space = problem.operator, problem.operator.space
    exact = problem.reference.vector
    logger.info(
        "%s run: %s dim=%d q=%d n<=%d",
        method.value,
        setup.name.value,
        setup.dimension,
        setup.q,
        n_values[-1],
    )

    def record(n: int, approx: np.ndarray) -> ConvergenceRecord:
        return ConvergenceRecord(
            method=method,
            problem=setup.name,
            dim=setup.dimension,
            tau=setup.tau,
            gamma=setup.gamma,
            q=setup.q,
            n=n,
            error=space.norm(approx - exact),
        )

    if method == Method.KRYLOV:
        dec = rational_arnoldi(
            op, problem.initial, n_values[-1], setup.gamma, setup.tau, setup.solver_config
        )
        return [
            record(n, krylov_phi_approx(dec.truncated(n), setup.phi_index))
            for n in n_values
        ]

    if setup.phi_index != 0:
        raise ValueError("implicit Euler only approximates the exponential (phi index 0)")
    return [
        record(n, implicit_euler(op, problem.initial, setup.tau, n, setup.solver_config))
        for n in n_values
    ]


def run_sweep(
    setups: list[ProblemSetup],
    n_values: Iterable[int],
    methods: list[Method],
    max_workers: int = 1,
) -> list[list[ConvergenceRecord]]:
    """One record list per (setup, method) pair, in input order."""
    n_values = list(n_values)
    problems = [build_problem(s) for s in setups]
    tasks = [(p, m) for p in problems for m in methods]

    def run(task) -> list[ConvergenceRecord]:
        problem, method = task
        return run_convergence(problem.setup, n_values, method, problem)

    if max_workers <= 1:
        return [run(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(run, tasks))


def estimate_rate(
    records: list[ConvergenceRecord], window: tuple[int, int]
) -> RateEstimate:
    """Least-squares slope of log(error) against log(n) inside the window."""
    n_lo, n_hi = window
    inside = [r for r in records if n_lo <= r.n <= n_hi]
    if len(inside) < 5:
        raise InsufficientPointsError(
            f"rate fit needs >= 5 records in [{n_lo}, {n_hi}], got {len(inside)}"
        )
    usable = [r for r in inside if r.error > NOISE_FLOOR]
    if len(usable) < 5:
        raise DegenerateFitError("errors stagnate below the noise floor")
    x = np.log([r.n for r in usable])
    y = np.log([r.error for r in usable])
    coeffs, residuals, *_ = np.polyfit(x, y, 1, full=True)
    residual = float(residuals[0]) if len(residuals) else 0.0
    return RateEstimate(slope=float(coeffs[0]), window=(n_lo, n_hi), residual=residual)


def curve_ratio(
    curves: list[list[ConvergenceRecord]],
    n_min: int = 1,
    floor: float = GRID_RATIO_FLOOR,
    n_max: Optional[int] = None,
) -> float:
    """Largest spread max/min across curves at a common n in [n_min, n_max].

    Errors below floor are ignored. Coarse grids leave the n^{-q/2} regime once the
    Krylov space resolves their discrete spectrum, so callers bound n from above.
    """
    by_n: dict[int, list[float]] = {}
    for curve in curves:
        for r in curve:
            if r.n >= n_min and (n_max is None or r.n <= n_max) and r.error >= floor:
                by_n.setdefault(r.n, []).append(r.error)
    ratios = [max(errs) / min(errs) for errs in by_n.values() if len(errs) >= 2]
    return max(ratios, default=1.0)


def grid_independence_check(
    setups: list[ProblemSetup],
    n_values: Iterable[int],
    method: Method = Method.KRYLOV,
    n_min: int = 1,
    n_max: Optional[int] = None,
) -> float:
    if len(setups) < 2:
        raise ValueError("grid independence needs at least two setups")
    return curve_ratio(run_sweep(setups, n_values, [method]), n_min=n_min, n_max=n_max)


def default_solver(name: ProblemName, method: Optional[SolverMethod] = None) -> SolverConfig:
    if name == ProblemName.SCHRODINGER:
        return SolverConfig(method=SolverMethod.DIRECT)
    return SolverConfig(method=method or SolverMethod.DST)
