"""Shared test fixtures for resolvent-krylov."""

from __future__ import annotations

import numpy as np
import pytest

from resolvent_krylov.experiments import ConvergenceRecord, Method, ProblemName
from resolvent_krylov.operators import MatrixOperator, random_dissipative_matrix
from resolvent_krylov.store import RunManifest


@pytest.fixture
def tmp_store(tmp_path, monkeypatch):
    """Isolated ledger directory: each test gets its own runs.json."""
    monkeypatch.setenv("RKRYLOV_DATA_DIR", str(tmp_path))
    return tmp_path


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_record(
    n: int = 1,
    error: float = 1e-3,
    method: Method = Method.KRYLOV,
    problem: ProblemName = ProblemName.SCHRODINGER,
    dim: int = 64,
    tau: float = 0.02,
    gamma: float = 1.0,
    q: int = 2,
) -> ConvergenceRecord:
    """Factory for ConvergenceRecord objects with sensible defaults."""
    return ConvergenceRecord(
        method=method, problem=problem, dim=dim, tau=tau, gamma=gamma, q=q, n=n, error=error
    )


def power_law_records(exponent: float, n_values, scale: float = 1.0) -> list[ConvergenceRecord]:
    return [make_record(n=n, error=scale * float(n) ** exponent) for n in n_values]


def make_manifest(subcommand: str = "schrodinger", **parameters) -> RunManifest:
    return RunManifest(
        subcommand=subcommand,
        parameters=parameters or {"grid_size": 64},
        tool_version="0.1.0",
    )


def make_dissipative_operator(
    dim: int = 30, seed: int = 0, complex_entries: bool = False
) -> MatrixOperator:
    rng = np.random.default_rng(seed)
    return MatrixOperator(random_dissipative_matrix(dim, rng, complex_entries))
