"""Discrete optimal transport between screenshot embedding sets.

Wires the exact network-simplex solver and the entropic Sinkhorn
solver behind one interface, computes app-to-app distances from
pairwise cosine costs, and caches results for interactive reuse.
"""
from __future__ import annotations

import csv
import hashlib
import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, EmptySet, InfeasibleMarginals
from .geometry import pairwise_cost
from .network_simplex import solve_transport
from .sinkhorn import sinkhorn_log

SIMPLEX_ATOL = 1e-9
FEASIBILITY_ATOL = 1e-6
SPARSE_EPS = 1e-12


def validate_marginal(masses: np.ndarray, label: str = "marginal") -> np.ndarray:
    """Check simplex membership: nonnegative, summing to 1 within 1e-9."""
    m = np.asarray(masses, dtype=np.float64)
    if m.ndim != 1 or m.size == 0:
        raise InfeasibleMarginals(f"{label} must be a non-empty 1-d mass vector")
    if np.any(m < 0.0):
        raise InfeasibleMarginals(f"{label} has negative mass entries")
    total = float(m.sum())
    if abs(total - 1.0) > SIMPLEX_ATOL:
        raise InfeasibleMarginals(f"{label} sums to {total!r}, expected 1")
    return m


def uniform_marginal(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n, dtype=np.float64)


@dataclass(frozen=True)
class SolverConfig:
    """Solver selection and parameters for one distance computation.

    solver "auto" uses the exact solver while n_a*n_b stays at or below
    exact_threshold, then falls back to Sinkhorn.
    """

    solver: str = "auto"
    epsilon: float = 0.01
    tol: float = 1e-6
    max_iter: int = 5000
    exact_threshold: int = 262144

    def __post_init__(self):
        if self.solver not in ("auto", "exact", "sinkhorn"):
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")

    def resolve(self, n_a: int, n_b: int) -> str:
        if self.solver != "auto":
            return self.solver
        return "exact" if n_a * n_b <= self.exact_threshold else "sinkhorn"

    def digest(self) -> str:
        payload = json.dumps(
            {
                "solver": self.solver,
                "epsilon": self.epsilon,
                "tol": self.tol,
                "max_iter": self.max_iter,
                "exact_threshold": self.exact_threshold,
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass
class TransportPlan:
    """Coupling matrix with the marginals it satisfies."""

    matrix: np.ndarray
    row_marginal: np.ndarray
    col_marginal: np.ndarray

    def marginal_violation(self) -> float:
        row = np.abs(self.matrix.sum(axis=1) - self.row_marginal).max()
        col = np.abs(self.matrix.sum(axis=0) - self.col_marginal).max()
        return float(max(row, col))

    def sparse_cells(self, eps: float = SPARSE_EPS) -> list[tuple[int, int, float]]:
        rows, cols = np.nonzero(self.matrix > eps)
        return [(int(i), int(j), float(self.matrix[i, j])) for i, j in zip(rows, cols)]


@dataclass
class OtResult:
    """Transport distance plus the plan and cost matrix that produced it."""

    distance: float
    plan: TransportPlan
    cost: np.ndarray
    solver: str
    iterations: int
    converged: bool

    @property
    def shape(self) -> tuple[int, int]:
        return self.plan.matrix.shape

    def top_pairs(self, limit: int = 20) -> list[tuple[int, int, float, float]]:
        """Heaviest plan cells as (row, col, mass, cost), mass-descending."""
        cells = self.plan.sparse_cells()
        cells.sort(key=lambda c: (-c[2], c[0], c[1]))
        return [(i, j, m, float(self.cost[i, j])) for i, j, m in cells[:limit]]

    def to_json_dict(self) -> dict:
        n_a, n_b = self.shape
        return {
            "distance": self.distance,
            "n_a": n_a,
            "n_b": n_b,
            "plan": [[i, j, m] for i, j, m in self.plan.sparse_cells()],
            "solver": self.solver,
            "converged": self.converged,
        }

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row", "col", "mass", "cost"])
            for i, j, m in self.plan.sparse_cells():
                writer.writerow([i, j, repr(m), repr(float(self.cost[i, j]))])


def _validate_problem(cost: np.ndarray, row_m: np.ndarray, col_m: np.ndarray):
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2:
        raise DimensionMismatch(f"cost must be 2-d, got shape {cost.shape}")
    row_m = validate_marginal(row_m, "row marginal")
    col_m = validate_marginal(col_m, "column marginal")
    if cost.shape != (row_m.size, col_m.size):
        raise DimensionMismatch(
            f"cost shape {cost.shape} does not match marginals ({row_m.size}, {col_m.size})"
        )
    return cost, row_m, col_m


def solve_exact(cost: np.ndarray, row_m: np.ndarray, col_m: np.ndarray) -> OtResult:
    """Exact 1-Wasserstein value and a vertex-optimal plan."""
    cost, row_m, col_m = _validate_problem(cost, row_m, col_m)
    matrix, _ = solve_transport(cost, row_m, col_m)
    distance = float(np.sum(matrix * cost))
    plan = TransportPlan(matrix=matrix, row_marginal=row_m, col_marginal=col_m)
    return OtResult(distance, plan, cost, solver="exact", iterations=0, converged=True)


def solve_sinkhorn(
    cost: np.ndarray,
    row_m: np.ndarray,
    col_m: np.ndarray,
    epsilon: float = 0.01,
    max_iter: int = 5000,
    tol: float = 1e-6,
) -> OtResult:
    """Entropic upper bound on the exact distance with a feasible plan."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    cost, row_m, col_m = _validate_problem(cost, row_m, col_m)
    matrix, iterations, converged = sinkhorn_log(cost, row_m, col_m, epsilon, max_iter, tol)
    distance = float(np.sum(matrix * cost))
    plan = TransportPlan(matrix=matrix, row_marginal=row_m, col_marginal=col_m)
    return OtResult(distance, plan, cost, solver="sinkhorn", iterations=iterations, converged=converged)


class PlanCache:
    """Concurrent (query, target, config) -> OtResult cache.

    Interactive service queries repeat pairs; full sweeps do not, so the
    cache is bounded only by what callers put in it. An optional spill
    directory persists entries across processes.
    """

    def __init__(self, spill_dir: str | Path | None = None):
        self._lock = threading.Lock()
        self._entries: dict[tuple[str, str, str], OtResult] = {}
        self.spill_dir = Path(spill_dir) if spill_dir else None
        if self.spill_dir:
            self.spill_dir.mkdir(parents=True, exist_ok=True)

    def _key(self, a_id: str, b_id: str, digest: str) -> tuple[str, str, str]:
        return (a_id, b_id, digest)

    def _spill_path(self, key: tuple[str, str, str]) -> Path:
        name = hashlib.sha256("\x1f".join(key).encode()).hexdigest()
        return self.spill_dir / f"{name}.npz"

    def get(self, a_id: str, b_id: str, digest: str) -> Optional[OtResult]:
        key = self._key(a_id, b_id, digest)
        with self._lock:
            hit = self._entries.get(key)
        if hit is not None or self.spill_dir is None:
            return hit
        path = self._spill_path(key)
        if not path.exists():
            return None
        data = np.load(path, allow_pickle=False)
        plan = TransportPlan(
            matrix=data["matrix"],
            row_marginal=data["row_marginal"],
            col_marginal=data["col_marginal"],
        )
        result = OtResult(
            distance=float(data["distance"]),
            plan=plan,
            cost=data["cost"],
            solver=str(data["solver"]),
            iterations=int(data["iterations"]),
            converged=bool(data["converged"]),
        )
        with self._lock:
            self._entries[key] = result
        return result

    def put(self, a_id: str, b_id: str, digest: str, result: OtResult) -> None:
        key = self._key(a_id, b_id, digest)
        with self._lock:
            self._entries[key] = result
        if self.spill_dir is not None:
            np.savez(
                self._spill_path(key),
                matrix=result.plan.matrix,
                row_marginal=result.plan.row_marginal,
                col_marginal=result.plan.col_marginal,
                cost=result.cost,
                distance=result.distance,
                solver=result.solver,
                iterations=result.iterations,
                converged=result.converged,
            )

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


def app_distance(
    a,
    b,
    config: SolverConfig | None = None,
    cache: PlanCache | None = None,
) -> OtResult:
    """Transport distance between two screen sets.

    Builds the pairwise cosine cost between the sets' unit vectors and
    couples each set's marginal (uniform unless the set carries its
    own). Dispatch follows the config's exact/sinkhorn threshold.
    """
    config = config or SolverConfig()
    if a.vectors.shape[0] == 0 or b.vectors.shape[0] == 0:
        raise EmptySet("app distance requires non-empty screen sets")
    if a.vectors.shape[1] != b.vectors.shape[1]:
        raise DimensionMismatch(
            f"embedding dims differ: {a.vectors.shape[1]} vs {b.vectors.shape[1]}"
        )

    digest = config.digest()
    if cache is not None:
        hit = cache.get(a.id, b.id, digest)
        if hit is not None:
            return hit

    cost = pairwise_cost(a.vectors, b.vectors)
    n_a, n_b = cost.shape
    solver = config.resolve(n_a, n_b)
    if solver == "exact":
        result = solve_exact(cost, a.marginal, b.marginal)
    else:
        result = solve_sinkhorn(
            cost,
            a.marginal,
            b.marginal,
            epsilon=config.epsilon,
            max_iter=config.max_iter,
            tol=config.tol,
        )
    if cache is not None:
        cache.put(a.id, b.id, digest, result)
    return result
