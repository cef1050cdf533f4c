"""Dense primal simplex for ``max c.x  s.t.  A x <= b,  x >= 0``.

Bland's rule picks both the entering column (lowest index with positive
reduced cost) and the leaving row (lowest basic index among ratio ties), so
the method terminates on degenerate problems and is deterministic.  Rows with
negative right-hand side are handled by a phase-one auxiliary problem.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9


class LpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    LIMIT_EXCEEDED = "limit_exceeded"


@dataclass(frozen=True, eq=False)
class LpProblem:
    objective: np.ndarray
    constraint_matrix: np.ndarray
    bounds: np.ndarray

    def __post_init__(self):
        c = np.array(self.objective, dtype=float)
        A = np.array(self.constraint_matrix, dtype=float)
        b = np.array(self.bounds, dtype=float)
        if A.ndim != 2 or c.shape != (A.shape[1],) or b.shape != (A.shape[0],):
            raise ValueError(
                f"inconsistent LP dimensions: c{c.shape}, A{A.shape}, b{b.shape}"
            )
        for a in (c, A, b):
            a.setflags(write=False)
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraint_matrix", A)
        object.__setattr__(self, "bounds", b)

    @property
    def shape(self) -> tuple[int, int]:
        return self.constraint_matrix.shape


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    optimum: float
    solution: np.ndarray
    iterations: int


def _bland_pivots(T, basis, cost, allowed, max_iter, iterations):
    """Run Bland pivots on tableau ``T`` (rhs in last column) for ``max cost.x``.

    ``T`` and ``basis`` are updated in place.  Returns (status, iterations).
    """
    body = T[:, :-1]
    while True:
        reduced = cost - cost[basis] @ body
        reduced[~allowed] = 0.0
        reduced[basis] = 0.0
        entering = np.flatnonzero(reduced > PIVOT_TOL)
        if entering.size == 0:
            return LpStatus.OPTIMAL, iterations
        if iterations >= max_iter:
            return LpStatus.LIMIT_EXCEEDED, iterations
        j = entering[0]
        col = body[:, j]
        rows = np.flatnonzero(col > PIVOT_TOL)
        if rows.size == 0:
            return LpStatus.UNBOUNDED, iterations
        ratios = T[rows, -1] / col[rows]
        ties = rows[ratios <= ratios.min() + PIVOT_TOL]
        r = ties[np.argmin(basis[ties])]
        _pivot(T, r, j)
        basis[r] = j
        iterations += 1


def _pivot(T, r, j):
    T[r] /= T[r, j]
    factor = T[:, j].copy()
    factor[r] = 0.0
    T -= np.outer(factor, T[r])


def solve_lp(problem: LpProblem, max_iter: int = 10_000) -> LpSolution:
    """Solve ``problem`` to optimality with the dense two-phase simplex."""
    A, b, c = problem.constraint_matrix, problem.bounds, problem.objective
    m, n = A.shape
    neg = b < 0
    k = int(neg.sum())
    width = n + m + k

    # columns: structural | slack | artificial | rhs
    T = np.zeros((m, width + 1))
    T[:, :n] = A
    T[:, n : n + m] = np.eye(m)
    T[:, -1] = b
    T[neg] *= -1.0
    art_rows = np.flatnonzero(neg)
    T[art_rows, n + m + np.arange(k)] = 1.0
    basis = np.arange(n, n + m)
    basis[art_rows] = n + m + np.arange(k)

    allowed = np.ones(width, dtype=bool)
    iterations = 0
    if k:
        phase1 = np.zeros(width)
        phase1[n + m :] = -1.0
        status, iterations = _bland_pivots(T, basis, phase1, allowed, max_iter, iterations)
        if status is LpStatus.LIMIT_EXCEEDED:
            return LpSolution(status, float("nan"), np.zeros(n), iterations)
        if T[basis >= n + m, -1].sum() > FEAS_TOL:
            return LpSolution(LpStatus.INFEASIBLE, float("nan"), np.zeros(n), iterations)
        # drive zero-level artificials out of the basis; drop redundant rows
        keep = np.ones(m, dtype=bool)
        for r in np.flatnonzero(basis >= n + m):
            cand = np.flatnonzero(np.abs(T[r, : n + m]) > PIVOT_TOL)
            if cand.size:
                _pivot(T, r, cand[0])
                basis[r] = cand[0]
            else:
                keep[r] = False
        T, basis = T[keep], basis[keep]
        allowed[n + m :] = False

    cost = np.zeros(width)
    cost[:n] = c
    status, iterations = _bland_pivots(T, basis, cost, allowed, max_iter, iterations)

    x = np.zeros(width)
    x[basis] = T[:, -1]
    x = x[:n]
    if status is LpStatus.OPTIMAL:
        optimum = float(c @ x)
    else:
        optimum = float("nan")
    return LpSolution(status, optimum, x, iterations)
