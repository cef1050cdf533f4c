"""Contextual fraction of an empirical model by linear programming.

The noncontextual fraction is the largest mass of a sub-normalised global
distribution whose context marginals fit underneath the model:

    maximise   sum_g d(g)
    subject to sum_{g|_C = s} d(g) <= e_C(s)   for every context C, outcome s
               d >= 0

Any noncontextual component ``lam * e_NC`` of a convex decomposition is such a
distribution of mass ``lam`` and vice versa, so the optimum equals NCF(e).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .scenario import (
    EmpiricalModel,
    GlobalDistribution,
    MeasurementScenario,
    marginal_model_rows,
    require_valid,
)
from .simplex import LpProblem, LpStatus, solve_lp


SNAP_TOL = 1e-12


class SolverLimitError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class CfResult:
    cf: float
    ncf: float
    witness: GlobalDistribution
    noncontextual_part: Optional[EmpiricalModel]
    residual_part: Optional[EmpiricalModel]
    iterations: int = 0


@functools.lru_cache(maxsize=64)
def _incidence(sc: MeasurementScenario) -> np.ndarray:
    sc.check_guard()
    blocks = []
    for k in range(len(sc.contexts)):
        idx = sc.context_index(k)
        block = np.zeros((sc.row_length(k), sc.n_global))
        block[idx, np.arange(sc.n_global)] = 1.0
        blocks.append(block)
    A = np.vstack(blocks)
    A.setflags(write=False)
    return A


def build_cf_lp(e: EmpiricalModel) -> LpProblem:
    """One variable per global assignment, one row per (context, joint outcome)."""
    A = _incidence(e.scenario)
    return LpProblem(np.ones(A.shape[1]), A, np.concatenate(e.rows))


def contextual_fraction(e: EmpiricalModel, max_iter: int = 10_000) -> CfResult:
    require_valid(e)
    sol = solve_lp(build_cf_lp(e), max_iter=max_iter)
    if sol.status is not LpStatus.OPTIMAL:
        raise SolverLimitError(
            f"simplex stopped with status {sol.status.value} after {sol.iterations} pivots"
        )
    ncf = min(max(sol.optimum, 0.0), 1.0)
    # round-off next to the endpoints would make the residual division meaningless
    if ncf < SNAP_TOL:
        ncf = 0.0
    elif ncf > 1.0 - SNAP_TOL:
        ncf = 1.0
    cf = 1.0 - ncf
    weights = np.clip(sol.solution, 0.0, None)
    if weights.sum() > 1.0:
        weights = weights / weights.sum()
    witness = GlobalDistribution(e.scenario, weights)

    nc_part = residual = None
    if 0.0 < ncf < 1.0:
        marg = marginal_model_rows(witness)
        nc_part = EmpiricalModel(e.scenario, tuple(m / ncf for m in marg))
        residual = EmpiricalModel(
            e.scenario,
            tuple(np.clip(r - m, 0.0, None) / cf for r, m in zip(e.rows, marg)),
        )
    elif ncf == 1.0:
        nc_part = EmpiricalModel(e.scenario, marginal_model_rows(witness))
    else:
        residual = e
    return CfResult(cf, ncf, witness, nc_part, residual, sol.iterations)


def is_noncontextual(e: EmpiricalModel, tol: float = 1e-6) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return contextual_fraction(e).cf <= tol
