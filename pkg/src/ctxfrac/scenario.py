"""Measurement scenarios, empirical models and global distributions.

Outcomes of a context are indexed lexicographically, the first measurement of
the context being the most significant digit.  The same convention orders
global assignments over the full measurement list.
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

PROB_TOL = 1e-9
MAX_GLOBAL_ASSIGNMENTS = 2**20


class ScenarioTooLarge(ValueError):
    """Raised when a scenario has more global assignments than the guard allows."""


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class MeasurementScenario:
    measurements: tuple[str, ...]
    contexts: tuple[tuple[str, ...], ...]
    outcome_arity: int = 2

    def __post_init__(self):
        object.__setattr__(self, "measurements", tuple(self.measurements))
        object.__setattr__(self, "contexts", tuple(tuple(c) for c in self.contexts))
        if self.outcome_arity < 2:
            raise ValueError(f"outcome_arity must be >= 2, got {self.outcome_arity}")
        if len(set(self.measurements)) != len(self.measurements):
            raise ValueError("duplicate measurement labels")
        if not self.contexts:
            raise ValueError("scenario needs at least one context")
        known = set(self.measurements)
        covered = set()
        for k, ctx in enumerate(self.contexts):
            if not ctx:
                raise ValueError(f"context {k} is empty")
            if len(set(ctx)) != len(ctx):
                raise ValueError(f"context {k} repeats a measurement")
            unknown = set(ctx) - known
            if unknown:
                raise ValueError(f"context {k} uses unknown measurements {sorted(unknown)}")
            covered.update(ctx)
        missing = known - covered
        if missing:
            raise ValueError(f"measurements {sorted(missing)} appear in no context")

    @property
    def n_global(self) -> int:
        """Number of global assignments, ``arity ** |X|``."""
        return self.outcome_arity ** len(self.measurements)

    def row_length(self, c: int) -> int:
        return self.outcome_arity ** len(self.contexts[c])

    def check_guard(self) -> None:
        if self.n_global > MAX_GLOBAL_ASSIGNMENTS:
            raise ScenarioTooLarge(
                f"{self.n_global} global assignments exceed the limit of {MAX_GLOBAL_ASSIGNMENTS}"
            )

    def global_assignments(self) -> np.ndarray:
        """All global assignments as an integer array of shape (n_global, |X|)."""
        self.check_guard()
        k = len(self.measurements)
        grid = np.indices((self.outcome_arity,) * k).reshape(k, -1).T
        return grid

    def context_index(self, c: int) -> np.ndarray:
        """For every global assignment, the index of its restriction to context ``c``."""
        if not 0 <= c < len(self.contexts):
            raise IndexError(f"context index {c} out of range")
        return _context_indices(self)[c]


@functools.lru_cache(maxsize=64)
def _context_indices(sc: MeasurementScenario) -> tuple[np.ndarray, ...]:
    g = sc.global_assignments()
    out = []
    for ctx in sc.contexts:
        pos = [sc.measurements.index(m) for m in ctx]
        place = sc.outcome_arity ** np.arange(len(pos) - 1, -1, -1)
        idx = g[:, pos] @ place
        idx.setflags(write=False)
        out.append(idx)
    return tuple(out)


def joint_outcomes(arity: int, length: int) -> list[tuple[int, ...]]:
    """Joint outcomes of a context in canonical order."""
    return list(itertools.product(range(arity), repeat=length))


@dataclass(frozen=True, eq=False)
class EmpiricalModel:
    scenario: MeasurementScenario
    rows: tuple[np.ndarray, ...]

    def __post_init__(self):
        rows = tuple(_frozen(r) for r in self.rows)
        if len(rows) != len(self.scenario.contexts):
            raise ValueError(
                f"{len(rows)} rows given for {len(self.scenario.contexts)} contexts"
            )
        if any(r.ndim != 1 for r in rows):
            raise ValueError("rows must be one-dimensional")
        object.__setattr__(self, "rows", rows)

    def max_deviation(self, other: EmpiricalModel) -> float:
        if self.scenario != other.scenario:
            raise ValueError("models live on different scenarios")
        return max(float(np.max(np.abs(a - b))) for a, b in zip(self.rows, other.rows))

    def to_json(self) -> dict:
        sc = self.scenario
        return {
            "measurements": list(sc.measurements),
            "outcome_arity": sc.outcome_arity,
            "contexts": [list(c) for c in sc.contexts],
            "rows": [[float(p) for p in r] for r in self.rows],
        }

    @classmethod
    def from_json(cls, doc: dict) -> EmpiricalModel:
        try:
            sc = MeasurementScenario(
                measurements=tuple(doc["measurements"]),
                contexts=tuple(tuple(c) for c in doc["contexts"]),
                outcome_arity=int(doc["outcome_arity"]),
            )
            return cls(sc, tuple(doc["rows"]))
        except KeyError as exc:
            raise ValueError(f"model document is missing key {exc}") from None

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def loads(cls, text: str) -> EmpiricalModel:
        return cls.from_json(json.loads(text))


@dataclass(frozen=True, eq=False)
class GlobalDistribution:
    """A (possibly sub-normalised) distribution over global assignments."""

    scenario: MeasurementScenario
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.scenario.check_guard()
        w = _frozen(self.weights)
        if w.shape != (self.scenario.n_global,):
            raise ValueError(
                f"expected {self.scenario.n_global} weights, got shape {w.shape}"
            )
        if np.any(w < 0):
            raise ValueError("global weights must be nonnegative")
        if w.sum() > 1 + PROB_TOL:
            raise ValueError(f"total mass {w.sum()} exceeds 1")
        object.__setattr__(self, "weights", w)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def to_json(self) -> dict:
        return {
            "measurements": list(self.scenario.measurements),
            "outcome_arity": self.scenario.outcome_arity,
            "weights": [float(w) for w in self.weights],
            "total_mass": self.total_mass,
        }


@dataclass(frozen=True)
class Violation:
    context: int
    check: str
    detail: str

    def __str__(self):
        return f"context {self.context}: {self.check} ({self.detail})"


def validate_model(e: EmpiricalModel, tol: float = PROB_TOL) -> list[Violation]:
    """Return every failed invariant of ``e``; an empty list means the model is valid."""
    out = []
    for k, row in enumerate(e.rows):
        want = e.scenario.row_length(k)
        if row.size != want:
            out.append(Violation(k, "length", f"{row.size} entries, expected {want}"))
            continue
        if not np.all(np.isfinite(row)):
            out.append(Violation(k, "finite", "row contains NaN or infinity"))
            continue
        if np.any(row < 0):
            out.append(Violation(k, "negativity", f"min entry {row.min():g}"))
        total = float(row.sum())
        if abs(total - 1.0) > tol:
            out.append(Violation(k, "normalisation", f"row sums to {total:g}"))
    return out


def require_valid(e: EmpiricalModel) -> None:
    problems = validate_model(e)
    if problems:
        raise ValueError("invalid empirical model: " + "; ".join(map(str, problems)))


def marginalize(d: GlobalDistribution, c: int) -> np.ndarray:
    """Push ``d`` forward onto the joint outcomes of context ``c``."""
    sc = d.scenario
    idx = sc.context_index(c)
    return np.bincount(idx, weights=d.weights, minlength=sc.row_length(c))


def marginal_model_rows(d: GlobalDistribution) -> tuple[np.ndarray, ...]:
    return tuple(marginalize(d, k) for k in range(len(d.scenario.contexts)))


def mix_models(e1: EmpiricalModel, e2: EmpiricalModel, lam: float) -> EmpiricalModel:
    """Convex combination ``lam * e1 + (1 - lam) * e2``, row by row."""
    if e1.scenario != e2.scenario:
        raise ValueError("cannot mix models on different scenarios")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"mixing weight must lie in [0, 1], got {lam}")
    rows = tuple(lam * a + (1.0 - lam) * b for a, b in zip(e1.rows, e2.rows))
    return EmpiricalModel(e1.scenario, rows)


TABLE1_SCENARIO = MeasurementScenario(
    measurements=("a1", "a2", "b"),
    contexts=(("a1", "b"), ("a2", "b")),
    outcome_arity=2,
)

_TABLE1 = {
    "table1a": ((1, 0, 0, 0), (1, 0, 0, 0)),
    "table1b": ((1, 0, 0, 0), (0, 0, 0, 1)),
    "table1c": ((1, 0, 0, 0), (0.5, 0, 0, 0.5)),
}

FIXTURE_NAMES = tuple(_TABLE1)


def fixture_model(name: str) -> EmpiricalModel:
    """The three two-context example tables on measurements a1, a2, b."""
    try:
        rows = _TABLE1[name]
    except KeyError:
        raise ValueError(f"unknown fixture {name!r}; choose from {FIXTURE_NAMES}") from None
    return EmpiricalModel(TABLE1_SCENARIO, rows)


def scenario_from_contexts(contexts: Sequence[Sequence[str]], arity: int = 2) -> MeasurementScenario:
    """Build a scenario whose measurement list is the contexts' labels in first-seen order."""
    seen: dict[str, None] = {}
    for ctx in contexts:
        for m in ctx:
            seen.setdefault(m)
    return MeasurementScenario(tuple(seen), tuple(tuple(c) for c in contexts), arity)
