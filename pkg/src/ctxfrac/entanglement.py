"""Contextual fraction as an entanglement measure for two qubits.

The distinguished contextual fraction of a 2-qubit state depends only on its
Schmidt angle theta: it is the contextual fraction of
cos(theta/2)|00> + e^{i pi/4} sin(theta/2)|11> measured in the Pauli x and y
bases.  Sweeps over equatorial measurement pairs and over diagonal states are
provided for exploring the landscape around it.
"""

from __future__ import annotations

import collections
import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .contextual import contextual_fraction
from .states import (
    BASIS_ALIASES,
    BellScenario,
    PureState,
    born_model,
    diag_entropy,
    diag_state,
    entanglement_entropy,
    equatorial,
    ghz_state,
    random_state,
    schmidt_decompose,
    wrap_phase,
)

PLATEAU_TOL = 1e-6


@dataclass(frozen=True)
class EquatorialScenario:
    """Every party chooses between B(pi/2, phi1) and B(pi/2, phi2)."""

    phi1: float
    phi2: float

    def __post_init__(self):
        for phi in (self.phi1, self.phi2):
            if not 0.0 <= phi < 2 * math.pi:
                raise ValueError(f"azimuth {phi} outside [0, 2pi)")

    def bell(self, n: int = 2) -> BellScenario:
        return BellScenario.uniform(equatorial(self.phi1), equatorial(self.phi2), n)


def xy_scenario(n: int = 2) -> BellScenario:
    return BellScenario.uniform(BASIS_ALIASES["x"], BASIS_ALIASES["y"], n)


class DistinguishedResult(NamedTuple):
    theta: float
    entropy: float
    cf: float


def state_scenario(psi: PureState) -> BellScenario:
    """Both parties measure B_{pi/8}, B_{5pi/8} rotated by their Schmidt unitary."""
    form = schmidt_decompose(psi)
    pair = (BASIS_ALIASES["pi8"], BASIS_ALIASES["5pi8"])
    return BellScenario((pair, pair), unitaries=(form.u_a, form.u_b))


def cf_of_theta(theta: float) -> float:
    return contextual_fraction(born_model(diag_state(theta, math.pi / 4), xy_scenario())).cf


def distinguished_cf(psi: PureState) -> DistinguishedResult:
    theta = schmidt_decompose(psi).theta
    return DistinguishedResult(theta, entanglement_entropy(psi), cf_of_theta(theta))


def threshold_entropy() -> float:
    """Entropy at theta = pi/4, below which the distinguished fraction vanishes."""
    r2 = math.sqrt(2.0)
    return 0.25 * (6.0 + r2 * math.log2(3.0 - 2.0 * r2))


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int
    endpoint: bool = False

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count, endpoint=self.endpoint)


@dataclass(frozen=True, eq=False)
class SweepGrid:
    axes: tuple[Axis, Axis]
    layers: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = (self.axes[0].count, self.axes[1].count)
        for name, values in self.layers.items():
            if values.shape != shape:
                raise ValueError(f"layer {name} has shape {values.shape}, expected {shape}")
            if not np.all(np.isfinite(values)):
                raise ValueError(f"layer {name} has non-finite values")

    def to_csv(self) -> str:
        a, b = self.axes
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([a.name, b.name, *self.layers])
        for i, x in enumerate(a.values()):
            for j, y in enumerate(b.values()):
                w.writerow([repr(float(x)), repr(float(y))]
                           + [repr(float(v[i, j])) for v in self.layers.values()])
        return buf.getvalue()


def _map(fn: Callable, items: Sequence, workers: int) -> list:
    # executor.map keeps input order, so assembly is independent of scheduling
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _equatorial_cf(args) -> float:
    amps, phi1, phi2 = args
    psi = PureState(amps)
    sc = BellScenario.uniform(equatorial(phi1), equatorial(phi2), psi.n_qubits)
    return contextual_fraction(born_model(psi, sc)).cf


def equatorial_sweep(
    subject: Optional[PureState] = None,
    grid_n: int = 64,
    span: float = math.pi,
    workers: int = 1,
) -> SweepGrid:
    """CF of ``subject`` (default GHZ_2) for every equatorial basis pair on a grid.

    Shifting either azimuth by pi only relabels that measurement's outcomes,
    so ``span=pi`` covers every distinct model; pass ``2*pi`` for the full
    azimuth range.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    if not 0 < span <= 2 * math.pi:
        raise ValueError("span must lie in (0, 2pi]")
    psi = ghz_state(2) if subject is None else subject
    axis1, axis2 = Axis("phi1", 0.0, span, grid_n), Axis("phi2", 0.0, span, grid_n)
    items = [(psi.amplitudes, p1, p2) for p1 in axis1.values() for p2 in axis2.values()]
    cf = np.array(_map(_equatorial_cf, items, workers)).reshape(grid_n, grid_n)
    return SweepGrid((axis1, axis2), {"cf": cf})


def _diagonal_point(args) -> tuple[float, float]:
    theta, phi = args
    psi = diag_state(theta, phi)
    return diag_entropy(theta), contextual_fraction(born_model(psi, xy_scenario())).cf


def diagonal_sweep(grid_n: int = 64, workers: int = 1) -> SweepGrid:
    """Entropy and x/y-basis CF of the diagonal states over theta in [0,pi], phi in [0,2pi)."""
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    ax_t = Axis("theta", 0.0, math.pi, grid_n, endpoint=True)
    ax_p = Axis("phi", 0.0, 2 * math.pi, grid_n)
    items = [(t, p) for t in ax_t.values() for p in ax_p.values()]
    out = np.array(_map(_diagonal_point, items, workers)).reshape(grid_n, grid_n, 2)
    return SweepGrid((ax_t, ax_p), {"entropy": out[..., 0], "cf": out[..., 1]})


class CurvePoint(NamedTuple):
    theta: float
    entropy: float
    cf: float


def theta_curve(points: int = 201, full: bool = False) -> list[CurvePoint]:
    """Distinguished CF and entropy along theta in [0, pi/2] (or [0, pi] if ``full``)."""
    if points < 2:
        raise ValueError("points must be at least 2")
    stop = math.pi if full else math.pi / 2
    out = []
    for theta in np.linspace(0.0, stop, points):
        res = distinguished_cf(diag_state(float(theta), 0.0))
        out.append(CurvePoint(float(theta), res.entropy, res.cf))
    return out


def curve_csv(curve: Iterable[CurvePoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta", "entropy", "cf"])
    for p in curve:
        w.writerow([repr(p.theta), repr(p.entropy), repr(p.cf)])
    return buf.getvalue()


@dataclass(frozen=True)
class MonotonicityReport:
    seed: int
    samples: int
    violations: int
    worst_gap: float

    def to_csv(self) -> str:
        return f"seed,samples,violations\n{self.seed},{self.samples},{self.violations}\n"


def monotonicity_check(samples: int = 1000, seed: int = 42, tol: float = 1e-6) -> MonotonicityReport:
    """Count random pairs where the more entangled state has the smaller distinguished CF."""
    if samples < 2:
        raise ValueError("samples must be at least 2")
    rng = np.random.default_rng(seed)
    violations = 0
    worst = 0.0
    for _ in range(samples):
        a = distinguished_cf(random_state(rng))
        b = distinguished_cf(random_state(rng))
        if a.entropy < b.entropy:
            a, b = b, a
        if a.entropy > b.entropy:
            gap = b.cf - a.cf
            worst = max(worst, gap)
            if gap > tol:
                violations += 1
    return MonotonicityReport(seed, samples, violations, worst)


def phase_rotation_equivalence(theta: float, varphi: float, phase_sign: int = 1) -> float:
    """Max entrywise gap between a basis rotation and a state phase.

    Compares |diag; theta, 0> measured in B(pi/2, varphi), B(pi/2, pi/2 + varphi)
    with |diag; theta, 2*phase_sign*varphi> measured in B_x, B_y.  Under the
    Born rule the two models coincide for ``phase_sign=-1``.
    """
    if phase_sign not in (1, -1):
        raise ValueError("phase_sign must be +1 or -1")
    rotated = BellScenario.uniform(equatorial(varphi), equatorial(math.pi / 2 + varphi), 2)
    lhs = born_model(diag_state(theta, 0.0), rotated)
    rhs = born_model(diag_state(theta, wrap_phase(2 * phase_sign * varphi)), xy_scenario())
    return lhs.max_deviation(rhs)


def local_maxima(values: np.ndarray, tol: float = PLATEAU_TOL) -> list[tuple[int, int]]:
    """Strict local maxima on a periodic 2-D grid, plateaus merged.

    Cells joined through 8-neighbours differing by at most ``tol`` form a
    plateau; a plateau counts once if all cells bordering it are lower.
    Returns one representative (row, col) per maximum, the first in row-major order.
    """
    n, m = values.shape
    seen = np.zeros(values.shape, dtype=bool)
    steps = [(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1) if di or dj]
    found = []
    for start in np.ndindex(n, m):
        if seen[start]:
            continue
        seen[start] = True
        comp, is_max = [start], True
        queue = collections.deque([start])
        while queue:
            i, j = queue.popleft()
            for di, dj in steps:
                nb = ((i + di) % n, (j + dj) % m)
                if abs(values[nb] - values[i, j]) <= tol:
                    if not seen[nb]:
                        seen[nb] = True
                        comp.append(nb)
                        queue.append(nb)
                elif values[nb] > values[i, j]:
                    is_max = False
        if is_max and len(comp) < n * m:
            found.append(min(comp))
    return sorted(found)
