"""Qubit states, Bloch bases and Born-rule models for (n,2,2) Bell scenarios.

Qubit 0 (Alice) is the most significant index of an amplitude vector, matching
the digit order of joint outcomes in :mod:`ctxfrac.scenario`.
"""

from __future__ import annotations

import functools
import itertools
import math
import string
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .scenario import EmpiricalModel, GlobalDistribution, MeasurementScenario

NORM_TOL = 1e-9
TWO_PI = 2.0 * math.pi


def _frozen(values, dtype=complex) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes).ravel()
        n = amps.size.bit_length() - 1
        if n < 1 or amps.size != 2**n:
            raise ValueError(f"amplitude vector of length {amps.size} is not a qubit register")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalised (norm {norm:.12g})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_unnormalized(cls, amps) -> PureState:
        amps = np.asarray(amps, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("zero vector cannot be normalised")
        return cls(amps / norm)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def overlap(self, other: PureState) -> float:
        """Modulus of the inner product; 1 means equal up to global phase."""
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)))

    def coefficient_matrix(self) -> np.ndarray:
        if self.n_qubits != 2:
            raise ValueError(f"expected a 2-qubit state, got {self.n_qubits} qubits")
        return self.amplitudes.reshape(2, 2)


def _check_angles(theta: float, phi: float) -> None:
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"polar angle {theta} outside [0, pi]")
    if not 0.0 <= phi < TWO_PI:
        raise ValueError(f"azimuthal angle {phi} outside [0, 2pi)")


def wrap_phase(phi: float) -> float:
    """Reduce an azimuthal angle into [0, 2pi)."""
    phi = math.fmod(phi, TWO_PI)
    if phi < 0:
        phi += TWO_PI
    return 0.0 if phi >= TWO_PI else phi


def _bloch_amps(theta: float, phi: float) -> np.ndarray:
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


def bloch_ket(theta: float, phi: float) -> PureState:
    """cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
    _check_angles(theta, phi)
    return PureState(_bloch_amps(theta, phi))


@dataclass(frozen=True)
class BlochBasis:
    """The basis {|theta,phi>, |pi-theta, pi+phi>}; outcome 0 is the first ket."""

    theta: float
    phi: float

    def __post_init__(self):
        _check_angles(self.theta, self.phi)

    def kets(self) -> np.ndarray:
        """2x2 matrix whose columns are the outcome-0 and outcome-1 kets."""
        return np.column_stack(
            [
                _bloch_amps(self.theta, self.phi),
                _bloch_amps(math.pi - self.theta, math.pi + self.phi),
            ]
        )


def equatorial(phi: float) -> BlochBasis:
    return BlochBasis(math.pi / 2, wrap_phase(phi))


BASIS_ALIASES = {
    "z": BlochBasis(0.0, 0.0),
    "x": BlochBasis(math.pi / 2, 0.0),
    "y": BlochBasis(math.pi / 2, math.pi / 2),
    "pi8": BlochBasis(math.pi / 2, math.pi / 8),
    "5pi8": BlochBasis(math.pi / 2, 5 * math.pi / 8),
}


def _party_label(p: int) -> str:
    return string.ascii_lowercase[p]


@dataclass(frozen=True, eq=False)
class BellScenario:
    """An (n,2,2) Bell scenario: every party picks one of two qubit bases.

    ``unitaries[p]``, when given, rotates both of party ``p``'s bases.
    """

    pairs: tuple[tuple[BlochBasis, BlochBasis], ...]
    unitaries: Optional[tuple[Optional[np.ndarray], ...]] = None

    def __post_init__(self):
        pairs = tuple(tuple(p) for p in self.pairs)
        if len(pairs) < 2:
            raise ValueError("a Bell scenario needs at least two parties")
        if len(pairs) > 10:
            raise ValueError("at most 10 parties are supported")
        if any(len(p) != 2 for p in pairs):
            raise ValueError("each party needs exactly two bases")
        object.__setattr__(self, "pairs", pairs)
        if self.unitaries is not None:
            us = tuple(None if u is None else _frozen(u) for u in self.unitaries)
            if len(us) != len(pairs):
                raise ValueError("one local unitary (or None) per party is required")
            for u in us:
                if u is not None and (
                    u.shape != (2, 2) or not np.allclose(u.conj().T @ u, np.eye(2), atol=NORM_TOL)
                ):
                    raise ValueError("local rotations must be 2x2 unitaries")
            object.__setattr__(self, "unitaries", us)

    @classmethod
    def uniform(cls, first: BlochBasis, second: BlochBasis, n: int) -> BellScenario:
        """All ``n`` parties share the same pair of bases."""
        return cls(((first, second),) * n)

    @property
    def n_parties(self) -> int:
        return len(self.pairs)

    def kets(self, party: int, choice: int) -> np.ndarray:
        k = self.pairs[party][choice].kets()
        if self.unitaries is not None and self.unitaries[party] is not None:
            k = self.unitaries[party] @ k
        return k

    def choices(self) -> list[tuple[int, ...]]:
        """Basis choices of each context, in context order."""
        return list(itertools.product(range(2), repeat=self.n_parties))

    @functools.cached_property
    def scenario(self) -> MeasurementScenario:
        labels = [[f"{_party_label(p)}{k + 1}" for k in range(2)] for p in range(self.n_parties)]
        measurements = tuple(m for pair in labels for m in pair)
        contexts = tuple(
            tuple(labels[p][c] for p, c in enumerate(ch)) for ch in self.choices()
        )
        return MeasurementScenario(measurements, contexts, 2)


def product_state(factors: Sequence[PureState]) -> PureState:
    amps = np.array([1.0 + 0j])
    for f in factors:
        if f.n_qubits != 1:
            raise ValueError("product factors must be single qubits")
        amps = np.kron(amps, f.amplitudes)
    return PureState(amps)


def diag_state(theta: float, phi: float) -> PureState:
    """cos(theta/2)|00> + e^{i phi} sin(theta/2)|11>."""
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta {theta} outside [0, pi]")
    return PureState([math.cos(theta / 2), 0, 0, np.exp(1j * phi) * math.sin(theta / 2)])


def ghz_state(n: int) -> PureState:
    if n < 2:
        raise ValueError("GHZ state needs at least two qubits")
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    return PureState(amps)


def born_model(psi: PureState, sc: BellScenario) -> EmpiricalModel:
    """Model of ``psi`` in ``sc``: |<outcome kets|psi>|^2 for every context."""
    n = sc.n_parties
    if psi.n_qubits != n:
        raise ValueError(f"{psi.n_qubits}-qubit state in a {n}-party scenario")
    tensor = psi.amplitudes.reshape((2,) * n)
    bras = [[sc.kets(p, c).conj().T for c in range(2)] for p in range(n)]
    rows = []
    for ch in sc.choices():
        amps = tensor
        for p, c in enumerate(ch):
            # apply the bras of party p's chosen basis to qubit p
            amps = np.moveaxis(np.tensordot(bras[p][c], amps, axes=([1], [p])), 0, p)
        rows.append(np.abs(amps.ravel()) ** 2)
    return EmpiricalModel(sc.scenario, tuple(rows))


def separable_witness(factors: Sequence[PureState], sc: BellScenario) -> GlobalDistribution:
    """Product global distribution for a product state.

    Every measurement gets its single-qubit outcome distribution and the
    global weight of an assignment is the product of these; its marginal on
    any context is exactly the Born model row.
    """
    if len(factors) != sc.n_parties:
        raise ValueError(f"{len(factors)} factors for {sc.n_parties} parties")
    d = np.array([1.0])
    for p, f in enumerate(factors):
        if f.n_qubits != 1:
            raise ValueError("factors must be single qubits")
        for c in range(2):
            pr = np.abs(sc.kets(p, c).conj().T @ f.amplitudes) ** 2
            d = np.multiply.outer(d, pr).ravel()
    return GlobalDistribution(sc.scenario, d)


def _orth(v: np.ndarray) -> np.ndarray:
    return np.array([-np.conj(v[1]), np.conj(v[0])])


def _top_eigvec_2x2(h: np.ndarray) -> np.ndarray:
    """Unit eigenvector of the larger eigenvalue of a 2x2 Hermitian matrix."""
    a, d, b = h[0, 0].real, h[1, 1].real, h[0, 1]
    lam = 0.5 * (a + d) + math.hypot(0.5 * (a - d), abs(b))
    v1 = np.array([b, lam - a])
    v2 = np.array([lam - d, np.conj(b)])
    v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
    norm = np.linalg.norm(v)
    if norm < 1e-300:
        return np.array([1.0 + 0j, 0.0])
    return v / norm


@dataclass(frozen=True, eq=False)
class SchmidtForm:
    theta: float
    u_a: np.ndarray
    u_b: np.ndarray

    def state(self) -> PureState:
        diag = np.array([math.cos(self.theta / 2), 0, 0, math.sin(self.theta / 2)])
        return PureState(np.kron(self.u_a, self.u_b) @ diag)


def schmidt_decompose(psi: PureState) -> SchmidtForm:
    """Write ``psi = (u_a x u_b)(cos(theta/2)|00> + sin(theta/2)|11>)``, theta in [0, pi/2].

    The coefficient matrix M is decomposed through the eigenvectors of M^dag M
    in closed form; the second column of each unitary is completed as the
    orthogonal complement of the first so that both stay unitary to rounding.
    """
    m = psi.coefficient_matrix()
    v0 = _top_eigvec_2x2(m.conj().T @ m)
    v1 = _orth(v0)
    w0 = m @ v0
    s0 = np.linalg.norm(w0)
    u0 = w0 / s0
    c = _orth(u0)
    z = np.vdot(c, m @ v1)
    s1 = abs(z)
    u1 = c * (z / s1) if s1 > 0 else c
    u_a = np.column_stack([u0, u1])
    u_b = np.column_stack([v0, v1]).conj()
    theta = 2.0 * math.atan2(s1, s0)
    return SchmidtForm(theta, u_a, u_b)


def reduced_density(psi: PureState) -> np.ndarray:
    """Partial trace over the second qubit."""
    m = psi.coefficient_matrix()
    return m @ m.conj().T


def _entropy_bits(probs) -> float:
    p = np.asarray(probs, dtype=float)
    p = p[p > 0]
    return float(max(0.0, -(p * np.log2(p)).sum()))


def entanglement_entropy(psi: PureState) -> float:
    rho = reduced_density(psi)
    lam = np.clip(np.linalg.eigvalsh(rho), 0.0, 1.0)
    return min(_entropy_bits(lam), 1.0)


def diag_entropy(theta: float) -> float:
    """Closed-form entanglement entropy of the diagonal state with polar angle theta."""
    c2 = math.cos(theta / 2) ** 2
    return _entropy_bits([c2, 1.0 - c2])


def random_state(rng: np.random.Generator, n_qubits: int = 2) -> PureState:
    """Complex-normal amplitudes, normalised."""
    dim = 2**n_qubits
    return PureState.from_unnormalized(rng.standard_normal(dim) + 1j * rng.standard_normal(dim))


def random_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_basis(rng: np.random.Generator) -> BlochBasis:
    theta = math.acos(rng.uniform(-1.0, 1.0))
    return BlochBasis(theta, wrap_phase(rng.uniform(0.0, TWO_PI)))


def random_bell_scenario(rng: np.random.Generator, n: int) -> BellScenario:
    return BellScenario(tuple((random_basis(rng), random_basis(rng)) for _ in range(n)))
