"""Dense quantum-state primitives: tensor products, partial trace/transpose,
W-family states and correlator extraction from binary measurements.

Conventions: qubit 0 is the leftmost tensor factor (party A).  All states are
dense complex matrices; the largest supported register is 7 qubits (128x128),
so there is no sparse machinery anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .boxes import CorrelatorTable

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

# measurement angles that maximize the bipartite-marginal witness on the
# noisy W family (see violation_scenario)
DEFAULT_ALPHA = 3.6241
DEFAULT_BETA = 2.0221


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two square matrices."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError("tensor expects two square matrices")
    return np.kron(a, b)


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left to right."""
    out = np.asarray(mats[0])
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def basis_ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(vec: np.ndarray) -> np.ndarray:
    v = np.asarray(vec, dtype=complex)
    return np.outer(v, v.conj())


class DensityMatrix:
    """An n-qubit density matrix (Hermitian, unit trace, PSD within tolerance)."""

    def __init__(self, matrix: np.ndarray, check: bool = True, tol: float = 1e-9):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("density matrix must be square")
        n = int(round(np.log2(matrix.shape[0])))
        if 2**n != matrix.shape[0]:
            raise ValueError("dimension %d is not a power of two" % matrix.shape[0])
        self.n_qubits = n
        self.matrix = matrix
        if check:
            self.validate(tol)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def validate(self, tol: float = 1e-9) -> None:
        m = self.matrix
        if not np.all(np.isfinite(m)):
            raise ValueError("density matrix has non-finite entries")
        herm = np.abs(m - m.conj().T).max()
        if herm > tol * (1.0 + np.abs(m).max()):
            raise ValueError("density matrix is not Hermitian (deviation %.3e)" % herm)
        tr = np.trace(m).real
        if abs(tr - 1.0) > 10 * tol:
            raise ValueError("density matrix trace %.12f != 1" % tr)
        if not is_psd(m, tol):
            raise ValueError("density matrix is not positive semidefinite")

    def __repr__(self) -> str:  # pragma: no cover
        return "DensityMatrix(n_qubits=%d)" % self.n_qubits


def _as_matrix(rho) -> tuple[np.ndarray, int]:
    if isinstance(rho, DensityMatrix):
        return rho.matrix, rho.n_qubits
    m = np.asarray(rho, dtype=complex)
    n = int(round(np.log2(m.shape[0])))
    if 2**n != m.shape[0]:
        raise ValueError("matrix dimension is not a power of two")
    return m, n


def partial_trace(rho, keep: Iterable[int]) -> DensityMatrix:
    """Trace out all qubits not in ``keep``; agrees with the index-summation
    definition of the reduced state."""
    mat, n = _as_matrix(rho)
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep must be a nonempty set of qubit indices")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError("qubit index out of range for %d qubits" % n)
    traced = [q for q in range(n) if q not in keep]
    arr = mat.reshape((2,) * (2 * n))
    order = [*keep, *traced, *(n + q for q in keep), *(n + q for q in traced)]
    arr = np.transpose(arr, axes=order)
    k = 2 ** len(keep)
    t = 2 ** len(traced)
    out = np.einsum("itjt->ij", arr.reshape(k, t, k, t))
    return DensityMatrix(out, check=False)


def partial_transpose(mat, qubits, n_qubits: int | None = None) -> np.ndarray:
    """Transpose the given qubit(s) of a multi-qubit operator.

    Accepts a single index or an iterable of indices; applying it twice with
    the same argument returns the input.
    """
    if isinstance(mat, DensityMatrix):
        m, n = mat.matrix, mat.n_qubits
    else:
        m = np.asarray(mat, dtype=complex)
        if n_qubits is None:
            n = int(round(np.log2(m.shape[0])))
            if 2**n != m.shape[0]:
                raise ValueError("matrix dimension is not a power of two")
        else:
            n = n_qubits
    if isinstance(qubits, (int, np.integer)):
        qubits = [int(qubits)]
    qubits = sorted(set(int(q) for q in qubits))
    if not qubits or qubits[0] < 0 or qubits[-1] >= n:
        raise ValueError("invalid qubit subset for %d qubits" % n)
    arr = m.reshape((2,) * (2 * n))
    axes = list(range(2 * n))
    for q in qubits:
        axes[q], axes[n + q] = axes[n + q], axes[q]
    return np.transpose(arr, axes=axes).reshape(m.shape)


def min_eigenvalue(mat, herm_tol: float = 1e-10) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    m = np.asarray(mat, dtype=complex)
    dev = np.abs(m - m.conj().T).max()
    if dev > herm_tol * (1.0 + np.abs(m).max()):
        raise ValueError("matrix is not Hermitian (deviation %.3e)" % dev)
    return float(np.linalg.eigvalsh(m)[0])


def is_psd(mat, tol: float = 1e-9) -> bool:
    """Scale-aware positive-semidefiniteness test: the smallest eigenvalue may
    dip to -tol*(1 + largest |eigenvalue|)."""
    w = np.linalg.eigvalsh(np.asarray(mat, dtype=complex))
    return bool(w[0] >= -tol * (1.0 + np.abs(w).max()))


def w_state(n: int) -> DensityMatrix:
    """Projector onto the equal superposition of all weight-1 basis states."""
    if n < 3:
        raise ValueError("w_state requires at least 3 qubits")
    v = np.zeros(2**n, dtype=complex)
    for q in range(n):
        v[2 ** (n - 1 - q)] = 1.0 / np.sqrt(n)
    return DensityMatrix(projector(v), check=False)


def noisy_w(n: int, p: float) -> DensityMatrix:
    """W state of n qubits mixed with white noise: p|W><W| + (1-p) I / 2^n."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("noise weight p must lie in [0, 1]")
    d = 2**n
    m = p * w_state(n).matrix + (1.0 - p) * np.eye(d) / d
    return DensityMatrix(m, check=False)


def reduced_two_party(n: int, p: float) -> DensityMatrix:
    """Closed form of the two-qubit reduction of the noisy W state:
    (2p/n)|psi+><psi+| + ((n-2)p/n)|00><00| + (1-p)/4 I."""
    if n < 3:
        raise ValueError("need at least 3 parties")
    if not 0.0 <= p <= 1.0:
        raise ValueError("noise weight p must lie in [0, 1]")
    psi_plus = (basis_ket(1, 4) + basis_ket(2, 4)) / np.sqrt(2)
    m = (
        (2.0 * p / n) * projector(psi_plus)
        + ((n - 2.0) * p / n) * projector(basis_ket(0, 4))
        + (1.0 - p) / 4.0 * np.eye(4)
    )
    return DensityMatrix(m, check=False)


@dataclass(frozen=True)
class Observable:
    """Binary observable cos(theta) sigma_z + sign sin(theta) sigma_x.

    The Bloch vector lies in the xz-plane and has unit length, so the
    eigenvalues are exactly +1 and -1.
    """

    theta: float
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def matrix(self) -> np.ndarray:
        return np.cos(self.theta) * SIGMA_Z + self.sign * np.sin(self.theta) * SIGMA_X


def bloch_observable(nvec) -> np.ndarray:
    """General binary observable n . sigma for a unit Bloch vector n."""
    n = np.asarray(nvec, dtype=float)
    n = n / np.linalg.norm(n)
    return n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z


@dataclass(frozen=True)
class MeasurementScenario:
    """Two binary observables for each of the three parties."""

    a: tuple[Observable, Observable]
    b: tuple[Observable, Observable]
    c: tuple[Observable, Observable]

    def party(self, i: int) -> tuple[Observable, Observable]:
        return (self.a, self.b, self.c)[i]

    def matrices(self) -> list[list[np.ndarray]]:
        return [[o.matrix for o in self.party(i)] for i in range(3)]


def violation_scenario(alpha: float = DEFAULT_ALPHA, beta: float = DEFAULT_BETA) -> MeasurementScenario:
    """Measurement settings under which the noisy W family violates the
    bipartite-marginal witness at high enough weight:
    A0/A1 tilted by +/-alpha, B0 = C0 = -sigma_z, B1/C1 tilted by +/-beta."""
    return MeasurementScenario(
        a=(Observable(alpha, 1), Observable(alpha, -1)),
        b=(Observable(np.pi, 1), Observable(beta, 1)),
        c=(Observable(np.pi, 1), Observable(beta, -1)),
    )


def correlators_from_state(rho, scenario: MeasurementScenario) -> CorrelatorTable:
    """Expectation values tr(rho O1 x O2 x O3) for all one-, two- and
    three-party combinations of the scenario's observables (identity
    substituted for absent parties)."""
    mat, n = _as_matrix(rho)
    if n != 3:
        raise ValueError("correlators_from_state expects a 3-qubit state")
    obs = scenario.matrices()

    def expect(o1, o2, o3):
        val = np.trace(mat @ kron_all([o1, o2, o3]))
        if abs(val.imag) > 1e-9:
            raise ValueError("correlator has non-negligible imaginary part %.3e" % val.imag)
        return float(val.real)

    singles = np.zeros((3, 2))
    for s in range(2):
        singles[0, s] = expect(obs[0][s], IDENTITY_2, IDENTITY_2)
        singles[1, s] = expect(IDENTITY_2, obs[1][s], IDENTITY_2)
        singles[2, s] = expect(IDENTITY_2, IDENTITY_2, obs[2][s])
    doubles = np.zeros((3, 2, 2))
    for u in range(2):
        for v in range(2):
            doubles[0, u, v] = expect(obs[0][u], obs[1][v], IDENTITY_2)
            doubles[1, u, v] = expect(obs[0][u], IDENTITY_2, obs[2][v])
            doubles[2, u, v] = expect(IDENTITY_2, obs[1][u], obs[2][v])
    triples = np.zeros((2, 2, 2))
    for x in range(2):
        for y in range(2):
            for z in range(2):
                triples[x, y, z] = expect(obs[0][x], obs[1][y], obs[2][z])
    return CorrelatorTable(singles=singles, doubles=doubles, triples=triples)
