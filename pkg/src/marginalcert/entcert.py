"""Entanglement certification from separable two-party marginals.

The noisy W family of n qubits has two-qubit reductions that become separable
(PPT) below a closed-form noise weight p_sep(n), yet for weights above the
optimum p* of a marginal-compatibility semidefinite program, *every* global
state with those reductions is entangled.  This module builds and solves that
program for 3 <= n <= 7, evaluates the closed forms, constructs the known
analytic primal/dual certificate pair for n = 3, and re-checks any such
certificate constraint by constraint.

It also carries the complementary negative result: the two GHZ-type globals
(one entangled, one separable) share identical separable two-party
reductions, so marginal data alone cannot certify entanglement there.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .boxes import BipartiteBox
from .quantum import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    DensityMatrix,
    basis_ket,
    kron_all,
    partial_trace,
    partial_transpose,
    projector,
    reduced_two_party,
    w_state,
)
from .sdp import SdpBlock, SdpOutcome, SdpProblem, sdp_solve

SQRT17 = math.sqrt(17.0)
PSTAR_3_ANALYTIC = 3.0 / (2.0 + SQRT17)

# Table of reference optima for the marginal-compatibility program
PSTAR_REFERENCE = {3: 0.4899, 4: 0.6180, 5: 0.7464, 6: 0.8279, 7: 0.8787}


@dataclass
class CertResult:
    """A verdict plus the numbers needed to re-check it."""

    verdict: str  # "certified-entangled" | "not-certified" | "infeasible-marginals"
    evidence: dict = field(default_factory=dict)
    payload: dict | None = None


@dataclass
class DualCertificate:
    """Feasible point of the dual marginal-compatibility program for n = 3:
    three 4x4 blocks N_X (one per traced-out party) and three 8x8 blocks
    Q_X <= 0 (one per partial-transpose constraint)."""

    n_a: np.ndarray
    n_b: np.ndarray
    n_c: np.ndarray
    q_a: np.ndarray
    q_b: np.ndarray
    q_c: np.ndarray
    claimed_value: float

    def n_blocks(self) -> list[np.ndarray]:
        return [self.n_a, self.n_b, self.n_c]

    def q_blocks(self) -> list[np.ndarray]:
        return [self.q_a, self.q_b, self.q_c]


def ppt_min_eig(rho, bipartition) -> float:
    """Minimum eigenvalue of the partial transpose over the given qubit
    subset.  For two-qubit states this is nonnegative iff the state is
    separable."""
    if isinstance(rho, DensityMatrix):
        n = rho.n_qubits
    else:
        n = int(round(np.log2(np.asarray(rho).shape[0])))
    if isinstance(bipartition, (int, np.integer)):
        bipartition = [int(bipartition)]
    bipartition = sorted(set(int(q) for q in bipartition))
    if not bipartition or bipartition[0] < 0 or bipartition[-1] >= n:
        raise ValueError("invalid bipartition for %d qubits" % n)
    pt = partial_transpose(rho, bipartition)
    return float(np.linalg.eigvalsh((pt + pt.conj().T) / 2.0)[0])


def pauli_correlation_matrix(rho) -> np.ndarray:
    """T_ij = tr(rho sigma_i x sigma_j) of a two-qubit state."""
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if mat.shape != (4, 4):
        raise ValueError("expected a two-qubit state")
    paulis = [SIGMA_X, SIGMA_Y, SIGMA_Z]
    t = np.zeros((3, 3))
    for i, si in enumerate(paulis):
        for j, sj in enumerate(paulis):
            t[i, j] = float(np.real(np.trace(mat @ np.kron(si, sj))))
    return t


def horodecki_m(rho) -> float:
    """Sum of the two largest eigenvalues of T^T T; the state violates some
    CHSH inequality iff this exceeds 1."""
    t = pauli_correlation_matrix(rho)
    w = np.linalg.eigvalsh(t.T @ t)
    return float(w[-1] + w[-2])


def chsh_optimal_settings(rho) -> tuple[list[np.ndarray], list[np.ndarray], float]:
    """Measurement operators attaining CHSH value 2 sqrt(horodecki_m) on the
    state: ([A0, A1], [B0, B1], predicted_value)."""
    t = pauli_correlation_matrix(rho)
    w, v = np.linalg.eigh(t.T @ t)
    c1, c2 = v[:, -1], v[:, -2]
    tc1, tc2 = t @ c1, t @ c2
    n1, n2 = np.linalg.norm(tc1), np.linalg.norm(tc2)
    predicted = 2.0 * math.sqrt(max(w[-1] + w[-2], 0.0))
    if n1 < 1e-12 or n2 < 1e-12:
        raise ValueError("correlation matrix too degenerate for the optimal-settings construction")
    a1, a2 = tc1 / n1, tc2 / n2
    phi = math.atan2(n2, n1)
    b0 = math.cos(phi) * c1 + math.sin(phi) * c2
    b1 = math.cos(phi) * c1 - math.sin(phi) * c2
    paulis = [SIGMA_X, SIGMA_Y, SIGMA_Z]

    def vec_obs(vec):
        return sum(vec[i] * paulis[i] for i in range(3))

    return [vec_obs(a1), vec_obs(a2)], [vec_obs(b0), vec_obs(b1)], predicted


def bipartite_box_from_state(rho, obs_a: list[np.ndarray], obs_b: list[np.ndarray]) -> BipartiteBox:
    """Born-rule bipartite box from a two-qubit state and two binary
    observables per side."""
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    p = np.zeros((2, 2, 2, 2))
    eye = np.eye(2, dtype=complex)
    for x, oa in enumerate(obs_a):
        proj_a = [(eye - oa) / 2.0, (eye + oa) / 2.0]
        for y, ob in enumerate(obs_b):
            proj_b = [(eye - ob) / 2.0, (eye + ob) / 2.0]
            for ia, ib in itertools.product(range(2), repeat=2):
                val = np.trace(mat @ np.kron(proj_a[ia], proj_b[ib]))
                p[ia, ib, x, y] = float(val.real)
    return BipartiteBox(p=p)


def p_sep(n: int) -> float:
    """Noise weight at which the two-party reduction of the noisy W state
    reaches the separability (PPT) boundary: n / (4 - n + 2 sqrt(n^2-4n+8))."""
    if n < 3:
        raise ValueError("need at least 3 parties")
    return n / (4.0 - n + 2.0 * math.sqrt(n * n - 4.0 * n + 8.0))


def p_sep_bisection(n: int, tol: float = 1e-9) -> float:
    """The same boundary located by bisecting the sign change of the reduced
    state's partial-transpose minimum eigenvalue."""
    lo, hi = 0.0, 1.0
    if ppt_min_eig(reduced_two_party(n, hi), [0]) > 0:
        raise RuntimeError("no sign change on [0, 1]")
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if ppt_min_eig(reduced_two_party(n, mid), [0]) >= 0.0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def reduced_state_derivative(n: int = 3) -> np.ndarray:
    """Derivative of the reduced-state family with respect to the noise
    weight: (2/n)|psi+><psi+| + ((n-2)/n)|00><00| - I/4.  For n = 3 this is
    the operator that pairs with the dual blocks N_X."""
    psi_plus = (basis_ket(1, 4) + basis_ket(2, 4)) / np.sqrt(2)
    return ((2.0 / n) * projector(psi_plus)
            + ((n - 2.0) / n) * projector(basis_ket(0, 4))
            - np.eye(4) / 4.0).real


# --- marginal-compatibility SDP -------------------------------------------


def _hermitian_basis(d: int) -> list[np.ndarray]:
    """Diagonal units, then (E_ij + E_ji) and i(E_ij - E_ji) for i < j."""
    basis = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = 1.0
            basis.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1j
            e[j, i] = -1j
            basis.append(e)
    return basis


def _orbit_basis(n: int) -> list[np.ndarray]:
    """Basis of the qubit-permutation-invariant real symmetric matrices:
    indicator matrices of the orbits of basis-state pairs."""
    d = 2**n
    bits = [[(x >> (n - 1 - q)) & 1 for q in range(n)] for x in range(d)]
    orbits: dict[tuple, list[tuple[int, int]]] = {}
    for x in range(d):
        for y in range(d):
            counts = [0, 0, 0, 0]
            for q in range(n):
                counts[2 * bits[x][q] + bits[y][q]] += 1
            key = tuple(counts)
            key_t = (key[0], key[2], key[1], key[3])
            orbits.setdefault(min(key, key_t), []).append((x, y))
    basis = []
    for key in sorted(orbits):
        e = np.zeros((d, d))
        for x, y in orbits[key]:
            e[x, y] = 1.0
        basis.append(e)
    return basis


def _pair_reduction_rows(n: int, pair: tuple[int, int], rho_basis: list[np.ndarray],
                         m_op: np.ndarray, hermitian_rows: bool):
    """Equality rows fixing tr_{rest}(rho) - p M = I/4 on one kept pair.

    Row order: Re H[i,i] for i < 4, then (Re H[i,j], Im H[i,j]) for i < j
    (imaginary rows only when hermitian_rows is True).
    """
    reduced = [partial_trace(b, pair).matrix if b.shape[0] > 4 else b for b in rho_basis]
    rows = []
    rhs = []
    eye4 = np.eye(4) / 4.0

    def add_row(extract):
        coeff = [float(extract(r)) for r in reduced]
        coeff.append(-float(extract(m_op.astype(complex))))
        rows.append(coeff)
        rhs.append(float(extract(eye4.astype(complex))))

    for i in range(4):
        add_row(lambda mat, i=i: mat[i, i].real)
    for i in range(4):
        for j in range(i + 1, 4):
            add_row(lambda mat, i=i, j=j: mat[i, j].real)
            if hermitian_rows:
                add_row(lambda mat, i=i, j=j: mat[i, j].imag)
    return np.array(rows), np.array(rhs)


def build_marginal_sdp(n: int, symmetrize: bool | None = None,
                       cut_sizes: tuple[int, ...] | None = None) -> SdpProblem:
    """The program  maximize p  over global n-qubit states whose every
    two-party reduction equals the closed-form reduced state at weight p,
    subject to PSD and positive partial transposes.

    For n = 3 this is exactly the three-party program (state block plus three
    8x8 partial-transpose blocks, 3 x 16 real marginal equations).  For
    larger n every pair reduction is fixed and transposes are imposed across
    every bipartition by default (``cut_sizes`` selects the sizes; one cut of
    each complementary pair suffices since the two transposes share their
    spectrum).  ``symmetrize`` restricts to the permutation-invariant sector
    (an optimum-preserving restriction because the constraint set is
    permutation symmetric and convex); it defaults to on for n >= 5, where
    the full parametrization would be needlessly slow.
    """
    if not 3 <= n <= 7:
        raise ValueError("supported range is 3 <= n <= 7")
    if symmetrize is None:
        symmetrize = n >= 5
    if cut_sizes is None:
        cut_sizes = tuple(range(1, n // 2 + 1))
    d = 2**n
    m_op = reduced_state_derivative(n)

    if symmetrize:
        # all cuts of one size are permutation images of each other
        rho_basis = _orbit_basis(n)
        hermitian_rows = False
        pairs = [(0, 1)]
        cuts = [tuple(range(k)) for k in cut_sizes]
    else:
        rho_basis = _hermitian_basis(d)
        hermitian_rows = True
        pairs = list(itertools.combinations(range(n), 2))
        cuts = []
        for k in cut_sizes:
            for sub in itertools.combinations(range(n), k):
                comp = tuple(q for q in range(n) if q not in sub)
                if (len(sub), sub) <= (len(comp), comp):
                    cuts.append(sub)

    n_params = len(rho_basis) + 1  # trailing parameter is the noise weight p
    zero = np.zeros((d, d), dtype=complex if hermitian_rows else float)

    state_coeffs = np.array(rho_basis + [zero])
    blocks = [SdpBlock(const=zero.copy(), coeffs=state_coeffs)]
    for cut in sorted(cuts, key=lambda c: (len(c), c)):
        pt_coeffs = np.array([partial_transpose(b, list(cut), n_qubits=n) for b in rho_basis] + [zero])
        blocks.append(SdpBlock(const=zero.copy(), coeffs=pt_coeffs))

    all_rows = []
    all_rhs = []
    for pair in pairs:
        rows, rhs = _pair_reduction_rows(n, pair, rho_basis, m_op, hermitian_rows)
        all_rows.append(rows)
        all_rhs.append(rhs)
    a_eq = np.vstack(all_rows)
    b_eq = np.concatenate(all_rhs)

    objective = np.zeros(n_params)
    objective[-1] = 1.0
    return SdpProblem(objective=objective, blocks=blocks, a_eq=a_eq, b_eq=b_eq)


def _verify_recovered_state(n: int, rho_mat: np.ndarray, p: float) -> dict:
    """Measured residuals of the recovered optimizer against all pair
    reductions and all single-qubit transpose cuts (also validates the
    symmetrized restriction when it was used)."""
    rho_mat = (rho_mat + rho_mat.conj().T) / 2.0
    out = {"state_min_eig": float(np.linalg.eigvalsh(rho_mat)[0])}
    target = reduced_two_party(n, min(max(p, 0.0), 1.0)).matrix
    pair_res = 0.0
    for pair in itertools.combinations(range(n), 2):
        red = partial_trace(rho_mat, pair).matrix
        pair_res = max(pair_res, float(np.abs(red - target).max()))
    out["pair_residual"] = pair_res
    out["ppt_min_eig"] = min(
        float(np.linalg.eigvalsh(_herm(partial_transpose(rho_mat, [q], n_qubits=n)))[0])
        for q in range(n)
    )
    out["trace"] = float(np.trace(rho_mat).real)
    return out


def _herm(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2.0


def solve_pstar(n: int, mode: str = "joint", symmetrize: bool | None = None,
                cut_sizes: tuple[int, ...] | None = None, tol: float = 1e-8,
                p_query: float | None = None) -> tuple[float, CertResult]:
    """Largest noise weight admitting a PPT-compatible global state.

    ``mode="joint"`` treats the weight as a free parameter of the one SDP;
    ``mode="bisection"`` brackets the boundary with feasibility solves at
    fixed weights (an independent cross-check of the joint formulation).
    Returns (p_star, certificate); the certificate's verdict refers to
    ``p_query`` when given (weights in (p_star, p_sep] are certified).
    """
    psep = p_sep(n)
    if mode == "joint":
        problem = build_marginal_sdp(n, symmetrize=symmetrize, cut_sizes=cut_sizes)
        outcome = sdp_solve(problem, tol=tol)
        if outcome.status not in ("optimal", "max_iterations"):
            raise RuntimeError("marginal SDP failed with status %r" % outcome.status)
        p_star = float(outcome.objective)
        evidence = {
            "n": n,
            "p_star": p_star,
            "p_sep": psep,
            "dual_objective": outcome.dual_objective,
            "solver_status": outcome.status,
            "solver_residuals": dict(outcome.residuals),
        }
        evidence["state_checks"] = _verify_recovered_state(
            n, np.asarray(outcome.block_values[0]), p_star)
        evidence["outcome"] = outcome
    elif mode == "bisection":
        p_star, evidence = _pstar_bisection(n, symmetrize=symmetrize,
                                            cut_sizes=cut_sizes)
        evidence.update({"n": n, "p_star": p_star, "p_sep": psep})
    else:
        raise ValueError("mode must be 'joint' or 'bisection'")

    verdict = "not-certified"
    if p_query is not None:
        if p_star < p_query <= psep:
            verdict = "certified-entangled"
        evidence["p_query"] = p_query
    result = CertResult(verdict=verdict, evidence=evidence)
    return p_star, result


def _feasibility_problem(n: int, p: float, symmetrize: bool | None,
                         cut_sizes: tuple[int, ...] | None) -> SdpProblem:
    """max t with every block shifted by -tI, at fixed noise weight p:
    feasibility with margin iff the optimum is positive."""
    base = build_marginal_sdp(n, symmetrize=symmetrize, cut_sizes=cut_sizes)
    m = base.n_params  # last parameter is p; replace it by the margin t
    blocks = []
    for blk in base.blocks:
        coeffs = blk.coeffs.copy()
        eye = np.eye(blk.dim, dtype=coeffs.dtype)
        coeffs[-1] = -eye
        blocks.append(SdpBlock(const=blk.const.copy(), coeffs=coeffs))
    # the old p column of the equalities moves to the right-hand side
    a_eq = base.a_eq.copy()
    b_eq = base.b_eq - a_eq[:, -1] * p
    a_eq[:, -1] = 0.0
    objective = np.zeros(m)
    objective[-1] = 1.0
    return SdpProblem(objective=objective, blocks=blocks, a_eq=a_eq, b_eq=b_eq)


def _pstar_bisection(n: int, symmetrize: bool | None, cut_sizes: tuple[int, ...] | None,
                     tol: float = 1e-6) -> tuple[float, dict]:
    lo, hi = 0.0, 1.0
    solves = 0
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        prob = _feasibility_problem(n, mid, symmetrize, cut_sizes)
        out = sdp_solve(prob, tol=1e-8)
        solves += 1
        feasible = out.status == "optimal" and out.objective is not None and out.objective > 0.0
        if feasible:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0, {"bisection_solves": solves, "bisection_width": hi - lo}


# --- analytic certificates for n = 3 ---------------------------------------


def _ket3(b0: int, b1: int, b2: int) -> np.ndarray:
    return basis_ket(4 * b0 + 2 * b1 + b2, 8)


def appendix_primal_state(p: float) -> DensityMatrix:
    """The permutation-symmetric global state
    p/2 (|W><W| + |Wbar><Wbar|) + 3(1-p)/4 sigma + p/6 |000><000|
    + (3-5p)/12 |111><111|,  sigma = (|001><001|+|010><010|+|100><100|)/3,
    whose pair reductions reproduce the reduced family exactly; at the
    program optimum it is also PPT on every cut, so it is the feasible point
    that meets the dual bound."""
    if not 0.0 <= p <= 0.6:
        raise ValueError("the |111> weight is nonnegative only for p <= 3/5")
    w = w_state(3).matrix
    wbar_vec = (_ket3(0, 1, 1) + _ket3(1, 0, 1) + _ket3(1, 1, 0)) / np.sqrt(3)
    sigma = (projector(_ket3(0, 0, 1)) + projector(_ket3(0, 1, 0)) + projector(_ket3(1, 0, 0))) / 3.0
    mat = (p / 2.0) * (w + projector(wbar_vec)) \
        + 3.0 * (1.0 - p) / 4.0 * sigma \
        + (p / 6.0) * projector(_ket3(0, 0, 0)) \
        + (3.0 - 5.0 * p) / 12.0 * projector(_ket3(1, 1, 1))
    return DensityMatrix(mat, check=False)


def _appendix_n_block(pstar: float) -> np.ndarray:
    k = [basis_ket(i, 4) for i in range(4)]
    n = (1.0 + 5.0 / (3.0 * SQRT17)) * pstar / 2.0 * projector(k[0])
    n += (1.0 - SQRT17) * pstar / 12.0 * (projector(k[1]) + projector(k[2]))
    n -= (1.0 + 11.0 / SQRT17) * pstar / 6.0 * (np.outer(k[1], k[2]) + np.outer(k[2], k[1]))
    n += 2.0 * (1.0 / 3.0 + 1.0 / SQRT17) * pstar * projector(k[3])
    return n.real


def _appendix_q_a(pstar: float) -> np.ndarray:
    kets = {b: _ket3(*b) for b in itertools.product(range(2), repeat=3)}

    def op(u, v):
        return np.outer(kets[u], kets[v])

    # first group is written as (X + h.c.) with X containing the projector
    # itself, so the |000><000| weight appears twice
    q = (1.0 + 5.0 / (3.0 * SQRT17)) * pstar / 4.0 * (
        -2.0 * op((0, 0, 0), (0, 0, 0))
        + op((0, 0, 0), (1, 1, 0)) + op((1, 1, 0), (0, 0, 0))
        + op((0, 0, 0), (1, 0, 1)) + op((1, 0, 1), (0, 0, 0))
    )
    v01 = kets[(0, 0, 1)] + kets[(0, 1, 0)]
    q -= (1.0 / 3.0 - 1.0 / SQRT17) * pstar * np.outer(v01, v01)
    q += 4.0 / (3.0 * SQRT17) * pstar * (
        op((0, 0, 1), (1, 1, 1)) + op((0, 1, 0), (1, 1, 1))
        + op((1, 1, 1), (0, 0, 1)) + op((1, 1, 1), (0, 1, 0))
    )
    q -= (3.0 / 5.0 - 1.0 / (3.0 * SQRT17)) * pstar / 2.0 * (
        op((1, 0, 1), (1, 0, 1)) + op((1, 1, 0), (1, 1, 0))
    )
    q += (1.0 / 5.0 - 7.0 / (3.0 * SQRT17)) * pstar / 4.0 * (
        op((1, 0, 1), (1, 1, 0)) + op((1, 1, 0), (1, 0, 1))
    )
    q -= 2.0 * (1.0 / 3.0 + 1.0 / SQRT17) * pstar * op((1, 1, 1), (1, 1, 1))
    return q.real


def _permute_qubits(mat: np.ndarray, perm: list[int]) -> np.ndarray:
    """Conjugate an 8x8 operator by the permutation sending qubit perm[j] of
    the input to slot j of the output."""
    perm_mat = np.zeros((8, 8))
    for bits in itertools.product(range(2), repeat=3):
        src = 4 * bits[0] + 2 * bits[1] + bits[2]
        nb = tuple(bits[perm[j]] for j in range(3))
        dst = 4 * nb[0] + 2 * nb[1] + nb[2]
        perm_mat[dst, src] = 1.0
    return perm_mat @ mat @ perm_mat.T


def appendix_dual_certificate() -> DualCertificate:
    """The printed dual feasible point: equal blocks N_X, and Q_B, Q_C
    obtained from Q_A by letting B or C take the role of A."""
    n_block = _appendix_n_block(PSTAR_3_ANALYTIC)
    q_a = _appendix_q_a(PSTAR_3_ANALYTIC)
    q_b = _permute_qubits(q_a, [1, 0, 2])
    q_c = _permute_qubits(q_a, [2, 1, 0])
    return DualCertificate(n_a=n_block.copy(), n_b=n_block.copy(), n_c=n_block.copy(),
                           q_a=q_a, q_b=q_b, q_c=q_c,
                           claimed_value=PSTAR_3_ANALYTIC)


def lift_identity(n_block: np.ndarray, party: int) -> np.ndarray:
    """Embed a 4x4 operator as acting on the two parties other than
    ``party``, identity on ``party`` (three-qubit register)."""
    if party == 0:
        return np.kron(np.eye(2), n_block)
    if party == 2:
        return np.kron(n_block, np.eye(2))
    out = np.zeros((8, 8), dtype=np.asarray(n_block).dtype)
    for a, b, c, a2, b2, c2 in itertools.product(range(2), repeat=6):
        if b == b2:
            out[4 * a + 2 * b + c, 4 * a2 + 2 * b2 + c2] = n_block[2 * a + c, 2 * a2 + c2]
    return out


def verify_dual_certificate(cert: DualCertificate, tol: float = 1e-8) -> CertResult:
    """Constraint-by-constraint recheck of a dual certificate:
    Hermiticity, Q_X <= 0, the normalization tr(M sum N_X) = -1, positivity
    of sum_X (1_X o N_X + Q_X^T_X), and the objective value (1/4) tr(sum N_X).
    Every residual is reported; nothing is assumed."""
    m_op = reduced_state_derivative(3)
    n_blocks = cert.n_blocks()
    q_blocks = cert.q_blocks()
    checks: dict[str, float] = {}
    for label, mat in (("N_A", cert.n_a), ("N_B", cert.n_b), ("N_C", cert.n_c),
                       ("Q_A", cert.q_a), ("Q_B", cert.q_b), ("Q_C", cert.q_c)):
        checks["hermiticity_" + label] = float(np.abs(mat - np.asarray(mat).conj().T).max())
    for label, q in zip(("Q_A", "Q_B", "Q_C"), q_blocks):
        checks["max_eig_" + label] = float(np.linalg.eigvalsh(_herm(np.asarray(q)))[-1])
    n_sum = sum(np.asarray(b) for b in n_blocks)
    checks["pairing_trace"] = float(abs(np.trace(m_op @ n_sum).real + 1.0))
    psd_sum = sum(
        lift_identity(np.asarray(n_blocks[x]), x)
        + partial_transpose(np.asarray(q_blocks[x], dtype=complex), [x], n_qubits=3)
        for x in range(3)
    )
    checks["sum_min_eig"] = float(np.linalg.eigvalsh(_herm(psd_sum))[0])
    objective = float(np.trace(n_sum).real / 4.0)
    checks["objective"] = objective
    checks["objective_vs_claim"] = abs(objective - cert.claimed_value)

    failures = {}
    for label, q in zip(("Q_A", "Q_B", "Q_C"), q_blocks):
        if checks["max_eig_" + label] > tol:
            failures["negativity_" + label] = checks["max_eig_" + label]
    if checks["pairing_trace"] > tol:
        failures["pairing_trace"] = checks["pairing_trace"]
    if checks["sum_min_eig"] < -tol:
        failures["sum_min_eig"] = checks["sum_min_eig"]
    for label in ("N_A", "N_B", "N_C", "Q_A", "Q_B", "Q_C"):
        if checks["hermiticity_" + label] > 1e-12:
            failures["hermiticity_" + label] = checks["hermiticity_" + label]

    verdict = "certified-entangled" if not failures else "not-certified"
    return CertResult(verdict=verdict,
                      evidence={"checks": checks, "failures": failures,
                                "objective": objective})


def solver_dual_certificate(tol: float = 1e-10) -> DualCertificate:
    """Extract a dual certificate from the n = 3 solver run itself: the
    partial-transpose block multipliers give -Q_X, and the pair-reduction
    equality multipliers reassemble into the N_X blocks (the block for the
    traced-out party is the multiplier of the complementary pair)."""
    problem = build_marginal_sdp(3, symmetrize=False)
    outcome = sdp_solve(problem, tol=tol)
    if outcome.status != "optimal":
        raise RuntimeError("n=3 solve failed: %s" % outcome.status)
    nu = outcome.eq_duals
    pairs = list(itertools.combinations(range(3), 2))
    n_by_traced = {}
    for pi, pair in enumerate(pairs):
        seg = nu[16 * pi: 16 * (pi + 1)]
        n_mat = np.zeros((4, 4), dtype=complex)
        for i in range(4):
            n_mat[i, i] = seg[i]
        idx = 4
        for i in range(4):
            for j in range(i + 1, 4):
                n_mat[i, j] = (seg[idx] + 1j * seg[idx + 1]) / 2.0
                n_mat[j, i] = np.conj(n_mat[i, j])
                idx += 2
        traced = ({0, 1, 2} - set(pair)).pop()
        n_by_traced[traced] = n_mat.real
    # block 0 is the state; transpose-cut blocks follow in qubit order
    q_blocks = [-_herm(np.asarray(outcome.block_duals[1 + q])).real for q in range(3)]
    return DualCertificate(n_a=n_by_traced[0], n_b=n_by_traced[1], n_c=n_by_traced[2],
                           q_a=q_blocks[0], q_b=q_blocks[1], q_c=q_blocks[2],
                           claimed_value=float(outcome.dual_objective))


# --- GHZ marginals ----------------------------------------------------------


def ghz_state(n: int = 3) -> DensityMatrix:
    v = np.zeros(2**n, dtype=complex)
    v[0] = v[-1] = 1.0 / np.sqrt(2)
    return DensityMatrix(projector(v), check=False)


def ghz_marginal_demo() -> CertResult:
    """Both the GHZ state and the classical mixture of |000> and |111> have
    the same separable two-party reductions, so those marginals certify
    nothing: the global may be entangled (GHZ is NPT on every cut) or fully
    separable (the mixture is PPT on every cut)."""
    ghz = ghz_state(3)
    mixed = DensityMatrix((projector(_ket3(0, 0, 0)) + projector(_ket3(1, 1, 1))) / 2.0,
                          check=False)
    target = (projector(basis_ket(0, 4)) + projector(basis_ket(3, 4))) / 2.0
    evidence: dict = {"marginal_residuals": {}, "ppt": {}}
    pairs = [(0, 1), (0, 2), (1, 2)]
    for name, state in (("ghz", ghz), ("mixed", mixed)):
        res = max(float(np.abs(partial_trace(state, pr).matrix - target).max()) for pr in pairs)
        evidence["marginal_residuals"][name] = res
    evidence["common_marginal_ppt_min_eig"] = ppt_min_eig(DensityMatrix(target, check=False), [0])
    for name, state in (("ghz", ghz), ("mixed", mixed)):
        evidence["ppt"][name] = {
            "cut_%d" % q: ppt_min_eig(state, [q]) for q in range(3)
        }
    ghz_npt = all(v < 0 for v in evidence["ppt"]["ghz"].values())
    mixed_ppt = all(v >= -1e-12 for v in evidence["ppt"]["mixed"].values())
    marginals_match = max(evidence["marginal_residuals"].values()) < 1e-12
    evidence["ghz_npt_all_cuts"] = ghz_npt
    evidence["mixed_ppt_all_cuts"] = mixed_ppt
    evidence["marginals_match"] = marginals_match
    verdict = "not-certified" if (ghz_npt and mixed_ppt and marginals_match) else "infeasible-marginals"
    return CertResult(verdict=verdict, evidence=evidence)
