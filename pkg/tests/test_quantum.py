import itertools

import numpy as np
import pytest

from marginalcert.quantum import (
    IDENTITY_2,
    SIGMA_X,
    SIGMA_Z,
    DensityMatrix,
    Observable,
    basis_ket,
    correlators_from_state,
    is_psd,
    min_eigenvalue,
    noisy_w,
    partial_trace,
    partial_transpose,
    projector,
    reduced_two_party,
    tensor,
    violation_scenario,
    w_state,
)
from marginalcert.entcert import p_sep

RNG = np.random.default_rng(20240811)


def ptrace_oracle(mat, n, keep):
    """Index-summation definition of the partial trace, written as plainly
    as possible so it stays independent of the production implementation."""
    keep = sorted(keep)
    k = len(keep)
    traced = [q for q in range(n) if q not in keep]
    out = np.zeros((2**k, 2**k), dtype=complex)
    for row in itertools.product(range(2), repeat=n):
        for col in itertools.product(range(2), repeat=n):
            if any(row[q] != col[q] for q in traced):
                continue
            r = sum(row[q] << (k - 1 - i) for i, q in enumerate(keep))
            c = sum(col[q] << (k - 1 - i) for i, q in enumerate(keep))
            i_row = sum(row[q] << (n - 1 - q) for q in range(n))
            i_col = sum(col[q] << (n - 1 - q) for q in range(n))
            out[r, c] += mat[i_row, i_col]
    return out


def random_density(dim, rng):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    return m / np.trace(m).real


def test_tensor_identity():
    assert np.array_equal(tensor(IDENTITY_2, IDENTITY_2), np.eye(4))


def test_tensor_sigma_z():
    assert np.allclose(tensor(SIGMA_Z, SIGMA_Z), np.diag([1.0, -1.0, -1.0, 1.0]))


def test_tensor_bit_flip_on_first_qubit():
    ket00 = np.kron(basis_ket(0, 2), basis_ket(0, 2))
    ket10 = np.kron(basis_ket(1, 2), basis_ket(0, 2))
    assert np.allclose(tensor(SIGMA_X, IDENTITY_2) @ ket00, ket10)


def test_tensor_rejects_nonsquare():
    with pytest.raises(ValueError):
        tensor(np.ones((2, 3)), np.eye(2))


def test_partial_trace_product_state():
    rho = DensityMatrix(projector(basis_ket(0, 8)), check=False)
    out = partial_trace(rho, [0, 1])
    assert np.allclose(out.matrix, projector(basis_ket(0, 4)))


def test_partial_trace_w_state_closed_form():
    # at p = 1 the two-party reduction is 2/3 |psi+><psi+| + 1/3 |00><00|
    psi_plus = (basis_ket(1, 4) + basis_ket(2, 4)) / np.sqrt(2)
    expected = 2.0 / 3.0 * projector(psi_plus) + projector(basis_ket(0, 4)) / 3.0
    out = partial_trace(noisy_w(3, 1.0), [0, 1])
    assert np.abs(out.matrix - expected).max() < 1e-12


@pytest.mark.parametrize("p", [0.0, 0.3, 0.7])
@pytest.mark.parametrize("pair", [(0, 1), (0, 2), (1, 2)])
def test_partial_trace_matches_oracle(p, pair):
    rho = noisy_w(3, p)
    via_oracle = ptrace_oracle(rho.matrix, 3, pair)
    assert np.abs(partial_trace(rho, pair).matrix - via_oracle).max() < 1e-13
    assert np.abs(via_oracle - reduced_two_party(3, p).matrix).max() < 1e-12


def test_partial_trace_preserves_trace_and_hermiticity():
    rho = DensityMatrix(random_density(8, RNG), check=False)
    red = partial_trace(rho, [1])
    assert abs(np.trace(red.matrix) - 1.0) < 1e-12
    assert np.abs(red.matrix - red.matrix.conj().T).max() < 1e-12


def test_partial_trace_invalid_keep():
    rho = noisy_w(3, 0.5)
    with pytest.raises(ValueError):
        partial_trace(rho, [])
    with pytest.raises(ValueError):
        partial_trace(rho, [3])


def test_partial_trace_of_tensor_recovers_factors():
    for da, db in ((2, 2), (2, 4), (4, 2), (4, 4)):
        a = random_density(da, RNG)
        b = random_density(db, RNG)
        joint = np.kron(a, b)
        keep = list(range(int(np.log2(da))))
        out = partial_trace(joint, keep)
        assert np.abs(out.matrix - a * np.trace(b)).max() < 1e-12


def test_partial_transpose_identity_invariant():
    eye8 = np.eye(8) / 8.0
    assert np.allclose(partial_transpose(eye8, 0), eye8)


def test_partial_transpose_psi_plus_min_eig():
    psi_plus = (basis_ket(1, 4) + basis_ket(2, 4)) / np.sqrt(2)
    pt = partial_transpose(projector(psi_plus), 0)
    assert abs(np.linalg.eigvalsh(pt)[0] + 0.5) < 1e-12


def test_partial_transpose_involution_on_state():
    rho = noisy_w(3, 0.5)
    back = partial_transpose(partial_transpose(rho.matrix, 1), 1)
    assert np.abs(back - rho.matrix).max() == 0.0


def test_partial_transpose_properties_random():
    # trace preserved and involutive on random Hermitian 8x8 matrices
    for _ in range(100):
        g = RNG.normal(size=(8, 8)) + 1j * RNG.normal(size=(8, 8))
        h = g + g.conj().T
        for q in range(3):
            pt = partial_transpose(h, q)
            assert abs(np.trace(pt) - np.trace(h)) < 1e-12
            assert np.abs(partial_transpose(pt, q) - h).max() == 0.0


def test_partial_transpose_invalid_index():
    with pytest.raises(ValueError):
        partial_transpose(np.eye(8), 5)


def test_min_eigenvalue_basics():
    assert min_eigenvalue(np.eye(4)) == pytest.approx(1.0)
    assert min_eigenvalue(np.diag([3.0, -2.0])) == pytest.approx(-2.0)


def test_min_eigenvalue_rejects_nonhermitian():
    with pytest.raises(ValueError):
        min_eigenvalue(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_min_eigenvalue_at_separability_boundary():
    rho = reduced_two_party(3, p_sep(3))
    pt = partial_transpose(rho.matrix, 1, n_qubits=2)
    assert abs(min_eigenvalue(pt)) < 1e-9


def test_is_psd_scale_aware():
    assert is_psd(np.diag([1.0, 0.0]))
    assert not is_psd(np.diag([1.0, -1e-6]))


def test_w_state_amplitudes():
    w = w_state(3)
    vec_sq = np.diag(w.matrix).real
    expected = np.zeros(8)
    expected[[1, 2, 4]] = 1.0 / 3.0
    assert np.abs(vec_sq - expected).max() < 1e-14
    # off-diagonal coherences are all 1/3 between the weight-1 states
    assert w.matrix[1, 2] == pytest.approx(1.0 / 3.0)


@pytest.mark.parametrize("n", range(3, 8))
def test_w_state_trace(n):
    assert np.trace(w_state(n).matrix).real == pytest.approx(1.0)


def test_w_state_four_qubits():
    w = w_state(4)
    amps = np.sqrt(np.diag(w.matrix).real)
    assert np.count_nonzero(amps > 1e-12) == 4
    assert np.abs(amps[amps > 1e-12] - 0.5).max() < 1e-12


def test_w_state_rejects_small_n():
    with pytest.raises(ValueError):
        w_state(2)


def test_noisy_w_endpoints():
    assert np.abs(noisy_w(3, 0.0).matrix - np.eye(8) / 8.0).max() < 1e-15
    assert np.abs(noisy_w(3, 1.0).matrix - w_state(3).matrix).max() < 1e-15


def test_noisy_w_rejects_bad_p():
    with pytest.raises(ValueError):
        noisy_w(3, 1.2)


def test_noisy_w_purity():
    # tr(rho^2) for the mixture has the closed form p^2 + 2p(1-p)/8 + (1-p)^2/8
    p = 0.9548
    rho = noisy_w(3, p).matrix
    direct = float(np.trace(rho @ rho).real)
    assert direct == pytest.approx(p**2 + 2 * p * (1 - p) / 8 + (1 - p) ** 2 / 8, abs=1e-14)


@pytest.mark.parametrize("n", range(3, 8))
@pytest.mark.parametrize("p", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_noisy_w_valid_state_grid(n, p):
    rho = noisy_w(n, p)
    assert abs(np.trace(rho.matrix).real - 1.0) < 1e-12
    assert np.linalg.eigvalsh(rho.matrix)[0] > -1e-12


def test_reduced_two_party_symbolic_form():
    p = 0.37
    psi_plus = (basis_ket(1, 4) + basis_ket(2, 4)) / np.sqrt(2)
    expected = (2 * p / 3) * projector(psi_plus) + (p / 3) * projector(basis_ket(0, 4)) \
        + (1 - p) / 4 * np.eye(4)
    assert np.abs(reduced_two_party(3, p).matrix - expected).max() < 1e-15


@pytest.mark.parametrize("n", range(3, 8))
def test_reduced_two_party_maximally_mixed(n):
    assert np.abs(reduced_two_party(n, 0.0).matrix - np.eye(4) / 4.0).max() < 1e-15


def test_reduced_two_party_matches_partial_trace_n5():
    got = reduced_two_party(5, 0.8).matrix
    ref = partial_trace(noisy_w(5, 0.8), [0, 1]).matrix
    assert np.abs(got - ref).max() < 1e-12


@pytest.mark.parametrize("n", range(3, 8))
@pytest.mark.parametrize("p", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_reduced_closed_form_equals_partial_trace_grid(n, p):
    got = reduced_two_party(n, p).matrix
    for pair in itertools.combinations(range(n), 2):
        ref = partial_trace(noisy_w(n, p), pair).matrix
        assert np.abs(got - ref).max() < 1e-12


def test_observable_eigenvalues_random_angles():
    for theta in RNG.uniform(0, 2 * np.pi, size=50):
        for sign in (1, -1):
            eig = np.linalg.eigvalsh(Observable(float(theta), sign).matrix)
            assert np.abs(np.sort(eig) - np.array([-1.0, 1.0])).max() < 1e-12


def test_observable_rejects_bad_sign():
    with pytest.raises(ValueError):
        Observable(0.3, 2)


def test_correlators_maximally_mixed_all_zero():
    table = correlators_from_state(noisy_w(3, 0.0), violation_scenario())
    assert np.abs(table.singles).max() < 1e-12
    assert np.abs(table.doubles).max() < 1e-12
    assert np.abs(table.triples).max() < 1e-12


def test_correlators_b0c0_on_w_state():
    # <B0 C0> with B0 = C0 = -sigma_z on the pure W state; the trace oracle
    # gives tr(rho_red sigma_z x sigma_z) = -1/3, unchanged by both signs
    table = correlators_from_state(noisy_w(3, 1.0), violation_scenario())
    rho_red = partial_trace(noisy_w(3, 1.0), [1, 2]).matrix
    oracle = np.trace(rho_red @ np.kron(-SIGMA_Z, -SIGMA_Z)).real
    assert table.doubles[2, 0, 0] == pytest.approx(oracle, abs=1e-12)
    assert oracle == pytest.approx(-1.0 / 3.0, abs=1e-12)


def test_correlators_entries_in_range():
    rho = DensityMatrix(random_density(8, RNG), check=False)
    table = correlators_from_state(rho, violation_scenario())
    for arr in (table.singles, table.doubles, table.triples):
        assert np.abs(arr).max() <= 1.0 + 1e-12


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(3))  # not a power of two
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([0.5, 0.6]))  # trace != 1
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([1.5, -0.5]))  # not PSD
