import numpy as np
import pytest

from marginalcert.sdp import SdpBlock, SdpProblem, sdp_solve
from marginalcert.entcert import PSTAR_3_ANALYTIC, build_marginal_sdp

RNG = np.random.default_rng(20240814)


def test_scalar_interval():
    # maximize t subject to diag(1-t, 1+t) >= 0
    block = SdpBlock(const=np.eye(2), coeffs=np.array([np.diag([-1.0, 1.0])]))
    out = sdp_solve(SdpProblem(objective=np.array([1.0]), blocks=[block]))
    assert out.status == "optimal"
    assert out.objective == pytest.approx(1.0, abs=1e-7)
    assert out.dual_objective >= out.objective - 1e-7


def test_min_eigenvalue_via_sdp_real():
    g = RNG.normal(size=(7, 7))
    h = (g + g.T) / 2.0
    block = SdpBlock(const=h, coeffs=np.array([-np.eye(7)]))
    out = sdp_solve(SdpProblem(objective=np.array([1.0]), blocks=[block]))
    assert out.status == "optimal"
    assert out.objective == pytest.approx(np.linalg.eigvalsh(h)[0], abs=1e-7)


def test_min_eigenvalue_via_sdp_complex():
    g = RNG.normal(size=(5, 5)) + 1j * RNG.normal(size=(5, 5))
    h = (g + g.conj().T) / 2.0
    block = SdpBlock(const=h, coeffs=np.array([-np.eye(5, dtype=complex)]))
    out = sdp_solve(SdpProblem(objective=np.array([1.0]), blocks=[block]))
    assert out.status == "optimal"
    assert out.objective == pytest.approx(np.linalg.eigvalsh(h)[0], abs=1e-7)
    # recovered multiplier is a PSD Hermitian matrix normalized against the
    # eigenvalue constraint
    x = out.block_duals[0]
    assert np.abs(x - x.conj().T).max() < 1e-8
    assert np.linalg.eigvalsh(x)[0] > -1e-8


def test_equality_constraints_and_multipliers():
    f0 = np.eye(3)
    f1 = np.diag([-1.0, 1.0, 0.0])
    f2 = np.diag([-1.0, 0.0, 1.0])
    block = SdpBlock(const=f0, coeffs=np.array([f1, f2]))
    problem = SdpProblem(objective=np.array([1.0, 1.0]), blocks=[block],
                         a_eq=np.array([[1.0, 0.0]]), b_eq=np.array([0.3]))
    out = sdp_solve(problem)
    assert out.status == "optimal"
    assert out.objective == pytest.approx(1.0, abs=1e-6)
    assert out.u[0] == pytest.approx(0.3, abs=1e-9)
    assert out.residuals["dual_stationarity"] < 1e-6
    assert out.eq_duals is not None and out.eq_duals.shape == (1,)


def test_inconsistent_equalities_reported():
    block = SdpBlock(const=np.eye(2), coeffs=np.array([np.diag([1.0, -1.0])]))
    problem = SdpProblem(objective=np.array([1.0]), blocks=[block],
                         a_eq=np.array([[1.0], [1.0]]), b_eq=np.array([0.0, 1.0]))
    assert sdp_solve(problem).status == "infeasible"


def test_fully_determined_parameters():
    block = SdpBlock(const=np.zeros((2, 2)), coeffs=np.array([np.eye(2)]))
    feasible = SdpProblem(objective=np.array([1.0]), blocks=[block],
                          a_eq=np.array([[1.0]]), b_eq=np.array([2.0]))
    out = sdp_solve(feasible)
    assert out.status == "optimal" and out.objective == pytest.approx(2.0)
    infeasible = SdpProblem(objective=np.array([1.0]), blocks=[block],
                            a_eq=np.array([[1.0]]), b_eq=np.array([-2.0]))
    assert sdp_solve(infeasible).status == "infeasible"


def test_weak_duality_on_random_problems():
    for _ in range(10):
        d = int(RNG.integers(3, 9))
        m = int(RNG.integers(2, 8))
        coeffs = []
        for _ in range(m):
            g = RNG.normal(size=(d, d))
            coeffs.append((g + g.T) / (2.0 * d))
        block = SdpBlock(const=np.eye(d), coeffs=np.array(coeffs))
        cap = SdpBlock(const=2.0 * np.eye(d), coeffs=np.array([-c for c in coeffs]))
        problem = SdpProblem(objective=RNG.normal(size=m), blocks=[block, cap])
        out = sdp_solve(problem)
        assert out.status == "optimal"
        assert out.dual_objective >= out.objective - 1e-6
        assert out.residuals["block_min_eig"] > -1e-7


def test_marginal_sdp_three_parties():
    problem = build_marginal_sdp(3)
    out = sdp_solve(problem)
    assert out.status == "optimal"
    assert out.objective == pytest.approx(PSTAR_3_ANALYTIC, abs=1e-4)
    # the sandwich brackets the analytic optimum tightly
    assert out.objective - 1e-5 <= PSTAR_3_ANALYTIC <= out.dual_objective + 1e-5
    assert abs(out.dual_objective - out.objective) < 1e-5


@pytest.mark.slow
def test_marginal_sdp_four_parties():
    out = sdp_solve(build_marginal_sdp(4))
    assert out.status == "optimal"
    assert out.objective == pytest.approx(0.6180, abs=1e-3)


def test_block_validation():
    with pytest.raises(ValueError):
        SdpBlock(const=np.array([[0.0, 1.0], [0.0, 0.0]]), coeffs=np.zeros((1, 2, 2)))
    with pytest.raises(ValueError):
        SdpBlock(const=np.eye(2), coeffs=np.zeros((1, 3, 3)))
    block = SdpBlock(const=np.eye(2), coeffs=np.zeros((2, 2, 2)))
    with pytest.raises(ValueError):
        SdpProblem(objective=np.zeros(3), blocks=[block])


def test_boundary_only_feasible_set():
    # F(t) = diag(t, -t) forces t = 0 with empty interior; the solver must
    # not return a wrong optimum (either it converges to 0 or reports the
    # interior problem explicitly)
    block = SdpBlock(const=np.zeros((2, 2)), coeffs=np.array([np.diag([1.0, -1.0])]))
    out = sdp_solve(SdpProblem(objective=np.array([1.0]), blocks=[block]), max_iter=60)
    if out.status == "optimal":
        assert abs(out.objective) < 1e-4
    else:
        assert out.status in ("no_interior_point", "max_iterations", "numerical_failure")
