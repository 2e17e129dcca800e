import numpy as np
import pytest

from marginalcert.lp import (
    LinearProgram,
    lp_solve,
    solve_feasibility,
    verify_lp_certificate,
)
from marginalcert import boxes as bx
from marginalcert import polytopes as pt

RNG = np.random.default_rng(20240813)


def test_maximize_single_variable():
    # max x subject to x + s = 1 (the slack form of x <= 1)
    program = LinearProgram(objective=np.array([1.0, 0.0]),
                            a_eq=np.array([[1.0, 1.0]]), b_eq=np.array([1.0]),
                            maximize=True)
    out = lp_solve(program)
    assert out.status == "optimal"
    assert out.value == pytest.approx(1.0, abs=1e-12)
    assert out.x[0] == pytest.approx(1.0, abs=1e-12)
    assert out.duality_gap <= 1e-8


def test_uniform_box_mixture_feasible():
    family = pt.local_vertices()
    a = np.vstack([family.flat().T, np.ones(64)])
    b = np.concatenate([bx.uniform_box().p.ravel(), [1.0]])
    out = solve_feasibility(a, b)
    assert out.status == "optimal"
    assert np.abs(a @ out.x - b).max() < 1e-9
    report = verify_lp_certificate(LinearProgram(np.zeros(64), a, b), out)
    assert report.ok


def test_box29_mixture_infeasible_with_checked_certificate():
    family = pt.local_vertices()
    a = np.vstack([family.flat().T, np.ones(64)])
    b = np.concatenate([bx.box29().p.ravel(), [1.0]])
    program = LinearProgram(np.zeros(64), a, b)
    out = lp_solve(program)
    assert out.status == "infeasible"
    assert out.phase1_value > 1e-8
    # re-check the Farkas inequality by explicit inner products
    y = out.dual
    assert (y @ a).max() <= 1e-8
    assert y @ b > 1e-6
    assert verify_lp_certificate(program, out).ok
    assert verify_lp_certificate(program, out, exact=True).ok


def test_unbounded_detected():
    program = LinearProgram(objective=np.array([1.0, 0.0]),
                            a_eq=np.array([[1.0, -1.0]]), b_eq=np.array([0.0]),
                            maximize=True)
    assert lp_solve(program).status == "unbounded"


def test_planted_feasible_programs():
    # mixtures of known data stay feasible; recovered solutions reproduce the
    # planted right-hand side and certificates verify
    for t in range(100):
        m = int(RNG.integers(3, 12))
        n = int(RNG.integers(m + 2, 40))
        a = RNG.normal(size=(m, n))
        planted = np.abs(RNG.normal(size=n))
        b = a @ planted
        c = np.abs(RNG.normal(size=n))  # bounded below on the orthant
        program = LinearProgram(objective=c, a_eq=a, b_eq=b)
        out = lp_solve(program)
        assert out.status == "optimal", (t, out.status)
        assert out.value <= c @ planted + 1e-8
        assert np.abs(a @ out.x - b).max() < 1e-8
        assert verify_lp_certificate(program, out).ok


def test_determinism_bit_identical():
    a = RNG.normal(size=(6, 25))
    b = a @ np.abs(RNG.normal(size=25))
    c = np.abs(RNG.normal(size=25))
    program = LinearProgram(objective=c, a_eq=a, b_eq=b)
    first = lp_solve(program)
    second = lp_solve(program)
    assert first.value == second.value
    assert np.array_equal(first.x, second.x)
    assert np.array_equal(first.dual, second.dual)


def test_redundant_rows_are_harmless():
    a = np.array([[1.0, 1.0, 0.0], [2.0, 2.0, 0.0], [0.0, 0.0, 1.0]])
    b = np.array([1.0, 2.0, 0.5])
    out = lp_solve(LinearProgram(objective=np.array([1.0, 2.0, 0.0]), a_eq=a, b_eq=b))
    assert out.status == "optimal"
    assert out.value == pytest.approx(1.0)
    assert out.dual.shape == (3,)


def test_inconsistent_redundant_rows_give_certificate():
    a = np.array([[1.0, 1.0], [2.0, 2.0]])
    b = np.array([1.0, 3.0])  # second row contradicts the first
    program = LinearProgram(objective=np.zeros(2), a_eq=a, b_eq=b)
    out = lp_solve(program)
    assert out.status == "infeasible"
    assert verify_lp_certificate(program, out).ok


def test_lower_bounds_shift():
    # min x + y with x + y = 3, x >= 1, y >= 0.5
    program = LinearProgram(objective=np.array([1.0, 1.0]),
                            a_eq=np.array([[1.0, 1.0]]), b_eq=np.array([3.0]),
                            lower_bounds=np.array([1.0, 0.5]))
    out = lp_solve(program)
    assert out.status == "optimal"
    assert out.value == pytest.approx(3.0)
    assert out.x.min() >= 0.5 - 1e-12


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        LinearProgram(objective=np.zeros(3), a_eq=np.zeros((2, 2)), b_eq=np.zeros(2))
    with pytest.raises(ValueError):
        LinearProgram(objective=np.zeros(2), a_eq=np.zeros((2, 2)), b_eq=np.zeros(3))
    with pytest.raises(ValueError):
        LinearProgram(objective=np.array([np.inf, 0.0]), a_eq=np.zeros((1, 2)),
                      b_eq=np.zeros(1))


def test_degenerate_membership_lp_terminates():
    # highly redundant, highly degenerate system from the hybrid-membership
    # family: this is the shape that once sent naive pivoting into cycles
    m29 = bx.marginals(bx.box29())
    report = pt.marginal_membership_pi_prime_relaxed(m29)
    assert report.member is False
    assert report.lp_outcome.iterations < 5000
