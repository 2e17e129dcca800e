"""Dense two-phase simplex for small equality-form linear programs.

Solves   min/max  c.x   s.t.  A x = b,  x >= lb   with a revised simplex that
keeps an explicit basis inverse.  Pivoting is Dantzig's rule with
lowest-index tie breaking, falling back to Bland's rule permanently once
degeneracy stalls progress, so identical inputs always produce identical
outputs.  Phase 1 yields a Farkas certificate y (y.A <= 0, y.b > 0) whenever
the program is infeasible, and the returned basic solution doubles as an
extreme-point decomposition for membership problems.

The polytope-membership and extension-bound programs built elsewhere in this
package have at most a few thousand columns and ~100 rows, so correctness and
determinism are worth far more than sparse-matrix speed here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

INFEASIBILITY_THRESHOLD = 1e-8  # phase-1 optimum above this means infeasible
REDUCED_COST_TOL = 1e-9
PIVOT_TOL = 1e-9
RESIDUAL_TOL = 1e-9


@dataclass
class LinearProgram:
    """Equality-constrained LP with per-variable lower bounds (default 0)."""

    objective: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    maximize: bool = False
    lower_bounds: np.ndarray | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.a_eq = np.atleast_2d(np.asarray(self.a_eq, dtype=float))
        self.b_eq = np.asarray(self.b_eq, dtype=float)
        m, n = self.a_eq.shape
        if self.objective.shape != (n,):
            raise ValueError("objective length %d != %d columns" % (self.objective.size, n))
        if self.b_eq.shape != (m,):
            raise ValueError("rhs length %d != %d rows" % (self.b_eq.size, m))
        if self.lower_bounds is not None:
            self.lower_bounds = np.asarray(self.lower_bounds, dtype=float)
            if self.lower_bounds.shape != (n,):
                raise ValueError("lower_bounds length mismatch")
        for arr in (self.objective, self.a_eq, self.b_eq):
            if not np.all(np.isfinite(arr)):
                raise ValueError("linear program data must be finite")


@dataclass
class LpOutcome:
    """Solution report.  ``dual`` holds the equality multipliers at an
    optimum, or the Farkas infeasibility certificate (in the original row
    convention) when status == "infeasible"."""

    status: str
    value: float | None = None
    x: np.ndarray | None = None
    dual: np.ndarray | None = None
    phase1_value: float = 0.0
    iterations: int = 0
    residual: float = 0.0
    duality_gap: float | None = None


class _Simplex:
    """Revised simplex over the columns of A.

    The basis is refactorized (LU) at every iteration: the programs solved in
    this package have at most ~100 rows, where an exact factorization costs
    microseconds and removes the numerical drift a rank-one-updated inverse
    accumulates on long degenerate runs.  The ratio test accepts ties within
    an absolute band and picks the largest pivot element among them (Harris
    style), keeping the basis well conditioned.
    """

    def __init__(self, a: np.ndarray, b: np.ndarray):
        self.a = a
        self.b = b.copy()
        self.m = a.shape[0]
        self.iterations = 0

    def _factor(self, basis: list[int]):
        lu = scipy.linalg.lu_factor(self.a[:, basis], check_finite=False)
        return lu

    def run(self, cost: np.ndarray, basis: list[int], allowed: np.ndarray,
            max_iter: int) -> tuple[str, list[int]]:
        """Minimize cost over allowed columns starting from the given basis.

        Returns (status, basis) with status in {"optimal", "unbounded",
        "stalled", "singular"}.  Columns with allowed[j] == False may sit in
        the basis at level zero but can never enter, and leave at zero step
        as soon as an entering column touches their row.
        """
        m = self.m
        use_bland = False
        stall = 0
        last_obj = np.inf
        for _ in range(max_iter):
            self.iterations += 1
            try:
                lu = self._factor(basis)
            except scipy.linalg.LinAlgError:  # pragma: no cover
                return "singular", basis
            xb = scipy.linalg.lu_solve(lu, self.b, check_finite=False)
            basis_arr = np.asarray(basis)
            y = scipy.linalg.lu_solve(lu, cost[basis_arr], trans=1, check_finite=False)
            if not np.all(np.isfinite(y)) or not np.all(np.isfinite(xb)):
                return "singular", basis
            reduced = cost - y @ self.a
            cand = np.where(allowed & (reduced < -REDUCED_COST_TOL))[0]
            if cand.size == 0:
                return "optimal", basis
            if use_bland:
                j = int(cand[0])
            else:
                j = int(cand[np.argmin(reduced[cand])])
            d = scipy.linalg.lu_solve(lu, self.a[:, j], check_finite=False)
            barred = np.where(~allowed[basis_arr] & (np.abs(d) > PIVOT_TOL))[0]
            if barred.size:
                r = int(barred[0])
            else:
                pos = np.where(d > PIVOT_TOL)[0]
                if pos.size == 0:
                    return "unbounded", basis
                ratios = xb[pos] / d[pos]
                rmin = ratios.min()
                ties = pos[ratios <= rmin + 1e-9]
                dmax = d[ties].max()
                stable = ties[d[ties] >= 0.1 * dmax]
                if use_bland:
                    r = int(stable[np.argmin(basis_arr[stable])])
                else:
                    r = int(stable[np.argmax(d[stable])])
            basis[r] = j
            obj = float(cost[basis_arr] @ xb)
            if obj < last_obj - 1e-12 * (1.0 + abs(last_obj)):
                stall = 0
            else:
                stall += 1
                if not use_bland and stall > 2 * (m + 10):
                    use_bland = True
                    stall = 0
            last_obj = obj
        return "stalled", basis


def _independent_rows(a: np.ndarray, b: np.ndarray,
                      tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray | None]:
    """Select a maximal independent subset of rows.

    Returns (kept row indices, farkas) where farkas is a certificate over the
    original rows whenever some dependent row has an inconsistent right-hand
    side (the system is then infeasible outright).  Rank detection runs on
    the Gram matrix A A^T, which is cheap even with thousands of columns; a
    dropped row that the kept rows fail to reproduce is promoted back rather
    than misclassified.
    """
    m = a.shape[0]
    gram = a @ a.T
    r_fact, piv = scipy.linalg.qr(gram, mode="r", pivoting=True)
    diag = np.abs(np.diag(r_fact))
    scale = diag[0] if diag.size and diag[0] > 0 else 1.0
    rank = int(np.sum(diag > tol * scale))
    keep = np.sort(piv[:rank])
    dropped = np.sort(piv[rank:])
    if dropped.size == 0:
        return keep, None
    # coefficients expressing each dropped row over the kept ones, from the
    # normal equations on the Gram matrix
    gkk = gram[np.ix_(keep, keep)]
    coeffs = scipy.linalg.solve(gkk + np.eye(rank) * tol * scale, gram[np.ix_(keep, dropped)],
                                assume_a="pos")
    rep_res = np.abs(coeffs.T @ a[keep] - a[dropped]).max(axis=1)
    data_scale = 1.0 + np.abs(a).max(initial=0.0)
    promote = np.where(rep_res > 1e-8 * data_scale)[0]
    if promote.size:
        keep = np.sort(np.concatenate([keep, dropped[promote]]))
        mask = np.ones(dropped.size, dtype=bool)
        mask[promote] = False
        return _independent_rows_refine(a, b, keep, dropped[mask])
    gaps = b[dropped] - coeffs.T @ b[keep]
    bad = np.where(np.abs(gaps) > 1e-9 * (1.0 + np.abs(b).max(initial=0.0)))[0]
    if bad.size:
        i = int(bad[0])
        farkas = np.zeros(m)
        farkas[keep] = -coeffs[:, i]
        farkas[dropped[i]] = 1.0
        if gaps[i] < 0:
            farkas = -farkas
        farkas /= np.abs(farkas).max()
        return keep, farkas
    return keep, None


def _independent_rows_refine(a: np.ndarray, b: np.ndarray, keep: np.ndarray,
                             dropped: np.ndarray) -> tuple[np.ndarray, np.ndarray | None]:
    """Accurate fallback for the rare case the Gram-based split was unsure:
    re-check the remaining dropped rows one by one with least squares."""
    m = a.shape[0]
    a_keep = a[keep]
    for d in dropped:
        coeff, *_ = np.linalg.lstsq(a_keep.T, a[d], rcond=None)
        if np.abs(a_keep.T @ coeff - a[d]).max() > 1e-7 * (1.0 + np.abs(a).max()):
            keep = np.sort(np.append(keep, d))
            a_keep = a[keep]
            continue
        gap = b[d] - float(coeff @ b[keep])
        if abs(gap) > 1e-9 * (1.0 + np.abs(b).max(initial=0.0)):
            farkas = np.zeros(m)
            farkas[keep] = -coeff
            farkas[d] = 1.0
            if gap < 0:
                farkas = -farkas
            farkas /= np.abs(farkas).max()
            return keep, farkas
    return keep, None


def lp_solve(program: LinearProgram, max_iter: int = 20000) -> LpOutcome:
    """Two-phase simplex solve of an equality-form LP.  Dependent constraint
    rows are removed up front (with an immediate Farkas certificate if one of
    them is inconsistent); their multipliers are reported as zero."""
    c_user = program.objective
    a = program.a_eq
    b = program.b_eq.copy()
    m_orig, n = a.shape
    lb = program.lower_bounds
    if lb is not None and np.any(lb != 0.0):
        b = b - a @ lb
    else:
        lb = None
    c = -c_user if program.maximize else c_user.copy()

    keep, farkas = _independent_rows(a, b)
    if farkas is not None:
        return LpOutcome(status="infeasible", dual=farkas,
                         phase1_value=float(abs(farkas @ b)))
    a = a[keep]
    b = b[keep]
    m = a.shape[0]
    if m == 0:
        # no effective constraints: optimum sits at the lower bounds if the
        # objective has no decreasing direction
        if np.any(c < 0):
            return LpOutcome(status="unbounded")
        x_user = np.zeros(n) if lb is None else lb.copy()
        return LpOutcome(status="optimal", value=float(c_user @ x_user), x=x_user,
                         dual=np.zeros(m_orig), residual=0.0, duality_gap=0.0)

    # orient rows so the all-artificial phase-1 start is feasible
    flip = np.where(b < 0.0, -1.0, 1.0)
    full = np.hstack([a * flip[:, None], np.eye(m)])
    b2 = b * flip

    cost1 = np.concatenate([np.zeros(n), np.ones(m)])
    basis = list(range(n, n + m))
    sx = _Simplex(full, b2)
    status, basis = sx.run(cost1, basis, np.ones(n + m, dtype=bool), max_iter)
    if status != "optimal":
        return LpOutcome(status="numerical_failure", iterations=sx.iterations)
    lu = scipy.linalg.lu_factor(full[:, basis])
    xb = scipy.linalg.lu_solve(lu, b2)
    phase1 = float(cost1[np.asarray(basis)] @ xb)
    if phase1 > INFEASIBILITY_THRESHOLD:
        y = scipy.linalg.lu_solve(lu, cost1[np.asarray(basis)], trans=1)
        farkas = np.zeros(m_orig)
        farkas[keep] = y * flip  # back to the original row convention
        scale = np.abs(farkas).max()
        if scale > 0:
            farkas = farkas / scale
        return LpOutcome(status="infeasible", dual=farkas, phase1_value=phase1,
                         iterations=sx.iterations)

    # drive artificials out of the basis wherever a nonzero pivot exists; a
    # row without one would be linearly dependent, which preprocessing already
    # removed, so in practice every artificial can be replaced or stays at zero
    for i in range(m):
        if basis[i] >= n:
            lu = scipy.linalg.lu_factor(full[:, basis])
            e_i = np.zeros(m)
            e_i[i] = 1.0
            row = scipy.linalg.lu_solve(lu, e_i, trans=1) @ full[:, :n]
            in_basis = np.isin(np.arange(n), basis)
            piv_cols = np.where((np.abs(row) > PIVOT_TOL) & ~in_basis)[0]
            if piv_cols.size:
                basis[i] = int(piv_cols[np.argmax(np.abs(row[piv_cols]))])

    cost2 = np.concatenate([c, np.zeros(m)])
    allowed2 = np.concatenate([np.ones(n, dtype=bool), np.zeros(m, dtype=bool)])
    status, basis = sx.run(cost2, basis, allowed2, max_iter)
    if status == "unbounded":
        return LpOutcome(status="unbounded", phase1_value=phase1, iterations=sx.iterations)
    if status != "optimal":
        return LpOutcome(status="numerical_failure", phase1_value=phase1, iterations=sx.iterations)

    lu = scipy.linalg.lu_factor(full[:, basis])
    xb = scipy.linalg.lu_solve(lu, b2)
    x = np.zeros(n)
    for i, bi in enumerate(basis):
        if bi < n:
            x[bi] = xb[i]
    x[np.abs(x) < 1e-14] = 0.0
    y_int = scipy.linalg.lu_solve(lu, cost2[np.asarray(basis)], trans=1) * flip
    residual = float(np.abs(a @ x - b).max()) if m else 0.0
    scale = 1.0 + np.abs(b).max(initial=0.0)
    if residual > 100 * RESIDUAL_TOL * scale or x.min(initial=0.0) < -1e-7:
        return LpOutcome(status="numerical_failure", phase1_value=phase1,
                         iterations=sx.iterations, residual=residual)
    gap = abs(float(c @ x) - float(y_int @ b))
    x_user = x if lb is None else x + lb
    value = float(c_user @ x_user)
    dual = np.zeros(m_orig)
    dual[keep] = -y_int if program.maximize else y_int
    return LpOutcome(status="optimal", value=value, x=x_user, dual=dual,
                     phase1_value=phase1, iterations=sx.iterations,
                     residual=residual, duality_gap=gap)


def solve_feasibility(a_eq: np.ndarray, b_eq: np.ndarray) -> LpOutcome:
    """Feasibility of {x >= 0 : A x = b} with a zero objective."""
    n = np.atleast_2d(a_eq).shape[1]
    return lp_solve(LinearProgram(objective=np.zeros(n), a_eq=a_eq, b_eq=b_eq))


@dataclass
class CertificateReport:
    ok: bool
    kind: str
    checks: dict = field(default_factory=dict)
    exact: bool = False


def verify_lp_certificate(program: LinearProgram, outcome: LpOutcome,
                          exact: bool = False, tol: float = 1e-8) -> CertificateReport:
    """Independently re-check an LP outcome.

    For an optimum: feasibility residual, bound satisfaction and the duality
    gap.  For infeasibility: the Farkas inequality y.A <= 0 < y.b, optionally
    re-evaluated in exact rational arithmetic after snapping the data and the
    certificate to nearby rationals.
    """
    a, b = program.a_eq, program.b_eq
    if outcome.status == "optimal":
        x = outcome.x
        lb = program.lower_bounds if program.lower_bounds is not None else np.zeros(x.size)
        residual = float(np.abs(a @ x - b).max())
        min_slack = float((x - lb).min())
        checks = {"residual": residual, "min_slack": min_slack}
        ok = residual <= tol * (1.0 + np.abs(b).max(initial=0.0)) and min_slack >= -tol
        if outcome.dual is not None and program.lower_bounds is None:
            sign = -1.0 if program.maximize else 1.0
            gap = abs(sign * float(program.objective @ x) - sign * float(outcome.dual @ b))
            checks["duality_gap"] = gap
            ok = ok and gap <= 100 * tol * (1.0 + abs(outcome.value or 0.0))
        return CertificateReport(ok=ok, kind="optimal", checks=checks)
    if outcome.status == "infeasible":
        y = outcome.dual
        if y is None:
            return CertificateReport(ok=False, kind="farkas", checks={"missing": 1.0})
        yta = y @ a
        ytb = float(y @ b)
        if program.lower_bounds is not None:
            ytb -= float(yta @ program.lower_bounds)
        checks = {"max_yta": float(yta.max()), "ytb": ytb}
        ok = yta.max() <= tol and ytb > tol
        if exact and ok:
            m, n = a.shape
            ra = [[Fraction(v).limit_denominator(10**9) for v in row] for row in a]
            rb = [Fraction(v).limit_denominator(10**9) for v in b]
            ry = [Fraction(v).limit_denominator(10**6) for v in y]
            exact_ok = all(sum(ry[i] * ra[i][j] for i in range(m)) <= 0 for j in range(n))
            exact_ok = exact_ok and sum(ry[i] * rb[i] for i in range(m)) > 0
            checks["exact_ok"] = float(exact_ok)
            return CertificateReport(ok=ok and exact_ok, kind="farkas", checks=checks, exact=True)
        return CertificateReport(ok=ok, kind="farkas", checks=checks)
    return CertificateReport(ok=False, kind=outcome.status, checks={})
