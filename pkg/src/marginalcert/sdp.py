"""Primal-dual interior-point solver for small dense semidefinite programs.

Problem form:   maximize  objective . u
                subject to  F_k0 + sum_j u_j F_kj  >= 0   (one PSD constraint
                                                           per block k)
                            A_eq u = b_eq.

Equality constraints are eliminated through a null-space basis before the
interior-point iteration, and complex Hermitian blocks are embedded as real
symmetric blocks of doubled dimension.  The core iteration is Nesterov-Todd
scaled path following with Mehrotra's adaptive centering parameter and a
dense Cholesky solve of the Schur complement; block dimensions up to ~256 and
a few hundred parameters run in seconds, which covers everything this package
builds.

Multipliers are recovered in the caller's coordinates: one PSD matrix per
block plus one multiplier per equality row, satisfying the stationarity
condition   objective_j + sum_k tr(X_k F_kj) - (A_eq^T nu)_j = 0   so that
weak duality can be, and is, checked numerically on every solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

DEFAULT_TOL = 1e-8
STEP_DAMPING = 0.98
MIN_STEP = 1e-7


@dataclass
class SdpBlock:
    """Affine Hermitian-valued map F0 + sum_j u_j F_j for one PSD block."""

    const: np.ndarray        # (d, d)
    coeffs: np.ndarray       # (n_params, d, d)

    def __post_init__(self):
        self.const = np.asarray(self.const)
        self.coeffs = np.asarray(self.coeffs)
        d = self.const.shape[0]
        if self.const.shape != (d, d) or self.coeffs.ndim != 3 or self.coeffs.shape[1:] != (d, d):
            raise ValueError("inconsistent block dimensions")
        for name, arr in (("const", self.const[None]), ("coeffs", self.coeffs)):
            dev = np.abs(arr - np.conj(np.transpose(arr, (0, 2, 1)))).max() if arr.size else 0.0
            if dev > 1e-10 * (1.0 + np.abs(arr).max()):
                raise ValueError("block %s is not Hermitian (deviation %.3e)" % (name, dev))

    @property
    def dim(self) -> int:
        return self.const.shape[0]

    def value(self, u: np.ndarray) -> np.ndarray:
        return self.const + np.tensordot(u, self.coeffs, axes=(0, 0))


@dataclass
class SdpProblem:
    objective: np.ndarray
    blocks: list[SdpBlock]
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        m = self.objective.size
        for blk in self.blocks:
            if blk.coeffs.shape[0] != m:
                raise ValueError("block parameter count %d != objective size %d"
                                 % (blk.coeffs.shape[0], m))
        if self.a_eq is not None:
            self.a_eq = np.atleast_2d(np.asarray(self.a_eq, dtype=float))
            self.b_eq = np.asarray(self.b_eq, dtype=float)
            if self.a_eq.shape[1] != m or self.b_eq.shape != (self.a_eq.shape[0],):
                raise ValueError("equality constraint dimensions inconsistent")

    @property
    def n_params(self) -> int:
        return self.objective.size


@dataclass
class SdpOutcome:
    status: str
    objective: float | None = None
    u: np.ndarray | None = None
    block_values: list[np.ndarray] = field(default_factory=list)
    block_duals: list[np.ndarray] = field(default_factory=list)
    eq_duals: np.ndarray | None = None
    dual_objective: float | None = None
    residuals: dict = field(default_factory=dict)
    iterations: int = 0


def _hermitize(m: np.ndarray) -> np.ndarray:
    return (m + np.conj(m.T)) / 2.0


def _embed(h: np.ndarray) -> np.ndarray:
    """Complex Hermitian d x d -> real symmetric 2d x 2d with the same
    definiteness (eigenvalues doubled in multiplicity)."""
    return np.block([[h.real, -h.imag], [h.imag, h.real]])


def _unembed(x: np.ndarray, d: int) -> np.ndarray:
    """Project a real symmetric 2d x 2d matrix back to complex Hermitian,
    averaging over the embedding's symmetry."""
    re = (x[:d, :d] + x[d:, d:]) / 2.0
    im = (x[d:, :d] - x[:d, d:]) / 2.0
    return _hermitize(re + 1j * im)


def _nt_scaling(x: np.ndarray, s: np.ndarray) -> np.ndarray:
    """The Nesterov-Todd scaling point W with W S W = X (both PD)."""
    lx = np.linalg.cholesky(x)
    ls = np.linalg.cholesky(s)
    u_svd, sigma, vt = np.linalg.svd(ls.T @ lx)
    g = lx @ vt.T @ np.diag(1.0 / np.sqrt(sigma))
    return g @ g.T


def _max_step(x: np.ndarray, dx: np.ndarray) -> float:
    """Largest alpha <= 1 with x + alpha dx still PSD (x PD)."""
    lx = np.linalg.cholesky(x)
    m = scipy.linalg.solve_triangular(lx, dx, lower=True)
    m = scipy.linalg.solve_triangular(lx, m.T, lower=True).T
    lam = np.linalg.eigvalsh(_sym(m))[0]
    if lam >= -1e-14:
        return 1.0
    return min(1.0, -1.0 / lam)


def _sym(m: np.ndarray) -> np.ndarray:
    return (m + m.T) / 2.0


class _LmiCore:
    """Path-following iteration on  max b.y  s.t.  S = C - sum_i y_i A_i >= 0
    (block diagonal), with primal partner  min tr(C X), tr(A_i X) = b_i."""

    def __init__(self, consts: list[np.ndarray], coeffs: list[np.ndarray], b: np.ndarray):
        self.c = consts
        self.a = [-cf for cf in coeffs]
        self.b = b
        self.dims = [c.shape[0] for c in consts]
        self.nb = len(consts)
        self.m = b.size

    def _metrics(self, x, s, y):
        nb, m = self.nb, self.m
        rd = [self.c[k] - s[k] - np.tensordot(y, self.a[k], axes=(0, 0)) for k in range(nb)]
        rp = self.b - np.array([
            sum(np.tensordot(self.a[k][i], x[k]) for k in range(nb)) for i in range(m)
        ])
        gap = sum(np.tensordot(x[k], s[k]) for k in range(nb))
        pobj = sum(np.tensordot(self.c[k], x[k]) for k in range(nb))
        dobj = float(self.b @ y)
        rel_gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        rel_p = np.linalg.norm(rp) / self._b_norm
        rel_d = max(np.linalg.norm(rd[k]) for k in range(nb)) / self._c_norm
        return rd, rp, gap, rel_gap, rel_p, rel_d

    def solve(self, tol: float, max_iter: int, verbose: bool = False):
        m, nb = self.m, self.nb
        scale = max([1.0] + [np.abs(c).max() for c in self.c])
        x = [np.eye(d) * scale for d in self.dims]
        s = [np.eye(d) * scale for d in self.dims]
        y = np.zeros(m)
        total_dim = sum(self.dims)
        self._b_norm = 1.0 + np.linalg.norm(self.b)
        self._c_norm = 1.0 + max(np.linalg.norm(c) for c in self.c)
        status = "max_iterations"
        best = None
        best_err = np.inf
        it = 0
        for it in range(1, max_iter + 1):
            rd, rp, gap, rel_gap, rel_p, rel_d = self._metrics(x, s, y)
            mu = gap / total_dim
            err = max(rel_gap, rel_p, rel_d)
            if verbose:
                print("  it %2d  mu %.3e  gap %.3e  rp %.3e  rd %.3e" % (it, mu, rel_gap, rel_p, rel_d))
            if err < best_err:
                best_err = err
                best = ([xk.copy() for xk in x], [sk.copy() for sk in s], y.copy(),
                        {"rel_gap": rel_gap, "primal_residual": rel_p,
                         "dual_residual": rel_d, "mu": mu})
            if err < tol:
                status = "optimal"
                break
            if mu < 1e-14 * scale:
                # complementarity exhausted at floating-point resolution;
                # the best recorded iterate is as good as it will get
                status = "optimal" if best_err < 100 * tol else "numerical_failure"
                break

            try:
                w = [_nt_scaling(x[k], s[k]) for k in range(nb)]
                h = np.zeros((m, m))
                for k in range(nb):
                    wawk = np.matmul(w[k], np.matmul(self.a[k], w[k]))
                    h += np.tensordot(self.a[k], wawk, axes=([1, 2], [1, 2]))
                h = _sym(h)
                h_fact = scipy.linalg.cho_factor(h + np.eye(m) * 1e-13 * (1.0 + np.trace(h) / m))

                q = np.array([
                    sum(np.tensordot(self.a[k][i], _wmw(w[k], rd[k])) for k in range(nb))
                    for i in range(m)
                ])

                def direction(r_blocks):
                    t_r = np.array([
                        sum(np.tensordot(self.a[k][i], r_blocks[k]) for k in range(nb))
                        for i in range(m)
                    ])
                    rhs = rp - t_r + q
                    dy = scipy.linalg.cho_solve(h_fact, rhs)
                    ds = [rd[k] - np.tensordot(dy, self.a[k], axes=(0, 0)) for k in range(nb)]
                    dx = [_sym(r_blocks[k] - _wmw(w[k], ds[k])) for k in range(nb)]
                    return dy, dx, ds

                # predictor: pure Newton step toward XS = 0
                dy_a, dx_a, ds_a = direction([-x[k] for k in range(nb)])
                ap = min(_max_step(x[k], dx_a[k]) for k in range(nb))
                ad = min(_max_step(s[k], ds_a[k]) for k in range(nb))
                gap_aff = sum(
                    np.tensordot(x[k] + ap * dx_a[k], s[k] + ad * ds_a[k]) for k in range(nb)
                )
                sigma = min(1.0, max(1e-6, (max(gap_aff, 0.0) / gap) ** 3))

                # corrector: recentre toward sigma * mu on the central path
                mu_c = sigma * gap / total_dim
                r_cen = [mu_c * np.linalg.inv(s[k]) - x[k] for k in range(nb)]
                dy, dx, ds = direction(r_cen)
                ap = min(1.0, STEP_DAMPING * min(_max_step(x[k], dx[k]) for k in range(nb)))
                ad = min(1.0, STEP_DAMPING * min(_max_step(s[k], ds[k]) for k in range(nb)))
            except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
                status = "optimal" if best_err < 100 * tol else "numerical_failure"
                break
            if ap < MIN_STEP and ad < MIN_STEP:
                status = "no_interior_point" if best_err > 100 * tol else "optimal"
                break
            for k in range(nb):
                x[k] = _sym(x[k] + ap * dx[k])
                s[k] = _sym(s[k] + ad * ds[k])
            y = y + ad * dy

        if best is None:  # pragma: no cover
            return "numerical_failure", y, x, s, {}, it
        x_b, s_b, y_b, res = best
        return status, y_b, x_b, s_b, res, it


def _wmw(w: np.ndarray, m: np.ndarray) -> np.ndarray:
    return w @ m @ w


def _reduce_equalities(problem: SdpProblem):
    """Eliminate A_eq u = b_eq: returns (u0, nullbasis, farkas_like_flag)."""
    from .lp import _independent_rows

    a = problem.a_eq
    b = problem.b_eq
    keep, farkas = _independent_rows(a, b)
    if farkas is not None:
        return None, None, False
    a_k = a[keep]
    b_k = b[keep]
    u0, *_ = np.linalg.lstsq(a_k, b_k, rcond=None)
    resid = np.abs(a_k @ u0 - b_k).max(initial=0.0)
    if resid > 1e-8 * (1.0 + np.abs(b_k).max(initial=0.0)):
        return None, None, False
    nullbasis = scipy.linalg.null_space(a_k)
    return u0, nullbasis, True


def sdp_solve(problem: SdpProblem, tol: float = DEFAULT_TOL, max_iter: int = 100,
              verbose: bool = False) -> SdpOutcome:
    """Solve the block-PSD program; statuses are "optimal", "max_iterations",
    "infeasible" (inconsistent equalities), "no_interior_point" (steps
    collapsed, typically an empty interior) or "numerical_failure"."""
    m = problem.n_params
    consts = [_hermitize(blk.const.astype(complex)) for blk in problem.blocks]
    coeffs = [np.asarray([_hermitize(f) for f in blk.coeffs]) for blk in problem.blocks]

    if problem.a_eq is not None:
        u0, nullbasis, ok = _reduce_equalities(problem)
        if not ok:
            return SdpOutcome(status="infeasible",
                              residuals={"equalities": "inconsistent"})
    else:
        u0 = np.zeros(m)
        nullbasis = np.eye(m)

    n_free = nullbasis.shape[1]
    red_consts = [consts[k] + np.tensordot(u0, coeffs[k], axes=(0, 0)) for k in range(len(consts))]
    red_coeffs = [np.tensordot(nullbasis, coeffs[k], axes=(0, 0)) for k in range(len(consts))]
    red_obj = nullbasis.T @ problem.objective
    offset = float(problem.objective @ u0)

    if n_free == 0:
        # fully determined by the equalities: just report feasibility
        values = [blk.value(u0.real) for blk in problem.blocks]
        mins = [float(np.linalg.eigvalsh(v)[0]) for v in values]
        feasible = all(mn >= -1e-9 for mn in mins)
        return SdpOutcome(status="optimal" if feasible else "infeasible",
                          objective=offset if feasible else None, u=u0,
                          block_values=values,
                          residuals={"block_min_eig": min(mins)})

    complex_data = any(np.abs(c.imag).max() > 0 for c in red_consts) or any(
        np.abs(cf.imag).max() > 0 for cf in red_coeffs
    )
    if complex_data:
        core_consts = [_embed(c) for c in red_consts]
        core_coeffs = [np.asarray([_embed(f) for f in cf]) for cf in red_coeffs]
    else:
        core_consts = [c.real.copy() for c in red_consts]
        core_coeffs = [cf.real.copy() for cf in red_coeffs]

    core = _LmiCore(core_consts, core_coeffs, red_obj)
    status, v, x_blocks, s_blocks, res, iters = core.solve(tol, max_iter, verbose)

    u = u0 + nullbasis @ v
    values = [blk.value(u) for blk in problem.blocks]
    min_eigs = [float(np.linalg.eigvalsh(_hermitize(val))[0]) for val in values]
    res["block_min_eig"] = min(min_eigs)

    # multipliers back in the caller's coordinates
    duals = []
    for k, blk in enumerate(problem.blocks):
        if complex_data:
            duals.append(2.0 * _unembed(x_blocks[k], blk.dim))
        else:
            duals.append(x_blocks[k].copy())
    stat_vec = problem.objective + _stationarity_terms(problem, duals)
    if problem.a_eq is not None:
        nu, *_ = np.linalg.lstsq(problem.a_eq.T, stat_vec, rcond=None)
        stat_res = float(np.abs(problem.a_eq.T @ nu - stat_vec).max())
        dual_obj = float(np.real(sum(np.tensordot(np.conj(consts[k]), duals[k]).real
                                     for k in range(len(consts)))) + problem.b_eq @ nu)
    else:
        nu = None
        stat_res = float(np.abs(stat_vec).max())
        dual_obj = float(sum(np.tensordot(np.conj(consts[k]), duals[k]).real
                             for k in range(len(consts))))
    res["dual_stationarity"] = stat_res

    return SdpOutcome(status=status, objective=float(problem.objective @ u),
                      u=u, block_values=values, block_duals=duals, eq_duals=nu,
                      dual_objective=dual_obj, residuals=res, iterations=iters)


def _stationarity_terms(problem: SdpProblem, duals: list[np.ndarray]) -> np.ndarray:
    """vector with entries sum_k tr(X_k F_kj), real by Hermiticity."""
    out = np.zeros(problem.n_params)
    for k, blk in enumerate(problem.blocks):
        xk = duals[k]
        out += np.real(np.tensordot(blk.coeffs, np.conj(xk), axes=([1, 2], [0, 1])))
    return out
