"""Vertex enumeration and LP membership for tripartite correlation polytopes.

Three families of questions are answered here, all by linear programming over
explicit vertex sets or over raw probability vectors:

* is a full box a mixture of the 64 local deterministic strategies;
* is a triple of bipartite marginals reproducible by some local box (the
  marginal polytope), or by a mixture of hybrid two-versus-one strategies
  that is globally no-signaling (a relaxation of bilocality: failure
  certifies genuine tripartite nonlocality under every bilocality notion at
  least as strong as the hybrid one);
* what range of three-party correlators is attainable by no-signaling
  extensions of a marginal triple (collapsing bounds certify a unique
  extension).

Every negative answer carries a Farkas certificate that can be re-checked
independently of the solver.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .boxes import (
    SIGNS,
    BipartiteBox,
    MarginalTriple,
    TripartiteBox,
    marginals,
)
from .lp import LinearProgram, LpOutcome, lp_solve

MEMBERSHIP_TOL = 1e-9

PAIRINGS = ("AB|C", "AC|B", "BC|A")

# row order of the marginal-membership constraint system: the separating
# functional of an infeasibility certificate is expressed over these entries
PI_ROW_LABELS = tuple(
    ["<A%d>" % x for x in range(2)]
    + ["<B%d>" % y for y in range(2)]
    + ["<C%d>" % z for z in range(2)]
    + ["<A%dB%d>" % (x, y) for x in range(2) for y in range(2)]
    + ["<A%dC%d>" % (x, z) for x in range(2) for z in range(2)]
    + ["<B%dC%d>" % (y, z) for y in range(2) for z in range(2)]
    + ["normalization"]
)


@dataclass
class VertexFamily:
    """An immutable list of extremal boxes of a given kind."""

    kind: str
    boxes: np.ndarray  # (count, 2,2,2,2,2,2)
    pairings: tuple[str, ...] | None = None

    @property
    def count(self) -> int:
        return self.boxes.shape[0]

    def flat(self) -> np.ndarray:
        return self.boxes.reshape(self.count, 64)

    def box(self, i: int) -> TripartiteBox:
        return TripartiteBox(p=self.boxes[i].copy())


@dataclass
class MembershipReport:
    """Outcome of a convex-hull membership LP.

    ``weights`` reproduce the target when member; ``certificate`` is the
    Farkas separating functional (over the constraint rows) when not.
    """

    member: bool
    weights: np.ndarray | None
    certificate: np.ndarray | None
    residual: float
    phase1_value: float = 0.0
    program: LinearProgram | None = None
    lp_outcome: LpOutcome | None = None


@dataclass
class ExtensionBounds:
    """Per-input extremes of the three-party correlator over all no-signaling
    extensions of a marginal triple, with attaining boxes as witnesses."""

    feasible: bool
    lower: np.ndarray | None = None  # (2,2,2)
    upper: np.ndarray | None = None
    witnesses_lower: np.ndarray | None = None  # (2,2,2,64) probability vectors
    witnesses_upper: np.ndarray | None = None

    def collapsed(self, tol: float = 1e-7) -> bool:
        if not self.feasible:
            return False
        return bool(np.all(self.upper - self.lower <= tol))


def _deterministic_outputs(strategy: int) -> np.ndarray:
    """Outcome index (0 or 1) for inputs 0 and 1 under one of the four
    single-party deterministic strategies."""
    return np.array([(strategy >> 1) & 1, strategy & 1])


@lru_cache(maxsize=1)
def _local_vertex_data() -> tuple[np.ndarray, np.ndarray]:
    """(boxes (64,2,2,2,2,2,2), correlator rows (64,18)) of the local
    deterministic strategies, ordered by (A strategy, B strategy, C strategy)."""
    boxes = np.zeros((64, 2, 2, 2, 2, 2, 2))
    corr = np.zeros((64, 18))
    v = 0
    for sa, sb, sc in itertools.product(range(4), repeat=3):
        oa = _deterministic_outputs(sa)
        ob = _deterministic_outputs(sb)
        oc = _deterministic_outputs(sc)
        ind_a = np.zeros((2, 2))
        ind_b = np.zeros((2, 2))
        ind_c = np.zeros((2, 2))
        for x in range(2):
            ind_a[oa[x], x] = 1.0
            ind_b[ob[x], x] = 1.0
            ind_c[oc[x], x] = 1.0
        boxes[v] = np.einsum("ax,by,cz->abcxyz", ind_a, ind_b, ind_c)
        ea, eb, ec = SIGNS[oa], SIGNS[ob], SIGNS[oc]
        corr[v, 0:2] = ea
        corr[v, 2:4] = eb
        corr[v, 4:6] = ec
        corr[v, 6:10] = np.outer(ea, eb).ravel()
        corr[v, 10:14] = np.outer(ea, ec).ravel()
        corr[v, 14:18] = np.outer(eb, ec).ravel()
        v += 1
    boxes.flags.writeable = False
    corr.flags.writeable = False
    return boxes, corr


def local_vertices() -> VertexFamily:
    """The 64 deterministic boxes a = f(x), b = g(y), c = h(z)."""
    boxes, _ = _local_vertex_data()
    return VertexFamily(kind="local-deterministic", boxes=boxes)


@lru_cache(maxsize=1)
def _svetlichny_vertex_boxes() -> tuple[np.ndarray, tuple[str, ...]]:
    boxes = np.zeros((3072, 2, 2, 2, 2, 2, 2))
    labels = []
    v = 0
    for pairing in PAIRINGS:
        for f, g in itertools.product(range(16), repeat=2):
            # joint deterministic pair strategies: outcome indices as a
            # function of the pair's two inputs, packed row-major in f and g
            fo = np.array([[(f >> (3 - 2 * u - w)) & 1 for w in range(2)] for u in range(2)])
            go = np.array([[(g >> (3 - 2 * u - w)) & 1 for w in range(2)] for u in range(2)])
            ind_f = np.zeros((2, 2, 2))
            ind_g = np.zeros((2, 2, 2))
            for u in range(2):
                for w in range(2):
                    ind_f[fo[u, w], u, w] = 1.0
                    ind_g[go[u, w], u, w] = 1.0
            for h in range(4):
                ho = _deterministic_outputs(h)
                ind_h = np.zeros((2, 2))
                for x in range(2):
                    ind_h[ho[x], x] = 1.0
                if pairing == "AB|C":
                    boxes[v] = np.einsum("axy,bxy,cz->abcxyz", ind_f, ind_g, ind_h)
                elif pairing == "AC|B":
                    boxes[v] = np.einsum("axz,cxz,by->abcxyz", ind_f, ind_g, ind_h)
                else:  # BC|A
                    boxes[v] = np.einsum("byz,cyz,ax->abcxyz", ind_f, ind_g, ind_h)
                labels.append(pairing)
                v += 1
    boxes.flags.writeable = False
    return boxes, tuple(labels)


def svetlichny_vertices() -> VertexFamily:
    """The 3072 hybrid vertices where one pair shares an arbitrary joint
    deterministic strategy (possibly signaling inside the pair) and the third
    party answers deterministically on its own input."""
    boxes, labels = _svetlichny_vertex_boxes()
    return VertexFamily(kind="svetlichny-hybrid", boxes=boxes, pairings=labels)


def mixture_box(family: VertexFamily, weights: np.ndarray) -> TripartiteBox:
    w = np.asarray(weights, dtype=float)
    if w.shape != (family.count,):
        raise ValueError("weights length mismatch")
    return TripartiteBox(p=np.tensordot(w, family.boxes, axes=(0, 0)))


def _membership_lp(a: np.ndarray, b: np.ndarray) -> MembershipReport:
    program = LinearProgram(objective=np.zeros(a.shape[1]), a_eq=a, b_eq=b)
    out = lp_solve(program)
    if out.status == "optimal":
        residual = float(np.abs(a @ out.x - b).max())
        return MembershipReport(member=True, weights=out.x, certificate=None,
                                residual=residual, phase1_value=out.phase1_value,
                                program=program, lp_outcome=out)
    if out.status == "infeasible":
        return MembershipReport(member=False, weights=None, certificate=out.dual,
                                residual=out.phase1_value, phase1_value=out.phase1_value,
                                program=program, lp_outcome=out)
    raise RuntimeError("membership LP failed with status %r" % out.status)


def box_local_membership(box: TripartiteBox) -> MembershipReport:
    """Can the full box be written as a convex mixture of local deterministic
    strategies (all 64 conditional probabilities reproduced)?"""
    family = local_vertices()
    a = np.vstack([family.flat().T, np.ones(family.count)])
    b = np.concatenate([box.p.ravel(), [1.0]])
    return _membership_lp(a, b)


def bipartite_local_membership(box: BipartiteBox) -> MembershipReport:
    """Local-model membership for a bipartite box over the 16 deterministic
    strategies."""
    cols = np.zeros((16, 16))
    v = 0
    for sa, sb in itertools.product(range(4), repeat=2):
        oa = _deterministic_outputs(sa)
        ob = _deterministic_outputs(sb)
        p = np.zeros((2, 2, 2, 2))
        for x in range(2):
            for y in range(2):
                p[oa[x], ob[y], x, y] = 1.0
        cols[:, v] = p.ravel()
        v += 1
    a = np.vstack([cols, np.ones(16)])
    b = np.concatenate([box.p.ravel(), [1.0]])
    return _membership_lp(a, b)


def box_svetlichny_membership(box: TripartiteBox) -> MembershipReport:
    """Is the full box a mixture of hybrid vertices (no global no-signaling
    side condition needed: the target itself fixes all marginals)?"""
    family = svetlichny_vertices()
    a = np.vstack([family.flat().T, np.ones(family.count)])
    b = np.concatenate([box.p.ravel(), [1.0]])
    return _membership_lp(a, b)


def _check_triple(m: MarginalTriple, tol: float = 1e-9) -> None:
    dev = m.consistency_deviation()
    if dev > tol:
        raise ValueError("inconsistent marginal triple (single-party mismatch %.3e)" % dev)
    for b in (m.pab, m.pac, m.pbc):
        if b.normalization_deviation() > tol or b.signaling_deviation() > 1e-8:
            raise ValueError("marginal triple contains an invalid bipartite box")


def marginal_membership_pi(m: MarginalTriple) -> MembershipReport:
    """Membership of a marginal triple in the polytope of marginals of local
    tripartite boxes.  Non-membership certifies that every no-signaling
    extension of the triple is nonlocal."""
    _check_triple(m)
    _, corr = _local_vertex_data()
    t = m.correlators()
    a = np.vstack([corr.T, np.ones(64)])
    b = np.concatenate([t.singles.ravel(), t.doubles.ravel(), [1.0]])
    return _membership_lp(a, b)


# functionals on a flattened box q(abc|xyz): two-party sums at fixed dropped
# inputs, used both as no-signaling and marginal-matching rows
def _pair_sum_row(pair: int, a: int, b: int, x: int, y: int, z_fixed: int) -> np.ndarray:
    coeff = np.zeros((2, 2, 2, 2, 2, 2))
    if pair == 0:  # AB, sum over c, third input z fixed
        coeff[a, b, :, x, y, z_fixed] = 1.0
    elif pair == 1:  # AC, sum over b
        coeff[a, :, b, x, z_fixed, y] = 1.0
    else:  # BC, sum over a
        coeff[:, a, b, z_fixed, x, y] = 1.0
    return coeff.ravel()


def _marginal_rows() -> tuple[np.ndarray, np.ndarray]:
    """(matching rows at dropped input 0, no-signaling difference rows)."""
    match = []
    ns = []
    for pair in range(3):
        for a, b, x, y in itertools.product(range(2), repeat=4):
            r0 = _pair_sum_row(pair, a, b, x, y, 0)
            r1 = _pair_sum_row(pair, a, b, x, y, 1)
            match.append(r0)
            ns.append(r0 - r1)
    return np.array(match), np.array(ns)


def _triple_targets(m: MarginalTriple) -> np.ndarray:
    return np.concatenate([m.pab.p.ravel(), m.pac.p.ravel(), m.pbc.p.ravel()])


@lru_cache(maxsize=1)
def _pi_prime_system():
    """The (constant) hybrid-membership constraint matrix together with a
    maximal independent row subset and the coefficients expressing every
    dropped row over the kept ones; only the right-hand side varies between
    queries, so this is computed once."""
    from .lp import _independent_rows

    family = svetlichny_vertices()
    v = family.flat().T  # (64, 3072)
    match, ns = _marginal_rows()
    a = np.vstack([np.ones(family.count), ns @ v, match @ v])
    keep, _ = _independent_rows(a, np.zeros(a.shape[0]))
    dropped = np.setdiff1d(np.arange(a.shape[0]), keep)
    if dropped.size:
        coeff, *_ = np.linalg.lstsq(a[keep].T, a[dropped].T, rcond=None)
    else:
        coeff = np.zeros((keep.size, 0))
    a.flags.writeable = False
    return a, keep, dropped, coeff


def marginal_membership_pi_prime_relaxed(m: MarginalTriple) -> MembershipReport:
    """Membership in the hull of hybrid vertices subject to the mixture being
    globally no-signaling.  Non-membership implies the triple is incompatible
    with every two-versus-one model, hence certifies genuine tripartite
    nonlocality."""
    _check_triple(m)
    a, keep, dropped, coeff = _pi_prime_system()
    match, ns = _marginal_rows()
    b = np.concatenate([[1.0], np.zeros(ns.shape[0]), _triple_targets(m)])
    program_full = LinearProgram(objective=np.zeros(a.shape[1]), a_eq=a, b_eq=b)
    if dropped.size:
        gaps = b[dropped] - coeff.T @ b[keep]
        bad = np.where(np.abs(gaps) > 1e-9)[0]
        if bad.size:
            i = int(bad[0])
            farkas = np.zeros(a.shape[0])
            farkas[keep] = -coeff[:, i]
            farkas[dropped[i]] = 1.0
            if gaps[i] < 0:
                farkas = -farkas
            farkas /= np.abs(farkas).max()
            out = LpOutcome(status="infeasible", dual=farkas,
                            phase1_value=float(abs(gaps[i])))
            return MembershipReport(member=False, weights=None, certificate=farkas,
                                    residual=float(abs(gaps[i])),
                                    phase1_value=out.phase1_value,
                                    program=program_full, lp_outcome=out)
    reduced = LinearProgram(objective=np.zeros(a.shape[1]), a_eq=a[keep], b_eq=b[keep])
    out = lp_solve(reduced)
    if out.status == "optimal":
        residual = float(np.abs(a @ out.x - b).max())
        full_out = LpOutcome(status="optimal", value=out.value, x=out.x,
                             dual=_pad_rows(out.dual, keep, a.shape[0]),
                             phase1_value=out.phase1_value, iterations=out.iterations,
                             residual=residual, duality_gap=out.duality_gap)
        return MembershipReport(member=True, weights=out.x, certificate=None,
                                residual=residual, phase1_value=out.phase1_value,
                                program=program_full, lp_outcome=full_out)
    if out.status == "infeasible":
        farkas = _pad_rows(out.dual, keep, a.shape[0])
        full_out = LpOutcome(status="infeasible", dual=farkas,
                             phase1_value=out.phase1_value, iterations=out.iterations)
        return MembershipReport(member=False, weights=None, certificate=farkas,
                                residual=out.phase1_value, phase1_value=out.phase1_value,
                                program=program_full, lp_outcome=full_out)
    raise RuntimeError("membership LP failed with status %r" % out.status)


def _pad_rows(vec: np.ndarray, keep: np.ndarray, m: int) -> np.ndarray:
    out = np.zeros(m)
    out[keep] = vec
    return out


def extension_bounds(m: MarginalTriple) -> ExtensionBounds:
    """Minimum and maximum of each <A_x B_y C_z> over all no-signaling boxes
    with the given marginals, solved directly over the 64 probabilities."""
    _check_triple(m)
    rows = []
    rhs = []
    # matching at both dropped inputs encodes no-signaling and the values
    for pair, target in ((0, m.pab), (1, m.pac), (2, m.pbc)):
        for a, b, x, y in itertools.product(range(2), repeat=4):
            for zf in range(2):
                rows.append(_pair_sum_row(pair, a, b, x, y, zf))
                rhs.append(target.p[a, b, x, y])
    a_eq = np.array(rows)
    b_eq = np.array(rhs)

    sign_cube = np.einsum("a,b,c->abc", SIGNS, SIGNS, SIGNS)
    lower = np.zeros((2, 2, 2))
    upper = np.zeros((2, 2, 2))
    wit_lo = np.zeros((2, 2, 2, 64))
    wit_hi = np.zeros((2, 2, 2, 64))
    for x, y, z in itertools.product(range(2), repeat=3):
        coeff = np.zeros((2, 2, 2, 2, 2, 2))
        coeff[:, :, :, x, y, z] = sign_cube
        c = coeff.ravel()
        lo = lp_solve(LinearProgram(objective=c, a_eq=a_eq, b_eq=b_eq))
        if lo.status == "infeasible":
            return ExtensionBounds(feasible=False)
        hi = lp_solve(LinearProgram(objective=c, a_eq=a_eq, b_eq=b_eq, maximize=True))
        if lo.status != "optimal" or hi.status != "optimal":
            raise RuntimeError("extension-bound LP failed (%s/%s)" % (lo.status, hi.status))
        lower[x, y, z] = lo.value
        upper[x, y, z] = hi.value
        wit_lo[x, y, z] = lo.x
        wit_hi[x, y, z] = hi.x
    return ExtensionBounds(feasible=True, lower=lower, upper=upper,
                           witnesses_lower=wit_lo, witnesses_upper=wit_hi)


def random_local_mixture(rng: np.random.Generator, concentration: float = 1.0) -> TripartiteBox:
    """A random point of the local polytope (Dirichlet mixture of vertices)."""
    w = rng.dirichlet(np.full(64, concentration))
    return mixture_box(local_vertices(), w)


def unique_extension(m: MarginalTriple, tol: float = 1e-7) -> TripartiteBox | None:
    """If the extension bounds collapse, return the unique no-signaling
    extension of the triple as a box; otherwise None."""
    eb = extension_bounds(m)
    if not eb.collapsed(tol):
        return None
    t = m.correlators()
    from .boxes import CorrelatorTable, box_from_correlators

    full = CorrelatorTable(singles=t.singles, doubles=t.doubles,
                           triples=(eb.lower + eb.upper) / 2.0)
    return box_from_correlators(full)
