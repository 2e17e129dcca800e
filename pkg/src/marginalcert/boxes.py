"""Tripartite binary correlation boxes and their marginal structure.

A box is the conditional distribution P(abc|xyz) with outcomes a,b,c in
{-1,+1} (stored at indices 0,1) and binary inputs x,y,z.  Boxes and
expectation-value tables are interchangeable representations: a box is fixed
by its one-, two- and three-party correlators through

    P(abc|xyz) = 1/8 [1 + a<A_x> + b<B_y> + c<C_z> + ab<A_x B_y>
                        + ac<A_x C_z> + bc<B_y C_z> + abc<A_x B_y C_z>].

Bipartite marginals, no-signaling checks and the bundled Bell-type
inequalities (CHSH, Svetlichny, guess-your-neighbour-input, and the
bipartite-marginal witness) all live here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

SIGNS = np.array([-1.0, 1.0])  # outcome index 0 -> -1, index 1 -> +1

# coefficient of <A_x B_y C_z> in the standard genuine-nonlocality form,
# algebraic bound 4 for two-way-separable (hybrid) models
SVETLICHNY_FORM = np.array(
    [[[1.0, 1.0], [1.0, -1.0]], [[1.0, -1.0], [-1.0, -1.0]]]
)


@dataclass
class CorrelatorTable:
    """One-, two- and three-party expectation values of a tripartite box.

    ``singles[i, s]`` is party i's expectation for input s; ``doubles[k]``
    holds the pair correlators for pairs (AB, AC, BC); ``triples`` may be
    ``None`` when only marginal data is available.
    """

    singles: np.ndarray
    doubles: np.ndarray
    triples: np.ndarray | None = None

    def __post_init__(self):
        self.singles = np.asarray(self.singles, dtype=float)
        self.doubles = np.asarray(self.doubles, dtype=float)
        if self.singles.shape != (3, 2):
            raise ValueError("singles must have shape (3, 2)")
        if self.doubles.shape != (3, 2, 2):
            raise ValueError("doubles must have shape (3, 2, 2)")
        if self.triples is not None:
            self.triples = np.asarray(self.triples, dtype=float)
            if self.triples.shape != (2, 2, 2):
                raise ValueError("triples must have shape (2, 2, 2)")

    def max_abs(self) -> float:
        parts = [np.abs(self.singles).max(), np.abs(self.doubles).max()]
        if self.triples is not None:
            parts.append(np.abs(self.triples).max())
        return float(max(parts))


@dataclass
class TripartiteBox:
    """P(abc|xyz) stored as a (2,2,2,2,2,2) array indexed [a,b,c,x,y,z]."""

    p: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        if self.p.shape != (2,) * 6:
            raise ValueError("box array must have shape (2,2,2,2,2,2)")

    def normalization_deviation(self) -> float:
        return float(np.abs(self.p.sum(axis=(0, 1, 2)) - 1.0).max())

    def min_entry(self) -> float:
        return float(self.p.min())

    def negative_entries(self, tol: float = 1e-12) -> list[tuple[int, ...]]:
        return [tuple(int(i) for i in idx) for idx in zip(*np.nonzero(self.p < -tol))]

    def is_valid(self, tol: float = 1e-9) -> bool:
        return self.min_entry() >= -tol and self.normalization_deviation() <= tol


@dataclass
class BipartiteBox:
    """P(ab|xy) stored as a (2,2,2,2) array indexed [a,b,x,y]."""

    p: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        if self.p.shape != (2,) * 4:
            raise ValueError("bipartite box array must have shape (2,2,2,2)")

    def normalization_deviation(self) -> float:
        return float(np.abs(self.p.sum(axis=(0, 1)) - 1.0).max())

    def signaling_deviation(self) -> float:
        ma = self.p.sum(axis=1)  # [a, x, y]
        mb = self.p.sum(axis=0)  # [b, x, y]
        return float(max(np.ptp(ma, axis=2).max(), np.ptp(mb, axis=1).max()))

    def correlators(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(singles of first party, singles of second party, pair correlators),
        marginalizing at dropped input 0."""
        sa = np.einsum("a,ax->x", SIGNS, self.p[:, :, :, 0].sum(axis=1))
        sb = np.einsum("b,by->y", SIGNS, self.p[:, :, 0, :].sum(axis=0))
        d = np.einsum("a,b,abxy->xy", SIGNS, SIGNS, self.p)
        return sa, sb, d


@dataclass
class MarginalTriple:
    """Three pairwise-consistent bipartite boxes (P_AB, P_AC, P_BC)."""

    pab: BipartiteBox
    pac: BipartiteBox
    pbc: BipartiteBox
    dropped_input_deviation: float = 0.0

    def consistency_deviation(self) -> float:
        """Largest mismatch between single-party marginals computed from two
        different bipartite boxes."""
        pa_ab = self.pab.p.sum(axis=1)[:, :, 0]
        pa_ac = self.pac.p.sum(axis=1)[:, :, 0]
        pb_ab = self.pab.p.sum(axis=0)[:, 0, :]
        pb_bc = self.pbc.p.sum(axis=1)[:, :, 0]
        pc_ac = self.pac.p.sum(axis=0)[:, 0, :]
        pc_bc = self.pbc.p.sum(axis=0)[:, 0, :]
        return float(
            max(
                np.abs(pa_ab - pa_ac).max(),
                np.abs(pb_ab - pb_bc).max(),
                np.abs(pc_ac - pc_bc).max(),
            )
        )

    def correlators(self) -> CorrelatorTable:
        """Marginal correlator table (no triples)."""
        sa, sb1, dab = self.pab.correlators()
        _, sc1, dac = self.pac.correlators()
        _, _, dbc = self.pbc.correlators()
        singles = np.stack([sa, sb1, sc1])
        doubles = np.stack([dab, dac, dbc])
        return CorrelatorTable(singles=singles, doubles=doubles, triples=None)


@dataclass
class InequalitySpec:
    """A linear functional on correlator tables with a constant offset and a
    bound; the inequality reads  offset + <coefficients, table>  <=  bound."""

    name: str
    singles: np.ndarray = field(default_factory=lambda: np.zeros((3, 2)))
    doubles: np.ndarray = field(default_factory=lambda: np.zeros((3, 2, 2)))
    triples: np.ndarray = field(default_factory=lambda: np.zeros((2, 2, 2)))
    offset: float = 0.0
    bound: float = 0.0

    def __post_init__(self):
        self.singles = np.asarray(self.singles, dtype=float)
        self.doubles = np.asarray(self.doubles, dtype=float)
        self.triples = np.asarray(self.triples, dtype=float)
        for arr in (self.singles, self.doubles, self.triples):
            if not np.all(np.isfinite(arr)):
                raise ValueError("inequality coefficients must be finite")

    def uses_triples(self) -> bool:
        return bool(np.any(self.triples != 0.0))


def box_from_correlators(table: CorrelatorTable) -> TripartiteBox:
    """Expand a correlator table into the corresponding box.  Normalization
    holds by construction; positivity is the caller's to check via
    ``TripartiteBox.negative_entries`` (it is reported, never assumed)."""
    if table.triples is None:
        raise ValueError("three-party correlators required to build a full box")
    a = SIGNS[:, None, None, None, None, None]
    b = SIGNS[None, :, None, None, None, None]
    c = SIGNS[None, None, :, None, None, None]
    sa = table.singles[0][None, None, None, :, None, None]
    sb = table.singles[1][None, None, None, None, :, None]
    sc = table.singles[2][None, None, None, None, None, :]
    dab = table.doubles[0][None, None, None, :, :, None]
    dac = table.doubles[1][None, None, None, :, None, :]
    dbc = table.doubles[2][None, None, None, None, :, :]
    t = table.triples[None, None, None, :, :, :]
    p = (1.0 + a * sa + b * sb + c * sc + a * b * dab + a * c * dac + b * c * dbc + a * b * c * t) / 8.0
    return TripartiteBox(p=p)


def correlators_from_box(box: TripartiteBox) -> CorrelatorTable:
    """Invert the parametrization; marginal entries use dropped input 0, so
    the round trip is the identity exactly when the box is no-signaling."""
    p = box.p
    singles = np.zeros((3, 2))
    singles[0] = np.einsum("a,ax->x", SIGNS, p[:, :, :, :, 0, 0].sum(axis=(1, 2)))
    singles[1] = np.einsum("b,by->y", SIGNS, p[:, :, :, 0, :, 0].sum(axis=(0, 2)))
    singles[2] = np.einsum("c,cz->z", SIGNS, p[:, :, :, 0, 0, :].sum(axis=(0, 1)))
    doubles = np.zeros((3, 2, 2))
    doubles[0] = np.einsum("a,b,abxy->xy", SIGNS, SIGNS, p[:, :, :, :, :, 0].sum(axis=2))
    doubles[1] = np.einsum("a,c,acxz->xz", SIGNS, SIGNS, p[:, :, :, :, 0, :].sum(axis=1))
    doubles[2] = np.einsum("b,c,bcyz->yz", SIGNS, SIGNS, p[:, :, :, 0, :, :].sum(axis=0))
    triples = np.einsum("a,b,c,abcxyz->xyz", SIGNS, SIGNS, SIGNS, p)
    return CorrelatorTable(singles=singles, doubles=doubles, triples=triples)


def signaling_deviation(box: TripartiteBox) -> float:
    """Largest dependence of any subset marginal on a dropped party's input."""
    p = box.p
    devs = []
    # two-party marginals vs the third input
    devs.append(np.ptp(p.sum(axis=2), axis=4).max())  # AB vs z
    devs.append(np.ptp(p.sum(axis=1), axis=3).max())  # AC vs y
    devs.append(np.ptp(p.sum(axis=0), axis=2).max())  # BC vs x
    # single-party marginals vs both other inputs
    ma = p.sum(axis=(1, 2))  # [a,x,y,z]
    mb = p.sum(axis=(0, 2))  # [b,x,y,z]
    mc = p.sum(axis=(0, 1))  # [c,x,y,z]
    devs.append(max(np.ptp(ma, axis=2).max(), np.ptp(ma, axis=3).max()))
    devs.append(max(np.ptp(mb, axis=1).max(), np.ptp(mb, axis=3).max()))
    devs.append(max(np.ptp(mc, axis=1).max(), np.ptp(mc, axis=2).max()))
    return float(max(devs))


def is_nonsignaling(box: TripartiteBox, tol: float = 1e-9) -> tuple[bool, float]:
    """Whether every subset marginal is independent of dropped inputs, plus
    the largest observed violation."""
    dev = signaling_deviation(box)
    return dev <= tol, dev


def marginals(box: TripartiteBox, tol: float = 1e-8) -> MarginalTriple:
    """Bipartite marginals of a no-signaling box, marginalizing at dropped
    input 0 by convention; the cross-input deviation is recorded on the
    result."""
    dev = signaling_deviation(box)
    if dev > tol:
        raise ValueError("box signals beyond tolerance (deviation %.3e)" % dev)
    pab = BipartiteBox(box.p[:, :, :, :, :, 0].sum(axis=2))
    pac = BipartiteBox(box.p[:, :, :, :, 0, :].sum(axis=1))
    pbc = BipartiteBox(box.p[:, :, :, 0, :, :].sum(axis=0))
    return MarginalTriple(pab=pab, pac=pac, pbc=pbc, dropped_input_deviation=dev)


def uniform_box() -> TripartiteBox:
    return TripartiteBox(p=np.full((2,) * 6, 1.0 / 8.0))


def box29_correlators() -> CorrelatorTable:
    """The extremal no-signaling point with all singles 1/3, pair correlators
    1 at inputs (0,0) and -1/3 elsewhere, and triple correlators 1/3 when
    x+y+z <= 1 and -1 otherwise."""
    singles = np.full((3, 2), 1.0 / 3.0)
    doubles = np.full((3, 2, 2), -1.0 / 3.0)
    doubles[:, 0, 0] = 1.0
    triples = np.empty((2, 2, 2))
    for x, y, z in itertools.product(range(2), repeat=3):
        triples[x, y, z] = 1.0 / 3.0 if x + y + z <= 1 else -1.0
    return CorrelatorTable(singles=singles, doubles=doubles, triples=triples)


def box29() -> TripartiteBox:
    return box_from_correlators(box29_correlators())


def evaluate_inequality(spec: InequalitySpec, table: CorrelatorTable) -> float:
    """Value of the inequality's functional on the table; a violation is a
    value strictly above ``spec.bound``."""
    if spec.uses_triples() and table.triples is None:
        raise ValueError("inequality %r references three-party correlators, "
                         "but only marginal data was given" % spec.name)
    val = spec.offset
    val += float(np.sum(spec.singles * table.singles))
    val += float(np.sum(spec.doubles * table.doubles))
    if table.triples is not None:
        val += float(np.sum(spec.triples * table.triples))
    return val


def marginal_witness() -> InequalitySpec:
    """Witness on bipartite marginals whose violation certifies that every
    compatible no-signaling extension is genuinely tripartite nonlocal.

    The functional is -<A0(1+B0+B1+C0)> - <A1(1+B0+C0+C1)>
    - <B0+C0+B0C0+B1C1>, bounded by 4 over hybrid (two-way local) models.
    """
    singles = np.zeros((3, 2))
    singles[0, 0] = singles[0, 1] = -1.0  # A0, A1
    singles[1, 0] = -1.0  # B0
    singles[2, 0] = -1.0  # C0
    doubles = np.zeros((3, 2, 2))
    doubles[0, 0, 0] = doubles[0, 0, 1] = -1.0  # A0B0, A0B1
    doubles[0, 1, 0] = -1.0  # A1B0
    doubles[1, 0, 0] = -1.0  # A0C0
    doubles[1, 1, 0] = doubles[1, 1, 1] = -1.0  # A1C0, A1C1
    doubles[2, 0, 0] = -1.0  # B0C0
    doubles[2, 1, 1] = -1.0  # B1C1
    return InequalitySpec(name="bipartite-marginal-witness", singles=singles,
                          doubles=doubles, bound=4.0)


def svetlichny_spec() -> InequalitySpec:
    return InequalitySpec(name="svetlichny", triples=SVETLICHNY_FORM.copy(), bound=4.0)


def gyni_spec() -> InequalitySpec:
    """Guess-your-neighbour-input game value as a correlator functional.

    Outcomes map to bits o = (1+a)/2; the winning events are
    (000|000), (110|011), (011|101), (101|110) and the local/quantum bound
    is 1 while no-signaling boxes reach 4/3.
    """
    events = [
        ((0, 0, 0), (0, 0, 0)),
        ((1, 1, 0), (0, 1, 1)),
        ((0, 1, 1), (1, 0, 1)),
        ((1, 0, 1), (1, 1, 0)),
    ]
    singles = np.zeros((3, 2))
    doubles = np.zeros((3, 2, 2))
    triples = np.zeros((2, 2, 2))
    offset = 0.0
    for (ia, ib, ic), (x, y, z) in events:
        a, b, c = SIGNS[ia], SIGNS[ib], SIGNS[ic]
        offset += 1.0 / 8.0
        singles[0, x] += a / 8.0
        singles[1, y] += b / 8.0
        singles[2, z] += c / 8.0
        doubles[0, x, y] += a * b / 8.0
        doubles[1, x, z] += a * c / 8.0
        doubles[2, y, z] += b * c / 8.0
        triples[x, y, z] += a * b * c / 8.0
    return InequalitySpec(name="guess-your-neighbour-input", singles=singles,
                          doubles=doubles, triples=triples, offset=offset, bound=1.0)


def chsh_max(box: BipartiteBox) -> float:
    """Maximum of |<AxBy> combination| over the eight CHSH sign placements.

    Together with positivity and no-signaling, chsh_max <= 2 is equivalent to
    the box admitting a local model in the 2-input/2-output scenario.
    """
    _, _, d = box.correlators()
    best = 0.0
    for x0, y0 in itertools.product(range(2), repeat=2):
        signs = np.ones((2, 2))
        signs[x0, y0] = -1.0
        best = max(best, abs(float(np.sum(signs * d))))
    return best


def svetlichny_value(table: CorrelatorTable) -> float:
    """The standard genuine-nonlocality functional, without relabeling."""
    if table.triples is None:
        raise ValueError("three-party correlators required")
    return float(np.sum(SVETLICHNY_FORM * table.triples))


def svetlichny_max(table: CorrelatorTable) -> float:
    """Maximum of |svetlichny_value| over all party permutations, input
    relabelings and per-input output flips, removing convention sensitivity."""
    if table.triples is None:
        raise ValueError("three-party correlators required")
    best = 0.0
    for perm in itertools.permutations(range(3)):
        t = np.transpose(table.triples, perm)
        for swaps in itertools.product(range(2), repeat=3):
            t2 = t
            for axis, s in enumerate(swaps):
                if s:
                    t2 = np.flip(t2, axis=axis)
            for flips in itertools.product([1.0, -1.0], repeat=6):
                sa = np.array(flips[0:2])
                sb = np.array(flips[2:4])
                sc = np.array(flips[4:6])
                val = float(np.sum(SVETLICHNY_FORM * (t2 * sa[:, None, None] * sb[None, :, None] * sc[None, None, :])))
                best = max(best, abs(val))
    return best


def gyni_value(box: TripartiteBox) -> float:
    """Probability of winning the guess-your-neighbour-input game."""
    p = box.p
    return float(p[0, 0, 0, 0, 0, 0] + p[1, 1, 0, 0, 1, 1] + p[0, 1, 1, 1, 0, 1] + p[1, 0, 1, 1, 1, 0])
