import itertools

import numpy as np
import pytest

from marginalcert import boxes as bx
from marginalcert.entcert import bipartite_box_from_state
from marginalcert.quantum import (
    Observable,
    correlators_from_state,
    noisy_w,
    partial_trace,
    reduced_two_party,
    violation_scenario,
)
from marginalcert.polytopes import local_vertices, mixture_box

RNG = np.random.default_rng(20240812)
SG = [-1.0, 1.0]


def expansion_oracle(table, ia, ib, ic, x, y, z):
    """Term-by-term expansion of the probability parametrization, kept
    deliberately scalar so it cannot share bugs with the vectorized path."""
    a, b, c = SG[ia], SG[ib], SG[ic]
    val = 1.0
    val += a * table.singles[0, x] + b * table.singles[1, y] + c * table.singles[2, z]
    val += a * b * table.doubles[0, x, y]
    val += a * c * table.doubles[1, x, z]
    val += b * c * table.doubles[2, y, z]
    val += a * b * c * table.triples[x, y, z]
    return val / 8.0


def random_local_box(rng):
    return mixture_box(local_vertices(), rng.dirichlet(np.ones(64)))


def test_zero_table_gives_uniform_box():
    table = bx.CorrelatorTable(singles=np.zeros((3, 2)), doubles=np.zeros((3, 2, 2)),
                               triples=np.zeros((2, 2, 2)))
    box = bx.box_from_correlators(table)
    assert np.abs(box.p - 0.125).max() < 1e-15


def test_box29_probabilities_match_expansion_oracle():
    table = bx.box29_correlators()
    box = bx.box29()
    for idx in itertools.product(range(2), repeat=6):
        assert box.p[idx] == pytest.approx(expansion_oracle(table, *idx), abs=1e-14)
    assert box.p[1, 1, 1, 0, 0, 0] == pytest.approx(2.0 / 3.0, abs=1e-14)
    assert box.p[1, 1, 0, 0, 0, 0] == pytest.approx(0.0, abs=1e-14)


def test_box29_is_valid_and_nonsignaling():
    box = bx.box29()
    assert box.is_valid(1e-12)
    ok, dev = bx.is_nonsignaling(box, 1e-12)
    assert ok and dev < 1e-12


def test_correlators_from_uniform_box():
    table = bx.correlators_from_box(bx.uniform_box())
    assert np.abs(table.singles).max() < 1e-15
    assert np.abs(table.doubles).max() < 1e-15
    assert np.abs(table.triples).max() < 1e-15


def test_box29_round_trip_recovers_printed_values():
    table = bx.correlators_from_box(bx.box29())
    ref = bx.box29_correlators()
    assert np.abs(table.singles - ref.singles).max() < 1e-12
    assert np.abs(table.doubles - ref.doubles).max() < 1e-12
    assert np.abs(table.triples - ref.triples).max() < 1e-12
    assert ref.triples[0, 1, 1] == -1.0  # <A0 B1 C1>


def test_round_trip_identity_on_random_nosignaling_boxes():
    for i in range(200):
        box = random_local_box(RNG)
        if i % 7 == 0:  # blend in a nonlocal no-signaling component
            lam = RNG.uniform(0, 1)
            box = bx.TripartiteBox(p=lam * box.p + (1 - lam) * bx.box29().p)
        back = bx.box_from_correlators(bx.correlators_from_box(box))
        assert np.abs(back.p - box.p).max() < 1e-12


def test_signaling_box_detected():
    # a = y deterministically: the A marginal depends on B's input
    p = np.zeros((2, 2, 2, 2, 2, 2))
    for x, y, z in itertools.product(range(2), repeat=3):
        p[y, 0, 0, x, y, z] = 1.0
    ok, dev = bx.is_nonsignaling(bx.TripartiteBox(p=p), 1e-9)
    assert not ok
    assert dev == pytest.approx(1.0)


def test_marginals_of_box29():
    triple = bx.marginals(bx.box29())
    _, _, dab = triple.pab.correlators()
    assert dab[0, 0] == pytest.approx(1.0, abs=1e-12)
    for x, y in ((0, 1), (1, 0), (1, 1)):
        assert dab[x, y] == pytest.approx(-1.0 / 3.0, abs=1e-12)
    assert triple.consistency_deviation() < 1e-12


def test_marginals_of_uniform_box():
    triple = bx.marginals(bx.uniform_box())
    for b in (triple.pab, triple.pac, triple.pbc):
        assert np.abs(b.p - 0.25).max() < 1e-15


def test_marginals_reject_signaling_box():
    p = np.zeros((2, 2, 2, 2, 2, 2))
    for x, y, z in itertools.product(range(2), repeat=3):
        p[y, 0, 0, x, y, z] = 1.0
    with pytest.raises(ValueError):
        bx.marginals(bx.TripartiteBox(p=p))


def test_quantum_box_marginals_match_reduced_state_measurement():
    # marginalizing the three-party quantum box agrees with measuring the
    # two-party reduced state directly
    p = 0.8
    scenario = violation_scenario()
    table = correlators_from_state(noisy_w(3, p), scenario)
    box = bx.box_from_correlators(table)
    triple = bx.marginals(box)
    rho_ab = partial_trace(noisy_w(3, p), [0, 1])
    direct = bipartite_box_from_state(rho_ab,
                                      [o.matrix for o in scenario.a],
                                      [o.matrix for o in scenario.b])
    assert np.abs(triple.pab.p - direct.p).max() < 1e-12


def test_evaluate_marginal_witness():
    spec = bx.marginal_witness()
    zero = bx.CorrelatorTable(singles=np.zeros((3, 2)), doubles=np.zeros((3, 2, 2)))
    assert bx.evaluate_inequality(spec, zero) == 0.0
    triple = bx.marginals(bx.box29())
    assert bx.evaluate_inequality(spec, triple.correlators()) == pytest.approx(-8.0 / 3.0, abs=1e-12)


def test_marginal_witness_violated_by_pure_w_state():
    table = correlators_from_state(noisy_w(3, 1.0), violation_scenario())
    assert bx.evaluate_inequality(bx.marginal_witness(), table) > 4.0


def test_inequality_requiring_triples_raises_on_marginals():
    triple = bx.marginals(bx.box29())
    with pytest.raises(ValueError):
        bx.evaluate_inequality(bx.svetlichny_spec(), triple.correlators())


def test_chsh_max_uniform_box():
    assert bx.chsh_max(bx.marginals(bx.uniform_box()).pab) == 0.0


def test_chsh_max_box29_exactly_two():
    triple = bx.marginals(bx.box29())
    for b in (triple.pab, triple.pac, triple.pbc):
        # brute-force oracle over all eight signed CHSH forms
        _, _, d = b.correlators()
        best = 0.0
        for s in itertools.product([1.0, -1.0], repeat=4):
            if np.prod(s) > 0:  # CHSH forms carry an odd number of minus signs
                continue
            best = max(best, abs(sum(s[2 * x + y] * d[x, y] for x in range(2) for y in range(2))))
        assert best == pytest.approx(2.0, abs=1e-12)
        assert bx.chsh_max(b) == pytest.approx(best, abs=1e-12)


def test_chsh_max_reduced_state_never_violates():
    # any pair of binary observables on the reduced W family stays local
    for _ in range(20):
        p = RNG.uniform(0, 1)
        thetas = RNG.uniform(0, 2 * np.pi, size=4)
        signs = RNG.choice([1, -1], size=4)
        rho = reduced_two_party(3, p)
        box = bipartite_box_from_state(
            rho,
            [Observable(thetas[0], int(signs[0])).matrix, Observable(thetas[1], int(signs[1])).matrix],
            [Observable(thetas[2], int(signs[2])).matrix, Observable(thetas[3], int(signs[3])).matrix],
        )
        assert bx.chsh_max(box) <= 2.0 + 1e-9


def test_svetlichny_value_and_relabeling_max():
    table = bx.box29_correlators()
    assert bx.svetlichny_value(table) == pytest.approx(16.0 / 3.0, abs=1e-12)
    assert bx.svetlichny_max(table) == pytest.approx(16.0 / 3.0, abs=1e-12)


def test_svetlichny_spec_matches_value():
    table = bx.box29_correlators()
    assert bx.evaluate_inequality(bx.svetlichny_spec(), table) == pytest.approx(
        bx.svetlichny_value(table))


def test_gyni_value_box29():
    assert bx.gyni_value(bx.box29()) == pytest.approx(4.0 / 3.0, abs=1e-12)


def test_gyni_spec_agrees_with_probability_sum():
    spec = bx.gyni_spec()
    for i in range(10):
        box = random_local_box(RNG)
        table = bx.correlators_from_box(box)
        assert bx.evaluate_inequality(spec, table) == pytest.approx(
            bx.gyni_value(box), abs=1e-12)


def test_gyni_local_boxes_respect_bound():
    spec = bx.gyni_spec()
    for _ in range(50):
        table = bx.correlators_from_box(random_local_box(RNG))
        assert bx.evaluate_inequality(spec, table) <= 1.0 + 1e-9


def test_correlator_table_shape_validation():
    with pytest.raises(ValueError):
        bx.CorrelatorTable(singles=np.zeros((2, 2)), doubles=np.zeros((3, 2, 2)))
    with pytest.raises(ValueError):
        bx.CorrelatorTable(singles=np.zeros((3, 2)), doubles=np.zeros((3, 2)))


def test_box_from_correlators_requires_triples():
    with pytest.raises(ValueError):
        bx.box_from_correlators(bx.CorrelatorTable(singles=np.zeros((3, 2)),
                                                   doubles=np.zeros((3, 2, 2))))


def test_negative_entries_reported_not_hidden():
    # perfectly aligned singles with perfect anticorrelation is contradictory,
    # so the expansion must go negative somewhere
    singles = np.zeros((3, 2))
    singles[0] = singles[1] = 1.0
    doubles = np.zeros((3, 2, 2))
    doubles[0] = -1.0
    table = bx.CorrelatorTable(singles=singles, doubles=doubles,
                               triples=np.zeros((2, 2, 2)))
    box = bx.box_from_correlators(table)
    assert not box.is_valid()
    assert len(box.negative_entries()) > 0
    assert box.normalization_deviation() < 1e-12  # normalization still holds
