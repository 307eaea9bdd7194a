import math
from fractions import Fraction

import numpy as np
import pytest

from glauberkit import exact
from glauberkit import graph as gr
from glauberkit import hardcore as hc
from glauberkit.seeding import make_rng

E = frozenset()


def test_basics(c6):
    assert hc.is_independent(c6, {0, 2, 4}) and not hc.is_independent(c6, {0, 1})
    assert hc.weight({1, 3}, Fraction(1, 2)) == Fraction(1, 4)
    assert hc.add_probability(Fraction(1)) == Fraction(1, 2)
    assert hc.hamming(frozenset({0, 2}), frozenset({2, 3})) == 2
    assert hc.heat_bath_update(c6, frozenset({0}), 1, True) == frozenset({0})
    assert hc.heat_bath_update(c6, frozenset({0}), 2, True) == frozenset({0, 2})
    assert hc.heat_bath_update(c6, frozenset({0}), 0, False) == E


def test_transition_row_k2(k2):
    row = hc.transition_row_hc(k2, E, Fraction(1))
    assert row == {frozenset({0}): Fraction(1, 4), frozenset({1}): Fraction(1, 4), E: Fraction(1, 2)}
    row = hc.transition_row_hc(k2, frozenset({0}), Fraction(2))
    # v=0: add keeps {0} (2/3), remove empties (1/3); v=1: blocked or removal, both keep {0}
    assert row == {frozenset({0}): Fraction(5, 6), E: Fraction(1, 6)}


def test_glauber_step_frequencies(c6):
    X = frozenset({0, 3})
    lam = 0.5
    row = hc.transition_row_hc(c6, X, lam)
    rng = make_rng(12, 0)
    m = 50000
    counts: dict = {}
    for _ in range(m):
        Z = hc.glauber_step_hc(c6, X, lam, rng)
        counts[Z] = counts.get(Z, 0) + 1
    assert set(counts) <= set(row)
    for Z, p in row.items():
        assert abs(counts.get(Z, 0) / m - p) <= 5 * math.sqrt(p * (1 - p) / m)


def test_unblocked(c6):
    assert hc.unblocked(c6, E, 0) == (1, 5)
    # neighbour 1 of vertex 0 has other neighbour 2, which is occupied
    assert hc.unblocked(c6, frozenset({2}), 0) == (5,)
    assert hc.max_unblocked(c6, frozenset({0, 3})) == 2
    assert hc.max_unblocked(c6, frozenset({0, 2, 4})) == 2
    assert hc.unblocked(c6, frozenset({0, 2, 4}), 1) == (0, 2)
    assert hc.unblocked(c6, frozenset({0, 2, 4}), 0) == ()


def test_spot_expected_distance(k2):
    # v=0: both chains end equal; v=1: add -> ({1}, {0}) distance 2, remove -> distance 1
    assert hc.expected_coupled_distance_hc(k2, E, frozenset({0}), Fraction(1)) == Fraction(3, 4)


@pytest.mark.parametrize("g", [gr.path(2), gr.path(4), gr.cycle(6), gr.star(3)])
@pytest.mark.parametrize("lam", [Fraction(1, 2), Fraction(2)])
def test_coupled_marginals_exact(g, lam):
    states = exact.enumerate_independent_sets(g).states
    rng = np.random.default_rng(1)
    for _ in range(10):
        X = states[int(rng.integers(len(states)))]
        Y = states[int(rng.integers(len(states)))]
        table = hc.coupled_transition_hc(g, X, Y, lam)
        mx: dict = {}
        my: dict = {}
        for (a, b), p in table.items():
            mx[a] = mx.get(a, 0) + p
            my[b] = my.get(b, 0) + p
        assert mx == hc.transition_row_hc(g, X, lam)
        assert my == hc.transition_row_hc(g, Y, lam)
        assert sum(p * hc.hamming(a, b) for (a, b), p in table.items()) == hc.expected_coupled_distance_hc(g, X, Y, lam)


def test_hardcore_contraction_pieces(c6):
    lam = Fraction(1, 2)
    assert hc.lemma48_sup_zeta(c6, E, frozenset({0}), lam) == Fraction(1, 3)
    assert hc.lemma48_hypothesis(c6, E, frozenset({0}), lam, Fraction(1, 3))
    assert not hc.lemma48_hypothesis(c6, E, frozenset({0}), lam, Fraction(1, 2))
    assert hc.hc_contraction(6, 2, Fraction(1, 2)) == Fraction(1, 18)
    assert hc.hc_contraction(6, 2, Fraction(1)) is None
    rep = hc.check_lemma48(c6, lam)
    assert rep.pairs_checked == 18 * 17 and rep.passed and rep.hypothesis_pairs == rep.pairs_checked
    rep = hc.check_lemma48(c6, lam, zetas=[Fraction(1, 10), Fraction(1, 3)])
    assert rep.passed


def test_unblocked_bound_and_hypotheses(c6):
    # Delta = 2 makes the inner term negative, so the bound is vacuous
    assert hc.lemma42_bound(6, 2, 0.5, 0.1, 0.5) == 1.0
    d, lam, zeta, xi = 1000, 0.0015, 0.5, 0.9
    inner = xi * zeta / (8 * lam * d) - (math.e + 1) ** 2 / d
    assert hc.lemma42_bound(10**4, d, lam, zeta, xi) == pytest.approx(min(1.0, 3e4 * math.exp(-inner**2 * d / 8)))
    assert hc.lemma42_hypothesis_failures(c6, 0.5, 0.1, 0.5) == []
    assert hc.lemma42_hypothesis_failures(c6, 2.0, 0.1, 0.5)
    assert any("girth" in f for f in hc.lemma42_hypothesis_failures(gr.cycle(4), 0.5, 0.1, 0.5))
    assert any("regular" in f for f in hc.lemma42_hypothesis_failures(gr.path(7), 0.5, 0.1, 0.5))


def test_unblocked_exact_sampler(c6):
    rep = hc.verify_lemma42(c6, 0.5, 0.1, 0.2, 3000, make_rng(2, 2))
    assert sum(rep.exact_min_hist.values()) == pytest.approx(1.0)
    assert rep.exact_rate <= rep.bound and rep.passed
    with pytest.raises(hc.HypothesisError):
        hc.verify_lemma42(gr.cycle(4), 0.5, 0.1, 0.2, 10, make_rng(0))


def test_warm_start_params():
    n, zeta, delta = 100, 0.5, 0.1
    assert hc.lemma41_params(n, zeta, delta) == (
        math.ceil(320000 * math.log(144 * 10**6 / 0.05) / 0.0625),
        math.ceil(1600 * math.log(2000)),
    )
    with pytest.raises(ValueError):
        hc.lemma41_params(10, 1.0, 0.1)


def test_hardcore_batch_law(k2):
    chain = exact.hardcore_chain(k2, 1.0)
    d = exact.distribution_after(chain, chain.space.point_mass(E), 4)
    m = 40000
    occ = hc.hardcore_batch(k2, 1.0, np.zeros((m, 2), dtype=bool), 4, make_rng(8))
    emp = np.zeros(len(chain.space))
    for row in occ:
        emp[chain.space.index[frozenset(np.flatnonzero(row).tolist())]] += 1
    emp /= m
    assert np.all(np.abs(emp - d) <= 5 * np.sqrt(d * (1 - d) / m) + 1e-12)


def test_maximal_coupled_batch_law(c6):
    X, Y = frozenset({0, 3}), frozenset({1})
    table = hc.coupled_transition_hc(c6, X, Y, 0.5)
    m = 40000
    xs = np.zeros((m, 6), dtype=bool)
    xs[:, [0, 3]] = True
    ys = np.zeros((m, 6), dtype=bool)
    ys[:, 1] = True
    hc.maximal_coupled_batch(c6, 0.5, xs, ys, make_rng(9))
    counts: dict = {}
    for a, b in zip(xs, ys):
        key = (frozenset(np.flatnonzero(a).tolist()), frozenset(np.flatnonzero(b).tolist()))
        counts[key] = counts.get(key, 0) + 1
    assert set(counts) <= set(table)
    for key, p in table.items():
        assert abs(counts.get(key, 0) / m - p) <= 5 * math.sqrt(p * (1 - p) / m)


def test_batch_unblocked_counts(c6):
    states = [E, frozenset({0, 3}), frozenset({2}), frozenset({0, 2, 4})]
    occ = np.zeros((4, 6), dtype=bool)
    for i, S in enumerate(states):
        occ[i, list(S)] = True
    got = hc.batch_unblocked_counts(c6, occ)
    want = [[len(hc.unblocked(c6, S, v)) for v in range(6)] for S in states]
    assert got.tolist() == want


def test_text_roundtrip():
    assert hc.dumps(E) == "-" and hc.loads("-") == E
    assert hc.loads(hc.dumps({4, 1})) == frozenset({1, 4})
