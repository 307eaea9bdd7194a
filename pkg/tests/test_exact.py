import math
from fractions import Fraction

import numpy as np
import pytest

from glauberkit import exact
from glauberkit import graph as gr


def test_enumeration_counts():
    assert len(exact.enumerate_all_colorings(gr.path(3), 3)) == 27
    # chromatic polynomials: path P_n has k (k-1)^(n-1), cycle C_n has (k-1)^n + (-1)^n (k-1)
    assert len(exact.enumerate_proper_colorings(gr.path(4), 3)) == 3 * 2**3
    assert len(exact.enumerate_proper_colorings(gr.cycle(5), 3)) == 2**5 - 2
    # independent sets of C_n are counted by Lucas numbers 3, 4, 7, 11, 18
    assert [len(exact.enumerate_independent_sets(gr.cycle(n))) for n in (3, 4, 5, 6)] == [4, 7, 11, 18]
    sets = exact.enumerate_independent_sets(gr.path(3)).states
    assert sets == [frozenset(), frozenset({0}), frozenset({0, 2}), frozenset({1}), frozenset({2})]
    assert exact.enumerate_proper_colorings(gr.path(2), 3).states[0] == (1, 2)


def test_caps():
    with pytest.raises(exact.CapExceeded):
        exact.enumerate_all_colorings(gr.path(8), 6)
    with pytest.raises(exact.CapExceeded):
        exact.enumerate_independent_sets(gr.empty(12), cap=100)
    with pytest.raises(exact.CapExceeded):
        exact.enumerate_proper_colorings(gr.empty(6), 5, cap=1000)
    with pytest.raises(exact.CapExceeded):
        exact.hardcore_chain(gr.empty(14), 1.0)


def test_partition_functions():
    assert exact.partition_function(gr.path(2), Fraction(1)) == 3
    assert exact.partition_function(gr.cycle(5), Fraction(1)) == 11
    # C6: 1 + 6 lam + 9 lam^2 + 2 lam^3
    assert exact.partition_function(gr.cycle(6), Fraction(1, 2)) == Fraction(13, 2)
    pi = exact.gibbs(exact.enumerate_independent_sets(gr.path(2)), Fraction(2))
    assert pi == [Fraction(1, 5), Fraction(2, 5), Fraction(2, 5)]


@pytest.mark.parametrize("g, k", [(gr.path(2), 3), (gr.path(3), 3), (gr.cycle(4), 3), (gr.cycle(5), 4)])
def test_coloring_chain_checks(g, k):
    chain = exact.coloring_chain(g, k, exact=True)
    exact.check_chain(chain)
    assert np.abs(chain.kernel.sum(axis=1) - 1).max() <= 1e-12
    assert np.abs(chain.pi @ chain.kernel - chain.pi).max() <= 1e-12
    assert exact.detailed_balance_defect(chain) == 0


@pytest.mark.parametrize("g", [gr.path(2), gr.path(4), gr.cycle(5), gr.cycle(6), gr.hypercube(3)])
@pytest.mark.parametrize("lam", [Fraction(1, 2), Fraction(1), Fraction(3)])
def test_hardcore_chain_checks(g, lam):
    chain = exact.hardcore_chain(g, lam, exact=True)
    assert exact.detailed_balance_defect(chain) == 0
    assert np.abs(chain.pi @ chain.kernel - chain.pi).max() <= 1e-12


def test_float_chain_and_exact_guard():
    chain = exact.hardcore_chain(gr.cycle(6), 0.5)
    assert chain.exact_rows is None
    assert exact.detailed_balance_defect(chain) <= 1e-15
    with pytest.raises(ValueError):
        exact.hardcore_chain(gr.cycle(6), 0.5, exact=True)
    with pytest.raises(ValueError):
        exact.build_kernel(exact.enumerate_independent_sets(gr.path(2)), gr.path(2))


def test_tv_distance():
    assert exact.tv_distance([1, 0], [0, 1]) == 1.0
    assert exact.tv_distance([0.5, 0.5], [0.25, 0.75]) == 0.25


def test_hardcore_k2_closed_form():
    # from {0}: TV_t = (1/6) 4^-t + (1/2)(3/4)^t; from the empty set (2/3) 4^-t
    chain = exact.hardcore_chain(gr.path(2), Fraction(1))
    curve = exact.tv_curve(chain, 30)
    want = [max(4.0**-t / 6 + 0.5 * 0.75**t, 2 / 3 * 4.0**-t) for t in range(31)]
    assert np.allclose(curve, want, atol=1e-14)
    assert exact.exact_mixing_time(chain, 0.01) == 14


def test_coloring_k2_closed_form():
    # worst TV over all starts is (1/2)(3/4)^(t-1) for t >= 1
    chain = exact.coloring_chain(gr.path(2), 3)
    curve = exact.tv_curve(chain, 25, starts="all")
    assert curve[0] == 1.0
    assert np.allclose(curve[1:], [0.5 * 0.75 ** (t - 1) for t in range(1, 26)], atol=1e-14)
    assert exact.exact_mixing_time(chain, 0.01, starts="all") == 15


def test_proper_only_space():
    chain = exact.coloring_chain(gr.path(3), 3, proper_only=True)
    assert len(chain.space) == 12 and np.all(chain.pi == 1 / 12)
    assert exact.exact_mixing_time(chain, 0.1) >= 1


def test_non_ergodic():
    # k = 2 on K2: each proper coloring is frozen
    with pytest.raises(exact.NonErgodic) as info:
        exact.exact_mixing_time(exact.coloring_chain(gr.path(2), 2), 0.1)
    assert len(info.value.classes) == 2


def test_communicating_classes_single():
    chain = exact.coloring_chain(gr.path(3), 4)
    classes = exact.communicating_classes(chain)
    assert len(classes) == 1 and len(classes[0]) == 4 * 3 * 3


def test_distribution_after_and_starts():
    chain = exact.hardcore_chain(gr.path(2), 1.0)
    d = exact.distribution_after(chain, chain.space.point_mass(frozenset()), 1)
    assert np.allclose(d, [0.5, 0.25, 0.25])
    with pytest.raises(ValueError):
        exact.distribution_after(chain, d, -1)
    with pytest.raises(ValueError):
        exact.tv_curve(chain, 2, starts="some")
    assert exact.tv_curve(chain, 0, starts=[0])[0] == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        exact.exact_mixing_time(chain, 0.0)
    with pytest.raises(RuntimeError):
        exact.exact_mixing_time(chain, 1e-9, max_steps=3)


def test_kernel_triples():
    chain = exact.hardcore_chain(gr.path(2), 1.0)
    lines = exact.kernel_triples(chain).splitlines()
    assert lines[0] == "0 0 0.5"
    assert len(lines) == 7
    assert math.isclose(sum(float(l.split()[2]) for l in lines), 3.0)


def test_kernel_error_on_leaking_row():
    space = exact.StateSpace([frozenset()])
    with pytest.raises(exact.KernelError):
        exact.build_kernel(space, gr.path(2), lam=1.0)
