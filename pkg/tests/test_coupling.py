import math
from fractions import Fraction

import numpy as np
import pytest

from glauberkit import coloring as col
from glauberkit import coupling as cp
from glauberkit import hardcore as hc
from glauberkit.seeding import make_rng


def test_uniform_contraction_time():
    assert cp.mixing_time_theorem11(10, 0.01, 0.1) == 70
    assert cp.mixing_time_theorem11(10, 0.1, 0.01) == 461
    assert cp.mixing_time_theorem11(10, 10, 0.5) == 0
    with pytest.raises(ValueError):
        cp.mixing_time_theorem11(10, 11, 0.5)
    with pytest.raises(ValueError):
        cp.mixing_time_theorem11(10, 0.1, 0.0)


def test_ceil_ratio_is_exact_for_integer_numerators():
    # 18 / 0.1 in floats is 180.00000000000003
    assert cp._ceil_ratio(18, 0.1) == 180
    assert cp._ceil_ratio(3, Fraction(1, 3)) == 9


def test_stationary_start_time():
    b = cp.mixing_time_theorem12(10, 0.1, 0.1)
    assert b.steps == 180
    assert b.pi_s_threshold == pytest.approx(1 - 0.1 / 160)


def test_warm_start_time():
    b = cp.mixing_time_theorem13(10, 0.1, 0.1)
    assert b.steps == math.ceil(math.log(200) / 0.1) == 53
    assert b.pi_s_threshold == pytest.approx(1 - 0.01 / 60)


def test_partial_contraction_bound():
    assert cp.theorem31_bound(0.5, 0.0, 2, 4) == (1.0, 1.0)
    assert cp.theorem31_bound(0.5, 0.0, 3, 4) == (0.5, 0.5)
    raw, clamped = cp.theorem31_bound(0.1, 0.05, 0, 3)
    assert raw == pytest.approx(4.5) and clamped == 1.0
    for bad in [(0.0, 0, 1, 1), (0.5, -1, 1, 1), (0.5, 0, -1, 1), (0.5, 0, 1, 0)]:
        with pytest.raises(ValueError):
            cp.theorem31_bound(*bad)


def test_warm_start():
    assert cp.is_warm_start([0.5, 0.5], [0.25, 0.75]) == (True, 2.0)
    ok, r = cp.is_warm_start([1.0, 0.0], [0.4, 0.6])
    assert not ok and r == 2.5
    assert cp.is_warm_start([0.5, 0.5], [1.0, 0.0])[1] == math.inf
    assert cp.is_warm_start([Fraction(1, 2), 0], [Fraction(1, 2), Fraction(1, 2)]) == (True, 1)


def test_run_coupled_sticks(k2):
    traj = cp.run_coupled((1, 2), (2, 1), lambda x, y, r: col.jerrum_coupled_step(k2, 3, x, y, r), 60, make_rng(3))
    assert traj.distances[0] == 2 and traj.met_at is not None
    assert np.all(traj.distances[traj.met_at:] == 0)
    with pytest.raises(AssertionError):
        cp.CoupledTrajectory(np.array([1, 0, 1]), 1)
    with pytest.raises(ValueError):
        cp.run_coupled((1, 2), (1, 2, 3), None, 1, make_rng(0))


def test_run_coupled_hardcore(c6):
    traj = cp.run_coupled(
        frozenset(), frozenset({0, 2, 4}), lambda x, y, r: hc.maximal_coupled_step_hc(c6, x, y, 0.5, r), 400, make_rng(4)
    )
    assert traj.distances[0] == 3 and traj.met_at is not None


def test_run_coupled_replicas_mean_decay(k2):
    # exact one-step expectation from distance-2 start, averaged over replicas
    d = cp.run_coupled_replicas(
        np.array([1, 2]), np.array([2, 1]), lambda xs, ys, r: col.jerrum_coupled_batch(k2, 3, xs, ys, r), 1, 40000, make_rng(5)
    )
    want = float(col.expected_coupled_distance(k2, 3, (1, 2), (2, 1)))
    sd = d[:, 1].std()
    assert abs(d[:, 1].mean() - want) <= 5 * sd / math.sqrt(40000)
    assert d.shape == (40000, 2)
