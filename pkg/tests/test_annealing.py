import math
from fractions import Fraction

import numpy as np
import pytest

from glauberkit import annealing as an
from glauberkit import exact
from glauberkit import graph as gr
from glauberkit.hardcore import lemma41_params
from glauberkit.seeding import make_rng


def float_ladder(n, lam):
    out, x = [0.0], 1 / (3 * n)
    while x < lam * (1 - 1e-12):
        out.append(x)
        x *= 1 + 1 / (3 * n)
    return out + [lam]


@pytest.mark.parametrize("n, lam", [(2, 1), (6, Fraction(1, 2)), (4, 3), (10, Fraction(1, 20))])
def test_ladder_shape(n, lam):
    levels = an.ladder(n, lam)
    assert np.allclose([float(x) for x in levels], float_ladder(n, float(lam)))
    assert len(levels) - 1 == an.nominal_level_count(n, Fraction(lam)) + 1


def test_ladder_small_cases():
    assert len(an.ladder(2, 1)) == 14
    assert an.ladder(2, Fraction(1, 6)) == [0, Fraction(1, 6)]
    assert an.ladder(6, Fraction(1, 2))[1] == Fraction(1, 18)
    with pytest.raises(an.ScheduleError):
        an.ladder(2, Fraction(1, 7))


def test_as_fraction():
    assert an.as_fraction(0.1) == Fraction(1, 10)
    assert an.as_fraction("2/3") == Fraction(2, 3)


def test_worst_case_schedule():
    s = an.build_schedule(2, 1, 0.1, zeta=0.5)
    assert s.k == 13 and s.nominal_k == 12
    assert s.steps == [lemma41_params(2, 0.5, 0.1 / 13)[1]] * 13
    assert s.to_dict()["levels"][-1] == "1"
    with pytest.raises(an.ScheduleError):
        an.build_schedule(2, 1, 0.1)
    with pytest.raises(an.ScheduleError):
        an.build_schedule(2, 1, 1.5, zeta=0.5)
    with pytest.raises(an.ScheduleError):
        an.build_schedule(2, 1, 0.1, mode="fast")


def test_practical_schedule():
    s = an.build_schedule(6, 0.5, 0.05, mode="practical", steps=20)
    assert s.steps == [20] * s.k
    with pytest.raises(an.ScheduleError):
        an.build_schedule(6, 0.5, 0.05, mode="practical", steps=[1, 2])
    with pytest.raises(an.ScheduleError):
        an.build_schedule(6, 0.5, 0.05, mode="practical")


def test_schedule_check_catches_bad_ratio():
    s = an.build_schedule(2, 1, 0.1, mode="practical", steps=1)
    s.levels = [Fraction(0), Fraction(1, 6), Fraction(1)]
    s.steps = [1, 1]
    with pytest.raises(AssertionError):
        s.check()


def test_calibrated_k2_output_within_delta(k2):
    s = an.calibrate_steps(k2, Fraction(1), 0.05)
    per_level = [
        exact.exact_mixing_time(exact.hardcore_chain(k2, float(x)), 0.05 / s.k, starts="all") for x in s.levels[1:]
    ]
    assert s.steps == per_level
    space, d = an.annealed_distribution(k2, s)
    pi = [float(p) for p in exact.gibbs(space, Fraction(1))]
    assert exact.tv_distance(d, pi) <= 0.05


def test_annealed_samples_match_exact_law(c6):
    s = an.build_schedule(6, Fraction(1, 2), 0.05, mode="practical", steps=4)
    space, d = an.annealed_distribution(c6, s)
    m = 30000
    occ = an.annealed_samples(c6, s, m, make_rng(3, 3))
    emp = np.zeros(len(space))
    for row in occ:
        emp[space.index[frozenset(np.flatnonzero(row).tolist())]] += 1
    emp /= m
    assert np.all(np.abs(emp - d) <= 5 * np.sqrt(d * (1 - d) / m) + 1e-12)


def test_annealed_sample_single_run(c6):
    s = an.build_schedule(6, Fraction(1, 2), 0.05, mode="practical", steps=3)
    Y, record = an.annealed_sample(c6, s, make_rng(1, 3))
    assert len(record) == s.k and record[-1]["lambda"] == "1/2"
    assert record[-1]["size"] == len(Y)
    with pytest.raises(an.ScheduleError):
        an.annealed_sample(gr.cycle(5), s, make_rng(1))


@pytest.mark.parametrize("g, lam", [(gr.path(2), Fraction(1)), (gr.cycle(6), Fraction(1, 2)), (gr.cycle(6), Fraction(2))])
def test_warm_ladder(g, lam):
    s = an.build_schedule(g.n, lam, 0.1, mode="practical", steps=1)
    checks = an.verify_warm_ladder(g, s)
    assert all(c.ok for c in checks)
    assert checks[0].Z < 2
    assert all(float(c.ratio) < math.exp(1 / 3) for c in checks[1:])
    # consecutive Gibbs measures are warm starts for each other
    for a, b in zip(s.levels, s.levels[1:]):
        ok, ratio = an.verify_gibbs_warm_start(g, a, b)
        assert ok and ratio <= 2
