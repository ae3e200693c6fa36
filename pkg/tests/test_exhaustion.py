import math

import pytest

from graphpot import generators as gen
from graphpot.errors import GraphError, PreconditionError
from graphpot.exhaustion import CONVERGING, GROWING, check_radii, classify, diagnose, extrapolated_tail, open_ball


def test_check_radii():
    assert check_radii([1, 2, 5]) == [1, 2, 5]
    for bad in ([], [0, 1], [3, 3], [4, 2]):
        with pytest.raises(PreconditionError):
            check_radii(bad)


def test_open_ball_convention():
    g = gen.lattice_ball(1, 5)
    assert len(open_ball(g, 0, 3).interior) == 5
    with pytest.raises(GraphError):
        open_ball(g, 0, 7)


def test_tail_geometric():
    radii = list(range(1, 12))
    vals = [2 - 2.0 ** (1 - R) for R in radii]
    tail, rho = extrapolated_tail(radii, vals)
    assert rho == pytest.approx(0.5)
    assert tail == pytest.approx(2 - vals[-1])


def test_tail_with_spacing():
    radii = [2, 4, 6, 8]
    vals = [1 - 0.5**R for R in radii]
    tail, rho = extrapolated_tail(radii, vals)
    assert rho == pytest.approx(0.5)
    # window-averaged increments make the estimate conservative
    assert 0.5**8 <= tail <= 2 * 0.5**8


def test_classification():
    radii = list(range(2, 40))
    assert classify(radii, [float(R) for R in radii]) == GROWING
    assert classify(radii, [math.log(R) for R in radii]) == GROWING
    assert classify(radii, [1.5 - 0.5**R for R in radii]) == CONVERGING
    # two values cannot show a shrinking increment
    assert classify([1, 2], [0.0, 0.0]) == GROWING
    assert classify([1, 2, 3], [1.0, 1.0, 1.0]) == CONVERGING


def test_growth_fit_names():
    radii = list(range(2, 30))
    assert diagnose("lin", radii, [3.0 * R for R in radii], "nondecreasing", classify_growth=True).growth == "linear"
    assert diagnose("log", radii, [math.log(R) for R in radii], "nondecreasing", classify_growth=True).growth == "log"


def test_monotonicity_violation_reported():
    d = diagnose("x", [1, 2, 3], [1.0, 0.5, 0.7], "nonincreasing", 1e-12)
    assert not d.monotone and d.worst_violation == pytest.approx(0.2)
    assert d.last_gap == pytest.approx(0.2)
