import math
from functools import partial

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from graphpot import generators as gen
from graphpot.errors import ConvergenceError, PreconditionError, UndefinedValueError
from graphpot.graph import GraphFunction, WeightedGraph, region_from_interior
from graphpot.operators import OperatorContext, integral, schrodinger_at
from graphpot.spectral import assemble, lambda1, lambda1_exhaustion, principal_eigenpair, rayleigh
from graphpot.suite import TREE_FLOOR


def test_assemble_examples(P3, P4):
    f = assemble(region_from_interior(P3, [1]))
    np.testing.assert_array_equal(f.A.toarray(), [[2.0]])
    np.testing.assert_array_equal(f.mass, [2.0])
    f = assemble(region_from_interior(P4, [1, 2]))
    np.testing.assert_array_equal(f.A.toarray(), [[2.0, -1.0], [-1.0, 2.0]])
    np.testing.assert_array_equal(f.mass, [2.0, 2.0])
    f = assemble(region_from_interior(P4, [1, 2]), 1.0)
    np.testing.assert_array_equal(f.A.toarray(), [[4.0, -1.0], [-1.0, 4.0]])


def test_assemble_missing_potential(P4):
    with pytest.raises(UndefinedValueError):
        assemble(region_from_interior(P4, [1, 2]), GraphFunction({1: 0.0}))


def test_lambda1_examples(P3, P4):
    lam, u = lambda1(region_from_interior(P3, [1]))
    assert lam == pytest.approx(1.0, abs=1e-14)
    assert u[1] == 1.0 and u[0] == u[2] == 0.0
    lam, u = lambda1(region_from_interior(P4, [1, 2]))
    assert lam == pytest.approx(0.5, abs=1e-14)
    assert u[1] == pytest.approx(1.0, abs=1e-14) and u[2] == pytest.approx(1.0, abs=1e-14)


def test_rayleigh_examples(P4):
    form = assemble(region_from_interior(P4, [1, 2]))
    assert rayleigh(form, GraphFunction({1: 1.0, 2: -1.0})) == pytest.approx(1.5, abs=1e-15)
    eig = principal_eigenpair(form)
    assert rayleigh(form, eig.u) == pytest.approx(eig.value, abs=1e-14)
    with pytest.raises(PreconditionError):
        rayleigh(form, GraphFunction({1: 0.0, 2: 0.0}))
    with pytest.raises(PreconditionError):
        rayleigh(form, GraphFunction({0: 1.0, 1: 1.0, 2: 1.0}))


@pytest.mark.parametrize("n", [1, 2, 3, 7, 20, 50])
def test_path_closed_form(n):
    res = lambda1(region_from_interior(gen.path(n + 2), range(1, n + 1)))
    assert abs(res.value - (1 - math.cos(math.pi / (n + 1)))) < 1e-9
    assert res.positive and res.residual < 1e-10


def test_inverse_iteration_matches_dense():
    rng = gen.SplitMix64(21)
    for _ in range(15):
        g = gen.random_graph(rng, 60)
        region = gen.random_region(rng, g)
        Q = {x: rng.uniform(-0.3, 1.0) for x in region.interior_order}
        dense = lambda1(region, Q, method="dense")
        inv = lambda1(region, Q, method="inverse")
        assert abs(dense.value - inv.value) < 1e-10
        np.testing.assert_allclose(
            dense.u.array(region.interior_order), inv.u.array(region.interior_order), atol=1e-6,
        )


def test_inverse_iteration_large_region():
    # above the dense limit: 2R-1 = 799 interior vertices of the lattice segment
    g = gen.lattice_ball(1, 400)
    res = lambda1_exhaustion(g, 0, [400])
    assert abs(res["lambda1"].values[0] - (1 - math.cos(math.pi / 800))) < 1e-9


def test_iteration_cap():
    region = region_from_interior(gen.path(40), range(1, 39))
    with pytest.raises(ConvergenceError):
        lambda1(region, method="inverse", max_iter=2)


def test_z1_exhaustion_closed_form():
    rep = lambda1_exhaustion(partial(gen.lattice_ball, 1), 0, range(2, 21))
    assert rep.extra["interior_sizes"] == [2 * R - 1 for R in range(2, 21)]
    for R, v in zip(rep.radii, rep["lambda1"].values):
        assert abs(v - (1 - math.cos(math.pi / (2 * R)))) < 1e-9
    assert rep.monotone and rep.passed


def test_tree_exhaustion_above_floor():
    rep = lambda1_exhaustion(partial(gen.regular_tree_ball, 3), 0, range(2, 11))
    assert rep.monotone
    assert all(v >= TREE_FLOOR - 1e-12 for v in rep["lambda1"].values)
    assert rep.extra["last_value"] == rep["lambda1"].values[-1]


def test_tree_exhaustions_interleave():
    # B_root(R) in B_nbr(R+1) in B_root(R+2): two exhaustions squeeze each other
    host = gen.regular_tree_ball(3, 12)
    root = lambda1_exhaustion(host, 0, range(2, 11))["lambda1"].values
    nbr = lambda1_exhaustion(host, 1, range(3, 12))["lambda1"].values
    for k in range(len(root) - 2):
        assert nbr[k] <= root[k] + 1e-12
        assert root[k + 2] <= nbr[k] + 1e-12
    assert abs(root[-1] - nbr[-1]) < root[-3] - root[-1]


@pytest.mark.parametrize("g", [gen.path(8), gen.cycle(7), gen.grid(3, 4), gen.star(5)], ids=repr)
def test_all_but_one_vs_all_but_two(g):
    order = list(g.vertices)
    big = region_from_interior(g, order[:-1])
    small = region_from_interior(g, order[:-2])
    assert lambda1(big).value < lambda1(small).value


def _random_case(seed):
    rng = gen.SplitMix64(seed)
    g = gen.random_graph(rng, 60)
    region = gen.random_region(rng, g)
    order = region.interior_order
    Q = GraphFunction({x: rng.uniform(-0.5, 2.0) for x in order})
    u = {x: rng.uniform(-1.0, 1.0) for x in order}
    u.update({y: 0.0 for y in region.boundary})
    return rng, g, region, Q, GraphFunction(u)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**63))
def test_quotient_identity(seed):
    _, g, region, Q, u = _random_case(seed)
    form = assemble(region, Q)
    order = region.interior_order
    lu = GraphFunction.from_array(order, schrodinger_at(OperatorContext(g, Q), u, order))
    num = integral(g, GraphFunction({x: lu[x] * u[x] for x in order}), order)
    den = integral(g, u.map(lambda t: t * t), order)
    if den == 0:
        return
    assert abs(rayleigh(form, u) - num / den) <= 1e-10 * max(1.0, abs(num / den))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**63))
def test_rayleigh_bounds_and_positivity(seed):
    _, g, region, Q, u = _random_case(seed)
    form = assemble(region, Q)
    B = form.symmetric().toarray()
    w = scipy.linalg.eigvalsh(B)
    eig = principal_eigenpair(form)
    assert abs(eig.value - w[0]) < 1e-10
    assert eig.positive and eig.residual < 1e-10
    if np.any(u.array(region.interior_order)):
        r = rayleigh(form, u)
        assert w[0] - 1e-10 <= r <= w[-1] + 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**63))
def test_domain_monotonicity_nested(seed):
    rng, g, region, _, _ = _random_case(seed)
    order = list(region.interior_order)
    # grow the region by one frontier vertex if that stays proper
    extra = sorted(y for y in region.boundary)
    if len(order) + 1 >= len(g) or not extra:
        return
    bigger = region_from_interior(g, order + [rng.choice(extra)])
    assert lambda1(bigger).value <= lambda1(region).value + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**63), st.floats(1e-3, 1e3))
def test_scale_invariance(seed, c):
    _, g, region, Q, _ = _random_case(seed)
    scaled = WeightedGraph.from_edges([(x, y, c * w) for x, y, w in g.edges()])
    region2 = region_from_interior(scaled, region.interior)
    a = lambda1(region, Q).value
    b = lambda1(region2, Q).value
    assert abs(a - b) <= 1e-10 * max(1.0, abs(a))
