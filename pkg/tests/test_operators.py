import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphpot import generators as gen
from graphpot.errors import UndefinedValueError
from graphpot.graph import GraphFunction
from graphpot.operators import (
    OperatorContext,
    grad_sq,
    grad_sq_at,
    inner,
    integral,
    kato_check,
    laplacian,
    laplacian_at,
    lemma2_check,
    schrodinger,
    sign,
    sign_plus,
)

from .conftest import fn


def test_laplacian_examples(P3):
    assert laplacian(P3, fn([0, 1, 0]), 1) == -1.0
    assert laplacian(P3, fn([1, 2, 1]), 0) == 1.0
    assert all(laplacian(P3, fn([3.5] * 3), x) == 0.0 for x in P3.vertices)


def test_laplacian_needs_neighbors(P3):
    with pytest.raises(UndefinedValueError):
        laplacian(P3, GraphFunction({0: 1.0, 1: 2.0}), 1)
    with pytest.raises(UndefinedValueError):
        laplacian_at(P3, GraphFunction({0: 1.0, 1: 2.0}), [1])


def test_grad_sq_examples(P3):
    assert grad_sq(P3, fn([0, 1, 0]), 1) == 1.0
    assert grad_sq(P3, fn([2, 2, 2]), 1) == 0.0
    assert grad_sq(P3, fn([1, -1, 1]), 1) == 4.0


def test_integral_examples(P3):
    assert integral(P3, fn([0, 1, 0])) == 2.0
    assert integral(P3, fn([1, 1, 1])) == 4.0
    assert inner(P3, fn([1, 1, 1]), fn([1, 1, 1])) == 4.0


def test_schrodinger_examples(P3):
    u = fn([1, 2, 1])
    assert schrodinger(P3, u, 1) == -laplacian(P3, u, 1)
    ctx = OperatorContext(P3, GraphFunction({0: 0.0, 1: 0.5, 2: 0.0}))
    assert schrodinger(ctx, u, 1) == 2.0
    ctx = OperatorContext(P3, GraphFunction.constant(P3.vertices, 0.25))
    assert schrodinger(ctx, fn([3.0] * 3), 2) == 0.75


def test_sign_conventions():
    assert (sign(-2.0), sign(0.0), sign(5.0)) == (-1.0, 0.0, 1.0)
    assert (sign_plus(-2.0), sign_plus(0.0), sign_plus(5.0)) == (0.0, 0.0, 1.0)


def test_kato_fixture(P3):
    u = fn([1, -1, 1])
    assert grad_sq(P3, u.map(abs), 1) == 0.0 and grad_sq(P3, u, 1) == 4.0
    assert laplacian(P3, u.map(abs), 1) == 0.0
    assert sign(u[1]) * laplacian(P3, u, 1) == -2.0
    assert kato_check(P3, u).passed


def test_kato_equality_for_nonnegative_u():
    rng = gen.SplitMix64(5)
    g = gen.random_graph(rng, 40)
    u = gen.random_function(rng, g.vertices).map(abs)
    rep = kato_check(g, u)
    assert rep.passed
    assert abs(rep.absolute.worst_slack) <= 1e-12 * (1 + u.sup_norm() ** 2)
    assert abs(rep.positive_part.worst_slack) <= 1e-12 * (1 + u.sup_norm() ** 2)


def test_product_rule_fixture(P3):
    u = fn([0, 1, 0])
    assert laplacian(P3, u.map(lambda t: t * t), 1) == -1.0
    assert 2 * u[1] * laplacian(P3, u, 1) == -2.0
    rep = lemma2_check(P3, u)
    assert rep.max_residual == 0.0 and rep.passed


def test_product_rule_constant(P3):
    rep = lemma2_check(P3, fn([2.0, 2.0, 2.0]))
    assert rep.max_residual == 0.0


def _instance(seed):
    rng = gen.SplitMix64(seed)
    g = gen.random_graph(rng, 60)
    return g, gen.random_function(rng, g.vertices), gen.random_function(rng, g.vertices)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**63))
def test_kato_and_product_rule_random(seed):
    g, u, _ = _instance(seed)
    assert kato_check(g, u).passed
    assert lemma2_check(g, u).passed


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**63), st.floats(-3, 3), st.floats(-3, 3))
def test_laplacian_linear(seed, a, b):
    g, u, v = _instance(seed)
    xs = list(g.vertices)
    w = GraphFunction({x: a * u[x] + b * v[x] for x in xs})
    lhs = laplacian_at(g, w)
    rhs = a * laplacian_at(g, u) + b * laplacian_at(g, v)
    scale = 1 + np.max(np.abs(lhs)) + abs(a) * u.sup_norm() + abs(b) * v.sup_norm()
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**63))
def test_self_adjoint(seed):
    g, u, v = _instance(seed)
    xs = list(g.vertices)
    lu = GraphFunction.from_array(xs, laplacian_at(g, u))
    lv = GraphFunction.from_array(xs, laplacian_at(g, v))
    a, b = inner(g, lu, v), inner(g, u, lv)
    scale = 1 + sum(g.degree(x) for x in xs) * u.sup_norm() * v.sup_norm()
    assert abs(a - b) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**63))
def test_laplacian_squared_below_gradient(seed):
    g, u, _ = _instance(seed)
    lap = laplacian_at(g, u)
    grad = grad_sq_at(g, u)
    assert np.all(lap * lap <= grad * (1 + 1e-12) + 1e-300)
    assert np.all(grad >= 0)
