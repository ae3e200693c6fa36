import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphpot import generators as gen
from graphpot.errors import PreconditionError, ResourceCapError
from graphpot.graph import bfs_distances, validate


def test_splitmix64_reference_streams():
    assert gen.SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF
    r = gen.SplitMix64(1234567)
    assert [r.next_u64() for _ in range(5)] == [
        6457827717110365317, 3203168211198807973, 9817491932198370423,
        4593380528125082431, 16408922859458223821,
    ]


def test_splitmix64_derived_draws():
    r = gen.SplitMix64(7)
    xs = [r.random() for _ in range(1000)]
    assert min(xs) >= 0.0 and max(xs) < 1.0
    ks = [r.below(6) for _ in range(6000)]
    assert set(ks) == set(range(6))
    assert all(2 <= r.integer(2, 4) <= 4 for _ in range(100))
    s = r.sample(list(range(10)), 4)
    assert len(set(s)) == 4


def test_path_cycle_star():
    p = gen.path(3)
    assert p.vertices == (0, 1, 2) and p.n_edges == 2
    c = gen.cycle(4)
    assert (len(c), c.n_edges) == (4, 4)
    assert all(c.degree(x) == 2.0 for x in c.vertices)
    s = gen.star(3)
    assert s.degree(0) == 3.0 and all(s.degree(x) == 1.0 for x in (1, 2, 3))


@pytest.mark.parametrize("make,arg", [(gen.path, 1), (gen.cycle, 2), (gen.star, 0)])
def test_too_small(make, arg):
    with pytest.raises(PreconditionError):
        make(arg)


def test_lattice_sizes():
    g = gen.lattice_ball(1, 3)
    assert len(g) == 9 and validate(g).passed
    assert len(gen.lattice_ball(2, 1)) == 13
    assert len(gen.lattice_ball(3, 1)) == 25
    assert [gen.lattice_ball_size(3, r) for r in range(4)] == [1, 7, 25, 63]


def test_lattice_encoding():
    coords = gen.lattice_coordinates(2, 1)
    assert coords[0] == (0, 0)
    norms = [sum(map(abs, c)) for c in coords]
    assert norms == sorted(norms)
    assert len(set(coords)) == len(coords) == 13


def test_tree_sizes():
    assert len(gen.regular_tree_ball(3, 1)) == 10
    assert len(gen.regular_tree_ball(3, 2)) == 22
    for d, R in [(3, 4), (4, 3), (5, 2)]:
        g = gen.regular_tree_ball(d, R)
        assert len(g) == 1 + d * ((d - 1) ** (R + 1) - 1) // (d - 2) == gen.regular_tree_size(d, R + 1)
        assert g.degree(0) == d
        dist = bfs_distances(g, 0)
        assert all(g.degree(x) == 1 for x in g.vertices if dist[x] == R + 1)


@pytest.mark.parametrize("family,dim_or_d,R", [("lattice", 1, 5), ("lattice", 2, 4), ("lattice", 3, 3), ("tree", 3, 4), ("tree", 4, 3)])
def test_interior_neighborhoods_complete(family, dim_or_d, R):
    if family == "lattice":
        g, full = gen.lattice_ball(dim_or_d, R), 2 * dim_or_d
    else:
        g, full = gen.regular_tree_ball(dim_or_d, R), dim_or_d
    dist = bfs_distances(g, 0)
    for x in g.vertices:
        if dist[x] <= R:
            assert len(g.neighbors(x)) == full and x not in g.truncated
        else:
            assert x in g.truncated


def test_resource_cap(monkeypatch):
    monkeypatch.setenv("GP_MAX_VERTICES", "100")
    with pytest.raises(ResourceCapError):
        gen.lattice_ball(3, 5)
    with pytest.raises(ResourceCapError):
        gen.path(101)
    assert len(gen.path(100)) == 100


def test_generate_registry():
    assert len(gen.generate("tree3", 1)) == 10
    with pytest.raises(PreconditionError):
        gen.generate("nope", 3)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**63))
def test_random_instances_valid_and_reproducible(seed):
    a = gen.random_graph(gen.SplitMix64(seed), 60)
    b = gen.random_graph(gen.SplitMix64(seed), 60)
    assert list(a.edges()) == list(b.edges())
    assert len(a) <= 60 and validate(a).passed
    pa = gen.sample_solution_pair(a, seed)
    pb = gen.sample_solution_pair(b, seed)
    xs = list(a.vertices)
    assert pa.u.array(xs).tobytes() == pb.u.array(xs).tobytes()
    assert pa.Q.array(xs).tobytes() == pb.Q.array(xs).tobytes()
    assert pa.residual() <= 1e-14 * np.max(pa.u.array(xs))
