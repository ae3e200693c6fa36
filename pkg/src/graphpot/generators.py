"""Deterministic graph families and seeded random instances.

Randomness comes from :class:`SplitMix64`, a fixed 64-bit recurrence that is
easy to reproduce in any language:

    state <- state + 0x9E3779B97F4A7C15            (mod 2^64)
    z <- (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
    z <- (z ^ (z >> 27)) * 0x94D049BB133111EB
    out = z ^ (z >> 31)

Floats are ``(out >> 11) * 2^-53``; bounded integers are ``(out * n) >> 64``.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .config import max_vertices
from .errors import PreconditionError, ResourceCapError
from .estimates import SolutionPair
from .graph import GraphFunction, Region, WeightedGraph, region_from_interior
from .operators import laplacian_at

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform in [0, 1)."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, a: float, b: float) -> float:
        return a + (b - a) * self.random()

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return (self.next_u64() * n) >> 64

    def integer(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] inclusive."""
        return lo + self.below(hi - lo + 1)

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def sample(self, seq, k: int) -> list:
        pool = list(seq)
        out = []
        for _ in range(k):
            out.append(pool.pop(self.below(len(pool))))
        return out

    def spawn(self) -> SplitMix64:
        return SplitMix64(self.next_u64())


def _cap(n: int) -> None:
    limit = max_vertices()
    if n > limit:
        raise ResourceCapError(f"{n} vertices requested, cap is {limit} (GP_MAX_VERTICES)")


# -- fixed families -------------------------------------------------------


def path(n: int) -> WeightedGraph:
    if n < 2:
        raise PreconditionError("path needs n >= 2")
    _cap(n)
    return WeightedGraph.from_edges(((i, i + 1, 1.0) for i in range(n - 1)), name=f"path({n})")


def cycle(n: int) -> WeightedGraph:
    if n < 3:
        raise PreconditionError("a simple cycle needs n >= 3")
    _cap(n)
    return WeightedGraph.from_edges(((i, (i + 1) % n, 1.0) for i in range(n)), name=f"cycle({n})")


def star(k: int) -> WeightedGraph:
    if k < 1:
        raise PreconditionError("star needs k >= 1")
    _cap(k + 1)
    return WeightedGraph.from_edges(((0, i, 1.0) for i in range(1, k + 1)), name=f"star({k})")


def grid(rows: int, cols: int) -> WeightedGraph:
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise PreconditionError("grid needs at least two vertices")
    _cap(rows * cols)
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1, 1.0))
            if r + 1 < rows:
                edges.append((v, v + cols, 1.0))
    return WeightedGraph.from_edges(edges, name=f"grid({rows}x{cols})")


def complete(n: int) -> WeightedGraph:
    if n < 2:
        raise PreconditionError("complete graph needs n >= 2")
    _cap(n)
    return WeightedGraph.from_edges(
        ((i, j, 1.0) for i in range(n) for j in range(i + 1, n)), name=f"complete({n})"
    )


# -- balls in infinite graphs --------------------------------------------


def lattice_ball_size(dim: int, r: int) -> int:
    """Number of points of Z^dim with l1 norm <= r."""
    return sum(2**k * math.comb(dim, k) * math.comb(r, k) for k in range(min(dim, r) + 1))


def lattice_coordinates(dim: int, R: int) -> list[tuple[int, ...]]:
    """Coordinates of the vertices of ``lattice_ball(dim, R)`` in id order.

    Ids sort by (l1 norm, coordinates), so the origin is 0 and every ball
    about the origin is an id prefix.
    """
    r = R + 1
    pts = [p for p in itertools.product(range(-r, r + 1), repeat=dim) if sum(map(abs, p)) <= r]
    pts.sort(key=lambda p: (sum(map(abs, p)), p))
    return pts


def lattice_ball(dim: int, R: int) -> WeightedGraph:
    """Ball of l1 radius R + 1 in Z^dim with unit weights.

    Vertices at norm R + 1 are marked truncated; everything within R has its
    full 2*dim neighbourhood.
    """
    if dim not in (1, 2, 3):
        raise PreconditionError("dim must be 1, 2 or 3")
    if R < 1:
        raise PreconditionError("R must be >= 1")
    _cap(lattice_ball_size(dim, R + 1))
    pts = lattice_coordinates(dim, R)
    ids = {p: i for i, p in enumerate(pts)}
    edges = []
    for p, i in ids.items():
        for k in range(dim):
            q = p[:k] + (p[k] + 1,) + p[k + 1:]
            j = ids.get(q)
            if j is not None:
                edges.append((i, j, 1.0))
    truncated = [i for p, i in ids.items() if sum(map(abs, p)) == R + 1]
    return WeightedGraph.from_edges(edges, truncated=truncated, name=f"lattice{dim}(R={R})")


def regular_tree_size(d: int, r: int) -> int:
    """Vertices within distance r of a vertex in the d-regular tree."""
    return 1 + d * ((d - 1) ** r - 1) // (d - 2)


def regular_tree_ball(d: int, R: int) -> WeightedGraph:
    """Ball of radius R + 1 in the d-regular tree, root 0, ids in breadth-first order."""
    if d < 3:
        raise PreconditionError("d must be >= 3")
    if R < 1:
        raise PreconditionError("R must be >= 1")
    _cap(regular_tree_size(d, R + 1))
    edges = []
    layer = [0]
    nxt_id = 1
    for depth in range(R + 1):
        new_layer = []
        for v in layer:
            for _ in range(d if depth == 0 else d - 1):
                edges.append((v, nxt_id, 1.0))
                new_layer.append(nxt_id)
                nxt_id += 1
        layer = new_layer
    return WeightedGraph.from_edges(edges, truncated=layer, name=f"tree{d}(R={R})")


GENERATORS = {
    "path": path,
    "cycle": cycle,
    "star": star,
    "lattice1": lambda R: lattice_ball(1, R),
    "lattice2": lambda R: lattice_ball(2, R),
    "lattice3": lambda R: lattice_ball(3, R),
    "tree3": lambda R: regular_tree_ball(3, R),
    "tree4": lambda R: regular_tree_ball(4, R),
}

# families whose parameter is a radius and which grow without bound
BALL_FAMILIES = ("lattice1", "lattice2", "lattice3", "tree3", "tree4")


def generate(family: str, param: int) -> WeightedGraph:
    try:
        make = GENERATORS[family]
    except KeyError:
        raise PreconditionError(f"unknown family {family!r}; choose from {sorted(GENERATORS)}") from None
    return make(int(param))


# -- seeded random instances ---------------------------------------------


def sample_solution_pair(g: WeightedGraph, seed: int) -> SolutionPair:
    """u = exp(xi), xi uniform in [-1, 1] per vertex in id order; Q = Δu / u."""
    rng = SplitMix64(seed)
    xs = list(g.vertices)
    u = np.exp(np.array([rng.uniform(-1.0, 1.0) for _ in xs]))
    Q = laplacian_at(g, u) / u
    return SolutionPair(g, GraphFunction.from_array(xs, u), GraphFunction.from_array(xs, Q), frozenset(xs))


def perturb_weights(g: WeightedGraph, rng: SplitMix64, spread: float = 1.0) -> WeightedGraph:
    """Same topology, each weight multiplied by exp(uniform(-spread, spread))."""
    edges = [(x, y, w * math.exp(rng.uniform(-spread, spread))) for x, y, w in g.edges()]
    return WeightedGraph.from_edges(edges, truncated=g.truncated, name=g.name + "~")


def random_graph(rng: SplitMix64, max_vertices: int = 60) -> WeightedGraph:
    """A fixed-topology family member with perturbed weights, at most ``max_vertices``."""
    n_max = max(max_vertices, 4)
    while True:
        kind = rng.below(7)
        if kind == 0:
            g = path(rng.integer(2, n_max))
        elif kind == 1:
            g = cycle(rng.integer(3, n_max))
        elif kind == 2:
            g = star(rng.integer(1, n_max - 1))
        elif kind == 3:
            rows = rng.integer(1, 7)
            g = grid(rows, rng.integer(2, max(2, n_max // rows)))
        elif kind == 4:
            g = complete(rng.integer(2, min(9, n_max)))
        elif kind == 5:
            g = regular_tree_ball(rng.integer(3, 4), 1) if rng.below(2) else regular_tree_ball(3, 2)
        else:
            g = lattice_ball(2, rng.integer(1, 3))
        if len(g) <= max_vertices:
            break
    return perturb_weights(g, rng) if rng.below(4) else g


def random_region(rng: SplitMix64, g: WeightedGraph, max_size: int | None = None) -> Region:
    """Connected proper subset grown one random frontier vertex at a time."""
    n = len(g)
    if n < 2:
        raise PreconditionError("need at least two vertices for a proper region")
    limit = n - 1 if max_size is None else min(max_size, n - 1)
    size = rng.integer(1, limit)
    start = rng.choice(g.vertices)
    S = {start}
    frontier = set(g.neighbors(start))
    while len(S) < size and frontier:
        v = rng.choice(sorted(frontier))
        S.add(v)
        frontier.discard(v)
        frontier.update(y for y in g.neighbors(v) if y not in S)
    return region_from_interior(g, S)


def random_function(rng: SplitMix64, vertices, zero_fraction: float = 0.1) -> GraphFunction:
    """Sign-changing values on a random scale, with some exact zeros."""
    scale = 10.0 ** rng.uniform(-1.0, 1.0)
    vals = {}
    for x in vertices:
        vals[x] = 0.0 if rng.random() < zero_fraction else scale * rng.uniform(-1.0, 1.0)
    return GraphFunction(vals)
