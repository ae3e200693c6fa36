"""Weighted locally finite graphs, graph functions and regions with boundary.

Vertex ids are opaque nonnegative integers. A :class:`WeightedGraph` is
immutable once built; derived arrays (CSR adjacency, degree vector) are
computed lazily and cached.

Finite windows onto infinite graphs (lattice balls, tree balls) carry a
``truncated`` set: vertices whose neighbourhood in the infinite graph is not
fully present. :func:`ball` never places such a vertex in a region interior.
"""

from __future__ import annotations

import dataclasses
from collections import deque
from collections.abc import Iterable, Iterator, Mapping
from functools import cached_property

import numpy as np

from .errors import GraphError, PreconditionError, UndefinedValueError, UnknownVertexError


class WeightedGraph:
    """Simple undirected graph with positive symmetric edge weights.

    Parameters
    ----------
    adjacency : mapping
        ``adjacency[x][y] = mu_xy``. Both directions must be present for a
        valid graph; :func:`validate` reports anything else as a violation
        rather than refusing to build.
    truncated : iterable of int, optional
        Vertices whose neighbourhood is incomplete relative to an ambient
        infinite graph.
    name : str, optional
    """

    def __init__(self, adjacency: Mapping[int, Mapping[int, float]], truncated=(), name: str = ""):
        verts = set(adjacency)
        for x, nbrs in adjacency.items():
            verts.update(nbrs)
        self._vertices = tuple(sorted(verts))
        nbrs_sorted = {}
        wts = {}
        for x in self._vertices:
            row = adjacency.get(x, {})
            ys = tuple(sorted(row))
            nbrs_sorted[x] = ys
            wts[x] = tuple(float(row[y]) for y in ys)
        self._nbrs = nbrs_sorted
        self._wts = wts
        # id-ascending left-to-right summation, reproducible bit for bit
        self._degree = {x: _ordered_sum(wts[x]) for x in self._vertices}
        self._vset = frozenset(self._vertices)
        self.truncated = frozenset(truncated) & self._vset
        self.name = name

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int, float]], truncated=(), name: str = ""):
        """Build from undirected ``(x, y, mu)`` triples, each edge listed once."""
        adj: dict[int, dict[int, float]] = {}
        for x, y, mu in edges:
            x, y = int(x), int(y)
            if y in adj.get(x, {}):
                raise GraphError(f"duplicate edge ({x}, {y})")
            adj.setdefault(x, {})[y] = float(mu)
            adj.setdefault(y, {})[x] = float(mu)
        return cls(adj, truncated=truncated, name=name)

    # -- basic access -------------------------------------------------

    @property
    def vertices(self) -> tuple[int, ...]:
        return self._vertices

    def __len__(self) -> int:
        return len(self._vertices)

    def __contains__(self, x) -> bool:
        return x in self._vset

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<WeightedGraph{label} |V|={len(self)} |E|={self.n_edges}>"

    def check_vertex(self, x) -> None:
        if x not in self._vset:
            raise UnknownVertexError(x)

    def neighbors(self, x) -> tuple[int, ...]:
        self.check_vertex(x)
        return self._nbrs[x]

    def weights(self, x) -> tuple[float, ...]:
        """Edge weights aligned with :meth:`neighbors`."""
        self.check_vertex(x)
        return self._wts[x]

    def weight(self, x, y) -> float:
        nbrs = self.neighbors(x)
        try:
            return self._wts[x][nbrs.index(y)]
        except ValueError:
            raise GraphError(f"({x}, {y}) is not an edge") from None

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Each undirected edge once, as ``(x, y, mu)`` with ``x < y``."""
        for x in self._vertices:
            for y, w in zip(self._nbrs[x], self._wts[x]):
                if x < y:
                    yield x, y, w

    @cached_property
    def n_edges(self) -> int:
        return sum(1 for _ in self.edges())

    # -- degrees ------------------------------------------------------

    def degree(self, x) -> float:
        """d_x, the sum of incident edge weights."""
        self.check_vertex(x)
        return self._degree[x]

    def hat_degree(self, x) -> float:
        """max over neighbours y of d_x / mu_xy; at least 1 on a valid graph."""
        self.check_vertex(x)
        d = self._degree[x]
        return max(d / w for w in self._wts[x])

    # -- array views --------------------------------------------------

    @cached_property
    def index(self) -> dict[int, int]:
        return {x: i for i, x in enumerate(self._vertices)}

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(indptr, cols, data)`` over vertex positions, rows in id order."""
        index = self.index
        indptr = np.zeros(len(self._vertices) + 1, dtype=np.int64)
        cols, data = [], []
        for i, x in enumerate(self._vertices):
            cols.extend(index[y] for y in self._nbrs[x])
            data.extend(self._wts[x])
            indptr[i + 1] = len(cols)
        return indptr, np.asarray(cols, dtype=np.int64), np.asarray(data, dtype=float)

    @cached_property
    def degree_array(self) -> np.ndarray:
        return np.array([self._degree[x] for x in self._vertices])

    @cached_property
    def hat_degree_array(self) -> np.ndarray:
        return np.array([self.hat_degree(x) for x in self._vertices])

    def positions(self, xs: Iterable[int]) -> np.ndarray:
        index = self.index
        out = []
        for x in xs:
            try:
                out.append(index[x])
            except KeyError:
                raise UnknownVertexError(x) from None
        return np.asarray(out, dtype=np.int64)


def _ordered_sum(values) -> float:
    total = 0.0
    for v in values:
        total += v
    return total


# -- validation -------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class Violation:
    kind: str
    detail: str


@dataclasses.dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def passed(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __bool__(self) -> bool:
        return self.passed


def validate(g: WeightedGraph) -> ValidationReport:
    """Check simplicity, weight symmetry/positivity and connectivity.

    Violations are returned as data; nothing is raised.
    """
    out: list[Violation] = []
    for x in g.vertices:
        nbrs = g._nbrs[x]
        if not nbrs:
            out.append(Violation("isolated vertex", f"{x}"))
        for y, w in zip(nbrs, g._wts[x]):
            if y == x:
                out.append(Violation("loop", f"{x}"))
                continue
            if not w > 0:
                if x < y or x not in g._nbrs.get(y, ()):
                    out.append(Violation("nonpositive weight", f"({x}, {y}) mu={w!r}"))
            back = g._nbrs[y]
            if x not in back:
                out.append(Violation("asymmetry", f"({x}, {y}) has no reverse edge"))
            else:
                wb = g._wts[y][back.index(x)]
                if wb != w and x < y:
                    out.append(Violation("asymmetry", f"mu({x},{y})={w!r} != mu({y},{x})={wb!r}"))
    if g.vertices:
        seen = _bfs_order(g, g.vertices[0], allowed=None)
        if len(seen) != len(g):
            out.append(Violation("disconnected", f"{len(g) - len(seen)} vertices unreachable from {g.vertices[0]}"))
    return ValidationReport(tuple(out))


# -- graph functions --------------------------------------------------


class GraphFunction(Mapping):
    """Real-valued function on a declared finite vertex set.

    Reading outside the domain raises :class:`UndefinedValueError`; there are
    no implicit zeros.
    """

    __slots__ = ("_values",)

    def __init__(self, values: Mapping[int, float] | Iterable[tuple[int, float]] = ()):
        self._values = {int(k): float(v) for k, v in dict(values).items()}

    @classmethod
    def constant(cls, vertices: Iterable[int], c: float) -> GraphFunction:
        return cls({x: c for x in vertices})

    @classmethod
    def from_array(cls, vertices: Iterable[int], values) -> GraphFunction:
        vertices = list(vertices)
        values = np.asarray(values, dtype=float)
        if values.shape != (len(vertices),):
            raise ValueError("shape mismatch between vertices and values")
        return cls(zip(vertices, values.tolist()))

    def __getitem__(self, x) -> float:
        try:
            return self._values[x]
        except KeyError:
            raise UndefinedValueError(x) from None

    def __iter__(self):
        return iter(sorted(self._values))

    def __len__(self) -> int:
        return len(self._values)

    def __repr__(self) -> str:
        return f"GraphFunction({dict(sorted(self._values.items()))!r})"

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(self._values)

    def restrict(self, vertices: Iterable[int]) -> GraphFunction:
        return GraphFunction({x: self[x] for x in vertices})

    def array(self, vertices: Iterable[int]) -> np.ndarray:
        return np.array([self[x] for x in vertices], dtype=float)

    def map(self, fn) -> GraphFunction:
        return GraphFunction({x: fn(v) for x, v in self._values.items()})

    def sup_norm(self) -> float:
        return max((abs(v) for v in self._values.values()), default=0.0)


def as_function(value, vertices: Iterable[int]) -> GraphFunction:
    """Coerce ``None`` (zero), a scalar, or a mapping into a GraphFunction on ``vertices``."""
    vertices = list(vertices)
    if value is None:
        return GraphFunction.constant(vertices, 0.0)
    if isinstance(value, (int, float, np.floating, np.integer)):
        return GraphFunction.constant(vertices, float(value))
    if not isinstance(value, GraphFunction):
        value = GraphFunction(value)
    return value.restrict(vertices)


# -- distances --------------------------------------------------------


def _bfs_order(g: WeightedGraph, source, allowed) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in g._nbrs[v]:
            if w not in dist and (allowed is None or w in allowed):
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def bfs_distances(g: WeightedGraph, source, max_radius: int | None = None) -> dict[int, int]:
    """Hop distances from ``source``; optionally stop after ``max_radius`` layers."""
    g.check_vertex(source)
    if max_radius is None:
        return _bfs_order(g, source, allowed=None)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        if dist[v] >= max_radius:
            continue
        for w in g._nbrs[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def distance(g: WeightedGraph, x, y) -> int:
    g.check_vertex(x)
    g.check_vertex(y)
    dist = _bfs_order(g, y, allowed=None)
    if x not in dist:
        raise GraphError(f"no path between {x} and {y}")
    return dist[x]


def path_from_distances(g: WeightedGraph, x, dist_to_target: Mapping[int, int]) -> list[int]:
    """Walk downhill in ``dist_to_target`` from ``x``, smallest id first on ties."""
    if x not in dist_to_target:
        raise GraphError(f"vertex {x} cannot reach the target")
    path = [x]
    v = x
    while dist_to_target[v] > 0:
        want = dist_to_target[v] - 1
        v = next(w for w in g._nbrs[v] if dist_to_target.get(w) == want)
        path.append(v)
    return path


def minimizing_path(g: WeightedGraph, x, y) -> list[int]:
    """One shortest path from ``x`` to ``y``; ties go to the smallest next vertex id."""
    g.check_vertex(x)
    g.check_vertex(y)
    return path_from_distances(g, x, _bfs_order(g, y, allowed=None))


# -- regions ----------------------------------------------------------


@dataclasses.dataclass(frozen=True, eq=False)
class Region:
    """Finite interior ``S`` inside a host graph, with outer vertex boundary ``dS``.

    Build with :func:`region_from_interior` or :func:`ball`.
    """

    host: WeightedGraph
    interior: frozenset[int]
    boundary: frozenset[int]

    @cached_property
    def interior_order(self) -> tuple[int, ...]:
        return tuple(sorted(self.interior))

    @cached_property
    def boundary_order(self) -> tuple[int, ...]:
        return tuple(sorted(self.boundary))

    @cached_property
    def closure(self) -> frozenset[int]:
        return self.interior | self.boundary

    @cached_property
    def position(self) -> dict[int, int]:
        """Position of each interior vertex in :attr:`interior_order`."""
        return {x: i for i, x in enumerate(self.interior_order)}

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([self.host.degree(x) for x in self.interior_order])

    def __len__(self) -> int:
        return len(self.interior)

    def __repr__(self) -> str:
        return f"<Region |S|={len(self.interior)} |dS|={len(self.boundary)}>"


def _outer_boundary(g: WeightedGraph, interior: frozenset[int]) -> frozenset[int]:
    return frozenset(y for x in interior for y in g._nbrs[x] if y not in interior)


def region_from_interior(g: WeightedGraph, interior: Iterable[int]) -> Region:
    """Region with interior ``S``; ``S`` must be nonempty and induce a connected subgraph."""
    S = frozenset(int(x) for x in interior)
    if not S:
        raise GraphError("empty interior")
    for x in S:
        g.check_vertex(x)
    start = min(S)
    if len(_bfs_order(g, start, allowed=S)) != len(S):
        raise GraphError("interior does not induce a connected subgraph (disconnected)")
    return Region(g, S, _outer_boundary(g, S))


def closed_ball_vertices(g: WeightedGraph, x0, R: int) -> frozenset[int]:
    if R < 0:
        raise PreconditionError("radius must be nonnegative")
    return frozenset(bfs_distances(g, x0, max_radius=R))


def ball(g: WeightedGraph, x0, R: int) -> Region:
    """Closed ball ``{v : d(v, x0) <= R}`` as a region, minus truncated vertices."""
    g.check_vertex(x0)
    S = closed_ball_vertices(g, x0, R) - g.truncated
    if not S:
        raise GraphError(f"ball of radius {R} about {x0} has no complete vertex")
    return region_from_interior(g, S)
