"""Random-walk Laplacian, squared gradient, weighted integrals and Kato checks.

All operators use the normalisation

    (Δu)(x)    = Σ_y (μ_xy / d_x) (u(y) - u(x))
    |∇u|²(x)   = Σ_y (μ_xy / d_x) (u(y) - u(x))²
    ∫ u        = Σ_x u(x) d_x

with no factor 1/2 on the gradient. Pointwise functions take a single vertex;
the ``*_at`` variants evaluate on many vertices at once.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Iterable

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import UndefinedValueError
from .graph import GraphFunction, WeightedGraph


@dataclasses.dataclass(frozen=True)
class OperatorContext:
    """A graph together with an optional potential ``Q`` (zero when omitted)."""

    graph: WeightedGraph
    Q: GraphFunction | None = None

    def potential(self, x) -> float:
        return 0.0 if self.Q is None else self.Q[x]


def _context(ctx) -> OperatorContext:
    if isinstance(ctx, OperatorContext):
        return ctx
    return OperatorContext(ctx)


# -- pointwise ----------------------------------------------------------


def laplacian(ctx, u, x) -> float:
    ctx = _context(ctx)
    g = ctx.graph
    ux = u[x]
    d = g.degree(x)
    total = 0.0
    for y, w in zip(g.neighbors(x), g.weights(x)):
        total += w * (u[y] - ux)
    return total / d


def grad_sq(ctx, u, x) -> float:
    ctx = _context(ctx)
    g = ctx.graph
    ux = u[x]
    d = g.degree(x)
    total = 0.0
    for y, w in zip(g.neighbors(x), g.weights(x)):
        total += w * (u[y] - ux) ** 2
    return total / d


def schrodinger(ctx, u, x) -> float:
    """(-Δ + Q) u at ``x``."""
    ctx = _context(ctx)
    return -laplacian(ctx, u, x) + ctx.potential(x) * u[x]


def integral(g: WeightedGraph, u, over: Iterable[int] | None = None) -> float:
    """Σ u(x) d_x over ``over`` (default: the domain of ``u``)."""
    xs = sorted(u.domain if over is None else over)
    return float(sum(u[x] * g.degree(x) for x in xs))


def inner(g: WeightedGraph, u, v, over: Iterable[int] | None = None) -> float:
    xs = sorted((u.domain & v.domain) if over is None else over)
    return float(sum(u[x] * v[x] * g.degree(x) for x in xs))


# -- vectorised ---------------------------------------------------------


def _dense_values(g: WeightedGraph, u) -> np.ndarray:
    """Values of ``u`` over all vertices of ``g``; NaN marks undefined."""
    out = np.full(len(g), np.nan)
    if isinstance(u, np.ndarray):
        if u.shape != (len(g),):
            raise ValueError("array argument must cover every vertex in id order")
        return u.astype(float)
    index = g.index
    for x in u:
        i = index.get(x)
        if i is not None:
            out[i] = u[x]
    return out


def _select(g: WeightedGraph, u, xs) -> tuple[np.ndarray, np.ndarray]:
    if xs is None:
        xs = admissible_vertices(g, u)
    pos = g.positions(xs)
    return pos, _dense_values(g, u)


def _raise_undefined(g: WeightedGraph, vals: np.ndarray, rows: np.ndarray) -> None:
    indptr, cols, _ = g.csr
    for i in rows:
        for j in (i, *cols[indptr[i]:indptr[i + 1]]):
            if np.isnan(vals[j]):
                raise UndefinedValueError(g.vertices[j])
    raise UndefinedValueError(None)


def _edge_terms(g: WeightedGraph, vals: np.ndarray):
    indptr, cols, data = g.csr
    rows = np.repeat(np.arange(len(g)), np.diff(indptr))
    return rows, cols, data, vals[cols] - vals[rows]


def _row_sum(g: WeightedGraph, rows, terms) -> np.ndarray:
    return np.bincount(rows, weights=terms, minlength=len(g))


def admissible_vertices(g: WeightedGraph, u) -> list[int]:
    """Vertices where ``u`` is defined on the vertex and all its neighbours."""
    if isinstance(u, np.ndarray):
        return list(g.vertices)
    dom = u.domain
    return [x for x in g.vertices if x in dom and all(y in dom for y in g._nbrs[x])]


def laplacian_at(g: WeightedGraph, u, xs=None) -> np.ndarray:
    pos, vals = _select(g, u, xs)
    rows, _, w, diff = _edge_terms(g, vals)
    out = (_row_sum(g, rows, w * diff) / g.degree_array)[pos]
    if np.isnan(out).any():
        _raise_undefined(g, vals, pos[np.isnan(out)])
    return out


def grad_sq_at(g: WeightedGraph, u, xs=None) -> np.ndarray:
    pos, vals = _select(g, u, xs)
    rows, _, w, diff = _edge_terms(g, vals)
    out = (_row_sum(g, rows, w * diff * diff) / g.degree_array)[pos]
    if np.isnan(out).any():
        _raise_undefined(g, vals, pos[np.isnan(out)])
    return out


def schrodinger_at(ctx, u, xs=None) -> np.ndarray:
    ctx = _context(ctx)
    g = ctx.graph
    if xs is None:
        xs = admissible_vertices(g, u)
    xs = list(xs)
    lap = laplacian_at(g, u, xs)
    uq = np.array([u[x] for x in xs]) if not isinstance(u, np.ndarray) else u[g.positions(xs)]
    q = np.zeros(len(xs)) if ctx.Q is None else np.array([ctx.Q[x] for x in xs])
    return -lap + q * uq


# -- Kato and the product rule -------------------------------------------


def sign(t):
    """sign with sign(0) = 0."""
    return np.sign(t)


def sign_plus(t):
    """1 where t > 0, else 0."""
    return (np.asarray(t) > 0).astype(float)


@dataclasses.dataclass(frozen=True)
class InequalityCheck:
    """Worst pointwise slack ``lhs - rhs`` of an inequality ``lhs >= rhs``."""

    name: str
    worst_slack: float
    worst_vertex: int | None
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.worst_slack >= -self.tolerance


@dataclasses.dataclass(frozen=True)
class KatoReport:
    gradient: InequalityCheck
    absolute: InequalityCheck
    positive_part: InequalityCheck
    n_vertices: int

    @property
    def checks(self) -> tuple[InequalityCheck, ...]:
        return (self.gradient, self.absolute, self.positive_part)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def worst_slack(self) -> float:
        return min(c.worst_slack for c in self.checks)


def _worst(name, slack, xs, tol) -> InequalityCheck:
    if len(slack) == 0:
        return InequalityCheck(name, float("inf"), None, tol)
    i = int(np.argmin(slack))
    return InequalityCheck(name, float(slack[i]), xs[i], tol)


def _scaled_tol(g, u, base) -> float:
    if isinstance(u, np.ndarray):
        norm = float(np.max(np.abs(u))) if u.size else 0.0
    else:
        norm = u.sup_norm()
    return base * (1.0 + norm * norm)


def kato_check(g: WeightedGraph, u, vertices=None, tol: float | None = None) -> KatoReport:
    """Check the three Kato inequalities at every admissible vertex.

    (a) |∇u|² >= |∇|u||²
    (b) Δ|u| >= sign(u) Δu
    (c) Δu₊ >= sign₊(u) Δu,  u₊ = (|u| + u) / 2
    """
    xs = admissible_vertices(g, u) if vertices is None else list(vertices)
    tol = _scaled_tol(g, u, DEFAULT_TOLERANCES.kato if tol is None else tol)
    vals = _dense_values(g, u)
    absu = np.abs(vals)
    upos = (absu + vals) / 2.0
    pos = g.positions(xs)
    ux = vals[pos]
    lap = laplacian_at(g, vals, xs)
    a = grad_sq_at(g, vals, xs) - grad_sq_at(g, absu, xs)
    b = laplacian_at(g, absu, xs) - sign(ux) * lap
    c = laplacian_at(g, upos, xs) - sign_plus(ux) * lap
    return KatoReport(
        _worst("grad |u|", a, xs, tol),
        _worst("laplacian |u|", b, xs, tol),
        _worst("laplacian u+", c, xs, tol),
        len(xs),
    )


@dataclasses.dataclass(frozen=True)
class Lemma2Report:
    """Residual of Δ(u²) = 2uΔu + |∇u|² and the inequality |∇u|² <= Δ(u²) where uΔu >= 0."""

    max_residual: float
    worst_vertex: int | None
    conditional: InequalityCheck
    n_conditional: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tolerance and self.conditional.passed


def lemma2_check(g: WeightedGraph, u, vertices=None, tol: float | None = None) -> Lemma2Report:
    xs = admissible_vertices(g, u) if vertices is None else list(vertices)
    tol = _scaled_tol(g, u, DEFAULT_TOLERANCES.kato if tol is None else tol)
    vals = _dense_values(g, u)
    pos = g.positions(xs)
    ux = vals[pos]
    lap = laplacian_at(g, vals, xs)
    lap_sq = laplacian_at(g, vals * vals, xs)
    grad = grad_sq_at(g, vals, xs)
    resid = np.abs(lap_sq - 2.0 * ux * lap - grad)
    if len(xs):
        i = int(np.argmax(resid))
        max_res, where = float(resid[i]), xs[i]
    else:
        max_res, where = 0.0, None
    mask = ux * lap >= 0
    cond_xs = [x for x, m in zip(xs, mask) if m]
    cond = _worst("grad <= laplacian u^2", (lap_sq - grad)[mask], cond_xs, tol)
    return Lemma2Report(max_res, where, cond, len(cond_xs), tol)
