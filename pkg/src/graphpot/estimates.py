"""Gradient bound and Harnack constants for positive solutions of (-Δ + Q)u = 0.

The pointwise bound is

    |∇u|²(x) <= P(x) u(x)²,   P(x) = d̂_x (1 + Q(x))² - 2 Q(x) - 1,

and the Harnack constant of a finite set S multiplies one factor per step
along a shortest path between every ordered pair of S.
"""

from __future__ import annotations

import dataclasses
import math
from collections.abc import Iterable

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import PreconditionError
from .graph import GraphFunction, WeightedGraph, bfs_distances, path_from_distances
from .operators import grad_sq_at, laplacian_at

MODES = ("paper", "sharp")


@dataclasses.dataclass(frozen=True)
class SolutionPair:
    """A positive function ``u`` and potential ``Q`` with -Δu + Qu = 0 on ``domain``."""

    graph: WeightedGraph
    u: GraphFunction
    Q: GraphFunction
    domain: frozenset[int]

    def residual(self) -> float:
        xs = sorted(self.domain)
        lap = laplacian_at(self.graph, self.u, xs)
        uq = self.u.array(xs) * self.Q.array(xs)
        return float(np.max(np.abs(-lap + uq))) if xs else 0.0

    def check(self, tol: float | None = None) -> None:
        """Raise :class:`PreconditionError` unless ``u > 0`` and the residual is small."""
        tol = DEFAULT_TOLERANCES.pair_residual if tol is None else tol
        xs = sorted(self.domain)
        uvals = self.u.array(xs)
        if (uvals <= 0).any():
            bad = xs[int(np.argmin(uvals))]
            raise PreconditionError(f"u is not positive at vertex {bad}")
        res = self.residual()
        if res >= tol * self.u.sup_norm():
            raise PreconditionError(f"residual {res:.3e} exceeds {tol:g} * ||u||")


def pair_from_u(g: WeightedGraph, u: GraphFunction) -> SolutionPair:
    """Solution pair with Q := Δu / u on every vertex of ``g``."""
    xs = list(g.vertices)
    uvals = u.array(xs)
    if (uvals <= 0).any():
        raise PreconditionError("u must be strictly positive")
    Q = GraphFunction.from_array(xs, laplacian_at(g, uvals) / uvals)
    return SolutionPair(g, u.restrict(xs), Q, frozenset(xs))


def p_bound(g: WeightedGraph, Q, x) -> float:
    q = Q[x]
    return g.hat_degree(x) * (1.0 + q) ** 2 - 2.0 * q - 1.0


def p_bound_at(g: WeightedGraph, Q, xs: Iterable[int]) -> np.ndarray:
    xs = list(xs)
    q = np.array([Q[x] for x in xs])
    dh = g.hat_degree_array[g.positions(xs)]
    return dh * (1.0 + q) ** 2 - 2.0 * q - 1.0


@dataclasses.dataclass(frozen=True)
class GradientReport:
    worst_ratio: float
    worst_vertex: int | None
    worst_slack: float
    min_p_minus_q2: float
    n_vertices: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.worst_slack >= 0 and self.min_p_minus_q2 >= -self.tolerance


def gradient_estimate_check(pair: SolutionPair, tol: float | None = None) -> GradientReport:
    """Verify |∇u|² <= P u² (+ tol u²) at every vertex of the pair's domain.

    The reported ratio is |∇u|² / (P u²), taken as 0 where both sides vanish.
    """
    tol = DEFAULT_TOLERANCES.gradient if tol is None else tol
    pair.check()
    g = pair.graph
    xs = sorted(pair.domain)
    u = pair.u.array(xs)
    grad = grad_sq_at(g, pair.u, xs)
    P = p_bound_at(g, pair.Q, xs)
    rhs = P * u * u
    slack = rhs + tol * u * u - grad
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs > 0, grad / rhs, np.where(grad > 0, np.inf, 0.0))
    i = int(np.argmax(ratio))
    q = pair.Q.array(xs)
    return GradientReport(
        worst_ratio=float(ratio[i]),
        worst_vertex=xs[i],
        worst_slack=float(np.min(slack)),
        min_p_minus_q2=float(np.min(P - q * q)),
        n_vertices=len(xs),
        tolerance=tol,
    )


def _factor(g: WeightedGraph, P: dict, x, nxt, mode: str) -> float:
    if mode == "paper":
        scale = g.hat_degree(x)
    else:
        scale = g.degree(x) / g.weight(x, nxt)
    return 1.0 + math.sqrt(scale * max(P[x], 0.0))


def harnack_constant(g: WeightedGraph, Q, S: Iterable[int], mode: str = "paper") -> float:
    """C(S) = max over ordered pairs (a, b) of the path product from a to b.

    ``mode="paper"`` uses d̂ at each step; ``mode="sharp"`` uses the actual
    edge ratio d_x / μ_{x,next}, which is never larger.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    S = sorted(set(S))
    if not S:
        raise PreconditionError("S must be nonempty")
    for x in S:
        g.check_vertex(x)
    P: dict[int, float] = {}
    best = 1.0
    for b in S:
        dist = bfs_distances(g, b)
        for a in S:
            if a == b:
                continue
            path = path_from_distances(g, a, dist)
            prod = 1.0
            for x, nxt in zip(path, path[1:]):
                if x not in P:
                    P[x] = p_bound(g, Q, x)
                prod *= _factor(g, P, x, nxt, mode)
            best = max(best, prod)
    return best


@dataclasses.dataclass(frozen=True)
class HarnackReport:
    sup: float
    inf: float
    C_paper: float
    C_sharp: float
    tolerance: float

    @property
    def ratio(self) -> float:
        return self.sup / self.inf

    @property
    def passed(self) -> bool:
        ok_paper = self.sup <= self.C_paper * self.inf * (1 + self.tolerance)
        ok_sharp = self.sup <= self.C_sharp * self.inf * (1 + self.tolerance)
        return ok_paper and ok_sharp and self.C_sharp <= self.C_paper * (1 + 1e-15)


def harnack_verify(pair: SolutionPair, S: Iterable[int], tol: float | None = None) -> HarnackReport:
    tol = DEFAULT_TOLERANCES.harnack if tol is None else tol
    pair.check()
    S = sorted(set(S))
    vals = pair.u.array(S)
    return HarnackReport(
        sup=float(vals.max()),
        inf=float(vals.min()),
        C_paper=harnack_constant(pair.graph, pair.Q, S, "paper"),
        C_sharp=harnack_constant(pair.graph, pair.Q, S, "sharp"),
        tolerance=tol,
    )
