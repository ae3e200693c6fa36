"""Exhaustion by balls and the diagnostics reported along it.

The exhaustion step of radius R is the open ball ``B(R) = {v : d(v, x0) < R}``
with its outer vertex boundary, so ``B(R)`` has boundary exactly the sphere of
radius R. A *generator* is either a callable ``R -> WeightedGraph`` whose
output contains ``B(R)`` with complete neighbourhoods (e.g. the functions in
:mod:`graphpot.generators`), or a fixed finite graph.
"""

from __future__ import annotations

import dataclasses
import math
from collections.abc import Callable, Sequence
from typing import Any, Union

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import GraphError, PreconditionError
from .graph import GraphFunction, Region, WeightedGraph, as_function, closed_ball_vertices, region_from_interior

Generator = Union[Callable[[int], WeightedGraph], WeightedGraph]

CONVERGING = "CONVERGING"
GROWING = "GROWING"


def check_radii(radii: Sequence[int]) -> list[int]:
    radii = [int(r) for r in radii]
    if not radii:
        raise PreconditionError("at least one radius required")
    if radii[0] < 1:
        raise PreconditionError("radii must be >= 1")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise PreconditionError("radii must be strictly increasing")
    return radii


def host_graph(generator: Generator, max_radius: int) -> WeightedGraph:
    if isinstance(generator, WeightedGraph):
        return generator
    return generator(max_radius)


def open_ball(host: WeightedGraph, x0, R: int) -> Region:
    """Region whose interior is ``{v : d(v, x0) <= R - 1}``."""
    host.check_vertex(x0)
    S = closed_ball_vertices(host, x0, R - 1)
    if S & host.truncated:
        raise GraphError(f"generator cannot produce the ball of radius {R}: it reaches truncated vertices")
    return region_from_interior(host, S)


def exhaustion_regions(generator: Generator, x0, radii: Sequence[int]):
    radii = check_radii(radii)
    host = host_graph(generator, radii[-1])
    return host, [(R, open_ball(host, x0, R)) for R in radii]


def potential_on(host: WeightedGraph, Q) -> GraphFunction | None:
    """Resolve None / scalar / GraphFunction / callable(host) into a potential."""
    if Q is None:
        return None
    if callable(Q) and not isinstance(Q, GraphFunction):
        Q = Q(host)
    return as_function(Q, host.vertices) if not isinstance(Q, GraphFunction) else Q


# -- sequence diagnostics ------------------------------------------------


def _fit(x: np.ndarray, y: np.ndarray) -> dict[str, float]:
    M = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(M, y, rcond=None)
    rms = float(np.sqrt(np.mean((M @ coef - y) ** 2)))
    return {"intercept": float(coef[0]), "slope": float(coef[1]), "rms": rms}


def growth_fits(radii: Sequence[int], values: Sequence[float]) -> dict[str, dict[str, float]]:
    """Least-squares fits value ~ a + b R and value ~ a + b log R."""
    r = np.asarray(radii, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(r) < 2:
        return {}
    return {"linear": _fit(r, v), "log": _fit(np.log(r), v)}


def extrapolated_tail(radii: Sequence[int], values: Sequence[float]) -> tuple[float, float]:
    """Geometric estimate of the remaining increase of a nondecreasing sequence.

    Uses per-unit-radius increments h; with ratio rho = (h_n / h_{n-1}) per unit
    radius, the tail is h_n rho / (1 - rho). Returns ``(tail, rho)``; the tail
    is infinite when increments are not shrinking.
    """
    if len(values) < 3:
        return math.inf, math.nan
    r = np.asarray(radii, dtype=float)
    v = np.asarray(values, dtype=float)
    h = np.diff(v) / np.diff(r)
    h_prev, h_last = h[-2], h[-1]
    if h_last <= 0:
        return 0.0, 0.0
    if h_prev <= 0:
        return math.inf, math.inf
    spacing = (r[-1] - r[-3]) / 2.0
    rho = float((h_last / h_prev) ** (1.0 / spacing))
    if rho >= 1.0:
        return math.inf, rho
    return float(h_last * rho / (1.0 - rho)), rho


def classify(radii: Sequence[int], values: Sequence[float], tol: float | None = None) -> str:
    tol = DEFAULT_TOLERANCES.converging if tol is None else tol
    tail, _ = extrapolated_tail(radii, values)
    return CONVERGING if tail < tol * (1.0 + abs(values[-1])) else GROWING


@dataclasses.dataclass
class SequenceDiagnostics:
    """Monotonicity and convergence diagnostics of one quantity along the radii."""

    label: str
    radii: list[int]
    values: list[float]
    direction: str  # "nonincreasing" | "nondecreasing"
    tolerance: float
    classification: str | None = None
    tail: float | None = None
    rho: float | None = None
    fits: dict[str, Any] = dataclasses.field(default_factory=dict)

    @property
    def gaps(self) -> list[float]:
        return [b - a for a, b in zip(self.values, self.values[1:])]

    @property
    def last_gap(self) -> float:
        return self.gaps[-1] if len(self.values) > 1 else math.nan

    @property
    def worst_violation(self) -> float:
        """Largest step against the declared direction (<= 0 when monotone)."""
        gaps = self.gaps
        if not gaps:
            return 0.0
        if self.direction == "nonincreasing":
            return max(gaps)
        return -min(gaps)

    @property
    def monotone(self) -> bool:
        return self.worst_violation <= self.tolerance

    @property
    def estimate(self) -> float:
        return self.values[-1]

    @property
    def growth(self) -> str | None:
        if not self.fits:
            return None
        return min(self.fits, key=lambda k: self.fits[k]["rms"])

    def to_dict(self) -> dict[str, Any]:
        out = {
            "label": self.label,
            "radii": list(self.radii),
            "values": list(self.values),
            "gaps": self.gaps,
            "direction": self.direction,
            "monotone": self.monotone,
            "worst_violation": self.worst_violation,
            "tolerance": self.tolerance,
            "estimate": self.estimate,
            "last_gap": self.last_gap,
        }
        if self.classification is not None:
            out["classification"] = self.classification
            out["tail"] = self.tail
            out["rho"] = self.rho
            out["growth"] = self.growth
            out["fits"] = self.fits
        return out


def diagnose(label, radii, values, direction, tol=None, classify_growth=False) -> SequenceDiagnostics:
    tol = DEFAULT_TOLERANCES.monotone if tol is None else tol
    diag = SequenceDiagnostics(label, list(radii), [float(v) for v in values], direction, tol)
    if classify_growth:
        diag.tail, diag.rho = extrapolated_tail(radii, values)
        diag.classification = classify(radii, values)
        diag.fits = growth_fits(radii, values)
    return diag


@dataclasses.dataclass
class ExhaustionReport:
    """Per-radius sequences computed along an exhaustion by balls."""

    quantity: str
    center: int
    radii: list[int]
    sequences: dict[str, SequenceDiagnostics]
    extra: dict[str, Any] = dataclasses.field(default_factory=dict)

    @property
    def monotone(self) -> bool:
        return all(s.monotone for s in self.sequences.values())

    @property
    def passed(self) -> bool:
        return self.monotone and all(v for k, v in self.extra.items() if k.startswith("ok_"))

    def __getitem__(self, label: str) -> SequenceDiagnostics:
        return self.sequences[label]

    def to_dict(self) -> dict[str, Any]:
        return {
            "quantity": self.quantity,
            "center": self.center,
            "radii": list(self.radii),
            "sequences": {k: s.to_dict() for k, s in self.sequences.items()},
            "extra": self.extra,
            "passed": self.passed,
        }
