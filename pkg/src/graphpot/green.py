"""Green functions of the absorbed random walk on a region.

The walk moves from x to y with probability p(x, y) = μ_xy / d_x and is
killed on reaching the boundary. With P_S the interior block of the transition
matrix, the (Kronecker-normalised) Green matrix is

    g = Σ_{n>=0} P_Sⁿ = (I - P_S)⁻¹,

i.e. g(x, y) is the expected number of visits to y starting from x. The
measure-normalised kernel g(x, y) / d_y is symmetric, and
u(x) = Σ_y kernel(x, y) f(y) d_y solves -Δu = f with zero boundary data.
"""

from __future__ import annotations

import dataclasses
import math
from collections.abc import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .config import DEFAULT_TOLERANCES, SERIES_MATRIX_LIMIT, max_vertices
from .errors import PositivityError, PreconditionError, ResourceCapError
from .exhaustion import ExhaustionReport, Generator, diagnose, exhaustion_regions
from .graph import Region
from .operators import laplacian_at
from .solvers import factorize
from .spectral import assemble, principal_eigenpair

# dense n x n Green matrices beyond this many interior vertices need probes
DENSE_GREEN_LIMIT = 6000


@dataclasses.dataclass(frozen=True, eq=False)
class TransitionMatrix:
    region: Region
    # interior x interior block
    P: sp.csr_matrix
    # interior x boundary block
    P_boundary: sp.csr_matrix

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.P.sum(axis=1)).ravel() + np.asarray(self.P_boundary.sum(axis=1)).ravel()

    def dense(self) -> np.ndarray:
        return self.P.toarray()


def transition(region: Region) -> TransitionMatrix:
    """p(x, y) = μ_xy / d_x for interior x; boundary columns kept separately."""
    form = assemble(region)
    inv_d = sp.diags(1.0 / form.mass)
    off = sp.diags(form.A.diagonal()) - form.A
    return TransitionMatrix(region, (inv_d @ off).tocsr(), (inv_d @ form.coupling).tocsr())


@dataclasses.dataclass(frozen=True, eq=False)
class GreenMatrix:
    region: Region
    g: np.ndarray

    @property
    def kernel(self) -> np.ndarray:
        """g(x, y) / d_y."""
        return self.g / self.region.degrees[None, :]

    def value(self, x, y) -> float:
        pos = self.region.position
        return float(self.g[pos[x], pos[y]])

    def apply(self, f) -> np.ndarray:
        """Σ_y g(x, y) f(y); equivalently ∫ kernel(x, y) f(y) dy."""
        if not isinstance(f, np.ndarray):
            f = f.array(self.region.interior_order)
        return self.g @ f

    def residual(self, transition_matrix: TransitionMatrix | None = None) -> float:
        """max |(I - P_S) g - I|."""
        T = transition(self.region) if transition_matrix is None else transition_matrix
        n = self.g.shape[0]
        return float(np.max(np.abs(self.g - T.P @ self.g - np.eye(n))))

    def symmetry_error(self) -> float:
        """max |K - Kᵀ| / max |K| for the kernel K."""
        K = self.kernel
        return float(np.max(np.abs(K - K.T)) / np.max(np.abs(K)))

    def row_sums(self) -> np.ndarray:
        return self.g.sum(axis=1)


def _check_dense_size(region: Region) -> None:
    n = len(region)
    if n > min(DENSE_GREEN_LIMIT, max_vertices()):
        raise ResourceCapError(f"dense Green matrix on {n} interior vertices; use probe columns instead")


def green_direct(region: Region, tol=None) -> GreenMatrix:
    """Solve (I - P_S) g = I column by column (via the symmetric form A = D(I - P_S))."""
    _check_dense_size(region)
    form = assemble(region)
    solve = factorize(form, tol)
    g = solve(np.diag(form.mass))
    return GreenMatrix(region, np.asarray(g))


def green_columns(region: Region, targets: Iterable[int], tol=None) -> dict[int, np.ndarray]:
    """Columns g(·, y) for each target y, without forming the whole matrix."""
    form = assemble(region)
    solve = factorize(form, tol)
    pos = region.position
    out = {}
    for y in targets:
        if y not in pos:
            raise PreconditionError(f"vertex {y} is not in the region interior")
        e = np.zeros(form.size)
        e[pos[y]] = form.mass[pos[y]]
        out[y] = solve(e)
    return out


@dataclasses.dataclass(frozen=True, eq=False)
class GreenSeries:
    """Partial sums of Σ P_Sⁿ with their convergence record.

    ``partial`` is the full matrix, or the stacked probe columns when the
    series was run on selected targets.
    """

    region: Region
    partial: np.ndarray
    n_terms: int
    converged: bool
    tail_estimate: float
    increments: list[float]
    targets: tuple[int, ...] | None = None

    @property
    def green(self) -> GreenMatrix | None:
        if not self.converged or self.targets is not None:
            return None
        return GreenMatrix(self.region, self.partial)

    def diagnosis(self) -> str:
        state = "converged" if self.converged else "not converged"
        return (
            f"{state} after {self.n_terms} terms; last increment {self.increments[-1]:.3e}, "
            f"estimated tail {self.tail_estimate:.3e}"
        )


def green_series(region: Region, n_max: int = 1_000_000, tol: float | None = None, targets=None) -> GreenSeries:
    """Accumulate Σ_{n<=N} P_Sⁿ term by term.

    Stops once the latest term is below ``tol`` and the geometric estimate of
    everything after it is too, or at ``n_max`` terms. Above
    ``SERIES_MATRIX_LIMIT`` interior vertices only the ``targets`` columns are
    propagated.
    """
    if n_max < 1:
        raise PreconditionError("n_max must be >= 1")
    tol = DEFAULT_TOLERANCES.series if tol is None else tol
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    P = transition(region).P
    n = len(region)
    if targets is None:
        if n > SERIES_MATRIX_LIMIT:
            raise ResourceCapError("region too large for whole-matrix series; pass targets")
        term = np.eye(n)
        Pd = P.toarray()
        step = lambda t: Pd @ t  # noqa: E731
    else:
        targets = tuple(targets)
        pos = region.position
        term = np.zeros((n, len(targets)))
        for k, y in enumerate(targets):
            if y not in pos:
                raise PreconditionError(f"vertex {y} is not in the region interior")
            term[pos[y], k] = 1.0
        step = lambda t: P @ t  # noqa: E731
    total = term.copy()
    incs: list[float] = [1.0]
    tail = math.inf
    converged = False
    N = 0
    for N in range(1, n_max + 1):
        term = step(term)
        total += term
        m = float(np.max(np.abs(term)))
        incs.append(m)
        if m == 0.0:
            tail, converged = 0.0, True
            break
        if m < tol and N >= 2 and incs[-3] > 0:
            rho = math.sqrt(m / incs[-3])
            tail = m * rho / (1.0 - rho) if rho < 1 else math.inf
            if tail < tol:
                converged = True
                break
    return GreenSeries(region, total, N + 1, converged, tail, _thin(incs), targets)


def _thin(values: list[float], keep: int = 200) -> list[float]:
    if len(values) <= keep:
        return values
    idx = np.unique(np.geomspace(1, len(values), keep).astype(int) - 1)
    return [values[i] for i in idx]


# -- exhaustion ------------------------------------------------------------


def parse_probe(text: str) -> tuple[int, int]:
    x, _, y = text.partition(":")
    return int(x), int(y if y else x)


def green_exhaustion(
    generator: Generator,
    x0,
    radii: Sequence[int],
    probes: Sequence[tuple[int, int]],
    mode: str = "direct",
    tol=None,
) -> ExhaustionReport:
    """g_R at probe pairs along the balls B(R); must be nondecreasing in R."""
    tol = DEFAULT_TOLERANCES if tol is None else tol
    if mode not in ("direct", "series"):
        raise ValueError("mode must be 'direct' or 'series'")
    probes = [tuple(p) for p in probes]
    if not probes:
        raise PreconditionError("at least one probe pair required")
    host, regions = exhaustion_regions(generator, x0, radii)
    smallest = regions[0][1].interior
    for x, y in probes:
        if x not in smallest or y not in smallest:
            raise PreconditionError(f"probe {x}:{y} lies outside the smallest interior")
    targets = sorted({y for _, y in probes})
    table: dict[tuple[int, int], list[float]] = {p: [] for p in probes}
    sizes = []
    for R, region in regions:
        if mode == "direct":
            cols = green_columns(region, targets, tol)
        else:
            s = green_series(region, targets=targets)
            cols = {y: s.partial[:, k] for k, y in enumerate(targets)}
        pos = region.position
        for x, y in probes:
            table[(x, y)].append(float(cols[y][pos[x]]))
        sizes.append(len(region))
    radii = [R for R, _ in regions]
    seqs = {
        f"{x}:{y}": diagnose(f"{x}:{y}", radii, vals, "nondecreasing", tol.monotone, classify_growth=True)
        for (x, y), vals in table.items()
    }
    nonneg = all(v >= 0 for vals in table.values() for v in vals)
    return ExhaustionReport(
        quantity="green",
        center=x0,
        radii=radii,
        sequences=seqs,
        extra={"interior_sizes": sizes, "mode": mode, "ok_nonnegative": nonneg},
    )


# -- bound checks ----------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class EigenBoundReport:
    A: float
    lambda1: float
    representation_residual: float
    tolerance: float
    representation_tolerance: float

    @property
    def product(self) -> float:
        return self.lambda1 * self.A

    @property
    def passed(self) -> bool:
        return (
            self.product >= 1.0 - self.tolerance
            and self.representation_residual < self.representation_tolerance
        )

    def to_dict(self) -> dict:
        return {
            "A": self.A,
            "lambda1": self.lambda1,
            "product": self.product,
            "representation_residual": self.representation_residual,
            "passed": self.passed,
        }


def eigen_bound_check(region: Region, tol=None) -> EigenBoundReport:
    """λ₁ · A >= 1 with A = max_x Σ_y g(x, y), and u = λ₁ ∫ kernel u for the eigenfunction."""
    tol = DEFAULT_TOLERANCES if tol is None else tol
    G = green_direct(region, tol)
    eig = principal_eigenpair(assemble(region), tol=tol)
    A = float(np.max(G.row_sums()))
    u = eig.u.array(region.interior_order)
    represented = eig.value * (G.kernel @ (u * region.degrees))
    res = float(np.max(np.abs(u - represented)) / np.max(np.abs(u)))
    return EigenBoundReport(A, eig.value, res, tol.eigen_bound, tol.representation)


@dataclasses.dataclass(frozen=True)
class CertificateReport:
    """Superharmonicity of a positive φ on a region and its decay/integrability proxies."""

    superharmonic: bool
    worst_laplacian: float
    worst_vertex: int | None
    slack: dict[int, float]
    boundary_max: float
    p: float | None
    p_integral: float | None

    @property
    def passed(self) -> bool:
        return self.superharmonic

    def to_dict(self) -> dict:
        return {
            "superharmonic": self.superharmonic,
            "worst_laplacian": self.worst_laplacian,
            "worst_vertex": self.worst_vertex,
            "boundary_max": self.boundary_max,
            "p": self.p,
            "p_integral": self.p_integral,
        }


def superharmonic_certificate(region: Region, phi, p: float | None = None, tol=None) -> CertificateReport:
    """Check Δφ <= 0 at interior vertices.

    Also reports max φ over the boundary shell (decay proxy) and, when ``p``
    is given, Σ_{x in S} φ(x)^p d_x.
    """
    tol = DEFAULT_TOLERANCES if tol is None else tol
    if p is not None and p <= 1:
        raise PreconditionError("p must exceed 1")
    closure = sorted(region.closure)
    vals = np.array([phi[x] for x in closure])
    if (vals <= 0).any():
        raise PositivityError(f"phi must be positive on the closed region (vertex {closure[int(np.argmin(vals))]})")
    order = region.interior_order
    lap = laplacian_at(region.host, phi, order)
    i = int(np.argmax(lap))
    bmax = max((phi[y] for y in region.boundary_order), default=float("nan"))
    p_int = None
    if p is not None:
        p_int = float(sum(phi[x] ** p * region.host.degree(x) for x in order))
    return CertificateReport(
        superharmonic=bool(lap.max() <= tol.superharmonic),
        worst_laplacian=float(lap[i]),
        worst_vertex=order[i],
        slack=dict(zip(order, (-lap).tolist())),
        boundary_max=float(bmax),
        p=p,
        p_integral=p_int,
    )

