"""Dirichlet form of -Δ + Q on a region and its principal eigenpair.

On a region with interior S the form is the symmetric matrix

    A[x, x] = d_x (1 + Q(x)),   A[x, y] = -μ_xy   (x != y in S)

with mass D = diag(d_x). Boundary values are fixed at zero, so
uᵀAu / uᵀDu is the Rayleigh quotient ∫(-Δu + Qu)u / ∫u² over S, and the
principal Dirichlet eigenvalue is the smallest generalised eigenvalue of
A u = λ D u.
"""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .config import DEFAULT_TOLERANCES, DENSE_EIGEN_LIMIT, INVERSE_ITERATION_CAP
from .errors import ConvergenceError, PreconditionError
from .exhaustion import ExhaustionReport, Generator, diagnose, exhaustion_regions, potential_on
from .graph import GraphFunction, Region, as_function


@dataclasses.dataclass(frozen=True, eq=False)
class DirichletForm:
    region: Region
    q: np.ndarray
    A: sp.csr_matrix
    mass: np.ndarray
    # interior x boundary coupling, entries +μ_xy
    coupling: sp.csr_matrix

    @property
    def size(self) -> int:
        return len(self.mass)

    def symmetric(self) -> sp.csr_matrix:
        """D^{-1/2} A D^{-1/2}."""
        s = 1.0 / np.sqrt(self.mass)
        return sp.diags(s) @ self.A @ sp.diags(s)

    def interior_values(self, u) -> np.ndarray:
        if isinstance(u, np.ndarray):
            return np.asarray(u, dtype=float)
        region = self.region
        for y in region.boundary & u.domain:
            if u[y] != 0.0:
                raise PreconditionError(f"u must vanish on the boundary; u({y}) = {u[y]}")
        return u.array(region.interior_order)

    def rayleigh(self, u) -> float:
        return rayleigh(self, u)


def assemble(region: Region, Q=None) -> DirichletForm:
    g = region.host
    order = region.interior_order
    pos = region.position
    bpos = {y: j for j, y in enumerate(region.boundary_order)}
    q = as_function(Q, order).array(order)
    rows, cols, vals = [], [], []
    crow, ccol, cval = [], [], []
    mass = region.degrees.copy()
    for i, x in enumerate(order):
        rows.append(i)
        cols.append(i)
        vals.append(mass[i] * (1.0 + q[i]))
        for y, w in zip(g.neighbors(x), g.weights(x)):
            j = pos.get(y)
            if j is not None:
                rows.append(i)
                cols.append(j)
                vals.append(-w)
            else:
                crow.append(i)
                ccol.append(bpos[y])
                cval.append(w)
    n = len(order)
    A = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    C = sp.csr_matrix((cval, (crow, ccol)), shape=(n, len(bpos)))
    return DirichletForm(region, q, A, mass, C)


def rayleigh(form: DirichletForm, u) -> float:
    v = form.interior_values(u)
    den = float(v @ (form.mass * v))
    if den == 0.0:
        raise PreconditionError("u must be nonzero on the interior")
    return float(v @ (form.A @ v)) / den


@dataclasses.dataclass(frozen=True)
class EigenResult:
    """Principal Dirichlet eigenpair.

    ``u`` covers interior and boundary (zero there), normalised to max 1 and
    positive at the smallest interior id.
    """

    value: float
    u: GraphFunction
    residual: float
    positive: bool
    iterations: int
    method: str

    def __iter__(self):
        yield self.value
        yield self.u

    def to_dict(self) -> dict:
        return {
            "lambda1": self.value,
            "residual": self.residual,
            "positive": self.positive,
            "iterations": self.iterations,
            "method": self.method,
        }


def _normalise(v: np.ndarray) -> np.ndarray:
    if v[0] < 0 or (v[0] == 0 and v.sum() < 0):
        v = -v
    return v / np.max(v)


def _dense_smallest(B: np.ndarray) -> tuple[float, np.ndarray]:
    w, V = scipy.linalg.eigh(B, subset_by_index=[0, 0])
    return float(w[0]), V[:, 0]


def _inverse_iteration(B: sp.csr_matrix, start: np.ndarray, tol, cap: int):
    """Smallest eigenpair of a sparse symmetric B by inverse iteration.

    Shift 0 when B is known positive definite, else a Gershgorin lower bound so
    the shifted matrix is positive definite and the iteration targets the
    bottom of the spectrum.
    """
    n = B.shape[0]
    diag = B.diagonal()
    radius = np.asarray(abs(B).sum(axis=1)).ravel() - np.abs(diag)
    gersh = float(np.min(diag - radius))
    shift = 0.0 if gersh >= 0 or tol["definite"] else gersh - 1.0
    lu = spla.splu((B - shift * sp.identity(n, format="csr")).tocsc())
    norm_b = float(abs(B).sum(axis=1).max())
    v = start / np.linalg.norm(start)
    prev = np.inf
    for it in range(1, cap + 1):
        y = lu.solve(v)
        v = y / np.linalg.norm(y)
        Bv = B @ v
        lam = float(v @ Bv)
        if abs(lam - prev) < tol["step"]:
            res = np.linalg.norm(Bv - lam * v, np.inf) / np.max(np.abs(v))
            if res < tol["residual"] * norm_b:
                return lam, v, it
        prev = lam
    raise ConvergenceError(f"inverse iteration did not converge in {cap} iterations")


def lambda1(region: Region, Q=None, method: str = "auto", tol=None, max_iter: int = INVERSE_ITERATION_CAP) -> EigenResult:
    """Principal Dirichlet eigenvalue of -Δ + Q on ``region`` and its eigenfunction.

    ``method="auto"`` solves densely up to ``DENSE_EIGEN_LIMIT`` interior
    vertices and uses inverse iteration above that.
    """
    return principal_eigenpair(assemble(region, Q), method, tol, max_iter)


def principal_eigenpair(form: DirichletForm, method: str = "auto", tol=None, max_iter: int = INVERSE_ITERATION_CAP) -> EigenResult:
    tol = DEFAULT_TOLERANCES if tol is None else tol
    n = form.size
    sqrt_d = np.sqrt(form.mass)
    B = form.symmetric()
    if method == "auto":
        method = "dense" if n <= DENSE_EIGEN_LIMIT else "inverse"
    if method == "dense":
        lam, v = _dense_smallest(B.toarray())
        iterations = 0
    elif method == "inverse":
        # B x = lam x with x = D^{1/2} u; the all-ones u start overlaps the positive eigenvector
        definite = bool(np.all(form.q >= 0))
        lam, v, iterations = _inverse_iteration(
            B.tocsr(), sqrt_d.copy(),
            {"step": tol.rayleigh_step, "residual": tol.eigen_residual, "definite": definite},
            max_iter,
        )
    else:
        raise ValueError("method must be 'auto', 'dense' or 'inverse'")
    u = _normalise(v / sqrt_d)
    norm_a = float(abs(form.A).sum(axis=1).max())
    residual = float(np.max(np.abs(form.A @ u - lam * form.mass * u)))
    region = form.region
    values = dict(zip(region.interior_order, u.tolist()))
    values.update({y: 0.0 for y in region.boundary})
    return EigenResult(
        value=lam,
        u=GraphFunction(values),
        residual=residual / norm_a,
        positive=bool(np.all(u > 0)),
        iterations=iterations,
        method=method,
    )


def lambda1_exhaustion(generator: Generator, x0, radii, Q=None, tol=None) -> ExhaustionReport:
    """λ₁ on the balls B(R) for each radius; the sequence must not increase."""
    tol = DEFAULT_TOLERANCES if tol is None else tol
    host, regions = exhaustion_regions(generator, x0, radii)
    Qh = potential_on(host, Q)
    values, sizes, positive, residuals = [], [], [], []
    for R, region in regions:
        res = lambda1(region, Qh, tol=tol)
        values.append(res.value)
        sizes.append(len(region))
        positive.append(res.positive)
        residuals.append(res.residual)
    radii = [R for R, _ in regions]
    diag = diagnose("lambda1", radii, values, "nonincreasing", tol.monotone)
    return ExhaustionReport(
        quantity="lambda1",
        center=x0,
        radii=radii,
        sequences={"lambda1": diag},
        extra={
            "interior_sizes": sizes,
            "residuals": residuals,
            "ok_positive_eigenfunctions": all(positive),
            "ok_residuals": all(r < tol.eigen_residual for r in residuals),
            "last_value": values[-1],
            "last_gap": diag.last_gap,
        },
    )
