"""Dirichlet problems for -Δ + Q and the exhaustion constructions built on them."""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.sparse.linalg as spla

from .config import DEFAULT_TOLERANCES, DIRECT_SOLVE_LIMIT
from .errors import ConvergenceError, PositivityError, PreconditionError, SingularSystemError
from .exhaustion import ExhaustionReport, Generator, diagnose, exhaustion_regions, potential_on
from .graph import GraphFunction, Region, as_function
from .operators import OperatorContext, integral, schrodinger_at
from .spectral import DirichletForm, assemble, principal_eigenpair


def factorize(form: DirichletForm, tol=None):
    """Return ``solve(b)`` for the symmetric system A x = b.

    Sparse LU up to ``DIRECT_SOLVE_LIMIT`` unknowns, conjugate gradient above.
    """
    tol = DEFAULT_TOLERANCES if tol is None else tol
    if form.size <= DIRECT_SOLVE_LIMIT:
        lu = spla.splu(form.A.tocsc())
        return lu.solve
    A = form.A

    def cg_solve(b):
        b = np.asarray(b, dtype=float)
        if b.ndim == 2:
            return np.column_stack([cg_solve(b[:, k]) for k in range(b.shape[1])])
        x, info = spla.cg(A, b, rtol=tol.cg, atol=0.0, maxiter=10 * form.size)
        if info != 0:
            raise ConvergenceError(f"conjugate gradient stopped with info={info}")
        return x

    return cg_solve


def ensure_positive_definite(form: DirichletForm, tol=None) -> float | None:
    """Raise unless λ₁ > 0. Skips the eigen-solve when Q >= 0 (always definite then).

    Returns λ₁ when it was computed.
    """
    tol = DEFAULT_TOLERANCES if tol is None else tol
    if np.all(form.q >= 0):
        return None
    lam = principal_eigenpair(form, tol=tol).value
    if lam <= tol.singular:
        raise SingularSystemError(f"lambda1 = {lam:.3e} <= 0: Dirichlet problem is not uniquely solvable")
    return lam


def dirichlet_solve(region: Region, Q=None, f=None, bc=None, tol=None) -> GraphFunction:
    """Solve (-Δ + Q)u = f on the interior with u = bc on the boundary.

    ``Q`` and ``f`` may be None (zero), scalars or functions covering the
    interior; ``bc`` likewise on the boundary. The result covers S ∪ δS.
    """
    tol = DEFAULT_TOLERANCES if tol is None else tol
    form = assemble(region, Q)
    ensure_positive_definite(form, tol)
    return _solve_with(form, f, bc, factorize(form, tol), tol)


def _solve_with(form: DirichletForm, f, bc, solve, tol) -> GraphFunction:
    region = form.region
    fv = as_function(f, region.interior_order).array(region.interior_order)
    bv = as_function(bc, region.boundary_order).array(region.boundary_order)
    rhs = form.mass * fv
    if bv.size:
        rhs = rhs + form.coupling @ bv
    x = solve(rhs)
    values = dict(zip(region.interior_order, x.tolist()))
    values.update(zip(region.boundary_order, bv.tolist()))
    u = GraphFunction(values)
    Qf = GraphFunction(dict(zip(region.interior_order, form.q.tolist())))
    lhs = schrodinger_at(OperatorContext(region.host, Qf), u, region.interior_order)
    scale = (np.max(np.abs(fv)) if fv.size else 0.0) + (np.max(np.abs(bv)) if bv.size else 0.0) + 1.0
    res = float(np.max(np.abs(lhs - fv)))
    if res >= tol.solve_residual * scale:
        raise ConvergenceError(f"Dirichlet residual {res:.3e} exceeds contract")
    return u


@dataclasses.dataclass(frozen=True)
class PoissonSolution:
    """u solving (-Δ + Q)u = f >= 0 with zero boundary data, with the L² bound check."""

    u: GraphFunction
    lambda1: float
    norm_sq: float
    bound: float
    positive: bool
    tolerance: float

    @property
    def slack(self) -> float:
        return self.bound - self.norm_sq

    @property
    def passed(self) -> bool:
        return self.positive and self.norm_sq <= self.bound + self.tolerance * max(1.0, self.bound)


def poisson_solve(region: Region, Q=None, f=None, tol=None) -> PoissonSolution:
    """Solve with f >= 0 nontrivial and check ∫u² <= λ₁⁻² ∫f² (weighted by d_x)."""
    tol = DEFAULT_TOLERANCES if tol is None else tol
    order = region.interior_order
    f = as_function(f, order)
    fv = f.array(order)
    if (fv < 0).any():
        raise PreconditionError("f must be nonnegative")
    if not (fv > 0).any():
        raise PreconditionError("f must be nontrivial")
    form = assemble(region, Q)
    lam = principal_eigenpair(form, tol=tol).value
    if lam <= tol.singular:
        raise SingularSystemError(f"lambda1 = {lam:.3e} <= 0")
    u = _solve_with(form, f, None, factorize(form, tol), tol)
    g = region.host
    norm_sq = integral(g, u.map(lambda t: t * t), order)
    bound = integral(g, f.map(lambda t: t * t), order) / lam**2
    return PoissonSolution(u, lam, norm_sq, bound, bool((u.array(order) > 0).all()), tol.poisson)


def existence_exhaustion(generator: Generator, x0, radii, Q=None, tol=None) -> ExhaustionReport:
    """Positive solutions of (-Δ + Q)u = 0 on growing balls, normalised at x0.

    On each ball solve (-Δ + Q)v = -Q with zero boundary data and take
    u = v + 1, which has boundary value 1. The normalised û = u / u(x0) is
    compared across radii on the interior of the smallest ball.
    """
    tol = DEFAULT_TOLERANCES if tol is None else tol
    host, regions = exhaustion_regions(generator, x0, radii)
    Qh = potential_on(host, Q)
    probe = regions[0][1].interior_order
    profiles, minima, lambdas = [], [], []
    for R, region in regions:
        form = assemble(region, Qh)
        lambdas.append(ensure_positive_definite(form, tol))
        negQ = None if Qh is None else Qh.restrict(region.interior_order).map(lambda t: -t)
        v = _solve_with(form, negQ, None, factorize(form, tol), tol)
        u = v.array(region.interior_order) + 1.0
        if not (u > 0).all():
            raise PositivityError(f"solution on B({R}) is not positive (min {u.min():.3e})")
        minima.append(float(u.min()))
        u_map = dict(zip(region.interior_order, u.tolist()))
        u0 = u_map[x0]
        profiles.append([u_map[x] / u0 for x in probe])
    radii = [R for R, _ in regions]
    sup_diff = [float(np.max(np.abs(np.subtract(b, a)))) for a, b in zip(profiles, profiles[1:])]
    seqs = {"min_u": diagnose("min_u", radii, minima, "nonincreasing", np.inf)}
    if sup_diff:
        seqs["sup_diff"] = diagnose("sup_diff", radii[1:], sup_diff, "nonincreasing", np.inf)
    return ExhaustionReport(
        quantity="existence",
        center=x0,
        radii=radii,
        sequences=seqs,
        extra={
            "probe_vertices": list(probe),
            "profiles": profiles,
            "lambda1": lambdas,
            "ok_positive": True,
        },
    )
