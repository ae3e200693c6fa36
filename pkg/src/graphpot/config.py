"""Default tolerances and resource limits.

Every numeric threshold used by the checks lives here so the CLI can expose
each one as a ``--tol-*`` override.
"""

from __future__ import annotations

import dataclasses
import os

DEFAULT_MAX_VERTICES = 250_000


@dataclasses.dataclass(frozen=True)
class Tolerances:
    # pointwise inequality slack, scaled by (1 + ||u||_inf^2)
    kato: float = 1e-12
    # gradient estimate slack, scaled by u(x)^2
    gradient: float = 1e-9
    # relative slack in sup_S u <= C inf_S u
    harnack: float = 1e-9
    # SolutionPair residual, relative to ||u||_inf
    pair_residual: float = 1e-10
    # eigen-residual ||Au - lam Du|| relative to ||A||_inf
    eigen_residual: float = 1e-10
    # successive Rayleigh values in inverse iteration
    rayleigh_step: float = 1e-12
    # variational lower bound rayleigh(u) >= lambda1
    rayleigh: float = 1e-10
    # monotonicity of exhaustion sequences
    monotone: float = 1e-12
    # Dirichlet solve residual, relative to ||f|| + ||bc|| + 1
    solve_residual: float = 1e-10
    # lambda1 must exceed this for a solve to be accepted
    singular: float = 1e-13
    # conjugate-gradient relative tolerance for large systems
    cg: float = 1e-12
    # (I - P_S) g = I residual
    green_residual: float = 1e-10
    # Neumann series: stop once the estimated remaining tail is below this
    series: float = 1e-14
    # exhaustion classified CONVERGING when extrapolated tail < this * (1 + value)
    converging: float = 1e-3
    # lambda1 * A >= 1 - eigen_bound
    eigen_bound: float = 1e-9
    # u = lambda1 * G u representation residual, relative to ||u||_inf
    representation: float = 1e-8
    # Poisson L2 bound slack, relative
    poisson: float = 1e-9
    # Delta phi <= superharmonic for a certificate
    superharmonic: float = 1e-12


DEFAULT_TOLERANCES = Tolerances()

# Dense eigen-solves up to this interior size; inverse iteration above.
DENSE_EIGEN_LIMIT = 512
# Direct sparse factorisation up to this interior size; conjugate gradient above.
DIRECT_SOLVE_LIMIT = 20_000
# Whole-matrix Neumann series propagation up to this interior size.
SERIES_MATRIX_LIMIT = 2000
INVERSE_ITERATION_CAP = 100_000


def max_vertices() -> int:
    """Vertex cap for generated graphs, read from ``GP_MAX_VERTICES``."""
    raw = os.environ.get("GP_MAX_VERTICES")
    if not raw:
        return DEFAULT_MAX_VERTICES
    return int(raw)
