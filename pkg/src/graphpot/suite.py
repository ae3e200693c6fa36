"""Seeded property suites and closed-form oracles behind ``check-all``.

Each ``criterion_*`` function runs one acceptance criterion and returns a
:class:`CriterionResult` whose checks are ``(value, bound, slack)`` records.
All randomness is drawn from :class:`~graphpot.generators.SplitMix64` streams
derived from the seed, so results are reproducible bit for bit.
"""

from __future__ import annotations

import dataclasses
import math
from functools import partial

import numpy as np

from . import generators as gen
from .estimates import gradient_estimate_check, harnack_constant, harnack_verify, p_bound_at, pair_from_u
from .green import eigen_bound_check, green_direct, green_exhaustion, green_series, transition
from .graph import GraphFunction, region_from_interior
from .io import check_record
from .operators import kato_check, lemma2_check
from .solvers import dirichlet_solve, existence_exhaustion, poisson_solve
from .spectral import lambda1, lambda1_exhaustion

TREE_FLOOR = 1.0 - 2.0 * math.sqrt(2.0) / 3.0


@dataclasses.dataclass
class CriterionResult:
    number: int
    title: str
    checks: list[dict]
    details: dict = dataclasses.field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def line(self) -> str:
        ok = sum(c["passed"] for c in self.checks)
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.title} ({ok}/{len(self.checks)} checks)"

    def to_dict(self) -> dict:
        return {
            "number": self.number,
            "title": self.title,
            "passed": self.passed,
            "checks": self.checks,
            "details": self.details,
        }


def _stream(seed: int, salt: int) -> gen.SplitMix64:
    return gen.SplitMix64(gen.SplitMix64(seed ^ (salt * 0x9E3779B97F4A7C15)).next_u64())


def _random_regions(seed: int, count: int, salt: int):
    rng = _stream(seed, salt)
    out = []
    for _ in range(count):
        g = gen.random_graph(rng, 60)
        out.append(gen.random_region(rng, g))
    return out, rng


def solution_pairs(seed: int, count: int = 500):
    """Mixed-fixture SolutionPairs with their random Harnack sets."""
    rng = _stream(seed, 2)
    out = []
    for _ in range(count):
        g = gen.random_graph(rng, 60)
        pair = gen.sample_solution_pair(g, rng.next_u64())
        k = rng.integer(1, min(8, len(g)))
        S = rng.sample(g.vertices, k)
        out.append((pair, S))
    return out


# -- 1 ---------------------------------------------------------------------


def criterion_kato(seed: int, count: int = 1000) -> CriterionResult:
    rng = _stream(seed, 1)
    worst_kato = math.inf
    worst_cond = math.inf
    worst_resid = 0.0
    failures = 0
    for _ in range(count):
        g = gen.random_graph(rng, 60)
        u = gen.random_function(rng, g.vertices)
        scale = 1.0 + u.sup_norm() ** 2
        k = kato_check(g, u)
        l2 = lemma2_check(g, u)
        failures += (not k.passed) + (not l2.passed)
        worst_kato = min(worst_kato, k.worst_slack / scale)
        worst_cond = min(worst_cond, l2.conditional.worst_slack / scale)
        worst_resid = max(worst_resid, l2.max_residual / scale)
    checks = [
        check_record("kato worst slack / (1+|u|^2)", worst_kato, -1e-12, ">="),
        check_record("product rule max residual / (1+|u|^2)", worst_resid, 1e-12, "<=", worst_resid < 1e-12),
        check_record("product rule conditional slack / (1+|u|^2)", worst_cond, -1e-12, ">="),
        check_record("instances failing", float(failures), 0.0, "<="),
    ]
    return CriterionResult(1, "Kato inequalities and product rule", checks, {"instances": count})


# -- 2, 3 ------------------------------------------------------------------


def criterion_gradient(seed: int, count: int = 500) -> CriterionResult:
    worst_ratio = 0.0
    worst_slack = math.inf
    worst_pq = math.inf
    for pair, _ in solution_pairs(seed, count):
        rep = gradient_estimate_check(pair)
        worst_ratio = max(worst_ratio, rep.worst_ratio)
        u = pair.u.array(sorted(pair.domain))
        xs = sorted(pair.domain)
        q = pair.Q.array(xs)
        P = p_bound_at(pair.graph, pair.Q, xs)
        worst_pq = min(worst_pq, float(np.min((P - q * q) / (1.0 + q * q))))
        worst_slack = min(worst_slack, float(np.min(rep.worst_slack / (u * u).max())))
    checks = [
        check_record("max |grad u|^2 / (P u^2)", worst_ratio, 1.0 + 1e-9),
        check_record("min (P u^2 + 1e-9 u^2 - |grad u|^2) / max u^2", worst_slack, 0.0, ">="),
        check_record("min (P - Q^2) / (1 + Q^2)", worst_pq, -1e-12, ">="),
    ]
    return CriterionResult(2, "gradient estimate |grad u|^2 <= P u^2", checks, {"pairs": count})


def criterion_harnack(seed: int, count: int = 500) -> CriterionResult:
    worst_paper = 0.0
    worst_sharp = 0.0
    worst_order = 0.0
    for pair, S in solution_pairs(seed, count):
        rep = harnack_verify(pair, S)
        worst_paper = max(worst_paper, rep.ratio / rep.C_paper)
        worst_sharp = max(worst_sharp, rep.ratio / rep.C_sharp)
        worst_order = max(worst_order, rep.C_sharp / rep.C_paper)
    P3 = gen.path(3)
    fixture = pair_from_u(P3, GraphFunction({0: 1.0, 1: 2.0, 2: 1.0}))
    c_paper = harnack_constant(P3, fixture.Q, [0, 1], "paper")
    c_sharp = harnack_constant(P3, fixture.Q, [0, 1], "sharp")
    ratio = harnack_verify(fixture, [0, 1]).ratio
    checks = [
        check_record("max (sup/inf) / C_paper", worst_paper, 1.0 + 1e-9),
        check_record("max (sup/inf) / C_sharp", worst_sharp, 1.0 + 1e-9),
        check_record("max C_sharp / C_paper", worst_order, 1.0),
        check_record("P3 fixture |C_paper - 2|", abs(c_paper - 2.0), 1e-12),
        check_record("P3 fixture |C_sharp - 2|", abs(c_sharp - 2.0), 1e-12),
        check_record("P3 fixture |sup/inf - C|", abs(ratio - c_paper), 1e-12),
    ]
    return CriterionResult(3, "Harnack sup_S u <= C(S) inf_S u", checks, {"pairs": count})


# -- 4 ---------------------------------------------------------------------


def path_oracle(n: int) -> float:
    """Smallest eigenvalue of I - P_S on n interior path vertices, by dense eigensolve."""
    M = np.eye(n) - 0.5 * (np.eye(n, k=1) + np.eye(n, k=-1))
    return float(np.linalg.eigvalsh(M)[0])


def criterion_lambda1(seed: int) -> CriterionResult:
    err_closed = 0.0
    err_oracle = 0.0
    for n in range(1, 51):
        region = region_from_interior(gen.path(n + 2), range(1, n + 1))
        lam = lambda1(region).value
        err_closed = max(err_closed, abs(lam - (1.0 - math.cos(math.pi / (n + 1)))))
        err_oracle = max(err_oracle, abs(lam - path_oracle(n)))
    z1 = lambda1_exhaustion(partial(gen.lattice_ball, 1), 0, range(2, 21))
    z2 = lambda1_exhaustion(partial(gen.lattice_ball, 2), 0, range(2, 13))
    t3 = lambda1_exhaustion(partial(gen.regular_tree_ball, 3), 0, range(2, 11))
    z1_closed = max(
        abs(v - (1.0 - math.cos(math.pi / (2 * R))))
        for R, v in zip(z1.radii, z1["lambda1"].values)
    )
    floor_slack = min(v - TREE_FLOOR for v in t3["lambda1"].values)
    checks = [
        check_record("path max |lambda1 - (1 - cos(pi/(n+1)))|", err_closed, 1e-9),
        check_record("path max |lambda1 - dense oracle|", err_oracle, 1e-9),
        check_record("Z1 max |lambda1(B(R)) - (1 - cos(pi/2R))|", z1_closed, 1e-9),
        check_record("Z1 worst increase", z1["lambda1"].worst_violation, 1e-12),
        check_record("Z2 worst increase", z2["lambda1"].worst_violation, 1e-12),
        check_record("T3 worst increase", t3["lambda1"].worst_violation, 1e-12),
        check_record("T3 min (lambda1 - tree floor)", floor_slack, -1e-12, ">="),
        check_record(
            "positive eigenfunctions",
            float(all(r.extra["ok_positive_eigenfunctions"] for r in (z1, z2, t3))), 1.0, ">=",
        ),
    ]
    details = {
        "Z1": z1["lambda1"].values,
        "Z2": z2["lambda1"].values,
        "T3": t3["lambda1"].values,
        "tree_floor": TREE_FLOOR,
    }
    return CriterionResult(4, "Dirichlet eigenvalue oracles and exhaustion monotonicity", checks, details)


# -- 5 ---------------------------------------------------------------------


def criterion_green(seed: int, count: int = 100) -> CriterionResult:
    P4 = region_from_interior(gen.path(4), [1, 2])
    expected = np.array([[4.0, 2.0], [2.0, 4.0]]) / 3.0
    p4_err = float(np.max(np.abs(green_direct(P4).g - expected)))
    p4_series = float(np.max(np.abs(green_series(P4).partial - expected)))
    regions, _ = _random_regions(seed, count, 5)
    agree = sym = sym_abs = res_direct = res_series = 0.0
    unconverged = 0
    for region in regions:
        T = transition(region)
        G = green_direct(region)
        s = green_series(region)
        unconverged += not s.converged
        agree = max(agree, float(np.max(np.abs(G.g - s.partial))))
        sym = max(sym, G.symmetry_error())
        K = G.kernel
        sym_abs = max(sym_abs, float(np.max(np.abs(K - K.T))))
        res_direct = max(res_direct, G.residual(T))
        res_series = max(res_series, float(np.max(np.abs(s.partial - T.P @ s.partial - np.eye(len(region))))))
    checks = [
        check_record("P4 max |g - [[4/3,2/3],[2/3,4/3]]| (direct)", p4_err, 1e-12),
        check_record("P4 max |g - [[4/3,2/3],[2/3,4/3]]| (series)", p4_series, 1e-12),
        check_record("max |series - direct|", agree, 1e-10),
        check_record("max kernel asymmetry (relative)", sym, 1e-12),
        check_record("max kernel asymmetry (absolute)", sym_abs, 1e-12),
        check_record("max |(I - P_S) g - I| direct", res_direct, 1e-10),
        check_record("max |(I - P_S) g - I| series", res_series, 1e-10),
        check_record("unconverged series", float(unconverged), 0.0),
    ]
    return CriterionResult(5, "Green matrix oracle, series vs direct", checks, {"regions": count})


# -- 6 ---------------------------------------------------------------------


def criterion_exhaustion(seed: int) -> CriterionResult:
    z1 = green_exhaustion(partial(gen.lattice_ball, 1), 0, range(1, 101), [(0, 0)])
    z1_off = green_exhaustion(partial(gen.lattice_ball, 1), 0, range(2, 101), [(1, 2), (0, 1)])
    t3 = green_exhaustion(partial(gen.regular_tree_ball, 3), 0, range(4, 13), [(0, 0), (1, 2), (0, 4)])
    z3 = green_exhaustion(partial(gen.lattice_ball, 3), 0, range(4, 11), [(0, 0), (1, 2), (0, 3)])
    z1_00 = z1["0:0"]
    t3_00 = t3["0:0"]
    z3_00 = z3["0:0"]
    z1_err = max(abs(v - R) for R, v in zip(z1_00.radii, z1_00.values))
    gaps = z3_00.gaps
    shrink = max(b - a for a, b in zip(gaps, gaps[1:]))
    worst_mono = max(s.worst_violation for rep in (z1, z1_off, t3, z3) for s in rep.sequences.values())
    min_value = min(v for rep in (z1, z1_off, t3, z3) for s in rep.sequences.values() for v in s.values)
    checks = [
        check_record("Z1 max |g_R(0,0) - R|", z1_err, 1e-9),
        check_record("Z1 classified GROWING", float(z1_00.classification == "GROWING"), 1.0, ">="),
        check_record("T3 |g_12(root,root) - 2|", abs(t3_00.values[-1] - 2.0), 1e-2),
        check_record("T3 classified CONVERGING", float(t3_00.classification == "CONVERGING"), 1.0, ">="),
        check_record("Z3 g_10(0,0) >= 1.40", z3_00.values[-1], 1.40, ">="),
        check_record("Z3 g_10(0,0) <= 1.52", z3_00.values[-1], 1.52),
        check_record("Z3 max (gap_{k+1} - gap_k)", shrink, 0.0),
        check_record("Z3 min gap", min(gaps), 0.0, ">="),
        check_record("all probes worst decrease", worst_mono, 1e-12),
        check_record("all probes min g_R", min_value, 0.0, ">="),
    ]
    details = {
        "Z1": z1.to_dict(),
        "T3": t3.to_dict(),
        "Z3": z3.to_dict(),
    }
    return CriterionResult(6, "Green exhaustion: recurrence vs transience", checks, details)


# -- 7 ---------------------------------------------------------------------


def criterion_eigen_bound(seed: int, count: int = 100) -> CriterionResult:
    p3 = eigen_bound_check(region_from_interior(gen.path(3), [1]))
    p4 = eigen_bound_check(region_from_interior(gen.path(4), [1, 2]))
    regions, _ = _random_regions(seed, count, 7)
    reports = [p3, p4] + [eigen_bound_check(r) for r in regions]
    worst_product = min(r.product for r in reports)
    worst_rep = max(r.representation_residual for r in reports)
    checks = [
        check_record("min lambda1 * A", worst_product, 1.0 - 1e-9, ">="),
        check_record("P4 |lambda1 * A - 1|", abs(p4.product - 1.0), 1e-12),
        check_record("P3 |lambda1 * A - 1|", abs(p3.product - 1.0), 1e-12),
        check_record("max representation residual", worst_rep, 1e-8),
    ]
    return CriterionResult(7, "lambda1 >= 1/A from the Green function", checks, {"regions": count})


# -- 8 ---------------------------------------------------------------------


def criterion_poisson(seed: int, count: int = 500) -> CriterionResult:
    p4 = poisson_solve(region_from_interior(gen.path(4), [1, 2]), None, 1.0)
    rng = _stream(seed, 8)
    worst = math.inf
    nonpositive = 0
    for _ in range(count):
        g = gen.random_graph(rng, 60)
        region = gen.random_region(rng, g)
        order = region.interior_order
        f = {x: (0.0 if rng.random() < 0.3 else rng.uniform(0.0, 2.0)) for x in order}
        if not any(f.values()):
            f[order[0]] = 1.0
        Q = None if rng.below(3) else {x: rng.uniform(0.0, 1.0) for x in order}
        sol = poisson_solve(region, Q, f)
        nonpositive += not sol.positive
        worst = min(worst, sol.bound + 1e-9 - sol.norm_sq)
    checks = [
        check_record("min (bound + 1e-9 - int u^2)", worst, 0.0, ">="),
        check_record("P4 |int u^2 - bound|", abs(p4.norm_sq - p4.bound), 1e-12),
        check_record("non-positive solutions", float(nonpositive), 0.0),
    ]
    return CriterionResult(8, "Poisson L2 bound int u^2 <= lambda1^-2 int f^2", checks, {"instances": count})


# -- 9 ---------------------------------------------------------------------


def criterion_solvers(seed: int, count: int = 500) -> CriterionResult:
    regions, rng = _random_regions(seed, 100, 9)
    worst_green = 0.0
    for region in regions:
        order = region.interior_order
        f = {x: rng.uniform(-1.0, 1.0) for x in order}
        u = dirichlet_solve(region, None, f, None)
        Gf = green_direct(region).apply(GraphFunction(f))
        worst_green = max(worst_green, float(np.max(np.abs(u.array(order) - Gf))))
    above = -math.inf
    strict = 0
    for _ in range(count):
        g = gen.random_graph(rng, 60)
        region = gen.random_region(rng, g)
        bc = {y: rng.uniform(-1.0, 1.0) for y in region.boundary_order}
        u = dirichlet_solve(region, None, None, bc).array(region.interior_order)
        lo, hi = min(bc.values()), max(bc.values())
        above = max(above, float(np.max(u - hi)), float(np.max(lo - u)))
        if hi > lo and not ((u < hi).all() and (u > lo).all()):
            strict += 1
    ex = [
        existence_exhaustion(partial(gen.lattice_ball, 2), 0, range(2, 9)),
        existence_exhaustion(partial(gen.regular_tree_ball, 3), 0, range(2, 9)),
    ]
    dev = max(abs(v - 1.0) for rep in ex for prof in rep.extra["profiles"] for v in prof)
    checks = [
        check_record("max |dirichlet_solve - G_S f|", worst_green, 1e-10),
        check_record("max excursion outside [min bc, max bc]", above, 1e-12),
        check_record("non-strict maximum principle cases", float(strict), 0.0),
        check_record("existence with Q=0: max |u_hat - 1|", dev, 2.0**-52),
    ]
    return CriterionResult(9, "solver cross-checks and maximum principle", checks, {"harmonic_extensions": count})


CRITERIA = (
    criterion_kato,
    criterion_gradient,
    criterion_harnack,
    criterion_lambda1,
    criterion_green,
    criterion_exhaustion,
    criterion_eigen_bound,
    criterion_poisson,
    criterion_solvers,
)


def run_all(seed: int = 42) -> list[CriterionResult]:
    return [crit(seed) for crit in CRITERIA]
