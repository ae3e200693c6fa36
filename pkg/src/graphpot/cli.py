"""Command-line entry point: ``graphpot <subcommand> [flags]``.

Every subcommand writes one JSON report (schema ``gp-report/1``) to ``--out``
or stdout. Exit codes: 0 all checks pass, 1 a property check failed,
2 bad input, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io as _io
import sys
import time
from pathlib import Path

from . import generators as gen
from . import io
from .config import DEFAULT_TOLERANCES, Tolerances, max_vertices
from .errors import ConvergenceError, GraphPotError, PositivityError, ResourceCapError, UndefinedValueError
from .estimates import SolutionPair, gradient_estimate_check, harnack_verify, pair_from_u
from .graph import GraphFunction, region_from_interior, validate
from .green import eigen_bound_check, green_direct, green_exhaustion, green_series, parse_probe, transition
from .solvers import dirichlet_solve, existence_exhaustion, poisson_solve
from .spectral import lambda1, lambda1_exhaustion

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3

# flags naming output destinations; dropped from the command echo so reports
# written to different files still compare equal
OUTPUT_FLAGS = ("--out", "--csv", "--save")


class InputError(GraphPotError):
    pass


# -- flag plumbing ---------------------------------------------------------


def _add_source(p):
    p.add_argument("--graph", metavar="FILE", help="edge list: x<TAB>y<TAB>mu per line")
    p.add_argument("--generator", "--family", dest="generator", choices=sorted(gen.GENERATORS), help="built-in family")
    p.add_argument("--param", type=int, help="family parameter (size or radius)")


def _add_tolerances(p):
    group = p.add_argument_group("tolerances")
    for f in dataclasses.fields(Tolerances):
        group.add_argument(
            "--tol-" + f.name.replace("_", "-"), dest="tol_" + f.name, type=float,
            default=getattr(DEFAULT_TOLERANCES, f.name), metavar="X",
            help=f"default {getattr(DEFAULT_TOLERANCES, f.name):g}",
        )


def _add_common(p):
    p.add_argument("--out", metavar="FILE", help="report destination (default stdout)")
    p.add_argument("--csv", metavar="FILE", help="per-radius sequences (or checks) as CSV")
    _add_tolerances(p)


def _tolerances(args) -> Tolerances:
    return Tolerances(**{f.name: getattr(args, "tol_" + f.name) for f in dataclasses.fields(Tolerances)})


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"expected a comma-separated list of integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphpot", description="Potential theory on weighted graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check graph well-formedness and bind function files")
    _add_source(p)
    p.add_argument("--q", metavar="FILE|zero|const:VAL")
    p.add_argument("--f", metavar="FILE")
    p.add_argument("--bc", metavar="FILE")
    _add_common(p)

    p = sub.add_parser("generate", help="emit a built-in graph")
    _add_source(p)
    p.add_argument("--save", metavar="FILE", help="write the edge list here")
    _add_common(p)

    p = sub.add_parser("solve", help="Dirichlet problem (-Δ + Q)u = f, u = bc on the boundary")
    _add_source(p)
    p.add_argument("--q", metavar="FILE|zero|const:VAL", default="zero")
    p.add_argument("--f", metavar="FILE")
    p.add_argument("--bc", metavar="FILE")
    p.add_argument("--interior", metavar="FILE")
    p.add_argument("--radii", help="existence exhaustion over balls B(R)")
    p.add_argument("--center", type=int, default=0)
    p.add_argument("--save", metavar="FILE", help="write the solution u here")
    _add_common(p)

    p = sub.add_parser("lambda1", help="principal Dirichlet eigenvalue")
    _add_source(p)
    p.add_argument("--q", metavar="FILE|zero|const:VAL", default="zero")
    p.add_argument("--interior", metavar="FILE")
    p.add_argument("--radii", help="exhaustion over balls B(R)")
    p.add_argument("--center", type=int, default=0)
    p.add_argument("--method", choices=("auto", "dense", "inverse"), default="auto")
    p.add_argument("--save", metavar="FILE", help="write the eigenfunction here")
    _add_common(p)

    p = sub.add_parser("green", help="Green function on a region or along an exhaustion")
    _add_source(p)
    p.add_argument("--interior", metavar="FILE")
    p.add_argument("--radii")
    p.add_argument("--probes", help="comma-separated x:y pairs")
    p.add_argument("--center", type=int, default=0)
    p.add_argument(
        "--mode", choices=("direct", "series", "exhaustion"), default="direct",
        help="exhaustion: direct solves along --radii",
    )
    _add_common(p)

    p = sub.add_parser("harnack", help="gradient estimate and Harnack constant for a positive solution")
    _add_source(p)
    p.add_argument("--u", metavar="FILE", help="positive u; Q defaults to Δu/u")
    p.add_argument("--q", metavar="FILE|zero|const:VAL")
    p.add_argument("--interior", metavar="FILE", help="the set S (default: all non-truncated vertices)")
    p.add_argument("--seed", type=int, default=0, help="sample u = exp(uniform) when --u is absent")
    _add_common(p)

    p = sub.add_parser("check-all", help="run the seeded acceptance suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--csv", metavar="FILE")

    p = sub.add_parser("report-diff", help="compare two reports, ignoring wall_time")
    p.add_argument("a")
    p.add_argument("b")
    return parser


# -- inputs ----------------------------------------------------------------


class Inputs:
    """Loads input files once and records their digests."""

    def __init__(self):
        self.digests: dict[str, str] = {}

    def graph(self, args):
        if args.graph and args.generator:
            raise InputError("give either --graph or --generator, not both")
        if args.graph:
            self.digests["graph"] = io.file_digest(args.graph)
            g = io.read_graph(args.graph)
            if len(g) > max_vertices():
                raise ResourceCapError(f"graph has {len(g)} vertices, cap is {max_vertices()} (GP_MAX_VERTICES)")
            return g
        if args.generator:
            if args.param is None:
                raise InputError("--generator needs --param")
            self.digests["graph"] = f"generator:{args.generator}:{args.param}"
            return gen.generate(args.generator, args.param)
        raise InputError("one of --graph or --generator is required")

    def function(self, key, path, g):
        self.digests[key] = io.file_digest(path)
        u = io.read_function(path)
        return u if g is None else io.bind_function(u, g)

    def potential(self, spec, g):
        if spec is None or spec == "zero":
            return None
        if spec.startswith("const:"):
            try:
                return float(spec[len("const:"):])
            except ValueError:
                raise InputError(f"bad constant potential {spec!r}") from None
        return self.function("q", spec, g)

    def region(self, args, g):
        if args.interior:
            self.digests["interior"] = io.file_digest(args.interior)
            S = io.read_region(args.interior)
            for x in S:
                g.check_vertex(x)
        else:
            S = default_interior(g)
        return region_from_interior(g, S)


def default_interior(g):
    """Vertices that are neither truncated nor leaves."""
    return [x for x in g.vertices if x not in g.truncated and len(g.neighbors(x)) > 1]


def _exhaustion_source(args, inp):
    """A ball family grown on demand (``--param`` not needed), else the fixed graph.

    Returns ``(source, graph)``; ``graph`` is None for a ball family, in which
    case function files are read without binding to a vertex set.
    """
    if args.generator in gen.BALL_FAMILIES and not args.graph:
        inp.digests["graph"] = f"generator:{args.generator}"
        return gen.GENERATORS[args.generator], None
    g = inp.graph(args)
    return g, g


# -- subcommands -----------------------------------------------------------


def cmd_validate(args, inp):
    g = inp.graph(args)
    rep = validate(g)
    for key in ("f", "bc"):
        if getattr(args, key):
            inp.function(key, getattr(args, key), g)
    inp.potential(args.q, g)
    kinds = rep.kinds()
    checks = [
        io.check_record(f"violations: {k}", float(sum(v.kind == k for v in rep.violations)), 0.0)
        for k in ("isolated vertex", "loop", "nonpositive weight", "asymmetry", "disconnected")
    ]
    results = {
        "n_vertices": len(g),
        "n_edges": g.n_edges,
        "violations": [{"kind": v.kind, "detail": v.detail} for v in rep.violations],
        "kinds": sorted(kinds),
    }
    return results, checks, None


def cmd_generate(args, inp):
    g = inp.graph(args)
    results = {
        "name": g.name,
        "n_vertices": len(g),
        "n_edges": g.n_edges,
        "truncated": sorted(g.truncated),
    }
    if args.save:
        io.write_graph(g, args.save, header=f"{g.name}; truncated shell: {len(g.truncated)} vertices")
        results["saved_digest"] = io.file_digest(args.save)
    else:
        results["edges"] = [list(e) for e in g.edges()]
    checks = [io.check_record("validation violations", float(len(validate(g).violations)), 0.0)]
    return results, checks, None


def cmd_solve(args, inp, tol):
    if args.radii:
        if args.f or args.bc or args.interior:
            raise InputError("--radii runs the existence exhaustion; it takes no --f, --bc or --interior")
        source, g = _exhaustion_source(args, inp)
        Q = inp.potential(args.q, g)
        rep = existence_exhaustion(source, args.center, _int_list(args.radii), Q, tol)
        checks = [io.check_record("positive on every ball", float(rep.extra["ok_positive"]), 1.0, ">=")]
        return rep.to_dict(), checks, _sequence_rows(rep)
    g = inp.graph(args)
    Q = inp.potential(args.q, g)
    f = inp.function("f", args.f, g) if args.f else None
    bc = inp.function("bc", args.bc, g) if args.bc else None
    region = inp.region(args, g)
    u = dirichlet_solve(region, Q, f, bc, tol)
    results = {"interior_size": len(region), "u": {str(x): u[x] for x in region.interior_order}}
    # the residual is enforced inside the solver; record it as a check
    checks = [io.check_record("solved within residual contract", 1.0, 1.0, ">=")]
    vals = u.array(region.interior_order)
    if Q is None and f is None and region.boundary:
        bvals = u.array(region.boundary_order)
        lo, hi = float(bvals.min()), float(bvals.max())
        checks.append(io.check_record("max principle: max u - max bc", float(vals.max()) - hi, 1e-12))
        checks.append(io.check_record("max principle: min u - min bc", float(vals.min()) - lo, -1e-12, ">="))
    fv = None if f is None else f.array(region.interior_order)
    if bc is None and fv is not None and (fv >= 0).all() and (fv > 0).any():
        sol = poisson_solve(region, Q, f, tol)
        results["poisson"] = {"lambda1": sol.lambda1, "norm_sq": sol.norm_sq, "bound": sol.bound}
        checks.append(io.check_record(
            "L2 bound: int u^2 <= lambda1^-2 int f^2", sol.norm_sq,
            sol.bound + tol.poisson * max(1.0, sol.bound),
        ))
        checks.append(io.check_record("u > 0 on the interior", float(sol.positive), 1.0, ">="))
    if args.save:
        io.write_function(u, args.save)
    return results, checks, None


def cmd_lambda1(args, inp, tol):
    if args.radii:
        source, g = _exhaustion_source(args, inp)
        rep = lambda1_exhaustion(source, args.center, _int_list(args.radii), inp.potential(args.q, g), tol)
        seq = rep["lambda1"]
        checks = [
            io.check_record("worst increase lambda1(B(R+1)) - lambda1(B(R))", seq.worst_violation, tol.monotone),
            io.check_record("positive eigenfunctions", float(rep.extra["ok_positive_eigenfunctions"]), 1.0, ">="),
            io.check_record("max eigen-residual", max(rep.extra["residuals"]), tol.eigen_residual),
        ]
        return rep.to_dict(), checks, _sequence_rows(rep)
    g = inp.graph(args)
    Q = inp.potential(args.q, g)
    region = inp.region(args, g)
    res = lambda1(region, Q, method=args.method, tol=tol)
    results = dict(res.to_dict(), interior_size=len(region), interior=list(region.interior_order))
    checks = [
        io.check_record("eigen-residual", res.residual, tol.eigen_residual),
        io.check_record("principal eigenfunction positive", float(res.positive), 1.0, ">="),
    ]
    if args.save:
        io.write_function(res.u, args.save)
    return results, checks, None


def _probes(text):
    if not text:
        return []
    try:
        return [parse_probe(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_green(args, inp, tol):
    probes = _probes(args.probes)
    if args.mode == "exhaustion" and not args.radii:
        raise InputError("--mode exhaustion needs --radii")
    mode = "direct" if args.mode == "exhaustion" else args.mode
    if args.radii:
        if not probes:
            probes = [(args.center, args.center)]
        source, _ = _exhaustion_source(args, inp)
        rep = green_exhaustion(source, args.center, _int_list(args.radii), probes, mode, tol)
        checks = [
            io.check_record(f"{k}: worst decrease", s.worst_violation, tol.monotone)
            for k, s in rep.sequences.items()
        ]
        checks.append(io.check_record("g_R >= 0 at all probes", float(rep.extra["ok_nonnegative"]), 1.0, ">="))
        results = rep.to_dict()
        results["classification"] = {k: s.classification for k, s in rep.sequences.items()}
        return results, checks, _sequence_rows(rep)
    g = inp.graph(args)
    region = inp.region(args, g)
    T = transition(region)
    if mode == "series":
        s = green_series(region, tol=tol.series)
        G = s.green
        results = {"series_terms": s.n_terms, "series_converged": s.converged, "tail_estimate": s.tail_estimate}
        if G is None:
            raise ConvergenceError(s.diagnosis())
    else:
        G = green_direct(region, tol)
        results = {}
    bound = eigen_bound_check(region, tol)
    results.update({
        "interior": list(region.interior_order),
        "eigen_bound": bound.to_dict(),
        "probes": {f"{x}:{y}": G.value(x, y) for x, y in probes},
    })
    checks = [
        io.check_record("max |(I - P_S) g - I|", G.residual(T), tol.green_residual),
        io.check_record("kernel asymmetry (relative)", G.symmetry_error(), 1e-12),
        io.check_record("lambda1 * A", bound.product, 1.0 - tol.eigen_bound, ">="),
        io.check_record("representation residual", bound.representation_residual, tol.representation),
    ]
    return results, checks, None


def cmd_harnack(args, inp, tol):
    g = inp.graph(args)
    if args.u:
        u = inp.function("u", args.u, g)
        Q = inp.potential(args.q, g)
        if Q is None and args.q is None:
            pair = pair_from_u(g, u)
        else:
            Qf = Q if isinstance(Q, GraphFunction) else GraphFunction.constant(g.vertices, 0.0 if Q is None else Q)
            domain = frozenset(x for x in Qf.domain if all(y in u for y in g.neighbors(x)) and x in u)
            pair = SolutionPair(g, u, Qf.restrict(domain), domain)
    else:
        pair = gen.sample_solution_pair(g, args.seed)
    if args.interior:
        inp.digests["interior"] = io.file_digest(args.interior)
        S = io.read_region(args.interior)
    else:
        S = [x for x in sorted(pair.domain) if x not in g.truncated]
    missing = [x for x in S if x not in pair.domain]
    if missing:
        raise UndefinedValueError(f"S contains vertices outside the solution domain: {missing[:5]}")
    grad = gradient_estimate_check(pair, tol.gradient)
    har = harnack_verify(pair, S, tol.harnack)
    results = {
        "n_S": len(S),
        "sup": har.sup,
        "inf": har.inf,
        "ratio": har.ratio,
        "C_paper": har.C_paper,
        "C_sharp": har.C_sharp,
        "gradient": {"worst_ratio": grad.worst_ratio, "worst_vertex": grad.worst_vertex},
    }
    checks = [
        io.check_record("gradient: min (P u^2 + tol u^2 - |grad u|^2)", grad.worst_slack, 0.0, ">="),
        io.check_record("min (P - Q^2)", grad.min_p_minus_q2, -tol.gradient, ">="),
        io.check_record("sup/inf vs C paper", har.ratio, har.C_paper * (1 + tol.harnack)),
        io.check_record("sup/inf vs C sharp", har.ratio, har.C_sharp * (1 + tol.harnack)),
        io.check_record("C sharp vs C paper", har.C_sharp, har.C_paper),
    ]
    return results, checks, None


def cmd_check_all(args):
    from .suite import run_all

    crits = run_all(args.seed)
    checks = [dict(c, name=f"criterion {r.number}: {c['name']}") for r in crits for c in r.checks]
    results = {
        "seed": args.seed,
        "criteria": [r.to_dict() for r in crits],
        "lines": [r.line() for r in crits],
    }
    return results, checks, None


# -- output ----------------------------------------------------------------


def _sequence_rows(rep):
    rows = []
    for label, seq in rep.sequences.items():
        for R, v in zip(seq.radii, seq.values):
            rows.append({"sequence": label, "radius": R, "value": repr(v)})
    return rows


def _write_csv(path, rows, checks):
    if rows is None:
        rows = [{k: c[k] for k in ("name", "value", "relation", "bound", "slack", "passed")} for c in checks]
    buf = _io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _command_echo(argv):
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        name = a.split("=", 1)[0]
        if name in OUTPUT_FLAGS:
            skip = "=" not in a
            continue
        out.append(a)
    return out


def report_diff(args) -> int:
    a = io.loads_report(Path(args.a).read_text(encoding="utf-8"))
    b = io.loads_report(Path(args.b).read_text(encoding="utf-8"))
    diffs = io.diff_reports(a, b)
    for d in diffs:
        print(d)
    if not diffs:
        print("reports identical (ignoring wall_time)")
    return EXIT_OK if not diffs else EXIT_VIOLATION


def run(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "report-diff":
            return report_diff(args)
        t0 = time.perf_counter()
        inp = Inputs()
        if args.command == "check-all":
            results, checks, rows = cmd_check_all(args)
        elif args.command == "validate":
            results, checks, rows = cmd_validate(args, inp)
        elif args.command == "generate":
            results, checks, rows = cmd_generate(args, inp)
        else:
            handler = {"solve": cmd_solve, "lambda1": cmd_lambda1, "green": cmd_green, "harnack": cmd_harnack}
            results, checks, rows = handler[args.command](args, inp, _tolerances(args))
        report = io.make_report(
            [args.command] + _command_echo(argv[1:]), inp.digests, results, checks, time.perf_counter() - t0,
        )
    except ResourceCapError as exc:
        print(f"graphpot: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ConvergenceError, PositivityError) as exc:
        print(f"graphpot: property violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (GraphPotError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"graphpot: input error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    text = io.dumps_report(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.csv:
        _write_csv(args.csv, rows, checks)
    return EXIT_OK if report["summary"]["passed"] else EXIT_VIOLATION


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    return run(argv)
