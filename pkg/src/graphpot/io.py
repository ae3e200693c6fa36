"""Text formats for graphs, functions and regions, and the JSON report envelope.

Graph file: one undirected edge per line, ``x<TAB>y<TAB>mu``; blank lines and
``#`` comments are ignored. Function file: ``vertex<TAB>value``. Region file:
one interior vertex id per line.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from pathlib import Path
from typing import Any

from .errors import FormatError, UnknownVertexError
from .graph import GraphFunction, WeightedGraph

REPORT_SCHEMA = "gp-report/1"
VOLATILE_FIELDS = ("wall_time",)


def report_schema_version() -> str:
    return REPORT_SCHEMA


def _fields(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        yield lineno, raw, line.strip().split()


def _column(raw: str, k: int) -> int:
    """1-based column where the k-th whitespace-separated field starts."""
    starts = [m.start() + 1 for m in re.finditer(r"\S+", raw)]
    return starts[k] if k < len(starts) else len(raw) + 1


def _int(tok: str, lineno: int, raw: str, k: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise FormatError(f"vertex id {tok!r} is not an integer", lineno, _column(raw, k)) from None
    if v < 0:
        raise FormatError(f"vertex id {v} is negative", lineno, _column(raw, k))
    return v


def _float(tok: str, lineno: int, raw: str, k: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise FormatError(f"value {tok!r} is not a number", lineno, _column(raw, k)) from None
    if not math.isfinite(v):
        raise FormatError(f"value {tok!r} is not finite", lineno, _column(raw, k))
    return v


def parse_graph(text: str, name: str = "") -> WeightedGraph:
    """Parse the edge-list format; duplicates, loops and nonpositive weights are errors."""
    edges = []
    seen: dict[frozenset, int] = {}
    for lineno, raw, parts in _fields(text):
        if len(parts) != 3:
            raise FormatError(f"expected 3 fields 'x y mu', got {len(parts)}", lineno, 1)
        x = _int(parts[0], lineno, raw, 0)
        y = _int(parts[1], lineno, raw, 1)
        mu = _float(parts[2], lineno, raw, 2)
        if x == y:
            raise FormatError(f"loop at vertex {x}", lineno, 1)
        if mu <= 0:
            raise FormatError(f"nonpositive weight {mu!r}", lineno, _column(raw, 2))
        key = frozenset((x, y))
        if key in seen:
            raise FormatError(f"duplicate edge ({x}, {y}); first listed on line {seen[key]}", lineno, 1)
        seen[key] = lineno
        edges.append((x, y, mu))
    if not edges:
        raise FormatError("graph file has no edges")
    return WeightedGraph.from_edges(edges, name=name)


def format_graph(g: WeightedGraph, header: str | None = None) -> str:
    lines = [f"# {header}"] if header else []
    lines.extend(f"{x}\t{y}\t{mu!r}" for x, y, mu in g.edges())
    return "\n".join(lines) + "\n"


def parse_function(text: str) -> GraphFunction:
    values: dict[int, float] = {}
    for lineno, raw, parts in _fields(text):
        if len(parts) != 2:
            raise FormatError(f"expected 2 fields 'vertex value', got {len(parts)}", lineno, 1)
        x = _int(parts[0], lineno, raw, 0)
        if x in values:
            raise FormatError(f"vertex {x} listed twice", lineno, 1)
        values[x] = _float(parts[1], lineno, raw, 1)
    return GraphFunction(values)


def format_function(u: GraphFunction) -> str:
    return "".join(f"{x}\t{u[x]!r}\n" for x in u)


def parse_region(text: str) -> list[int]:
    out = []
    for lineno, raw, parts in _fields(text):
        if len(parts) != 1:
            raise FormatError("expected one vertex id per line", lineno, 1)
        out.append(_int(parts[0], lineno, raw, 0))
    return out


def bind_function(u: GraphFunction, g: WeightedGraph) -> GraphFunction:
    """Reject functions that mention vertices absent from ``g``."""
    for x in u:
        if x not in g:
            raise UnknownVertexError(x)
    return u


def read_graph(path) -> WeightedGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"), name=Path(path).name)


def read_function(path) -> GraphFunction:
    return parse_function(Path(path).read_text(encoding="utf-8"))


def read_region(path) -> list[int]:
    return parse_region(Path(path).read_text(encoding="utf-8"))


def write_graph(g: WeightedGraph, path, header: str | None = None) -> None:
    Path(path).write_text(format_graph(g, header), encoding="utf-8")


def write_function(u: GraphFunction, path) -> None:
    Path(path).write_text(format_function(u), encoding="utf-8")


def file_digest(path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


# -- reports ---------------------------------------------------------------


def check_record(name: str, value: float, bound: float, relation: str = "<=", passed: bool | None = None) -> dict:
    """A numeric assertion ``value <relation> bound`` with its slack.

    Slack is positive when the assertion holds with room to spare.
    """
    if relation == "<=":
        slack = bound - value
    elif relation == ">=":
        slack = value - bound
    else:
        raise ValueError("relation must be '<=' or '>='")
    if passed is None:
        passed = slack >= 0
    return {"name": name, "value": value, "relation": relation, "bound": bound, "slack": slack, "passed": bool(passed)}


def _clean(obj: Any) -> Any:
    """JSON-safe copy: non-finite floats become strings, tuples become lists."""
    if isinstance(obj, float):
        if math.isfinite(obj):
            return obj
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):
        return _clean(obj.item())
    return obj


def make_report(command: list[str], inputs: dict[str, str], results: Any, checks: list[dict], wall_time: float) -> dict:
    n_failed = sum(not c["passed"] for c in checks)
    return _clean({
        "schema": REPORT_SCHEMA,
        "command": list(command),
        "inputs": dict(sorted(inputs.items())),
        "results": results,
        "checks": checks,
        "summary": {"passed": n_failed == 0, "n_checks": len(checks), "n_failed": n_failed},
        "wall_time": wall_time,
    })


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def loads_report(text: str) -> dict:
    try:
        report = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"report is not JSON: {exc.msg}", exc.lineno, exc.colno) from None
    tag = report.get("schema") if isinstance(report, dict) else None
    if tag != REPORT_SCHEMA:
        raise FormatError(f"unknown report schema {tag!r}; expected {REPORT_SCHEMA!r}")
    return report


def diff_reports(a: dict, b: dict, ignore=VOLATILE_FIELDS) -> list[str]:
    """Paths at which two reports differ, ignoring volatile top-level fields."""
    out: list[str] = []

    def walk(x, y, where):
        if isinstance(x, dict) and isinstance(y, dict):
            for k in sorted(set(x) | set(y)):
                if not where and k in ignore:
                    continue
                if k not in x or k not in y:
                    out.append(f"{where}/{k}")
                else:
                    walk(x[k], y[k], f"{where}/{k}")
        elif isinstance(x, list) and isinstance(y, list):
            if len(x) != len(y):
                out.append(f"{where} (length {len(x)} != {len(y)})")
            for i, (p, q) in enumerate(zip(x, y)):
                walk(p, q, f"{where}/{i}")
        elif x != y or type(x) is not type(y):
            out.append(where or "/")

    walk(a, b, "")
    return out
