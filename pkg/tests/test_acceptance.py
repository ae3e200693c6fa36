"""Acceptance gate: every criterion at its stated tolerance, one summary line each."""

import pytest

from graphpot import suite
from graphpot.cli import main
from graphpot.io import check_record, diff_reports, loads_report

SEED = 42


def _gate(result, acceptance_log):
    acceptance_log.append(result.line())
    print(result.line())
    failed = [c for c in result.checks if not c["passed"]]
    assert not failed, "; ".join(f"{c['name']}: {c['value']!r} vs {c['bound']!r}" for c in failed)


@pytest.mark.parametrize("criterion", suite.CRITERIA, ids=lambda f: f.__name__.removeprefix("criterion_"))
def test_criterion(criterion, acceptance_log):
    _gate(criterion(SEED), acceptance_log)


def test_criterion_10_determinism(tmp_path, acceptance_log):
    paths = [tmp_path / "first.json", tmp_path / "second.json"]
    codes = [main(["check-all", "--seed", str(SEED), "--out", str(p)]) for p in paths]
    texts = [p.read_text() for p in paths]
    a, b = (loads_report(t) for t in texts)

    def strip(text):
        return "\n".join(line for line in text.splitlines() if '"wall_time":' not in line)

    identical = strip(texts[0]) == strip(texts[1])
    checks = [
        check_record("check-all exit codes", float(max(codes)), 0.0),
        check_record("byte-identical modulo wall_time", float(identical), 1.0, ">="),
        check_record("report-diff paths", float(len(diff_reports(a, b))), 0.0),
    ]
    _gate(suite.CriterionResult(10, "determinism of check-all reports", checks), acceptance_log)
