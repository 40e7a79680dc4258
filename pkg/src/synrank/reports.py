"""Run files and evaluation reports on disk.

Run files use the classic six-column whitespace format
``target Q0 candidate rank score method`` with no header, so they stay
interoperable with standard IR evaluation tooling; run metadata (seeds,
parameters) goes to a ``<name>.meta.json`` sidecar instead. Reports are
TSV (with a ``#`` header carrying seeds) and JSON.
"""

from __future__ import annotations

import json
import os
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable

from .errors import ParseError
from .evaluation import EvalReport, RankedList, ReportRow


@contextmanager
def atomic_write(path, mode="w"):
    """Write to a temp file and rename over the target on success."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    encoding = None if "b" in mode else "utf-8"
    with open(tmp, mode, encoding=encoding) as f:
        yield f
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)


def _run_scores(ranked: RankedList) -> list[float]:
    """Numeric scores for a run file: unscorable candidates get synthetic
    scores strictly below the lowest finite score, preserving rank order."""
    finite = [s for s in ranked.scores if s is not None]
    floor = min(finite) if finite else 0.0
    out = []
    absent_seen = 0
    for s in ranked.scores:
        if s is None:
            absent_seen += 1
            out.append(floor - absent_seen)
        else:
            out.append(s)
    return out


def write_run_file(lists: Iterable[RankedList], method: str, path, meta: dict | None = None) -> None:
    with atomic_write(path) as f:
        for ranked in sorted(lists, key=lambda rl: rl.query):
            scores = _run_scores(ranked)
            for rank, (candidate, score) in enumerate(zip(ranked.candidates, scores), start=1):
                f.write(f"{ranked.query} Q0 {candidate} {rank} {score!r} {method}\n")
    if meta is not None:
        with atomic_write(str(path) + ".meta.json") as f:
            json.dump(meta, f, indent=1, sort_keys=True)
            f.write("\n")


def read_run_file(path) -> dict[str, list[tuple[str, float]]]:
    """Target -> [(candidate, score)] in rank order."""
    runs: dict[str, list[tuple[str, float]]] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 6:
                raise ParseError(f"expected 6 whitespace-separated fields, got {len(parts)}", lineno, path)
            target, _, candidate, _, score, _ = parts
            try:
                runs.setdefault(target, []).append((candidate, float(score)))
            except ValueError:
                raise ParseError(f"bad score {score!r}", lineno, path) from None
    return runs


_REPORT_COLUMNS = ("method", "metric", "n", "fold", "feature", "value")


def write_report_tsv(report: EvalReport, path) -> None:
    with atomic_write(path) as f:
        for key in sorted(report.params):
            f.write(f"# {key}={report.params[key]}\n")
        f.write("\t".join(_REPORT_COLUMNS) + "\n")
        for row in report.rows:
            f.write(
                "\t".join(
                    (
                        row.method,
                        row.metric,
                        "" if row.n is None else str(row.n),
                        "" if row.fold is None else str(row.fold),
                        "" if row.feature is None else row.feature,
                        repr(row.value),
                    )
                )
                + "\n"
            )


def write_report_json(report: EvalReport, path) -> None:
    doc = {
        "params": report.params,
        "rows": [
            {
                "method": r.method,
                "metric": r.metric,
                "n": r.n,
                "fold": r.fold,
                "feature": r.feature,
                "value": r.value,
            }
            for r in report.rows
        ],
    }
    with atomic_write(path) as f:
        json.dump(doc, f, indent=1, sort_keys=True)
        f.write("\n")


def read_report_json(path) -> EvalReport:
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    report = EvalReport(params=doc.get("params", {}))
    for r in doc["rows"]:
        report.rows.append(
            ReportRow(r["method"], r["metric"], r["value"], r.get("n"), r.get("fold"), r.get("feature"))
        )
    return report
