"""Editor decision store over immutable rankings.

Rankings come from a run file; accept/reject/pending decisions go to an
append-only JSONL log that is replayed at startup (last writer wins per
pair). Every write carries the store revision: a writer with a stale
revision gets a conflict and must refetch. Appends are flushed and fsynced
before they are acknowledged, so an acknowledged decision survives a crash.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .errors import NotLoaded, ParseError, RevisionConflict, UnknownPair, UnknownTarget
from .reports import read_run_file

DECISIONS = ("accepted", "rejected", "pending")


@dataclass(frozen=True)
class RankingRow:
    candidate: str
    score: float
    rank: int


class CurationStore:
    def __init__(self, log_path, rankings: dict[str, list[tuple[str, float]]] | None = None):
        self.log_path = Path(log_path)
        self._lock = threading.Lock()
        self._loaded = False
        self._rankings: dict[str, list[RankingRow]] = {}
        self._decisions: dict[tuple[str, str], str] = {}
        self.revision = 0
        if rankings is not None:
            self.load_rankings(rankings)
        self._replay_log()

    @classmethod
    def from_run_file(cls, run_path, log_path) -> "CurationStore":
        return cls(log_path, rankings=read_run_file(run_path))

    def load_rankings(self, rankings: dict[str, list[tuple[str, float]]]):
        self._rankings = {
            target: [RankingRow(c, s, rank) for rank, (c, s) in enumerate(rows, start=1)]
            for target, rows in rankings.items()
        }
        self._loaded = True

    def _replay_log(self):
        if not self.log_path.exists():
            return
        with open(self.log_path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    entry = json.loads(line)
                except json.JSONDecodeError:
                    raise ParseError("corrupt decision log line", lineno, self.log_path) from None
                if entry["revision"] <= self.revision:
                    raise ParseError("decision log revisions must increase", lineno, self.log_path)
                self.revision = entry["revision"]
                self._decisions[(entry["target"], entry["candidate"])] = entry["decision"]

    # -- queries ------------------------------------------------------------

    def decision(self, target: str, candidate: str) -> str:
        return self._decisions.get((target, candidate), "pending")

    def list_targets(self) -> list[tuple[str, int, int]]:
        """(target, total candidates, pending count), most pending first."""
        if not self._loaded:
            raise NotLoaded("no rankings loaded")
        out = []
        for target, rows in self._rankings.items():
            pending = sum(1 for r in rows if self.decision(target, r.candidate) == "pending")
            out.append((target, len(rows), pending))
        out.sort(key=lambda t: (-t[2], t[0]))
        return out

    def get_ranking(self, target: str, offset: int = 0, limit: int = 50):
        if not self._loaded:
            raise NotLoaded("no rankings loaded")
        rows = self._rankings.get(target)
        if rows is None:
            raise UnknownTarget(f"no ranking for target {target!r}")
        page = rows[max(offset, 0):max(offset, 0) + max(limit, 0)]
        return len(rows), [
            (r.candidate, r.score, r.rank, self.decision(target, r.candidate)) for r in page
        ]

    # -- writes -------------------------------------------------------------

    def record_decision(self, target: str, candidate: str, decision: str, expected_revision: int) -> int:
        if decision not in DECISIONS:
            raise ValueError(f"decision must be one of {DECISIONS}, got {decision!r}")
        with self._lock:
            rows = self._rankings.get(target)
            if rows is None or all(r.candidate != candidate for r in rows):
                raise UnknownPair(f"({target!r}, {candidate!r}) is not in the rankings")
            if expected_revision != self.revision:
                raise RevisionConflict(expected_revision, self.revision)
            entry = {
                "revision": self.revision + 1,
                "target": target,
                "candidate": candidate,
                "decision": decision,
                "decided_at": datetime.now(timezone.utc).isoformat(),
            }
            self.log_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.log_path, "a", encoding="utf-8") as f:
                f.write(json.dumps(entry, sort_keys=True) + "\n")
                f.flush()
                os.fsync(f.fileno())
            self.revision = entry["revision"]
            self._decisions[(target, candidate)] = decision
            return self.revision

    # -- export -------------------------------------------------------------

    def accepted_pairs(self) -> dict[str, set[str]]:
        accepted: dict[str, set[str]] = {}
        for (target, candidate), decision in self._decisions.items():
            if decision == "accepted":
                accepted.setdefault(target, set()).add(candidate)
        return accepted

    def export_thesaurus(self) -> str:
        """Accepted pairs in the ground-truth TSV format."""
        lines = ["# synrank thesaurus export: accepted (target, synonym) pairs"]
        accepted = self.accepted_pairs()
        for target in sorted(accepted):
            for synonym in sorted(accepted[target]):
                lines.append(f"{target}\t{synonym}")
        return "\n".join(lines) + "\n"
