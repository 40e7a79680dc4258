"""Synonym-candidate filtering and negative sampling.

Candidates are corpus terms that pass three frequency filters: a raw
term-frequency floor, a domain-over-background ratio, and a noun-tag ratio.
All thresholds are inclusive. Web-source occurrences count toward raw
frequency and the noun ratio but not toward the domain/background ratio.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import ParseError
from .stats import TermStats

# target term -> its true synonyms; terms normalized like corpus lemmas
GroundTruth = dict[str, set[str]]


@dataclass(frozen=True)
class FilterConfig:
    min_tf: int = 300
    min_domain_ratio: float = 30.0
    min_noun_ratio: float = 0.5

    def __post_init__(self):
        if self.min_tf < 0 or self.min_domain_ratio < 0 or self.min_noun_ratio < 0:
            raise ValueError("filter thresholds must be >= 0")


def term_passes(stats: TermStats, cfg: FilterConfig) -> bool:
    if stats.tf < cfg.min_tf or stats.tf == 0:
        return False
    if stats.background_tf == 0:
        # the ratio is undefined at 0; a term never seen in the background
        # corpus passes if it occurs in-domain at all
        if stats.domain_tf <= 0:
            return False
    elif stats.domain_tf < cfg.min_domain_ratio * stats.background_tf:
        return False
    return stats.noun_count / stats.tf >= cfg.min_noun_ratio


def filter_candidates(vocab: dict[str, TermStats], cfg: FilterConfig) -> set[str]:
    return {term for term, stats in vocab.items() if term_passes(stats, cfg)}


def sample_negatives(
    pool: set[str], truth: GroundTruth, target: str, n: int, seed: int
) -> list[str]:
    """Sample up to ``n`` pool terms uniformly without replacement, never
    returning the target or any of its true synonyms. Deterministic."""
    if not pool:
        raise ValueError("candidate pool is empty")
    excluded = truth.get(target, set()) | {target}
    eligible = sorted(t for t in pool if t not in excluded)
    rng = random.Random(seed)
    return rng.sample(eligible, min(n, len(eligible)))


def normalize_term(term: str) -> str:
    return "_".join(term.strip().lower().split())


def load_ground_truth(path) -> GroundTruth:
    """Read ``target<TAB>synonym`` pairs; ``#`` starts a comment line."""
    truth: GroundTruth = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(f"expected 'target<TAB>synonym', got {line!r}", lineno, path)
            target = normalize_term(parts[0])
            synonym = normalize_term(parts[1])
            if not target or not synonym:
                raise ParseError("empty target or synonym", lineno, path)
            if target == synonym:
                raise ParseError(f"{target!r} listed as its own synonym", lineno, path)
            truth.setdefault(target, set()).add(synonym)
    return truth


def save_ground_truth(truth: GroundTruth, path, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as f:
        if header:
            for line in header.splitlines():
                f.write(f"# {line}\n")
        for target in sorted(truth):
            for synonym in sorted(truth[target]):
                f.write(f"{target}\t{synonym}\n")
