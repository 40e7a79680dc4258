"""The eight features computed for a (target, candidate) pair.

Feature order is fixed and doubles as the column order of the feature dump:
windows, lev_dist, ngram, pos_ngram, lin_sim, ri_sim, decompound,
embedding_sim. A feature whose backing model or annotation is missing
carries value 0 with its availability flag false; the flag itself is never
part of the learned feature space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import ParseError
from .semantics import (
    EmbeddingTable,
    RandomIndexModel,
    embedding_similarity,
    lin_similarity,
    ri_similarity,
)
from .stats import NgramPositionIndex, StatsIndex, WindowCounts

FEATURE_NAMES = (
    "windows",
    "lev_dist",
    "ngram",
    "pos_ngram",
    "lin_sim",
    "ri_sim",
    "decompound",
    "embedding_sim",
)

_UNIT_RANGE = {0, 2, 3, 4, 6}  # windows, ngram, pos_ngram, lin_sim, decompound
_COSINE_RANGE = {5, 7}  # ri_sim, embedding_sim


@dataclass(frozen=True)
class FeatureVector:
    values: tuple[float, ...]
    available: tuple[bool, ...]

    def __post_init__(self):
        if len(self.values) != len(FEATURE_NAMES) or len(self.available) != len(FEATURE_NAMES):
            raise ValueError(f"expected {len(FEATURE_NAMES)} features")
        for i, (value, avail) in enumerate(zip(self.values, self.available)):
            if not avail and value != 0.0:
                raise ValueError(f"unavailable feature {FEATURE_NAMES[i]} must be 0, got {value}")
            if i in _UNIT_RANGE and not 0.0 <= value <= 1.0:
                raise ValueError(f"{FEATURE_NAMES[i]} out of [0,1]: {value}")
            if i in _COSINE_RANGE and not -1.0 <= value <= 1.0:
                raise ValueError(f"{FEATURE_NAMES[i]} out of [-1,1]: {value}")
            if i == 1 and (value < 0 or value != int(value)):
                raise ValueError(f"lev_dist must be a non-negative integer, got {value}")

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def __getitem__(self, name: str) -> float:
        return self.values[FEATURE_NAMES.index(name)]


@dataclass(frozen=True)
class Decomposition:
    term: str
    components: tuple[str, ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("a decomposition has at least one component")


@dataclass
class FeatureModels:
    """Everything extract_features needs; unset members disable features."""

    stats: StatsIndex | None = None
    ri: RandomIndexModel | None = None
    embeddings: EmbeddingTable | None = None
    decompound_vocab: frozenset[str] | None = None

    def is_empty(self) -> bool:
        return (
            self.stats is None
            and self.ri is None
            and self.embeddings is None
            and self.decompound_vocab is None
        )


def feature_windows(index: WindowCounts, wt: str, wc: str) -> float:
    """Pair window count over the smaller marginal; 0 when either is unseen."""
    ct = index.count(wt)
    cc = index.count(wc)
    if ct == 0 or cc == 0:
        return 0.0
    return index.pair_count(wt, wc) / min(ct, cc)


def feature_lev_dist(wt: str, wc: str) -> int:
    """Unit-cost edit distance over Unicode scalar values."""
    if wt == wc:
        return 0
    prev = list(range(len(wc) + 1))
    for i, a in enumerate(wt, start=1):
        cur = [i]
        for j, b in enumerate(wc, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a != b)))
        prev = cur
    return prev[-1]


def feature_ngram(index: NgramPositionIndex, wt: str, wc: str) -> float:
    """Probability the target fills a slot given the candidate fills it."""
    denom = index.count(wc)
    if denom == 0:
        return 0.0
    return index.pair_count(wt, wc) / denom


def feature_pos_ngram(index: NgramPositionIndex, wt: str, wc: str) -> float:
    return feature_ngram(index, wt, wc)


def decompose(
    vocabulary: Iterable[str],
    term: str,
    min_component_len: int = 2,
    linker: str = "s",
) -> Decomposition:
    """Split a compound into known vocabulary components.

    Runs a greedy longest-match walk from the left and from the right,
    allowing one linker letter between components, and keeps whichever split
    yields more components (ties go to the left walk). The term itself never
    counts as a match, so a compound listed in the vocabulary still splits;
    when neither walk consumes the whole term the term is one component.
    """
    vocab = vocabulary if isinstance(vocabulary, (set, frozenset)) else set(vocabulary)
    left = _greedy_left(term, vocab, min_component_len, linker)
    right = _greedy_right(term, vocab, min_component_len, linker)
    best = None
    for split in (left, right):
        if split is not None and (best is None or len(split) > len(best)):
            best = split
    if best is None:
        best = [term]
    return Decomposition(term, tuple(best))


def _greedy_left(term, vocab, min_len, linker):
    n = len(term)
    parts = []
    pos = 0
    while pos < n:
        longest = n - pos if pos > 0 else n - 1  # never match the whole term
        match = next(
            (L for L in range(longest, min_len - 1, -1) if term[pos:pos + L] in vocab), None
        )
        if match is None and parts and term[pos] == linker:
            match = next(
                (L for L in range(n - pos - 1, min_len - 1, -1) if term[pos + 1:pos + 1 + L] in vocab),
                None,
            )
            if match is not None:
                pos += 1
        if match is None:
            return None
        parts.append(term[pos:pos + match])
        pos += match
    return parts


def _greedy_right(term, vocab, min_len, linker):
    n = len(term)
    parts = []
    end = n
    while end > 0:
        longest = end if end < n else n - 1
        match = next(
            (L for L in range(longest, min_len - 1, -1) if term[end - L:end] in vocab), None
        )
        if match is None and parts and term[end - 1] == linker:
            match = next(
                (L for L in range(end - 1, min_len - 1, -1) if term[end - 1 - L:end - 1] in vocab),
                None,
            )
            if match is not None:
                end -= 1
        if match is None:
            return None
        parts.append(term[end - match:end])
        end -= match
    parts.reverse()
    return parts


def feature_decompound(vocabulary, wt: str, wc: str, min_component_len: int = 2) -> float:
    """Shared components over the smaller component count, set semantics."""
    ct = set(decompose(vocabulary, wt, min_component_len).components)
    cc = set(decompose(vocabulary, wc, min_component_len).components)
    return len(ct & cc) / min(len(ct), len(cc))


def _clamp(value: float, lo: float, hi: float) -> float:
    return min(hi, max(lo, value))


def extract_features(models: FeatureModels, wt: str, wc: str) -> FeatureVector:
    """Compute all eight features; each slot matches its single-feature op."""
    values = [0.0] * len(FEATURE_NAMES)
    avail = [False] * len(FEATURE_NAMES)
    if models.is_empty():
        return FeatureVector(tuple(values), tuple(avail))

    stats = models.stats
    if stats is not None and stats.window.count(wt) > 0 and stats.window.count(wc) > 0:
        values[0] = feature_windows(stats.window, wt, wc)
        avail[0] = True

    values[1] = float(feature_lev_dist(wt, wc))
    avail[1] = True

    if stats is not None:
        values[2] = feature_ngram(stats.ngram, wt, wc)
        avail[2] = True
        if stats.has_pos:
            values[3] = feature_pos_ngram(stats.pos_ngram, wt, wc)
            avail[3] = True
        if stats.has_deps:
            values[4] = _clamp(lin_similarity(stats.dep, wt, wc), 0.0, 1.0)
            avail[4] = True

    if models.ri is not None:
        sim = ri_similarity(models.ri, wt, wc)
        if sim is not None:
            values[5] = _clamp(sim, -1.0, 1.0)
            avail[5] = True

    if models.decompound_vocab is not None:
        values[6] = feature_decompound(models.decompound_vocab, wt, wc)
        avail[6] = True

    if models.embeddings is not None:
        sim = embedding_similarity(models.embeddings, wt, wc)
        if sim is not None:
            values[7] = _clamp(sim, -1.0, 1.0)
            avail[7] = True

    return FeatureVector(tuple(values), tuple(avail))


# ---------------------------------------------------------------------------
# feature dump: the training input for the learning-to-rank models
# ---------------------------------------------------------------------------


def write_feature_dump(rows: Iterable[tuple[str, str, int, FeatureVector]], path) -> None:
    """TSV dump: target, candidate, label, then the eight feature columns."""
    with open(path, "w", encoding="utf-8") as f:
        f.write("target\tcandidate\tlabel\t" + "\t".join(FEATURE_NAMES) + "\n")
        for target, candidate, label, vector in rows:
            cols = [target, candidate, str(int(label))]
            cols.extend(repr(v) for v in vector.values)
            f.write("\t".join(cols) + "\n")


def read_feature_dump(path) -> Iterator[tuple[str, str, int, FeatureVector]]:
    """Read a feature dump; availability flags are not stored and read back
    as all-available (training consumes values only)."""
    with open(path, encoding="utf-8") as f:
        header = f.readline().rstrip("\n").split("\t")
        expected = ["target", "candidate", "label", *FEATURE_NAMES]
        if header != expected:
            raise ParseError(f"unexpected feature dump header {header}", 1, path)
        for lineno, line in enumerate(f, start=2):
            if not line.strip():
                continue
            cols = line.rstrip("\n").split("\t")
            if len(cols) != len(expected):
                raise ParseError(f"expected {len(expected)} columns, got {len(cols)}", lineno, path)
            try:
                label = int(cols[2])
                values = tuple(float(x) for x in cols[3:])
            except ValueError:
                raise ParseError("non-numeric label or feature value", lineno, path) from None
            yield cols[0], cols[1], label, FeatureVector(values, (True,) * len(FEATURE_NAMES))
