"""Count structures over a corpus: the inputs to every feature and baseline.

One pass over the documents builds, per term: raw/noun/source frequencies,
sliding-window marginal and pair counts, lexical and POS trigram position
indexes, and dependency-context feature counts. Partial indexes built over
disjoint document shards merge into the same result as a single build.
"""

from __future__ import annotations

import struct
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .corpus import Document, windows
from .errors import EmptyCorpus, FormatVersionMismatch, IncompatibleIndexes

MAGIC = b"SRIX"
FORMAT_VERSION = 1


@dataclass
class TermStats:
    tf: int = 0
    noun_count: int = 0
    domain_tf: int = 0
    background_tf: int = 0


class WindowCounts:
    """Windows seen, per-term window counts, and unordered-pair counts.

    A window containing a term twice still counts once for that term, and a
    pair is counted once per window containing both members. Pair keys are
    stored with the lexicographically smaller term first.
    """

    def __init__(self):
        self.total_windows = 0
        self.term_counts: dict[str, int] = {}
        self.pair_counts: dict[tuple[str, str], int] = {}

    def count(self, term: str) -> int:
        return self.term_counts.get(term, 0)

    def pair_count(self, a: str, b: str) -> int:
        if a > b:
            a, b = b, a
        return self.pair_counts.get((a, b), 0)

    def add_window(self, terms: Iterable[str]):
        self.total_windows += 1
        distinct = sorted(set(terms))
        for i, a in enumerate(distinct):
            self.term_counts[a] = self.term_counts.get(a, 0) + 1
            for b in distinct[i + 1:]:
                key = (a, b)
                self.pair_counts[key] = self.pair_counts.get(key, 0) + 1

    def merge(self, other: "WindowCounts"):
        self.total_windows += other.total_windows
        for term, n in other.term_counts.items():
            self.term_counts[term] = self.term_counts.get(term, 0) + n
        for key, n in other.pair_counts.items():
            self.pair_counts[key] = self.pair_counts.get(key, 0) + n

    def __eq__(self, other):
        return (
            isinstance(other, WindowCounts)
            and self.total_windows == other.total_windows
            and self.term_counts == other.term_counts
            and self.pair_counts == other.pair_counts
        )


class NgramPositionIndex:
    """Unique (context, hole) slots of corpus trigrams and their fillers.

    A slot is identified by the hole position and the two remaining context
    items; repeated identical trigrams occupy the same slot and count once.
    ``count(x)`` is the number of slots x fills and ``pair_count(x, y)`` the
    number of slots both fill (symmetric).
    """

    def __init__(self):
        self.slots: dict[tuple[int, str, str], set[str]] = {}
        self._term_slots: dict[str, set[tuple[int, str, str]]] | None = None

    def add_trigram(self, items: tuple[str, str, str], filler_terms: tuple[str, str, str]):
        """Index one trigram: ``items`` form the contexts (lemmas, or POS tags
        for the POS variant) while ``filler_terms`` are the terms occupying
        each position."""
        for hole in range(3):
            context = items[:hole] + items[hole + 1:]
            key = (hole, context[0], context[1])
            self.slots.setdefault(key, set()).add(filler_terms[hole])
        self._term_slots = None

    def _slots_by_term(self) -> dict[str, set]:
        if self._term_slots is None:
            by_term: dict[str, set] = {}
            for key, fillers in self.slots.items():
                for term in fillers:
                    by_term.setdefault(term, set()).add(key)
            self._term_slots = by_term
        return self._term_slots

    def count(self, term: str) -> int:
        return len(self._slots_by_term().get(term, ()))

    def pair_count(self, a: str, b: str) -> int:
        by_term = self._slots_by_term()
        sa = by_term.get(a)
        sb = by_term.get(b)
        if not sa or not sb:
            return 0
        if len(sa) > len(sb):
            sa, sb = sb, sa
        return sum(1 for key in sa if key in sb)

    def merge(self, other: "NgramPositionIndex"):
        for key, fillers in other.slots.items():
            self.slots.setdefault(key, set()).update(fillers)
        self._term_slots = None

    def __eq__(self, other):
        return isinstance(other, NgramPositionIndex) and self.slots == other.slots


class DepContextIndex:
    """Per-term dependency features with frequencies.

    Every dependency edge yields one feature per endpoint: the dependent
    gets ``(relation, 'd', head lemma)`` and the head gets
    ``(relation, 'h', dependent lemma)``, so the total feature mass is twice
    the number of edges ingested.
    """

    def __init__(self):
        self.term_features: dict[str, Counter] = {}
        self.feature_totals: Counter = Counter()
        self.total_mass = 0

    def add_edge(self, head_lemma: str, dep_lemma: str, relation: str):
        for term, feature in (
            (dep_lemma, (relation, "d", head_lemma)),
            (head_lemma, (relation, "h", dep_lemma)),
        ):
            self.term_features.setdefault(term, Counter())[feature] += 1
            self.feature_totals[feature] += 1
            self.total_mass += 1

    def features(self, term: str) -> Counter:
        return self.term_features.get(term, Counter())

    def term_total(self, term: str) -> int:
        return sum(self.features(term).values())

    def merge(self, other: "DepContextIndex"):
        for term, feats in other.term_features.items():
            self.term_features.setdefault(term, Counter()).update(feats)
        self.feature_totals.update(other.feature_totals)
        self.total_mass += other.total_mass

    def __eq__(self, other):
        return (
            isinstance(other, DepContextIndex)
            and self.term_features == other.term_features
            and self.feature_totals == other.feature_totals
            and self.total_mass == other.total_mass
        )


@dataclass
class StatsIndex:
    """Bundle of all count structures built from one corpus stream."""

    width: int = 16
    has_pos: bool = False
    has_deps: bool = False
    vocab: dict[str, TermStats] = field(default_factory=dict)
    window: WindowCounts = field(default_factory=WindowCounts)
    ngram: NgramPositionIndex = field(default_factory=NgramPositionIndex)
    pos_ngram: NgramPositionIndex = field(default_factory=NgramPositionIndex)
    dep: DepContextIndex = field(default_factory=DepContextIndex)

    @classmethod
    def empty(cls, width: int = 16) -> "StatsIndex":
        return cls(width=width)

    def add_document(self, doc: Document):
        for sentence in doc.sentences:
            lemmas = sentence.lemmas
            for tok in sentence.tokens:
                stats = self.vocab.setdefault(tok.lemma, TermStats())
                stats.tf += 1
                if tok.pos is not None:
                    self.has_pos = True
                    if tok.pos == "NOUN":
                        stats.noun_count += 1
                if doc.source == "domain":
                    stats.domain_tf += 1
                elif doc.source == "background":
                    stats.background_tf += 1
            for window in windows(sentence, self.width):
                self.window.add_window(window)
            for i in range(len(lemmas) - 2):
                tri = lemmas[i:i + 3]
                self.ngram.add_trigram(tri, tri)
                pos_tags = tuple(t.pos for t in sentence.tokens[i:i + 3])
                if all(p is not None for p in pos_tags):
                    self.pos_ngram.add_trigram(pos_tags, tri)
            for i, tok in enumerate(sentence.tokens):
                if tok.head is not None:
                    self.has_deps = True
                    self.dep.add_edge(lemmas[tok.head], tok.lemma, tok.deprel or "_")


def build_index(docs: Iterable[Document], width: int = 16) -> StatsIndex:
    """Aggregate all counts over a document stream.

    Counts exactly equal brute-force enumeration over the same stream and do
    not depend on document order.
    """
    index = StatsIndex(width=width)
    n_docs = 0
    for doc in docs:
        index.add_document(doc)
        n_docs += 1
    if n_docs == 0:
        raise EmptyCorpus("build_index: empty document stream")
    return index


def merge(a: StatsIndex, b: StatsIndex) -> StatsIndex:
    """Combine two partial indexes; equals a build over the concatenation."""
    if a.width != b.width:
        raise IncompatibleIndexes(f"window widths differ: {a.width} vs {b.width}")
    out = StatsIndex(width=a.width, has_pos=a.has_pos or b.has_pos, has_deps=a.has_deps or b.has_deps)
    for src in (a, b):
        for term, stats in src.vocab.items():
            agg = out.vocab.setdefault(term, TermStats())
            agg.tf += stats.tf
            agg.noun_count += stats.noun_count
            agg.domain_tf += stats.domain_tf
            agg.background_tf += stats.background_tf
        out.window.merge(src.window)
        out.ngram.merge(src.ngram)
        out.pos_ngram.merge(src.pos_ngram)
        out.dep.merge(src.dep)
    return out


# ---------------------------------------------------------------------------
# binary serialization: MAGIC, format version, then length-prefixed sections
# ---------------------------------------------------------------------------


class _Writer:
    def __init__(self):
        self.buf = bytearray()

    def u8(self, v):
        self.buf += struct.pack("<B", v)

    def u32(self, v):
        self.buf += struct.pack("<I", v)

    def u64(self, v):
        self.buf += struct.pack("<Q", v)

    def string(self, s: str):
        raw = s.encode("utf-8")
        self.u32(len(raw))
        self.buf += raw


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _take(self, n):
        if self.pos + n > len(self.data):
            raise FormatVersionMismatch("truncated index file")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u8(self):
        return struct.unpack("<B", self._take(1))[0]

    def u32(self):
        return struct.unpack("<I", self._take(4))[0]

    def u64(self):
        return struct.unpack("<Q", self._take(8))[0]

    def string(self):
        return self._take(self.u32()).decode("utf-8")


def _collect_strings(index: StatsIndex) -> list[str]:
    pool = set(index.vocab)
    pool.update(index.window.term_counts)
    for a, b in index.window.pair_counts:
        pool.add(a)
        pool.add(b)
    for source in (index.ngram, index.pos_ngram):
        for (_, c1, c2), fillers in source.slots.items():
            pool.add(c1)
            pool.add(c2)
            pool.update(fillers)
    for term, feats in index.dep.term_features.items():
        pool.add(term)
        for rel, _, other in feats:
            pool.add(rel)
            pool.add(other)
    return sorted(pool)


def _write_ngram(w: _Writer, sid: dict[str, int], idx: NgramPositionIndex):
    w.u64(len(idx.slots))
    for (hole, c1, c2), fillers in sorted(idx.slots.items()):
        w.u8(hole)
        w.u32(sid[c1])
        w.u32(sid[c2])
        w.u32(len(fillers))
        for term in sorted(fillers):
            w.u32(sid[term])


def _read_ngram(r: _Reader, strings: list[str]) -> NgramPositionIndex:
    idx = NgramPositionIndex()
    for _ in range(r.u64()):
        key = (r.u8(), strings[r.u32()], strings[r.u32()])
        idx.slots[key] = {strings[r.u32()] for _ in range(r.u32())}
    return idx


def save_index(index: StatsIndex, path) -> None:
    strings = _collect_strings(index)
    sid = {s: i for i, s in enumerate(strings)}

    sections: list[tuple[str, bytes]] = []

    w = _Writer()
    w.u32(index.width)
    w.u8(int(index.has_pos))
    w.u8(int(index.has_deps))
    sections.append(("meta", bytes(w.buf)))

    w = _Writer()
    w.u32(len(strings))
    for s in strings:
        w.string(s)
    sections.append(("strings", bytes(w.buf)))

    w = _Writer()
    w.u32(len(index.vocab))
    for term in sorted(index.vocab):
        stats = index.vocab[term]
        w.u32(sid[term])
        w.u64(stats.tf)
        w.u64(stats.noun_count)
        w.u64(stats.domain_tf)
        w.u64(stats.background_tf)
    sections.append(("vocab", bytes(w.buf)))

    w = _Writer()
    w.u64(index.window.total_windows)
    w.u32(len(index.window.term_counts))
    for term in sorted(index.window.term_counts):
        w.u32(sid[term])
        w.u64(index.window.term_counts[term])
    w.u64(len(index.window.pair_counts))
    for (a, b) in sorted(index.window.pair_counts):
        w.u32(sid[a])
        w.u32(sid[b])
        w.u64(index.window.pair_counts[(a, b)])
    sections.append(("windows", bytes(w.buf)))

    w = _Writer()
    _write_ngram(w, sid, index.ngram)
    sections.append(("ngram", bytes(w.buf)))

    w = _Writer()
    _write_ngram(w, sid, index.pos_ngram)
    sections.append(("pos_ngram", bytes(w.buf)))

    w = _Writer()
    w.u32(len(index.dep.term_features))
    for term in sorted(index.dep.term_features):
        feats = index.dep.term_features[term]
        w.u32(sid[term])
        w.u32(len(feats))
        for (rel, direction, other) in sorted(feats):
            w.u32(sid[rel])
            w.u8(0 if direction == "d" else 1)
            w.u32(sid[other])
            w.u64(feats[(rel, direction, other)])
    sections.append(("dep", bytes(w.buf)))

    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", FORMAT_VERSION))
        for name, payload in sections:
            raw_name = name.encode("ascii")
            f.write(struct.pack("<I", len(raw_name)))
            f.write(raw_name)
            f.write(struct.pack("<Q", len(payload)))
            f.write(payload)


def _read_sections(data: bytes) -> Iterator[tuple[str, bytes]]:
    pos = 0
    while pos < len(data):
        if pos + 4 > len(data):
            raise FormatVersionMismatch("truncated index file")
        (name_len,) = struct.unpack_from("<I", data, pos)
        pos += 4
        name = data[pos:pos + name_len].decode("ascii")
        pos += name_len
        if pos + 8 > len(data):
            raise FormatVersionMismatch("truncated index file")
        (payload_len,) = struct.unpack_from("<Q", data, pos)
        pos += 8
        if pos + payload_len > len(data):
            raise FormatVersionMismatch("truncated index file")
        yield name, data[pos:pos + payload_len]
        pos += payload_len


def load_index(path) -> StatsIndex:
    with open(path, "rb") as f:
        blob = f.read()
    if blob[:4] != MAGIC:
        raise FormatVersionMismatch(f"{path}: not a stats index file")
    if len(blob) < 8:
        raise FormatVersionMismatch(f"{path}: truncated header")
    (version,) = struct.unpack_from("<I", blob, 4)
    if version != FORMAT_VERSION:
        raise FormatVersionMismatch(f"{path}: format version {version}, expected {FORMAT_VERSION}")

    index = StatsIndex()
    strings: list[str] = []
    for name, payload in _read_sections(blob[8:]):
        r = _Reader(payload)
        if name == "meta":
            index.width = r.u32()
            index.has_pos = bool(r.u8())
            index.has_deps = bool(r.u8())
        elif name == "strings":
            strings = [r.string() for _ in range(r.u32())]
        elif name == "vocab":
            for _ in range(r.u32()):
                term = strings[r.u32()]
                index.vocab[term] = TermStats(r.u64(), r.u64(), r.u64(), r.u64())
        elif name == "windows":
            index.window.total_windows = r.u64()
            for _ in range(r.u32()):
                term = strings[r.u32()]
                index.window.term_counts[term] = r.u64()
            for _ in range(r.u64()):
                key = (strings[r.u32()], strings[r.u32()])
                index.window.pair_counts[key] = r.u64()
        elif name == "ngram":
            index.ngram = _read_ngram(r, strings)
        elif name == "pos_ngram":
            index.pos_ngram = _read_ngram(r, strings)
        elif name == "dep":
            for _ in range(r.u32()):
                term = strings[r.u32()]
                feats = Counter()
                for _ in range(r.u32()):
                    rel = strings[r.u32()]
                    direction = "d" if r.u8() == 0 else "h"
                    other = strings[r.u32()]
                    feats[(rel, direction, other)] = r.u64()
                index.dep.term_features[term] = feats
                index.dep.feature_totals.update(feats)
                index.dep.total_mass += sum(feats.values())
        else:
            raise FormatVersionMismatch(f"{path}: unknown section {name!r}")
    return index
