"""Similarity scorers over corpus statistics.

All scorers return ``None`` for ABSENT (a pair the model cannot score);
ranking code places ABSENT after every finite score. PMI uses log base 2
with no smoothing or discounting.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .corpus import Document, windows
from .errors import DimensionMismatch, ParseError
from .stats import DepContextIndex, WindowCounts


def cosine(u: np.ndarray, v: np.ndarray) -> float | None:
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return None
    return float(np.dot(u, v) / (nu * nv))


def pmi(index: WindowCounts, a: str, b: str) -> float | None:
    """Pointwise mutual information of two terms over window co-occurrence.

    ``log2(N * count(a,b) / (count(a) * count(b)))``; ABSENT when the pair
    never co-occurs or either marginal is zero. Symmetric in its arguments.
    """
    joint = index.pair_count(a, b)
    ca = index.count(a)
    cb = index.count(b)
    if joint == 0 or ca == 0 or cb == 0:
        return None
    return math.log2(index.total_windows * joint / (ca * cb))


def _positive_pmi_features(index: DepContextIndex, term: str) -> dict[tuple, float]:
    """Dependency features of ``term`` with positive term-feature PMI."""
    total = index.term_total(term)
    if total == 0 or index.total_mass == 0:
        return {}
    out = {}
    for feature, joint in index.features(term).items():
        value = math.log2(index.total_mass * joint / (total * index.feature_totals[feature]))
        if value > 0.0:
            out[feature] = value
    return out


def lin_similarity(index: DepContextIndex, a: str, b: str) -> float:
    """Lin's measure: information of shared features over summed information.

    Feature sets are each term's positive-PMI dependency features; the score
    is ``sum over shared f of (Ia(f) + Ib(f))`` divided by
    ``sum(Ia) + sum(Ib)``, which is 1 for identical profiles and 0 when the
    sets are disjoint or either is empty.
    """
    fa = _positive_pmi_features(index, a)
    fb = _positive_pmi_features(index, b)
    if not fa or not fb:
        return 0.0
    # iterate in fa's insertion order: set intersection order varies with
    # string hash randomization and would perturb the float sum across runs
    shared = sum(fa[f] + fb[f] for f in fa if f in fb)
    denom = sum(fa.values()) + sum(fb.values())
    if denom == 0.0:
        return 0.0
    return shared / denom


# ---------------------------------------------------------------------------
# random indexing
# ---------------------------------------------------------------------------


@dataclass
class RandomIndexModel:
    """Incremental distributional model over sparse random index vectors.

    The index vector of a term is a fixed ±1 pattern derived only from the
    term and ``rng_seed``, so shard-built models merge by adding context
    vectors. Training accumulates, for every term occurrence, the index
    vectors of the other terms in each containing window.
    """

    dimension: int = 200
    seeds_per_vector: int = 10
    rng_seed: int = 0
    context_vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def index_vector(self, term: str) -> np.ndarray:
        digest = hashlib.blake2b(
            term.encode("utf-8"), digest_size=8, key=str(self.rng_seed).encode("ascii")
        ).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "little"))
        vec = np.zeros(self.dimension)
        positions = rng.choice(self.dimension, size=self.seeds_per_vector, replace=False)
        signs = rng.integers(0, 2, size=self.seeds_per_vector) * 2 - 1
        vec[positions] = signs
        return vec

    def add_documents(self, docs: Iterable[Document], width: int = 16):
        index_cache: dict[str, np.ndarray] = {}

        def ivec(term):
            v = index_cache.get(term)
            if v is None:
                v = index_cache[term] = self.index_vector(term)
            return v

        for doc in docs:
            for sentence in doc.sentences:
                for window in windows(sentence, width):
                    total = np.zeros(self.dimension)
                    for term in window:
                        total += ivec(term)
                    for term in window:
                        ctx = self.context_vectors.get(term)
                        if ctx is None:
                            ctx = self.context_vectors[term] = np.zeros(self.dimension)
                        ctx += total - ivec(term)

    def merge(self, other: "RandomIndexModel"):
        if (self.dimension, self.seeds_per_vector, self.rng_seed) != (
            other.dimension,
            other.seeds_per_vector,
            other.rng_seed,
        ):
            raise ValueError("cannot merge random-index models with different settings")
        for term, vec in other.context_vectors.items():
            if term in self.context_vectors:
                self.context_vectors[term] = self.context_vectors[term] + vec
            else:
                self.context_vectors[term] = vec.copy()


def train_random_index(
    docs: Iterable[Document],
    dimension: int = 200,
    seeds_per_vector: int = 10,
    rng_seed: int = 0,
    width: int = 16,
) -> RandomIndexModel:
    model = RandomIndexModel(dimension=dimension, seeds_per_vector=seeds_per_vector, rng_seed=rng_seed)
    model.add_documents(docs, width=width)
    return model


def ri_similarity(model: RandomIndexModel, a: str, b: str) -> float | None:
    """Cosine of the two context vectors; ABSENT for unseen or zero vectors."""
    va = model.context_vectors.get(a)
    vb = model.context_vectors.get(b)
    if va is None or vb is None:
        return None
    return cosine(va, vb)


def save_random_index(model: RandomIndexModel, path) -> None:
    terms = sorted(model.context_vectors)
    with open(path, "w", encoding="utf-8") as f:
        f.write(
            f"synrank-ri 1 {model.dimension} {model.seeds_per_vector} {model.rng_seed} {len(terms)}\n"
        )
        for term in terms:
            values = " ".join(repr(x) for x in model.context_vectors[term].tolist())
            f.write(f"{term} {values}\n")


def load_random_index(path) -> RandomIndexModel:
    with open(path, encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 6 or header[0] != "synrank-ri":
            raise ParseError("not a random-index model file", 1, path)
        if header[1] != "1":
            raise ParseError(f"unsupported model version {header[1]}", 1, path)
        _, _, dimension, seeds, rng_seed, count = header
        model = RandomIndexModel(int(dimension), int(seeds), int(rng_seed))
        for lineno, line in enumerate(f, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != model.dimension + 1:
                raise ParseError(f"expected {model.dimension} values", lineno, path)
            model.context_vectors[parts[0]] = np.array([float(x) for x in parts[1:]])
        if len(model.context_vectors) != int(count):
            raise ParseError(
                f"header declared {count} terms, file has {len(model.context_vectors)}", 1, path
            )
    return model


# ---------------------------------------------------------------------------
# word embeddings
# ---------------------------------------------------------------------------


@dataclass
class EmbeddingTable:
    dimension: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def get(self, term: str) -> np.ndarray | None:
        return self.vectors.get(term)

    def __contains__(self, term):
        return term in self.vectors

    def __len__(self):
        return len(self.vectors)


def load_embeddings(path) -> EmbeddingTable:
    """Read a word-vector text file: ``<count> <dim>`` header, then one
    ``<term> <v1> ... <vdim>`` row per line."""
    with open(path, encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 2:
            raise ParseError("expected '<count> <dimension>' header", 1, path)
        try:
            _, dimension = int(header[0]), int(header[1])
        except ValueError:
            raise ParseError("expected integer count and dimension", 1, path) from None
        table = EmbeddingTable(dimension=dimension)
        for lineno, line in enumerate(f, start=2):
            parts = line.rstrip("\n").split(" ")
            parts = [p for p in parts if p]
            if not parts:
                continue
            if len(parts) - 1 != dimension:
                raise DimensionMismatch(
                    f"{path}:{lineno}: row has {len(parts) - 1} values, header declared {dimension}"
                )
            try:
                vec = np.array([float(x) for x in parts[1:]])
            except ValueError:
                raise ParseError("non-numeric vector component", lineno, path) from None
            table.vectors[parts[0]] = vec
    return table


def save_embeddings(table: EmbeddingTable, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{len(table.vectors)} {table.dimension}\n")
        for term in sorted(table.vectors):
            values = " ".join(repr(x) for x in table.vectors[term].tolist())
            f.write(f"{term} {values}\n")


def embedding_similarity(table: EmbeddingTable, a: str, b: str) -> float | None:
    va = table.get(a)
    vb = table.get(b)
    if va is None or vb is None:
        return None
    return cosine(va, vb)
