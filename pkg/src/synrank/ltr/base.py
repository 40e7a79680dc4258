"""Shared ranking-data plumbing: instances, input validation, CV folds."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..errors import DegenerateLabels, TooFewTargets
from ..features import FEATURE_NAMES, FeatureVector


@dataclass(frozen=True)
class RankingInstance:
    query: str  # the target term
    candidate: str
    features: FeatureVector
    label: int  # 1 iff candidate is a true synonym of query

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label}")


def instances_to_arrays(
    instances: Sequence[RankingInstance],
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stack instances into (X, y, qid) arrays in the given order."""
    X = np.array([inst.features.values for inst in instances], dtype=float)
    y = np.array([inst.label for inst in instances], dtype=int)
    qid = np.array([inst.query for inst in instances], dtype=object)
    return X, y, qid


def check_feature_matrix(X, n_features: int | None = None) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-d feature matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("feature matrix contains non-finite values")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"expected {n_features} feature columns, got {X.shape[1]}")
    return X


def check_binary_labels(y, n_samples: int) -> np.ndarray:
    y = np.asarray(y)
    if y.shape != (n_samples,):
        raise ValueError(f"labels must have shape ({n_samples},), got {y.shape}")
    values = set(np.unique(y).tolist())
    if not values <= {0, 1}:
        raise ValueError(f"labels must be 0/1, got {sorted(values)}")
    if len(values) < 2:
        raise DegenerateLabels(f"training data contains only the label(s) {sorted(values)}")
    return y.astype(int)


def check_query_ids(qid, n_samples: int) -> np.ndarray:
    qid = np.asarray(qid, dtype=object)
    if qid.shape != (n_samples,):
        raise ValueError(f"query ids must have shape ({n_samples},), got {qid.shape}")
    return qid


def make_folds(targets: Iterable[str], k: int = 10, seed: int = 0) -> list[list[str]]:
    """Partition targets into k folds whose sizes differ by at most one.

    Every instance of a target belongs to its target's fold, so held-out
    evaluation never sees a training target.
    """
    unique = sorted(set(targets))
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > len(unique):
        raise TooFewTargets(f"cannot make {k} folds from {len(unique)} targets")
    rng = random.Random(seed)
    rng.shuffle(unique)
    base, extra = divmod(len(unique), k)
    folds = []
    pos = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append(sorted(unique[pos:pos + size]))
        pos += size
    return folds


def fold_of(folds: Sequence[Sequence[str]], target: str) -> int:
    for i, fold in enumerate(folds):
        if target in fold:
            return i
    raise KeyError(f"target {target!r} is in no fold")


N_FEATURES = len(FEATURE_NAMES)


def vector_from_array(values) -> FeatureVector:
    """Wrap a raw 8-value row as an all-available FeatureVector."""
    return FeatureVector(tuple(float(v) for v in values), (True,) * N_FEATURES)
