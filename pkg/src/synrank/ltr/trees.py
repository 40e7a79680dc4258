"""Plain regression trees for gradient boosting.

Trees grow best-first (highest squared-error reduction next) up to
``max_leaves`` leaves, with thresholds at midpoints between distinct sorted
feature values. Leaf values are set afterwards by the caller, which lets
the booster apply Newton steps computed from pair weights. Prediction
routes samples with ``x[feature] <= threshold`` to the left child.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np


@dataclass
class RegressionTree:
    feature: list[int] = field(default_factory=lambda: [-1])  # -1 marks a leaf
    threshold: list[float] = field(default_factory=lambda: [0.0])
    left: list[int] = field(default_factory=lambda: [-1])
    right: list[int] = field(default_factory=lambda: [-1])
    value: list[float] = field(default_factory=lambda: [0.0])

    def n_nodes(self) -> int:
        return len(self.feature)

    def leaves(self) -> list[int]:
        return [i for i, f in enumerate(self.feature) if f == -1]

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row."""
        node = np.zeros(X.shape[0], dtype=int)
        feature = np.asarray(self.feature)
        threshold = np.asarray(self.threshold)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        active = feature[node] >= 0
        while np.any(active):
            idx = np.flatnonzero(active)
            cur = node[idx]
            goes_left = X[idx, feature[cur]] <= threshold[cur]
            node[idx] = np.where(goes_left, left[cur], right[cur])
            active = feature[node] >= 0
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(self.value)[self.apply(X)]

    def set_leaf_values(self, leaf_values: dict[int, float]):
        for leaf, v in leaf_values.items():
            if self.feature[leaf] != -1:
                raise ValueError(f"node {leaf} is not a leaf")
            self.value[leaf] = float(v)

    def to_dict(self) -> dict:
        return {
            "feature": list(self.feature),
            "threshold": [float(t) for t in self.threshold],
            "left": list(self.left),
            "right": list(self.right),
            "value": [float(v) for v in self.value],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RegressionTree":
        return cls(
            feature=list(d["feature"]),
            threshold=[float(t) for t in d["threshold"]],
            left=list(d["left"]),
            right=list(d["right"]),
            value=[float(v) for v in d["value"]],
        )


def _best_split(X: np.ndarray, targets: np.ndarray, rows: np.ndarray, min_samples_leaf: int):
    """Best (gain, feature, threshold) for one node, or None.

    Gain is the reduction in sum of squared errors; ties keep the lowest
    feature index and threshold, making tree growth deterministic.
    """
    n = rows.shape[0]
    if n < 2 * min_samples_leaf:
        return None
    t = targets[rows]
    total = t.sum()
    base = total * total / n
    nl = np.arange(1, n, dtype=float)
    nr = n - nl
    size_ok = (nl >= min_samples_leaf) & (nr >= min_samples_leaf)
    best = None
    for f in range(X.shape[1]):
        values = X[rows, f]
        order = np.argsort(values, kind="stable")
        v_sorted = values[order]
        sl = np.cumsum(t[order])[:-1]
        valid = size_ok & (v_sorted[:-1] != v_sorted[1:])
        if not valid.any():
            continue
        gains = np.where(valid, sl * sl / nl + (total - sl) ** 2 / nr - base, -np.inf)
        i = int(np.argmax(gains))  # first max: lowest threshold wins ties
        if gains[i] > 1e-12 and (best is None or gains[i] > best[0]):
            best = (float(gains[i]), f, float(v_sorted[i] + v_sorted[i + 1]) / 2.0)
    return best


def grow_tree(
    X: np.ndarray,
    targets: np.ndarray,
    max_leaves: int = 16,
    min_samples_leaf: int = 5,
) -> tuple[RegressionTree, np.ndarray]:
    """Fit a tree to ``targets`` by least squares; returns it with the leaf
    assignment of every training row. Leaf values start as target means."""
    tree = RegressionTree()
    all_rows = np.arange(X.shape[0])
    tree.value[0] = float(targets.mean()) if X.shape[0] else 0.0
    node_rows = {0: all_rows}
    heap = []
    counter = 0

    def consider(node, rows):
        nonlocal counter
        split = _best_split(X, targets, rows, min_samples_leaf)
        if split is not None:
            gain, f, thr = split
            heapq.heappush(heap, (-gain, counter, node, f, thr))
            counter += 1

    if max_leaves >= 2:
        consider(0, all_rows)
    n_leaves = 1
    while heap and n_leaves < max_leaves:
        _, _, node, f, thr = heapq.heappop(heap)
        rows = node_rows.pop(node)
        mask = X[rows, f] <= thr
        left_rows = rows[mask]
        right_rows = rows[~mask]
        left_id = tree.n_nodes()
        right_id = left_id + 1
        for child_rows in (left_rows, right_rows):
            tree.feature.append(-1)
            tree.threshold.append(0.0)
            tree.left.append(-1)
            tree.right.append(-1)
            tree.value.append(float(targets[child_rows].mean()) if child_rows.size else 0.0)
        tree.feature[node] = f
        tree.threshold[node] = thr
        tree.left[node] = left_id
        tree.right[node] = right_id
        node_rows[left_id] = left_rows
        node_rows[right_id] = right_rows
        n_leaves += 1
        if n_leaves < max_leaves:
            consider(left_id, left_rows)
            consider(right_id, right_rows)
    return tree, tree.apply(X)
