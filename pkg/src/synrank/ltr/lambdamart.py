"""Pairwise LambdaMART: boosted regression trees on LambdaRank gradients.

Within every query, each pair of candidates with unequal labels contributes
``sigma / (1 + exp(sigma * (s_i - s_j))) * |delta NDCG|`` to the gradient of
the higher-labeled member and its negation to the other, where the NDCG
delta is the swap difference under ``2^label - 1`` gains and log2 discounts.
Each boosting round fits a tree to these gradients on a without-replacement
sample of queries and applies Newton leaf steps.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator

from ..errors import DegenerateLabels, TooFewQueries
from .base import RankingInstance, check_binary_labels, check_feature_matrix, check_query_ids, instances_to_arrays
from .trees import RegressionTree, grow_tree


def _ranks(scores: np.ndarray) -> np.ndarray:
    """1-based ranks by descending score; ties broken by position."""
    order = np.argsort(-scores, kind="stable")
    ranks = np.empty_like(order)
    ranks[order] = np.arange(1, scores.shape[0] + 1)
    return ranks


def ndcg_at_k(labels, scores, k: int | None = None) -> float:
    """NDCG with gains ``2^label - 1``; 0 for a query with no relevant item."""
    labels = np.asarray(labels, dtype=float)
    scores = np.asarray(scores, dtype=float)
    gains = np.power(2.0, labels) - 1.0
    if gains.sum() == 0.0:
        return 0.0
    cut = labels.shape[0] if k is None else min(k, labels.shape[0])
    order = np.argsort(-scores, kind="stable")
    discounts = 1.0 / np.log2(np.arange(2, cut + 2))
    dcg = float(gains[order[:cut]] @ discounts)
    ideal = float(np.sort(gains)[::-1][:cut] @ discounts)
    return dcg / ideal


def lambda_gradients(
    labels, scores, sigma: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    """Per-document gradients and Newton weights for one query.

    Equal-label pairs contribute nothing, and a pair's contribution to one
    member is exactly the negation of its contribution to the other.
    """
    labels = np.asarray(labels, dtype=float)
    scores = np.asarray(scores, dtype=float)
    n = labels.shape[0]
    lam = np.zeros(n)
    weight = np.zeros(n)
    gains = np.power(2.0, labels) - 1.0
    idcg_gains = np.sort(gains)[::-1]
    idcg = float(idcg_gains @ (1.0 / np.log2(np.arange(2, n + 2))))
    if idcg == 0.0:
        return lam, weight

    discounts = 1.0 / np.log2(1.0 + _ranks(scores))
    more = labels[:, None] > labels[None, :]  # i strictly more relevant than j
    if not more.any():
        return lam, weight
    delta = (
        np.abs(gains[:, None] - gains[None, :])
        * np.abs(discounts[:, None] - discounts[None, :])
        / idcg
    )
    with np.errstate(over="ignore"):  # exp overflow saturates rho to 0
        rho = 1.0 / (1.0 + np.exp(sigma * (scores[:, None] - scores[None, :])))
    push = np.where(more, sigma * delta * rho, 0.0)
    lam = push.sum(axis=1) - push.sum(axis=0)
    curve = np.where(more, sigma * sigma * delta * rho * (1.0 - rho), 0.0)
    weight = curve.sum(axis=1) + curve.sum(axis=0)
    return lam, weight


def _group_by_query(qid: np.ndarray) -> "OrderedDict[str, np.ndarray]":
    groups: OrderedDict[str, list[int]] = OrderedDict()
    for i, q in enumerate(qid):
        groups.setdefault(q, []).append(i)
    return OrderedDict((q, np.array(rows)) for q, rows in groups.items())


class LambdaMARTRanker(BaseEstimator):
    """Gradient-boosted tree ranker trained on within-query label pairs."""

    def __init__(
        self,
        n_trees: int = 100,
        learning_rate: float = 0.1,
        max_leaves: int = 16,
        min_samples_leaf: int = 5,
        query_subsample: float = 0.5,
        sigma: float = 1.0,
        random_state: int = 0,
    ):
        self.n_trees = n_trees
        self.learning_rate = learning_rate
        self.max_leaves = max_leaves
        self.min_samples_leaf = min_samples_leaf
        self.query_subsample = query_subsample
        self.sigma = sigma
        self.random_state = random_state

    def fit(self, X, y, qid):
        X = check_feature_matrix(X)
        n = X.shape[0]
        y = check_binary_labels(y, n)
        qid = check_query_ids(qid, n)
        groups = _group_by_query(qid)
        if len(groups) < 2:
            raise TooFewQueries(f"need >= 2 queries, got {len(groups)}")
        for q, rows in groups.items():
            if len(set(y[rows].tolist())) < 2:
                raise DegenerateLabels(f"query {q!r} lacks a positive or a negative candidate")
        if not 0.0 < self.query_subsample <= 1.0:
            raise ValueError("query_subsample must be in (0, 1]")

        rng = np.random.default_rng(self.random_state)
        query_rows = list(groups.values())
        n_queries = len(query_rows)
        n_sampled = math.ceil(self.query_subsample * n_queries)
        scores = np.zeros(n)
        self.trees_: list[RegressionTree] = []
        self.train_ndcg10_path_: list[float] = []

        for _ in range(self.n_trees):
            chosen = np.sort(rng.choice(n_queries, size=n_sampled, replace=False))
            lam = np.zeros(n)
            weight = np.zeros(n)
            for qi in chosen:
                rows = query_rows[qi]
                ql, qw = lambda_gradients(y[rows], scores[rows], self.sigma)
                lam[rows] = ql
                weight[rows] = qw
            sampled_rows = np.concatenate([query_rows[qi] for qi in chosen])
            tree, leaf_of_row = grow_tree(
                X[sampled_rows],
                lam[sampled_rows],
                max_leaves=self.max_leaves,
                min_samples_leaf=self.min_samples_leaf,
            )
            self._newton_leaf_values(tree, leaf_of_row, lam[sampled_rows], weight[sampled_rows])
            self.trees_.append(tree)
            scores += self.learning_rate * tree.predict(X)
            self.train_ndcg10_path_.append(
                float(np.mean([ndcg_at_k(y[rows], scores[rows], 10) for rows in query_rows]))
            )
        return self

    @staticmethod
    def _newton_leaf_values(tree: RegressionTree, leaf_of_row, lam, weight):
        for leaf in tree.leaves():
            mask = leaf_of_row == leaf
            wsum = weight[mask].sum()
            tree.value[leaf] = float(lam[mask].sum() / wsum) if wsum > 0.0 else 0.0

    def predict(self, X) -> np.ndarray:
        X = check_feature_matrix(X)
        scores = np.zeros(X.shape[0])
        for tree in self.trees_:
            scores += self.learning_rate * tree.predict(X)
        return scores


def train_lambdamart(instances: Sequence[RankingInstance], **params) -> LambdaMARTRanker:
    X, y, qid = instances_to_arrays(instances)
    return LambdaMARTRanker(**params).fit(X, y, qid)


def score_lambdamart(model: LambdaMARTRanker, features) -> float:
    row = np.asarray(
        features.values if hasattr(features, "values") else features, dtype=float
    ).reshape(1, -1)
    return float(model.predict(row)[0])
