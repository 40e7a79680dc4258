"""Standardized L2-regularized logistic regression, pointwise ranker.

Features are scaled to zero mean and unit variance on the training set
(constant columns get scale 1), then the mean logistic loss plus
``l2 * ||w||^2 / (2n)`` is minimized. The bias is not regularized. The
analytic gradient is exposed for verification against finite differences.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit
from sklearn.base import BaseEstimator

from ..features import FeatureVector
from .base import RankingInstance, check_binary_labels, check_feature_matrix, instances_to_arrays


def logistic_loss_and_gradient(
    wb: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float
) -> tuple[float, np.ndarray]:
    """Objective and gradient at ``wb`` (weights with the bias appended).

    ``y`` holds 0/1 labels. The objective is the mean log loss plus
    ``l2 * ||w||^2 / (2n)``; the returned gradient covers weights and bias.
    """
    w = wb[:-1]
    b = wb[-1]
    n = X.shape[0]
    signed = 2.0 * y - 1.0
    margins = signed * (X @ w + b)
    loss = float(np.mean(np.logaddexp(0.0, -margins)) + l2 * (w @ w) / (2.0 * n))
    slack = expit(-margins)  # d/dm log(1+e^-m) = -sigma(-m)
    grad_w = -(X.T @ (signed * slack)) / n + (l2 / n) * w
    grad_b = -float(np.mean(signed * slack))
    return loss, np.append(grad_w, grad_b)


class RankLogisticRegression(BaseEstimator):
    """Pointwise ranker scoring candidates by synonym probability."""

    def __init__(self, l2: float = 1.0, tol: float = 1e-6, max_iter: int = 1000):
        self.l2 = l2
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        X = check_feature_matrix(X)
        y = check_binary_labels(y, X.shape[0])
        self.mean_ = X.mean(axis=0)
        scale = X.std(axis=0)
        scale[scale == 0.0] = 1.0
        self.scale_ = scale
        Xs = (X - self.mean_) / self.scale_

        result = minimize(
            logistic_loss_and_gradient,
            x0=np.zeros(X.shape[1] + 1),
            args=(Xs, y, self.l2),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": self.max_iter, "gtol": self.tol, "ftol": 1e-14},
        )
        self.coef_ = result.x[:-1]
        self.intercept_ = float(result.x[-1])
        self.n_iter_ = int(result.nit)
        return self

    def decision_function(self, X) -> np.ndarray:
        X = check_feature_matrix(X, n_features=self.coef_.shape[0])
        return ((X - self.mean_) / self.scale_) @ self.coef_ + self.intercept_

    def predict_proba(self, X) -> np.ndarray:
        p = expit(self.decision_function(X))
        return np.column_stack([1.0 - p, p])

    def predict(self, X) -> np.ndarray:
        """Ranking scores: the probability of being a true synonym."""
        return expit(self.decision_function(X))


def train_logreg(instances: Sequence[RankingInstance], l2: float = 1.0) -> RankLogisticRegression:
    X, y, _ = instances_to_arrays(instances)
    return RankLogisticRegression(l2=l2).fit(X, y)


def score_logreg(model: RankLogisticRegression, features: FeatureVector | np.ndarray) -> float:
    row = features.as_array() if isinstance(features, FeatureVector) else np.asarray(features, dtype=float)
    return float(model.predict(row.reshape(1, -1))[0])
