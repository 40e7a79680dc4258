"""Learning-to-rank: pointwise logistic regression and pairwise LambdaMART."""

from .base import (
    RankingInstance,
    check_binary_labels,
    check_feature_matrix,
    check_query_ids,
    fold_of,
    instances_to_arrays,
    make_folds,
)
from .lambdamart import (
    LambdaMARTRanker,
    lambda_gradients,
    ndcg_at_k,
    score_lambdamart,
    train_lambdamart,
)
from .logreg import RankLogisticRegression, logistic_loss_and_gradient, score_logreg, train_logreg
from .serialize import load_model, save_model

__all__ = [
    "RankingInstance",
    "RankLogisticRegression",
    "LambdaMARTRanker",
    "check_binary_labels",
    "check_feature_matrix",
    "check_query_ids",
    "fold_of",
    "instances_to_arrays",
    "lambda_gradients",
    "logistic_loss_and_gradient",
    "load_model",
    "make_folds",
    "ndcg_at_k",
    "save_model",
    "score_lambdamart",
    "score_logreg",
    "train_lambdamart",
    "train_logreg",
]
