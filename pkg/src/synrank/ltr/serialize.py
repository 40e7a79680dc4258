"""Versioned self-describing text serialization for both model kinds."""

from __future__ import annotations

import json

import numpy as np

from ..errors import FormatVersionMismatch
from .lambdamart import LambdaMARTRanker
from .logreg import RankLogisticRegression
from .trees import RegressionTree

FORMAT = "synrank-rank-model"
VERSION = 1


def save_model(model, path) -> None:
    if isinstance(model, RankLogisticRegression):
        doc = {
            "format": FORMAT,
            "version": VERSION,
            "kind": "logreg",
            "params": model.get_params(),
            "standardization": {
                "mean": model.mean_.tolist(),
                "scale": model.scale_.tolist(),
            },
            "coef": model.coef_.tolist(),
            "intercept": model.intercept_,
        }
    elif isinstance(model, LambdaMARTRanker):
        doc = {
            "format": FORMAT,
            "version": VERSION,
            "kind": "lambdamart",
            "params": model.get_params(),
            "trees": [tree.to_dict() for tree in model.trees_],
        }
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=1, sort_keys=True)
        f.write("\n")


def load_model(path):
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FormatVersionMismatch(f"{path}: not a model file ({exc})") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise FormatVersionMismatch(f"{path}: not a {FORMAT} file")
    if doc.get("version") != VERSION:
        raise FormatVersionMismatch(f"{path}: version {doc.get('version')}, expected {VERSION}")
    kind = doc.get("kind")
    if kind == "logreg":
        model = RankLogisticRegression(**doc["params"])
        model.mean_ = np.array(doc["standardization"]["mean"], dtype=float)
        model.scale_ = np.array(doc["standardization"]["scale"], dtype=float)
        model.coef_ = np.array(doc["coef"], dtype=float)
        model.intercept_ = float(doc["intercept"])
        return model
    if kind == "lambdamart":
        model = LambdaMARTRanker(**doc["params"])
        model.trees_ = [RegressionTree.from_dict(t) for t in doc["trees"]]
        return model
    raise FormatVersionMismatch(f"{path}: unknown model kind {kind!r}")
