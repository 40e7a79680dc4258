"""Evaluation protocols: TOEFL-style trials, relevance ranking, ablation.

A scorer is any callable ``scorer(target, candidates) -> scores`` where a
score of ``None`` means the pair cannot be scored; such candidates rank
after every finite score. All ties (including among unscorable candidates)
break by lexicographic candidate order so rankings are reproducible.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .candidates import GroundTruth, sample_negatives
from .errors import EmptyEval, NoRelevant
from .features import FEATURE_NAMES
from .ltr.base import instances_to_arrays, make_folds

Scorer = Callable[[str, Sequence[str]], Sequence["float | None"]]


def stable_seed(*parts) -> int:
    """Process-independent integer seed derived from the given parts."""
    text = "\x1f".join(str(p) for p in parts)
    return int.from_bytes(hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest(), "little")


def rank_candidates(
    candidates: Sequence[str], scores: Sequence[float | None]
) -> list[tuple[str, float | None]]:
    """Sort descending by score with ABSENT (None) last, ties lexicographic."""
    paired = list(zip(candidates, scores))
    paired.sort(key=lambda cs: (cs[1] is None, -cs[1] if cs[1] is not None else 0.0, cs[0]))
    return paired


@dataclass(frozen=True)
class RankedList:
    query: str
    candidates: tuple[str, ...]  # in rank order, best first
    scores: tuple  # aligned with candidates; None = unscorable
    relevant: frozenset  # relevant candidates present in the list

    @classmethod
    def from_scores(cls, query, candidates, scores, relevant) -> "RankedList":
        ranked = rank_candidates(candidates, scores)
        return cls(
            query=query,
            candidates=tuple(c for c, _ in ranked),
            scores=tuple(s for _, s in ranked),
            relevant=frozenset(relevant) & frozenset(candidates),
        )

    def __len__(self):
        return len(self.candidates)


@dataclass
class ReportRow:
    method: str
    metric: str
    value: float
    n: int | None = None
    fold: int | None = None
    feature: str | None = None


@dataclass
class EvalReport:
    rows: list[ReportRow] = field(default_factory=list)
    params: dict = field(default_factory=dict)

    def add(self, *args, **kwargs):
        self.rows.append(ReportRow(*args, **kwargs))

    def values(self, method=None, metric=None) -> list[ReportRow]:
        return [
            r
            for r in self.rows
            if (method is None or r.method == method) and (metric is None or r.metric == metric)
        ]


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------


def accuracy_at_n(trial_ranks: Sequence[int]) -> float:
    """Fraction of trials where the single correct candidate ranked first."""
    if not trial_ranks:
        raise EmptyEval("no trials")
    return sum(1 for r in trial_ranks if r == 1) / len(trial_ranks)


def mrr(trial_ranks: Sequence[int]) -> float:
    if not trial_ranks:
        raise EmptyEval("no trials")
    return sum(1.0 / r for r in trial_ranks) / len(trial_ranks)


def average_precision(ranked: RankedList, cutoff: int | None = None) -> float:
    """Mean over relevant items of precision at their rank; items ranked
    below ``cutoff`` contribute 0 but stay in the denominator."""
    if not ranked.relevant:
        raise NoRelevant(f"query {ranked.query!r} has no relevant candidate")
    hits = 0
    total = 0.0
    limit = len(ranked) if cutoff is None else min(cutoff, len(ranked))
    for position, candidate in enumerate(ranked.candidates[:limit], start=1):
        if candidate in ranked.relevant:
            hits += 1
            total += hits / position
    return total / len(ranked.relevant)


def mean_average_precision(lists: Iterable[RankedList], cutoff: int | None = None) -> float:
    values = [average_precision(rl, cutoff) for rl in lists]
    if not values:
        raise EmptyEval("no ranked lists")
    return sum(values) / len(values)


def map_at_k(lists: Iterable[RankedList], k: int) -> float:
    return mean_average_precision(lists, cutoff=k)


def recall_at_n(ranked: RankedList, n: int) -> float:
    if not ranked.relevant:
        raise NoRelevant(f"query {ranked.query!r} has no relevant candidate")
    found = sum(1 for c in ranked.candidates[:n] if c in ranked.relevant)
    return found / len(ranked.relevant)


# ---------------------------------------------------------------------------
# protocol 1: TOEFL-style trials
# ---------------------------------------------------------------------------


def toefl_trial_ranks(
    scorer: Scorer,
    truth: GroundTruth,
    pool: set[str],
    n: int,
    repeats: int = 1,
    seed: int = 0,
) -> list[int]:
    """Rank of the true synonym in every (target, synonym) trial at size n.

    Each trial draws a fresh seeded sample of ``n`` incorrect candidates
    (fewer when the pool is exhausted) and ranks them plus the synonym.
    """
    ranks = []
    for target in sorted(truth):
        for synonym in sorted(truth[target]):
            if synonym not in pool:
                continue
            for repeat in range(repeats):
                negatives = sample_negatives(
                    pool, truth, target, n, stable_seed(seed, target, synonym, n, repeat)
                )
                candidates = [synonym] + negatives
                ranked = rank_candidates(candidates, scorer(target, candidates))
                ranks.append(next(i for i, (c, _) in enumerate(ranked, start=1) if c == synonym))
    return ranks


def run_toefl_eval(
    scorer: Scorer,
    truth: GroundTruth,
    pool: set[str],
    n_values: Sequence[int],
    repeats: int = 1,
    seed: int = 0,
    method: str = "method",
) -> EvalReport:
    report = EvalReport(params={"seed": seed, "repeats": repeats, "protocol": "toefl"})
    eligible = {t: len(pool - truth[t] - {t}) for t in truth}
    for n in n_values:
        ranks = toefl_trial_ranks(scorer, truth, pool, n, repeats, seed)
        if not ranks:
            raise EmptyEval("no (target, synonym) pair has its synonym in the pool")
        report.add(method, "accuracy", accuracy_at_n(ranks), n=n)
        report.add(method, "mrr", mrr(ranks), n=n)
        # annotate when the pool cannot supply n negatives for every target
        capped = [t for t, avail in eligible.items() if avail < n and truth[t] & pool]
        if capped:
            report.add(method, "effective_n_max", max(eligible[t] for t in capped), n=n)
    return report


# ---------------------------------------------------------------------------
# protocol 2: relevance ranking over the candidate pool
# ---------------------------------------------------------------------------


def ranking_lists(
    scorer: Scorer,
    truth: GroundTruth,
    pool: set[str],
    max_negatives: int = 1000,
    seed: int = 0,
) -> list[RankedList]:
    """One ranked list per target: all in-pool synonyms plus up to
    ``max_negatives`` sampled incorrect candidates. Targets with no synonym
    in the pool are excluded."""
    lists = []
    for target in sorted(truth):
        synonyms = sorted(truth[target] & pool)
        if not synonyms:
            continue
        negatives = sample_negatives(pool, truth, target, max_negatives, stable_seed(seed, target))
        candidates = synonyms + negatives
        lists.append(
            RankedList.from_scores(target, candidates, scorer(target, candidates), synonyms)
        )
    return lists


def run_ranking_eval(
    scorer: Scorer,
    truth: GroundTruth,
    pool: set[str],
    n_values: Sequence[int],
    max_negatives: int = 1000,
    seed: int = 0,
    method: str = "method",
) -> tuple[EvalReport, list[RankedList]]:
    lists = ranking_lists(scorer, truth, pool, max_negatives, seed)
    if not lists:
        raise EmptyEval("no target has a synonym in the pool")
    report = EvalReport(params={"seed": seed, "max_negatives": max_negatives, "protocol": "ranking"})
    report.add(method, "map", mean_average_precision(lists))
    for n in n_values:
        report.add(method, "recall", sum(recall_at_n(rl, n) for rl in lists) / len(lists), n=n)
    return report, lists


# ---------------------------------------------------------------------------
# cross-validated training, scoring, and feature ablation
# ---------------------------------------------------------------------------


def train_fold_models(instances, factory, folds, feature_columns=None):
    """One model per fold, each trained on the instances of all other folds.

    Queries lacking a positive or a negative in the training portion are
    dropped from training (they carry no pair information). Returns the
    fitted models, fold-aligned.
    """
    models = []
    for fold in folds:
        held_out = set(fold)
        train = [inst for inst in instances if inst.query not in held_out]
        by_query = {}
        for inst in train:
            by_query.setdefault(inst.query, set()).add(inst.label)
        usable = {q for q, labels in by_query.items() if labels == {0, 1}}
        train = [inst for inst in train if inst.query in usable]
        X, y, qid = instances_to_arrays(train)
        if feature_columns is not None:
            X = X[:, feature_columns]
        model = factory()
        try:
            model.fit(X, y, qid)
        except TypeError:
            model.fit(X, y)
        models.append(model)
    return models


def crossval_scorer(instances, factory, folds, feature_columns=None) -> Scorer:
    """Scorer that routes each target to the model of its held-out fold."""
    models = train_fold_models(instances, factory, folds, feature_columns)
    fold_by_target = {}
    for i, fold in enumerate(folds):
        for target in fold:
            fold_by_target[target] = i
    features_by_pair = {(inst.query, inst.candidate): inst.features for inst in instances}

    def scorer(target, cands):
        model = models[fold_by_target[target]]
        rows = []
        mask = []
        for c in cands:
            vec = features_by_pair.get((target, c))
            mask.append(vec is not None)
            if vec is not None:
                rows.append(vec.values)
        scores: list[float | None] = [None] * len(cands)
        if rows:
            X = np.array(rows, dtype=float)
            if feature_columns is not None:
                X = X[:, feature_columns]
            predicted = model.predict(X)
            it = iter(predicted)
            for i, ok in enumerate(mask):
                if ok:
                    scores[i] = float(next(it))
        return scores

    return scorer


def _instances_as_lists(instances, scorer) -> list[RankedList]:
    by_query: dict[str, list] = {}
    for inst in instances:
        by_query.setdefault(inst.query, []).append(inst)
    lists = []
    for query in sorted(by_query):
        insts = by_query[query]
        if not any(i.label == 1 for i in insts) or not any(i.label == 0 for i in insts):
            continue
        cands = [i.candidate for i in insts]
        relevant = [i.candidate for i in insts if i.label == 1]
        lists.append(RankedList.from_scores(query, cands, scorer(query, cands), relevant))
    return lists


def crossval_map_at_k(instances, factory, folds, k=150, feature_columns=None) -> float:
    scorer = crossval_scorer(instances, factory, folds, feature_columns)
    return map_at_k(_instances_as_lists(instances, scorer), k)


def ablation(
    instances,
    mode: str,
    factory,
    k_folds: int = 10,
    seed: int = 0,
    map_cutoff: int = 150,
    method: str = "model",
) -> EvalReport:
    """Retrain under feature restriction and report MAP@150 per feature.

    ``single`` uses one feature at a time and reports its MAP@150;
    ``leave_one_out`` drops one feature at a time and reports the fraction
    of the full model's MAP@150 that remains.
    """
    if mode not in ("single", "leave_one_out"):
        raise ValueError(f"unknown ablation mode {mode!r}")
    targets = sorted({inst.query for inst in instances})
    folds = make_folds(targets, k_folds, seed)
    report = EvalReport(params={"mode": mode, "seed": seed, "map_cutoff": map_cutoff})
    full = crossval_map_at_k(instances, factory, folds, map_cutoff)
    report.add(method, f"map_at_{map_cutoff}", full, feature="all")
    for i, name in enumerate(FEATURE_NAMES):
        columns = [i] if mode == "single" else [j for j in range(len(FEATURE_NAMES)) if j != i]
        value = crossval_map_at_k(instances, factory, folds, map_cutoff, feature_columns=columns)
        if mode == "leave_one_out":
            value = value / full if full > 0 else 0.0
        metric = f"map_at_{map_cutoff}" if mode == "single" else f"map_at_{map_cutoff}_fraction"
        report.add(method, metric, value, feature=name)
    return report
