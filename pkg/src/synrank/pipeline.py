"""End-to-end pipeline: ingest -> index -> filter -> features -> train ->
rank -> eval -> ablate, with one artifact per stage in the output directory.

Every stage checks its inputs up front and writes outputs atomically, so a
rerun with the same config and seed reproduces each artifact byte for byte.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Sequence

import numpy as np

from . import corpus as corpus_io
from .candidates import FilterConfig, GroundTruth, filter_candidates, load_ground_truth
from .errors import ConfigError, DuplicateDocId, MissingInput
from .evaluation import (
    EvalReport,
    ablation,
    ranking_lists,
    run_ranking_eval,
    run_toefl_eval,
    stable_seed,
)
from .features import FeatureModels, FeatureVector, extract_features, read_feature_dump, write_feature_dump
from .ltr import (
    LambdaMARTRanker,
    RankingInstance,
    RankLogisticRegression,
    fold_of,
    instances_to_arrays,
    load_model,
    make_folds,
    save_model,
)
from .reports import atomic_write, write_report_json, write_report_tsv, write_run_file
from .semantics import load_embeddings, load_random_index, save_random_index, train_random_index
from .stats import StatsIndex, build_index, load_index, save_index

BASELINES = ("pmi", "embeddingsim", "linsim", "risim")
SUPERVISED = ("logreg", "lambdamart")
DEFAULT_METHODS = ("pmi", "embeddingsim", "linsim", "logreg", "lambdamart")


@dataclass
class CorpusEntry:
    path: str
    format: str = "annotated"  # or "plain"


@dataclass
class PipelineConfig:
    corpora: dict[str, list[CorpusEntry]] = field(default_factory=dict)
    ground_truth: str | None = None
    term_list: str | None = None
    embeddings: str | None = None
    window_width: int = 16
    filter: FilterConfig = field(default_factory=FilterConfig)
    ri_dimension: int = 200
    ri_seeds_per_vector: int = 10
    logreg_l2: float = 1.0
    lambdamart: dict = field(default_factory=dict)
    folds: int = 10
    seed: int = 42
    threads: int = 0  # 0 = use all cores
    train_negatives: int = 1000
    eval_negatives: int = 1000
    toefl_n: tuple[int, ...] = (3, 10, 100, 1000)
    toefl_repeats: int = 1
    recall_n: tuple[int, ...] = (5, 10, 50, 150)
    methods: tuple[str, ...] = DEFAULT_METHODS
    out_dir: str = "out"

    def path(self, name: str) -> Path:
        return Path(self.out_dir) / name

    def n_threads(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)


def load_config(path, overrides: dict | None = None) -> PipelineConfig:
    try:
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
    except FileNotFoundError:
        raise MissingInput(f"config file {path} does not exist") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    return config_from_dict(raw, base_dir=Path(path).parent)


def config_from_dict(raw: dict, base_dir: Path | None = None) -> PipelineConfig:
    def resolve(p):
        if p is None:
            return None
        p = Path(p)
        if base_dir is not None and not p.is_absolute():
            p = base_dir / p
        return str(p)

    known = {
        "corpora", "ground_truth", "term_list", "embeddings", "window_width",
        "filter", "ri", "logreg", "lambdamart", "folds", "seed", "threads",
        "train_negatives", "eval_negatives", "toefl_n", "toefl_repeats",
        "recall_n", "methods", "out_dir",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    corpora: dict[str, list[CorpusEntry]] = {}
    for source, entries in raw.get("corpora", {}).items():
        if source not in corpus_io.SOURCES:
            raise ConfigError(f"unknown corpus source {source!r}")
        specs = []
        for entry in entries:
            if isinstance(entry, str):
                specs.append(CorpusEntry(resolve(entry)))
            else:
                specs.append(CorpusEntry(resolve(entry["path"]), entry.get("format", "annotated")))
        for entry_spec in specs:
            if entry_spec.format not in ("annotated", "plain"):
                raise ConfigError(f"unknown corpus format {entry_spec.format!r}")
        corpora[source] = specs
    if not corpora:
        raise ConfigError("config must list at least one corpus under 'corpora'")
    if "ground_truth" not in raw:
        raise ConfigError("config must name a 'ground_truth' file")

    methods = tuple(raw.get("methods", DEFAULT_METHODS))
    for m in methods:
        if m not in BASELINES + SUPERVISED:
            raise ConfigError(f"unknown method {m!r}")

    cfg = PipelineConfig(
        corpora=corpora,
        ground_truth=resolve(raw["ground_truth"]),
        term_list=resolve(raw.get("term_list")),
        embeddings=resolve(raw.get("embeddings")),
        window_width=int(raw.get("window_width", 16)),
        filter=FilterConfig(**raw.get("filter", {})),
        ri_dimension=int(raw.get("ri", {}).get("dimension", 200)),
        ri_seeds_per_vector=int(raw.get("ri", {}).get("seeds_per_vector", 10)),
        logreg_l2=float(raw.get("logreg", {}).get("l2", 1.0)),
        lambdamart=dict(raw.get("lambdamart", {})),
        folds=int(raw.get("folds", 10)),
        seed=int(raw.get("seed", 42)),
        threads=int(raw.get("threads", 0)),
        train_negatives=int(raw.get("train_negatives", 1000)),
        eval_negatives=int(raw.get("eval_negatives", 1000)),
        toefl_n=tuple(raw.get("toefl_n", (3, 10, 100, 1000))),
        toefl_repeats=int(raw.get("toefl_repeats", 1)),
        recall_n=tuple(raw.get("recall_n", (5, 10, 50, 150))),
        methods=methods,
        out_dir=raw.get("out_dir", "out"),
    )
    if cfg.window_width < 1 or cfg.folds < 1:
        raise ConfigError("window_width and folds must be >= 1")
    return cfg


def _require(path, hint: str) -> Path:
    path = Path(path)
    if not path.exists():
        raise MissingInput(f"{path} does not exist; {hint}")
    return path


def validate_input_paths(cfg: PipelineConfig) -> None:
    """Every path the config references must exist before a command runs."""
    for source, entries in cfg.corpora.items():
        for entry in entries:
            _require(entry.path, f"configured {source} corpus")
    _require(cfg.ground_truth, "configured ground truth")
    if cfg.term_list:
        _require(cfg.term_list, "configured term list")
    if cfg.embeddings:
        _require(cfg.embeddings, "configured embeddings file")


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------


def ingested_path(cfg: PipelineConfig, source: str) -> Path:
    return cfg.path(f"corpus.{source}.tsv")


def cmd_ingest(cfg: PipelineConfig) -> list[Path]:
    """Normalize all configured corpora into annotated TSVs in the out dir."""
    joiner = None
    if cfg.term_list:
        joiner = corpus_io.PhraseJoiner(corpus_io.read_term_list(_require(cfg.term_list, "term list")))
    os.makedirs(cfg.out_dir, exist_ok=True)
    written = []
    for source in sorted(cfg.corpora):
        seen_ids: set[str] = set()
        docs = []
        for entry in cfg.corpora[source]:
            _require(entry.path, f"configured {source} corpus")
            reader = (
                corpus_io.read_annotated_corpus
                if entry.format == "annotated"
                else corpus_io.read_plain_corpus
            )
            for doc in reader(entry.path, source, phrase_joiner=joiner):
                if doc.id in seen_ids:
                    raise DuplicateDocId(f"document id {doc.id!r} occurs in two {source} files")
                seen_ids.add(doc.id)
                docs.append(doc)
        out = ingested_path(cfg, source)
        tmp = out.with_name(out.name + ".tmp")
        corpus_io.write_annotated_corpus(docs, tmp)
        os.replace(tmp, out)
        written.append(out)
    return written


def iter_ingested(cfg: PipelineConfig) -> Iterator[corpus_io.Document]:
    for source in sorted(cfg.corpora):
        path = _require(ingested_path(cfg, source), "run the ingest command first")
        yield from corpus_io.read_annotated_corpus(path, source)


def cmd_index(cfg: PipelineConfig) -> StatsIndex:
    index = build_index(iter_ingested(cfg), width=cfg.window_width)
    out = cfg.path("stats.idx")
    tmp = out.with_name(out.name + ".tmp")
    save_index(index, tmp)
    os.replace(tmp, out)

    ri = train_random_index(
        iter_ingested(cfg),
        dimension=cfg.ri_dimension,
        seeds_per_vector=cfg.ri_seeds_per_vector,
        rng_seed=cfg.seed,
        width=cfg.window_width,
    )
    ri_out = cfg.path("ri.model")
    ri_tmp = ri_out.with_name(ri_out.name + ".tmp")
    save_random_index(ri, ri_tmp)
    os.replace(ri_tmp, ri_out)
    return index


def cmd_filter(cfg: PipelineConfig) -> set[str]:
    index = load_index(_require(cfg.path("stats.idx"), "run the index command first"))
    pool = filter_candidates(index.vocab, cfg.filter)
    with atomic_write(cfg.path("candidates.txt")) as f:
        f.write(f"# seed={cfg.seed} min_tf={cfg.filter.min_tf} "
                f"min_domain_ratio={cfg.filter.min_domain_ratio} "
                f"min_noun_ratio={cfg.filter.min_noun_ratio}\n")
        for term in sorted(pool):
            f.write(term + "\n")
    return pool


def load_pool(cfg: PipelineConfig) -> set[str]:
    path = _require(cfg.path("candidates.txt"), "run the filter command first")
    return set(corpus_io.read_term_list(path))


def load_feature_models(cfg: PipelineConfig) -> FeatureModels:
    index = load_index(_require(cfg.path("stats.idx"), "run the index command first"))
    ri = load_random_index(_require(cfg.path("ri.model"), "run the index command first"))
    embeddings = None
    if cfg.embeddings:
        embeddings = load_embeddings(_require(cfg.embeddings, "configured embeddings file"))
    return FeatureModels(
        stats=index,
        ri=ri,
        embeddings=embeddings,
        decompound_vocab=frozenset(index.vocab),
    )


class FeatureCache:
    """Per-pair feature memo shared by training and every scorer."""

    def __init__(self, models: FeatureModels):
        self.models = models
        self._cache: dict[tuple[str, str], FeatureVector] = {}

    def get(self, target: str, candidate: str) -> FeatureVector:
        key = (target, candidate)
        vec = self._cache.get(key)
        if vec is None:
            vec = self._cache[key] = extract_features(self.models, target, candidate)
        return vec

    def matrix(self, target: str, cands: Sequence[str]) -> np.ndarray:
        return np.array([self.get(target, c).values for c in cands], dtype=float)


def training_pairs(cfg: PipelineConfig, truth: GroundTruth, pool: set[str]):
    """(target, candidate, label) triples: every in-pool synonym plus up to
    ``train_negatives`` seeded negatives per target."""
    from .candidates import sample_negatives

    for target in sorted(truth):
        synonyms = sorted(truth[target] & pool)
        if not synonyms:
            continue
        negatives = sample_negatives(
            pool, truth, target, cfg.train_negatives, stable_seed(cfg.seed, "train", target)
        )
        for s in synonyms:
            yield target, s, 1
        for neg in negatives:
            yield target, neg, 0


def cmd_features(cfg: PipelineConfig) -> Path:
    truth = load_ground_truth(_require(cfg.ground_truth, "configured ground truth"))
    pool = load_pool(cfg)
    cache = FeatureCache(load_feature_models(cfg))
    pairs = list(training_pairs(cfg, truth, pool))

    by_target: dict[str, list[tuple[str, str, int]]] = {}
    for target, cand, label in pairs:
        by_target.setdefault(target, []).append((target, cand, label))

    def featurize(target):
        return [(t, c, label, cache.get(t, c)) for t, c, label in by_target[target]]

    with ThreadPoolExecutor(max_workers=cfg.n_threads()) as pool_exec:
        results = dict(zip(sorted(by_target), pool_exec.map(featurize, sorted(by_target))))
    rows = [row for target in sorted(results) for row in results[target]]

    out = cfg.path("features.tsv")
    tmp = out.with_name(out.name + ".tmp")
    write_feature_dump(rows, tmp)
    os.replace(tmp, out)
    with atomic_write(cfg.path("features.tsv.meta.json")) as f:
        json.dump({"seed": cfg.seed, "train_negatives": cfg.train_negatives}, f, indent=1, sort_keys=True)
        f.write("\n")
    return out


def load_instances(cfg: PipelineConfig) -> list[RankingInstance]:
    path = _require(cfg.path("features.tsv"), "run the features command first")
    return [
        RankingInstance(target, cand, vec, label)
        for target, cand, label, vec in read_feature_dump(path)
    ]


def _trainable(instances: list[RankingInstance]) -> list[RankingInstance]:
    """Drop queries that lack a positive or a negative."""
    labels_by_query: dict[str, set[int]] = {}
    for inst in instances:
        labels_by_query.setdefault(inst.query, set()).add(inst.label)
    usable = {q for q, labels in labels_by_query.items() if labels == {0, 1}}
    return [inst for inst in instances if inst.query in usable]


def make_estimator(cfg: PipelineConfig, method: str):
    if method == "logreg":
        return RankLogisticRegression(l2=cfg.logreg_l2)
    if method == "lambdamart":
        params = {"random_state": cfg.seed, **cfg.lambdamart}
        return LambdaMARTRanker(**params)
    raise ConfigError(f"{method} is not a supervised method")


def cmd_train(cfg: PipelineConfig) -> dict:
    instances = load_instances(cfg)
    targets = sorted({inst.query for inst in instances})
    folds = make_folds(targets, cfg.folds, cfg.seed)
    os.makedirs(cfg.path("models"), exist_ok=True)
    with atomic_write(cfg.path("folds.json")) as f:
        json.dump({"seed": cfg.seed, "folds": folds}, f, indent=1, sort_keys=True)
        f.write("\n")

    trained = {}
    for method in (m for m in cfg.methods if m in SUPERVISED):
        for i, fold in enumerate(folds):
            held_out = set(fold)
            train = _trainable([inst for inst in instances if inst.query not in held_out])
            X, y, qid = instances_to_arrays(train)
            model = make_estimator(cfg, method)
            if method == "lambdamart":
                model.fit(X, y, qid)
            else:
                model.fit(X, y)
            out = cfg.path(f"models/{method}.fold{i}.json")
            tmp = out.with_name(out.name + ".tmp")
            save_model(model, tmp)
            os.replace(tmp, out)
            trained[(method, i)] = model
    return trained


def load_folds(cfg: PipelineConfig) -> list[list[str]]:
    path = _require(cfg.path("folds.json"), "run the train command first")
    with open(path, encoding="utf-8") as f:
        return json.load(f)["folds"]


# ---------------------------------------------------------------------------
# scorers
# ---------------------------------------------------------------------------


def baseline_scorer(method: str, models: FeatureModels) -> Callable:
    from .semantics import embedding_similarity, lin_similarity, pmi, ri_similarity

    if method == "pmi":
        return lambda target, cands: [pmi(models.stats.window, target, c) for c in cands]
    if method == "embeddingsim":
        if models.embeddings is None:
            raise MissingInput("the embeddingsim method needs an 'embeddings' config entry")
        return lambda target, cands: [embedding_similarity(models.embeddings, target, c) for c in cands]
    if method == "linsim":
        return lambda target, cands: [lin_similarity(models.stats.dep, target, c) for c in cands]
    if method == "risim":
        return lambda target, cands: [ri_similarity(models.ri, target, c) for c in cands]
    raise ConfigError(f"{method} is not a baseline method")


def supervised_scorer(cfg: PipelineConfig, method: str, cache: FeatureCache, folds) -> Callable:
    models = []
    for i in range(len(folds)):
        models.append(load_model(_require(
            cfg.path(f"models/{method}.fold{i}.json"), "run the train command first"
        )))

    def scorer(target, cands):
        model = models[fold_of(folds, target)]
        if not cands:
            return []
        return [float(s) for s in model.predict(cache.matrix(target, cands))]

    return scorer


def build_scorers(cfg: PipelineConfig, cache: FeatureCache) -> dict[str, Callable]:
    scorers = {}
    folds = None
    for method in cfg.methods:
        if method in BASELINES:
            scorers[method] = baseline_scorer(method, cache.models)
        else:
            if folds is None:
                folds = load_folds(cfg)
            scorers[method] = supervised_scorer(cfg, method, cache, folds)
    return scorers


def cmd_rank(cfg: PipelineConfig) -> dict[str, Path]:
    truth = load_ground_truth(_require(cfg.ground_truth, "configured ground truth"))
    pool = load_pool(cfg)
    cache = FeatureCache(load_feature_models(cfg))
    scorers = build_scorers(cfg, cache)
    os.makedirs(cfg.path("runs"), exist_ok=True)
    written = {}
    for method in cfg.methods:
        lists = ranking_lists(scorers[method], truth, pool, cfg.eval_negatives, cfg.seed)
        out = cfg.path(f"runs/{method}.run")
        write_run_file(lists, method, out, meta={"seed": cfg.seed, "eval_negatives": cfg.eval_negatives})
        written[method] = out
    return written


def cmd_eval(cfg: PipelineConfig) -> EvalReport:
    truth = load_ground_truth(_require(cfg.ground_truth, "configured ground truth"))
    pool = load_pool(cfg)
    cache = FeatureCache(load_feature_models(cfg))
    scorers = build_scorers(cfg, cache)
    combined = EvalReport(
        params={
            "seed": cfg.seed,
            "toefl_n": list(cfg.toefl_n),
            "toefl_repeats": cfg.toefl_repeats,
            "recall_n": list(cfg.recall_n),
            "eval_negatives": cfg.eval_negatives,
        }
    )
    for method in cfg.methods:
        toefl = run_toefl_eval(
            scorers[method], truth, pool, cfg.toefl_n, cfg.toefl_repeats, cfg.seed, method
        )
        ranking, _ = run_ranking_eval(
            scorers[method], truth, pool, cfg.recall_n, cfg.eval_negatives, cfg.seed, method
        )
        combined.rows.extend(toefl.rows)
        combined.rows.extend(ranking.rows)
    write_report_tsv(combined, cfg.path("report.tsv"))
    write_report_json(combined, cfg.path("report.json"))
    return combined


def cmd_ablate(cfg: PipelineConfig, mode: str = "single") -> EvalReport:
    instances = _trainable(load_instances(cfg))
    combined = EvalReport(params={"seed": cfg.seed, "mode": mode})
    for method in (m for m in cfg.methods if m in SUPERVISED):
        report = ablation(
            instances,
            mode,
            lambda method=method: make_estimator(cfg, method),
            k_folds=cfg.folds,
            seed=cfg.seed,
            method=method,
        )
        combined.rows.extend(report.rows)
    write_report_tsv(combined, cfg.path(f"ablation.{mode}.tsv"))
    write_report_json(combined, cfg.path(f"ablation.{mode}.json"))
    return combined
