"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines. Tolerances are stated inline; timed criteria assert their budgets.
"""

import itertools
import math
import random
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from synrank.candidates import FilterConfig, save_ground_truth, term_passes
from synrank.corpus import crawl_budget, write_annotated_corpus
from synrank.evaluation import (
    accuracy_at_n,
    average_precision,
    map_at_k,
    mrr,
    recall_at_n,
    run_ranking_eval,
    stable_seed,
    toefl_trial_ranks,
)
from synrank.features import (
    feature_decompound,
    feature_lev_dist,
    feature_ngram,
    feature_pos_ngram,
    feature_windows,
)
from synrank.ltr import LambdaMARTRanker, lambda_gradients
from synrank.ltr.logreg import logistic_loss_and_gradient
from synrank.semantics import (
    cosine,
    lin_similarity,
    pmi,
    ri_similarity,
    save_embeddings,
    train_random_index,
)
from synrank.semantics import EmbeddingTable
from synrank.stats import NgramPositionIndex, TermStats, build_index
from synrank import pipeline

from conftest import make_doc, make_sentence
from oracles import (
    naive_average_precision,
    naive_counts,
    naive_levenshtein,
    naive_pmi,
    naive_recall_at_n,
    naive_slot_count,
    naive_slot_pair_count,
    random_corpus,
)
from synthgen import synthetic_corpus

TOY = Path(__file__).resolve().parents[1] / "data" / "toy"


def _pass(name, detail=""):
    suffix = f" ({detail})" if detail else ""
    print(f"\nACCEPTANCE PASS: {name}{suffix}")


class TestCountOracle:
    def test_counts_equal_naive_reference(self):
        """>= 50 random corpora (<= 200 tokens): exact equality, < 10 s."""
        started = time.monotonic()
        rng = random.Random(2024)
        for trial in range(50):
            docs = random_corpus(rng, max_tokens=200)
            width = rng.choice((2, 3, 8, 16))
            index = build_index(docs, width)
            ref = naive_counts(docs, width)
            assert {
                t: [s.tf, s.noun_count, s.domain_tf, s.background_tf]
                for t, s in index.vocab.items()
            } == ref["vocab"]
            assert index.window.total_windows == ref["total_windows"]
            assert index.window.term_counts == ref["win_term"]
            assert index.window.pair_counts == ref["win_pair"]
            assert index.ngram.slots == ref["ngram_slots"]
            assert index.pos_ngram.slots == ref["pos_slots"]
            assert {t: dict(c) for t, c in index.dep.term_features.items()} == ref["dep_feats"]
        elapsed = time.monotonic() - started
        assert elapsed < 10.0
        _pass("count oracle", f"50 corpora in {elapsed:.2f}s")


class TestFeatureOracles:
    TOL = 1e-9

    def test_all_eight_features_match_independent_oracles(self):
        rng = random.Random(7)
        docs = random_corpus(rng, max_tokens=150)
        index = build_index(docs)
        ref = naive_counts(docs, 16)
        terms = sorted(index.vocab)

        # windows and ngram: exact count ratios against brute-force counts
        for wt, wc in itertools.product(terms[:8], terms[:8]):
            ct = ref["win_term"].get(wt, 0)
            cc = ref["win_term"].get(wc, 0)
            joint = ref["win_pair"].get(tuple(sorted((wt, wc))), 0) if wt != wc else ct
            expected = 0.0 if ct == 0 or cc == 0 or wt == wc else joint / min(ct, cc)
            if wt != wc:
                assert feature_windows(index.window, wt, wc) == expected
            denom = naive_slot_count(ref["ngram_slots"], wc)
            expected_ng = (
                0.0 if denom == 0 else naive_slot_pair_count(ref["ngram_slots"], wt, wc) / denom
            )
            assert feature_ngram(index.ngram, wt, wc) == expected_ng
            denom_pos = naive_slot_count(ref["pos_slots"], wc)
            expected_pos = (
                0.0 if denom_pos == 0 else naive_slot_pair_count(ref["pos_slots"], wt, wc) / denom_pos
            )
            assert feature_pos_ngram(index.pos_ngram, wt, wc) == expected_pos

        # canonical fixture: same-slot fillers of rate/of/building and
        # rate/of/construction score 1.0
        shared_slot = NgramPositionIndex()
        shared_slot.add_trigram(("rate", "of", "building"), ("rate", "of", "building"))
        shared_slot.add_trigram(("rate", "of", "construction"), ("rate", "of", "construction"))
        assert feature_ngram(shared_slot, "building", "construction") == 1.0

        # Levenshtein: exact against an independent DP, incl. the classic pair
        assert feature_lev_dist("kitten", "sitting") == 3
        for _ in range(200):
            a = "".join(rng.choice("abcå") for _ in range(rng.randint(0, 7)))
            b = "".join(rng.choice("abcå") for _ in range(rng.randint(0, 7)))
            assert feature_lev_dist(a, b) == naive_levenshtein(a, b)

        # canonical fixture: apparatskåp and elskåp share the component skåp
        vocab = frozenset({"apparat", "skåp", "el"})
        assert feature_decompound(vocab, "apparatskåp", "elskåp") == 0.5

        # PMI: +-1e-9 against the formula on brute-force counts
        wc_index = index.window
        for wt, wc_term in itertools.product(terms[:8], terms[:8]):
            expected = naive_pmi(
                ref["total_windows"],
                ref["win_term"].get(wt, 0),
                ref["win_term"].get(wc_term, 0),
                ref["win_pair"].get(tuple(sorted((wt, wc_term))), 0) if wt != wc_term else 0,
            )
            got = pmi(wc_index, wt, wc_term)
            if wt == wc_term:
                continue
            if expected is None:
                assert got is None
            else:
                assert got == pytest.approx(expected, abs=self.TOL)

        # Lin similarity: hand-enumerated feature PMIs on a 3-sentence corpus
        amod = [
            make_doc(
                "d",
                "domain",
                make_sentence("stor", "hus", pos=["ADJ", "NOUN"], heads=[1, None], deprels=["amod", None]),
                make_sentence("stor", "villa", pos=["ADJ", "NOUN"], heads=[1, None], deprels=["amod", None]),
                make_sentence("röd", "villa", pos=["ADJ", "NOUN"], heads=[1, None], deprels=["amod", None]),
            )
        ]
        dep = build_index(amod).dep
        i_hus = math.log2(6 / 2)
        i_villa_stor = math.log2(6 / 4)
        i_villa_rod = math.log2(6 / 2)
        expected_lin = (i_hus + i_villa_stor) / (i_hus + i_villa_stor + i_villa_rod)
        assert lin_similarity(dep, "hus", "villa") == pytest.approx(expected_lin, abs=self.TOL)

        # cosine-based features: +-1e-9 against a manual dot/norm computation
        ri = train_random_index(docs, dimension=64, rng_seed=5)
        seen = sorted(ri.context_vectors)[:6]
        for a, b in itertools.combinations(seen, 2):
            u, v = ri.context_vectors[a], ri.context_vectors[b]
            nu, nv = math.sqrt(float(u @ u)), math.sqrt(float(v @ v))
            if nu == 0 or nv == 0:
                assert ri_similarity(ri, a, b) is None
            else:
                assert ri_similarity(ri, a, b) == pytest.approx(float(u @ v) / (nu * nv), abs=self.TOL)
        table = EmbeddingTable(3, {"a": np.array([1.0, 2.0, -1.0]), "b": np.array([0.5, -1.0, 2.0])})
        manual = (1 * 0.5 + 2 * -1.0 + -1 * 2.0) / (math.sqrt(6) * math.sqrt(5.25))
        assert cosine(table.vectors["a"], table.vectors["b"]) == pytest.approx(manual, abs=self.TOL)

        _pass("feature oracles", "8/8 features vs independent implementations")


class TestMetricOracles:
    def test_metrics_match_bruteforce(self):
        # hand cases, exact
        assert mrr([1, 2, 4]) == (1 + 0.5 + 0.25) / 3
        assert mrr([1, 2, 4]) == pytest.approx(0.583333, abs=1e-6)
        from test_evaluation import ranked

        assert average_precision(ranked("q", [1, 0, 1])) == (1 / 1 + 2 / 3) / 2
        assert average_precision(ranked("q", [1, 0, 1])) == pytest.approx(0.833333, abs=1e-6)

        rng = random.Random(99)
        for _ in range(400):
            n = rng.randint(1, 20)
            labels = [rng.random() < 0.35 for _ in range(n)]
            if not any(labels):
                labels[rng.randrange(n)] = True
            rl = ranked("q", labels)
            k = rng.randint(1, 25)
            assert average_precision(rl) == pytest.approx(
                naive_average_precision(labels), abs=1e-9
            )
            assert average_precision(rl, cutoff=150) == pytest.approx(
                naive_average_precision(labels, 150), abs=1e-9
            )
            assert map_at_k([rl], k) == pytest.approx(naive_average_precision(labels, k), abs=1e-9)
            assert recall_at_n(rl, k) == pytest.approx(naive_recall_at_n(labels, k), abs=1e-9)
            ranks = [rng.randint(1, 30) for _ in range(rng.randint(1, 20))]
            assert accuracy_at_n(ranks) == pytest.approx(
                sum(r == 1 for r in ranks) / len(ranks), abs=1e-9
            )
            assert mrr(ranks) == pytest.approx(sum(1 / r for r in ranks) / len(ranks), abs=1e-9)
        _pass("metric oracles", "accuracy/MRR/AP/MAP@k/recall vs brute force")


class TestGradientCheck:
    def test_analytic_gradient_vs_central_differences(self):
        """Relative error <= 1e-5 over 100 random small datasets."""
        rng = np.random.default_rng(314)
        worst = 0.0
        for _ in range(100):
            n = int(rng.integers(3, 30))
            d = int(rng.integers(1, 9))
            X = rng.normal(size=(n, d))
            y = rng.integers(0, 2, size=n)
            if len(set(y.tolist())) < 2:
                y[0] = 1 - y[0]
            wb = rng.normal(scale=0.7, size=d + 1)
            l2 = float(rng.uniform(0, 2))
            _, analytic = logistic_loss_and_gradient(wb, X, y, l2)
            eps = 1e-6
            numeric = np.zeros_like(wb)
            for i in range(wb.shape[0]):
                step = np.zeros_like(wb)
                step[i] = eps
                f_plus, _ = logistic_loss_and_gradient(wb + step, X, y, l2)
                f_minus, _ = logistic_loss_and_gradient(wb - step, X, y, l2)
                numeric[i] = (f_plus - f_minus) / (2 * eps)
            err = np.linalg.norm(analytic - numeric) / max(
                np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-12
            )
            worst = max(worst, err)
            assert err <= 1e-5
        _pass("gradient check", f"worst relative error {worst:.2e}")


class TestLambdaMartSanity:
    def test_lambda_properties_and_boosting_trend(self):
        # zero equal-label lambdas
        lam, weight = lambda_gradients([1, 1, 0, 0], [0.1, 0.2, 0.3, 0.4])
        pair_lam, _ = lambda_gradients([1, 1], [0.5, 0.25])
        assert np.all(pair_lam == 0.0)

        # antisymmetry of pair lambdas
        lam2, _ = lambda_gradients([1, 0], [0.9, -0.3])
        assert lam2[0] == pytest.approx(-lam2[1], abs=1e-15)
        assert lam.sum() == pytest.approx(0.0, abs=1e-12)

        # 3-query fixture with subsampling 1.0: NDCG@10 after 50 trees
        # >= after 1 tree
        rng = np.random.default_rng(21)
        X, y, qid = [], [], []
        for q in range(3):
            for i in range(10):
                label = int(i < 3)
                X.append([label + rng.normal(scale=0.5), rng.normal()])
                y.append(label)
                qid.append(f"q{q}")
        model = LambdaMARTRanker(
            n_trees=50, query_subsample=1.0, max_leaves=4, min_samples_leaf=2, random_state=0
        ).fit(np.array(X), np.array(y), np.array(qid, dtype=object))
        assert model.train_ndcg10_path_[49] >= model.train_ndcg10_path_[0]
        _pass(
            "lambdamart sanity",
            f"NDCG@10 tree1={model.train_ndcg10_path_[0]:.3f} tree50={model.train_ndcg10_path_[49]:.3f}",
        )


class TestFilterBoundaries:
    def test_inclusive_thresholds_and_monotonicity(self):
        cfg = FilterConfig(min_tf=300, min_domain_ratio=30.0, min_noun_ratio=0.5)
        assert term_passes(TermStats(300, 150, 270, 9), cfg)  # all at threshold
        assert not term_passes(TermStats(299, 150, 270, 9), cfg)
        assert not term_passes(TermStats(300, 149, 270, 9), cfg)  # 149/300 < 0.5
        assert not term_passes(TermStats(300, 150, 269, 9), cfg)  # 269 < 30*9

        rng = random.Random(6)
        for _ in range(300):
            tf = rng.randint(0, 600)
            noun = rng.randint(0, tf) if tf else 0
            domain = rng.randint(0, tf) if tf else 0
            background = rng.randint(0, tf - domain) if tf - domain > 0 else 0
            term = TermStats(tf, noun, domain, background)
            loose = FilterConfig(
                rng.randint(0, 300), rng.uniform(0, 30), rng.uniform(0, 0.5)
            )
            tight = FilterConfig(
                loose.min_tf + rng.randint(0, 100),
                loose.min_domain_ratio + rng.uniform(0, 10),
                min(1.0, loose.min_noun_ratio + rng.uniform(0, 0.3)),
            )
            if term_passes(term, tight):
                assert term_passes(term, loose)
        _pass("filter boundary suite", "inclusive thresholds + monotone sweeps")


class TestCrawlBudget:
    def test_budget_table(self):
        assert crawl_budget(10_000) == 2500
        assert crawl_budget(50_000) == 1000
        assert crawl_budget(100_000) == 500
        assert crawl_budget(0) == 2500
        assert crawl_budget(10_001) == 1000
        assert crawl_budget(99_999) == 1000
        _pass("crawl budget", "{10000: 2500, 50000: 1000, 100000: 500}")


class TestCliDeterminism:
    STAGES = ("ingest", "index", "filter", "features", "train", "rank", "eval")

    def run_all(self, out):
        for stage in self.STAGES:
            subprocess.run(
                [sys.executable, "-m", "synrank", stage, "--config", str(TOY / "config.json"), "--out", str(out)],
                check=True,
                capture_output=True,
            )

    def test_two_runs_byte_identical(self, tmp_path):
        """Separate processes (fresh hash randomization) must agree."""
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        self.run_all(out_a)
        self.run_all(out_b)
        compared = 0
        for path_a in sorted(out_a.rglob("*")):
            if path_a.is_dir():
                continue
            rel = path_a.relative_to(out_a)
            assert (out_b / rel).exists(), f"missing {rel} in second run"
            assert path_a.read_bytes() == (out_b / rel).read_bytes(), f"{rel} differs"
            compared += 1
        assert compared >= 15
        _pass("pipeline determinism", f"{compared} artifacts byte-identical")


@pytest.fixture(scope="module")
def synthetic_run(tmp_path_factory):
    """Full pipeline on the planted-synonym corpus; shared by trend tests."""
    started = time.monotonic()
    out = tmp_path_factory.mktemp("synthrun")
    docs, truth = synthetic_corpus(n_pairs=40, n_fillers=1150, seed=1)
    data = tmp_path_factory.mktemp("synthdata")
    write_annotated_corpus(docs, data / "corpus.tsv")
    save_ground_truth(truth, data / "ground_truth.tsv")
    ri = train_random_index(docs, dimension=48, seeds_per_vector=6, rng_seed=3)
    save_embeddings(EmbeddingTable(48, dict(sorted(ri.context_vectors.items()))), data / "embeddings.txt")

    cfg = pipeline.config_from_dict(
        {
            "corpora": {"domain": ["corpus.tsv"]},
            "ground_truth": "ground_truth.tsv",
            "embeddings": "embeddings.txt",
            "filter": {"min_tf": 2, "min_domain_ratio": 1.0, "min_noun_ratio": 0.5},
            "ri": {"dimension": 48, "seeds_per_vector": 6},
            "lambdamart": {"n_trees": 40, "max_leaves": 8, "min_samples_leaf": 5},
            "folds": 4,
            "seed": 11,
            "train_negatives": 120,
            "eval_negatives": 1000,
            "toefl_n": [3, 10, 100, 1000],
            "recall_n": [50],
            "out_dir": str(out),
        },
        base_dir=data,
    )
    pipeline.cmd_ingest(cfg)
    pipeline.cmd_index(cfg)
    pool = pipeline.cmd_filter(cfg)
    pipeline.cmd_features(cfg)
    pipeline.cmd_train(cfg)
    truth_loaded = pipeline.load_ground_truth(cfg.ground_truth)
    cache = pipeline.FeatureCache(pipeline.load_feature_models(cfg))
    scorers = pipeline.build_scorers(cfg, cache)
    return {
        "cfg": cfg,
        "pool": pool,
        "truth": truth_loaded,
        "scorers": scorers,
        "started": started,
    }


class TestPipelineTrend:
    def test_synthetic_trend_reproduction(self, synthetic_run):
        cfg = synthetic_run["cfg"]
        pool = synthetic_run["pool"]
        truth = synthetic_run["truth"]
        scorers = synthetic_run["scorers"]
        n_values = (3, 10, 100, 1000)
        noise = 0.03  # seeded-noise slack for the monotone-decrease check

        # (a) TOEFL accuracy decreases with n for every method
        accuracies = {}
        for method, scorer in scorers.items():
            accs = []
            for n in n_values:
                ranks = toefl_trial_ranks(scorer, truth, pool, n, repeats=1, seed=cfg.seed)
                accs.append(accuracy_at_n(ranks))
            accuracies[method] = accs
            assert all(
                later <= earlier + noise for earlier, later in zip(accs, accs[1:])
            ), f"{method} accuracy not decreasing: {accs}"
            assert accs[0] > accs[-1], f"{method} shows no decay: {accs}"

        # (b) both supervised methods reach MAP >= the PMI baseline
        maps = {}
        for method in ("pmi", "logreg", "lambdamart"):
            report, _ = run_ranking_eval(
                scorers[method], truth, pool, [50], cfg.eval_negatives, cfg.seed, method
            )
            maps[method] = report.values(metric="map")[0].value
        assert maps["logreg"] >= maps["pmi"]
        assert maps["lambdamart"] >= maps["pmi"]

        # (c) a random scorer's accuracy@3 lies in the 99% binomial CI of 0.25
        def random_scorer(target, cands):
            return [stable_seed(99, target, c) % 100_000 / 100_000 for c in cands]

        ranks = toefl_trial_ranks(random_scorer, truth, pool, 3, repeats=26, seed=7)
        assert len(ranks) >= 1000
        acc3 = accuracy_at_n(ranks)
        half_width = 2.576 * math.sqrt(0.25 * 0.75 / len(ranks))
        assert abs(acc3 - 0.25) <= half_width

        elapsed = time.monotonic() - synthetic_run["started"]
        assert elapsed < 300.0
        _pass(
            "pipeline trend reproduction",
            f"maps pmi={maps['pmi']:.3f} logreg={maps['logreg']:.3f} "
            f"lambdamart={maps['lambdamart']:.3f}; acc@3(random)={acc3:.3f}; {elapsed:.0f}s",
        )
