"""synrank: rank domain-specific synonym candidates and curate a thesaurus."""

__version__ = "0.1.0"

from .candidates import FilterConfig, filter_candidates, sample_negatives
from .corpus import crawl_budget, read_annotated_corpus, read_plain_corpus, windows
from .features import FEATURE_NAMES, FeatureModels, FeatureVector, extract_features
from .ltr import LambdaMARTRanker, RankLogisticRegression, make_folds
from .semantics import embedding_similarity, lin_similarity, pmi, ri_similarity
from .stats import StatsIndex, build_index

__all__ = [
    "FEATURE_NAMES",
    "FeatureModels",
    "FeatureVector",
    "FilterConfig",
    "LambdaMARTRanker",
    "RankLogisticRegression",
    "StatsIndex",
    "build_index",
    "crawl_budget",
    "embedding_similarity",
    "extract_features",
    "filter_candidates",
    "lin_similarity",
    "make_folds",
    "pmi",
    "read_annotated_corpus",
    "read_plain_corpus",
    "ri_similarity",
    "sample_negatives",
    "windows",
]
