"""Corpus analytics for measuring LLM-assisted revision of scholarly abstracts.

Layers: deterministic text processing and lexicon tagging (textproc), corpus
I/O and author covariates (corpus), writing-rule metrics (rules), style
similarity and difference-in-differences (similarity), regression models and
publication tables (econometrics), feature extraction (features), the revision
detector with its temporal training protocol (detector), and SVG charts
(charts). The ``revstyle`` console script in :mod:`revstyle.cli` drives the
whole pipeline.
"""

__version__ = "0.1.0"

from .corpus import Article, AuthorProfile, CorpusError, load_corpus, save_corpus
from .detector import (
    TrainedDetector,
    adoption_series,
    crossval_train,
    evaluate,
    load_detector,
    metrics_from_counts,
    save_detector,
    score,
    temporal_split,
)
from .econometrics import (
    DesignMatrix,
    assemble_design,
    coefficient_table,
    fit_multinomial_logit,
    fit_ols_fe,
    predict_class_probs,
)
from .rules import RULE_NAMES, RuleVector, measure, measure_corpus, summarize
from .similarity import (
    cosine,
    did_statistic,
    group_centroid,
    pairwise_series,
    vectorize,
)
from .textproc import LexiconSet, load_lexicons, split_sentences, tag_tokens, tokenize

__all__ = [
    "__version__",
    "Article",
    "AuthorProfile",
    "CorpusError",
    "load_corpus",
    "save_corpus",
    "TrainedDetector",
    "adoption_series",
    "crossval_train",
    "evaluate",
    "load_detector",
    "metrics_from_counts",
    "save_detector",
    "score",
    "temporal_split",
    "DesignMatrix",
    "assemble_design",
    "coefficient_table",
    "fit_multinomial_logit",
    "fit_ols_fe",
    "predict_class_probs",
    "RULE_NAMES",
    "RuleVector",
    "measure",
    "measure_corpus",
    "summarize",
    "cosine",
    "did_statistic",
    "group_centroid",
    "pairwise_series",
    "vectorize",
    "LexiconSet",
    "load_lexicons",
    "split_sentences",
    "tag_tokens",
    "tokenize",
]
