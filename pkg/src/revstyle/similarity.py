"""Term-frequency vectors, cosine similarity, and convergence series.

Texts are embedded as L2-normalized term-count vectors over a
corpus-global vocabulary, so cosine similarity is a plain dot product.
Monthly series compare either two group centroids or each article against
its paired revision. A difference-in-differences statistic with a seeded
monthly block bootstrap quantifies series shifts around an event month.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .corpus import make_filter, month_range
from .textproc import tokenize

# Function words removed when stopword filtering is enabled (off by default).
_STOPWORDS = frozenset(
    """a an the and or but if of to in on for with as by at from into is are was
    were be been being this that these those it its we our us they their them he
    she his her you your i not no nor so than then there here when where which
    who whom what how all any both each such own same can will just do does did
    have has had about between through during above below under over again once
    only very more most other some out up down off while because until""".split()
)


class SimilarityError(ValueError):
    """Raised for empty vectors, empty groups, or unusable series."""


@dataclass(frozen=True)
class TermVector:
    """Sparse unit vector: term -> weight, Euclidean norm 1."""

    entries: dict[str, float]
    norm: float = 1.0


def _normalize(weights: dict[str, float]) -> TermVector:
    norm = math.sqrt(sum(w * w for w in weights.values()))
    if norm == 0.0:
        raise SimilarityError("cannot normalize an all-zero term vector")
    return TermVector(entries={t: w / norm for t, w in weights.items()})


def vectorize(
    text: str,
    vocabulary: frozenset[str] | set[str] | None = None,
    stopwords: frozenset[str] | None = None,
    idf: dict[str, float] | None = None,
) -> TermVector:
    """Unit term-count vector for one text; raises on an empty result."""
    counts = Counter(tok.lower for tok in tokenize(text).tokens)
    weights = {}
    for term, count in counts.items():
        if vocabulary is not None and term not in vocabulary:
            continue
        if stopwords is not None and term in stopwords:
            continue
        weights[term] = float(count) * (idf[term] if idf is not None else 1.0)
    if not weights:
        raise SimilarityError("text has no in-vocabulary terms")
    return _normalize(weights)


class Vectorizer:
    """Corpus-global vocabulary (and optional IDF weights) fixed per run."""

    def __init__(self, texts, remove_stopwords: bool = False, idf_weighting: bool = False):
        self.remove_stopwords = remove_stopwords
        self.idf_weighting = idf_weighting
        df: Counter = Counter()
        n_texts = 0
        for text in texts:
            n_texts += 1
            terms = {tok.lower for tok in tokenize(text).tokens}
            if remove_stopwords:
                terms -= _STOPWORDS
            df.update(terms)
        if not df:
            raise SimilarityError("vectorizer built over texts with no usable terms")
        self.vocabulary = frozenset(df)
        # Smoothed IDF keeps every weight positive, so vectors stay non-empty.
        self.idf = (
            {t: math.log((1 + n_texts) / (1 + df[t])) + 1.0 for t in self.vocabulary}
            if idf_weighting
            else None
        )

    def vectorize(self, text: str) -> TermVector:
        return vectorize(
            text,
            vocabulary=self.vocabulary,
            stopwords=_STOPWORDS if self.remove_stopwords else None,
            idf=self.idf,
        )

    def settings(self) -> dict[str, bool]:
        return {"remove_stopwords": self.remove_stopwords, "idf_weighting": self.idf_weighting}


def cosine(a: TermVector, b: TermVector) -> float:
    """Dot product of two unit vectors; iteration order is sorted, so the
    result is exactly symmetric in its arguments."""
    if len(a.entries) > len(b.entries):
        a, b = b, a
    shared = sorted(t for t in a.entries if t in b.entries)
    return float(sum(a.entries[t] * b.entries[t] for t in shared))


def group_centroid(vectors) -> TermVector:
    """Renormalized mean of unit vectors; centroid of copies of v equals v."""
    vectors = list(vectors)
    if not vectors:
        raise SimilarityError("cannot take the centroid of an empty group")
    sums: dict[str, float] = {}
    for vec in vectors:
        for term in sorted(vec.entries):
            sums[term] = sums.get(term, 0.0) + vec.entries[term]
    n = len(vectors)
    return _normalize({t: w / n for t, w in sums.items()})


@dataclass
class ConvergenceSeries:
    """Monthly similarity values; a month with no usable articles is None."""

    months: list[str]
    values: list[float | None]
    n_a: list[int]
    n_b: list[int]
    mode: str
    label_a: str
    label_b: str

    def as_pairs(self):
        return list(zip(self.months, self.values))


def pairwise_series(
    articles,
    group_a,
    group_b=None,
    mode: str = "centroid",
    label_a: str = "a",
    label_b: str = "b",
    remove_stopwords: bool = False,
    idf_weighting: bool = False,
    vectorizer: Vectorizer | None = None,
) -> ConvergenceSeries:
    """Monthly similarity series.

    mode='centroid' compares the centroids of two article groups (filters
    or predicates). mode='article_vs_revision' averages each group-a
    article's similarity to its paired revision_text.
    """
    if mode not in ("centroid", "article_vs_revision"):
        raise SimilarityError(f"unknown series mode {mode!r}")
    pred_a = group_a if callable(group_a) else make_filter(group_a)
    matched_a = [art for art in articles if pred_a(art)]

    if mode == "centroid":
        if group_b is None:
            raise SimilarityError("centroid mode needs a second group")
        pred_b = group_b if callable(group_b) else make_filter(group_b)
        matched_b = [art for art in articles if pred_b(art)]
        if not matched_a or not matched_b:
            raise SimilarityError("both groups must match at least one article")
        if vectorizer is None:
            texts = [a.text for a in matched_a] + [b.text for b in matched_b]
            vectorizer = Vectorizer(texts, remove_stopwords=remove_stopwords, idf_weighting=idf_weighting)
        span = [a.month for a in matched_a + matched_b]
        months = month_range(min(span), max(span))
        values: list[float | None] = []
        n_a, n_b = [], []
        for month in months:
            va = [vectorizer.vectorize(a.text) for a in matched_a if a.month == month]
            vb = [vectorizer.vectorize(b.text) for b in matched_b if b.month == month]
            n_a.append(len(va))
            n_b.append(len(vb))
            values.append(cosine(group_centroid(va), group_centroid(vb)) if va and vb else None)
        return ConvergenceSeries(months, values, n_a, n_b, mode, label_a, label_b)

    if not matched_a:
        raise SimilarityError("group matches no articles")
    missing = [a.id for a in matched_a if a.revision_text is None]
    if missing:
        raise SimilarityError(f"articles without a paired revision_text: {', '.join(missing[:5])}")
    if vectorizer is None:
        texts = [a.text for a in matched_a] + [a.revision_text for a in matched_a]
        vectorizer = Vectorizer(texts, remove_stopwords=remove_stopwords, idf_weighting=idf_weighting)
    months = month_range(min(a.month for a in matched_a), max(a.month for a in matched_a))
    values = []
    n_a, n_b = [], []
    for month in months:
        sims = [
            cosine(vectorizer.vectorize(a.text), vectorizer.vectorize(a.revision_text))
            for a in matched_a
            if a.month == month
        ]
        n_a.append(len(sims))
        n_b.append(len(sims))
        values.append(float(np.mean(sims)) if sims else None)
    return ConvergenceSeries(months, values, n_a, n_b, mode, label_a, label_b)


@dataclass(frozen=True)
class DidResult:
    estimate: float
    pre_gap: float
    post_gap: float
    ci_low: float
    ci_high: float
    n_pre: int
    n_post: int
    n_boot: int
    seed: int
    event_month: str


def _series_pairs(series) -> dict[str, float]:
    if isinstance(series, ConvergenceSeries):
        return {m: v for m, v in zip(series.months, series.values) if v is not None}
    return {m: v for m, v in series if v is not None}


def did_statistic(
    treated,
    control,
    event_month: str = "2022-11",
    n_boot: int = 1000,
    seed: int = 0,
) -> DidResult:
    """Difference-in-differences of two monthly series around event_month.

    The event month itself belongs to the post period. The 95% CI comes
    from a seeded block bootstrap that resamples months jointly for both
    series, separately within pre and post.
    """
    t_map, c_map = _series_pairs(treated), _series_pairs(control)
    common = sorted(set(t_map) & set(c_map))
    pre = [m for m in common if m < event_month]
    post = [m for m in common if m >= event_month]
    if len(pre) < 2 or len(post) < 2:
        raise SimilarityError(
            f"need at least 2 shared months on each side of {event_month}; "
            f"got {len(pre)} pre and {len(post)} post"
        )
    t_pre = np.array([t_map[m] for m in pre])
    c_pre = np.array([c_map[m] for m in pre])
    t_post = np.array([t_map[m] for m in post])
    c_post = np.array([c_map[m] for m in post])

    pre_gap = float(t_pre.mean() - c_pre.mean())
    post_gap = float(t_post.mean() - c_post.mean())
    estimate = post_gap - pre_gap

    rng = np.random.default_rng(seed)
    pre_idx = rng.integers(0, len(pre), size=(n_boot, len(pre)))
    post_idx = rng.integers(0, len(post), size=(n_boot, len(post)))
    boot = (t_post[post_idx].mean(axis=1) - c_post[post_idx].mean(axis=1)) - (
        t_pre[pre_idx].mean(axis=1) - c_pre[pre_idx].mean(axis=1)
    )
    ci_low, ci_high = np.percentile(boot, [2.5, 97.5])
    return DidResult(
        estimate=estimate,
        pre_gap=pre_gap,
        post_gap=post_gap,
        ci_low=float(ci_low),
        ci_high=float(ci_high),
        n_pre=len(pre),
        n_post=len(post),
        n_boot=n_boot,
        seed=seed,
        event_month=event_month,
    )
