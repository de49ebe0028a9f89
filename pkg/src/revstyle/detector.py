"""Revision detection: temporal splits, cross-validated training of a
linear classification head, evaluation, and adoption-rate series.

Detectors are scoped to a (field, prompt) pair for binary revised-vs-original
classification, or to a field with a 7-class multiclass head covering the
original and all six revision styles. Training follows a fixed protocol:
a temporal split, stratified k-fold cross-validation over a small
hyperparameter grid with early stopping, then a refit on the full training
side. Everything is seeded and deterministic; saved models are
byte-identical across reruns.
"""
from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.optimize
import scipy.sparse as sp

from .corpus import make_filter, month_range
from .features import FeatureBlocks, HashedTextFeatures, PrecomputedEmbeddings, Standardizer
from .textproc import LEXICON_NAMES, LexiconSet, load_lexicons

_MAGIC = b"RSDETECT1\n"

DEFAULT_TRAIN_END = "2021-10-01"
DEFAULT_TEST_START = "2021-10-01"
DEFAULT_TEST_END = "2021-11-30"


class DetectorError(ValueError):
    """Raised for bad splits, unusable training sets, or scoring misuse."""


def temporal_split(
    articles,
    train_end: str = DEFAULT_TRAIN_END,
    test_start: str = DEFAULT_TEST_START,
    test_end: str = DEFAULT_TEST_END,
):
    """Split by update date: train strictly before train_end, test within
    [test_start, test_end]. An article dated exactly train_end falls on the
    test side when the dates coincide."""
    if not (train_end <= test_start <= test_end):
        raise DetectorError(
            f"split dates must satisfy train_end <= test_start <= test_end; "
            f"got {train_end}, {test_start}, {test_end}"
        )
    train = [a for a in articles if a.updated[:10] < train_end]
    test = [a for a in articles if test_start <= a.updated[:10] <= test_end]
    if not train:
        raise DetectorError(f"no articles before {train_end} to train on")
    if not test:
        raise DetectorError(f"no articles between {test_start} and {test_end} to test on")
    return train, test


# ---------------------------------------------------------------------------
# Linear classification head
# ---------------------------------------------------------------------------


def _softmax(Z: np.ndarray) -> np.ndarray:
    m = Z.max(axis=1, keepdims=True)
    ez = np.exp(Z - m)
    return ez / ez.sum(axis=1, keepdims=True)


def _head_margins(blocks: FeatureBlocks, w_sparse, w_dense, bias) -> np.ndarray:
    Z = blocks.dense @ w_dense.T + bias
    if blocks.sparse is not None and w_sparse.size:
        Z = Z + blocks.sparse @ w_sparse.T
    return Z


def _fit_head(blocks: FeatureBlocks, y_idx: np.ndarray, n_classes: int, l2: float, max_iter: int = 300):
    """L2-regularized multinomial logistic head trained with L-BFGS."""
    n = blocks.n_rows
    d_sparse = blocks.sparse.shape[1] if blocks.sparse is not None else 0
    d_dense = blocks.dense.shape[1]
    Y = np.zeros((n, n_classes))
    Y[np.arange(n), y_idx] = 1.0
    rows = np.arange(n)

    def split(theta):
        w_sparse = theta[: n_classes * d_sparse].reshape(n_classes, d_sparse)
        w_dense = theta[n_classes * d_sparse : n_classes * (d_sparse + d_dense)].reshape(
            n_classes, d_dense
        )
        bias = theta[n_classes * (d_sparse + d_dense) :]
        return w_sparse, w_dense, bias

    def objective(theta):
        w_sparse, w_dense, bias = split(theta)
        Z = _head_margins(blocks, w_sparse, w_dense, bias)
        m = Z.max(axis=1)
        log_denom = m + np.log(np.exp(Z - m[:, None]).sum(axis=1))
        loss = -(Z[rows, y_idx] - log_denom).sum()
        loss += 0.5 * l2 * ((w_sparse**2).sum() + (w_dense**2).sum())
        P = _softmax(Z)
        D = P - Y
        g_sparse = (blocks.sparse.T @ D).T + l2 * w_sparse if d_sparse else np.zeros((n_classes, 0))
        g_dense = blocks.dense.T @ D
        grad = np.concatenate([np.asarray(g_sparse).ravel(), (g_dense.T + l2 * w_dense).ravel(), D.sum(axis=0)])
        return loss, grad

    theta0 = np.zeros(n_classes * (d_sparse + d_dense) + n_classes)
    result = scipy.optimize.minimize(
        objective,
        theta0,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": max_iter, "ftol": 1e-12, "gtol": 1e-7},
    )
    return split(result.x)


# ---------------------------------------------------------------------------
# Trained model
# ---------------------------------------------------------------------------


@dataclass
class TrainedDetector:
    scope_field: str  # a discipline name or "all"
    scope_prompt: int | str  # 1..6 for binary, "multiclass" for 7-class
    classes: list[int]
    feature_mode: str  # "hashed" or "embeddings"
    weights_sparse: np.ndarray  # (K, d_sparse); empty in embeddings mode
    weights_dense: np.ndarray  # (K, d_dense)
    bias: np.ndarray  # (K,)
    sparse_scale: np.ndarray | None
    dense_mean: np.ndarray
    dense_scale: np.ndarray
    char_dim: int
    token_dim: int
    ngram_range: tuple[int, int]
    l2: float
    lexicon_terms: dict[str, list[str]] | None
    meta: dict = field(default_factory=dict)
    _extractor: HashedTextFeatures | None = field(default=None, repr=False, compare=False)

    @property
    def is_binary(self) -> bool:
        return self.scope_prompt != "multiclass"

    def lexicons(self) -> LexiconSet:
        if self.lexicon_terms is None:
            return load_lexicons()
        return LexiconSet(**{name: frozenset(self.lexicon_terms[name]) for name in LEXICON_NAMES})

    def extractor(self) -> HashedTextFeatures:
        if self.feature_mode != "hashed":
            raise DetectorError("model was trained on precomputed embeddings; pass those for scoring")
        if self._extractor is None:
            self._extractor = HashedTextFeatures(
                self.lexicons(),
                char_dim=self.char_dim,
                token_dim=self.token_dim,
                ngram_range=self.ngram_range,
            )
        return self._extractor

    def standardizer(self) -> Standardizer:
        return Standardizer(
            sparse_scale=self.sparse_scale, dense_mean=self.dense_mean, dense_scale=self.dense_scale
        )


def _detector_probs(detector: TrainedDetector, blocks: FeatureBlocks) -> np.ndarray:
    std = detector.standardizer().transform(blocks)
    return _softmax(_head_margins(std, detector.weights_sparse, detector.weights_dense, detector.bias))


def _blocks_for(detector: TrainedDetector, articles, embeddings=None) -> FeatureBlocks:
    if detector.feature_mode == "embeddings":
        if embeddings is None:
            raise DetectorError("this model scores precomputed embeddings; none were provided")
        return embeddings.extract_for(articles)
    return detector.extractor().extract([a.text for a in articles])


def score(detector: TrainedDetector, text: str, article_field: str | None = None):
    """Score one text: P(revised) for binary models, a probability vector
    over classes 0..6 for multiclass models."""
    if article_field is not None and detector.scope_field not in ("all", article_field):
        warnings.warn(
            f"scoring a {article_field} text with a detector scoped to {detector.scope_field}",
            stacklevel=2,
        )
    blocks = detector.extractor().extract([text])
    probs = _detector_probs(detector, blocks)[0]
    if detector.is_binary:
        return float(probs[detector.classes.index(int(detector.scope_prompt))])
    return probs


# ---------------------------------------------------------------------------
# Training protocol
# ---------------------------------------------------------------------------


def _stratified_folds(y_idx: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Fold id per example; each class spread round-robin after a shuffle,
    so fold sizes per class differ by at most one."""
    folds = np.empty(len(y_idx), dtype=int)
    for cls in np.unique(y_idx):
        members = np.where(y_idx == cls)[0]
        order = rng.permutation(members)
        folds[order] = np.arange(len(order)) % k
    for fold in range(k):
        present = np.unique(y_idx[folds == fold])
        if len(present) != len(np.unique(y_idx)):
            raise DetectorError(f"stratification failed: fold {fold} is missing a class")
    return folds


def _scope_training_set(articles, scope_field: str, scope_prompt) -> tuple[list, list[int]]:
    pool = [a for a in articles if scope_field == "all" or a.field == scope_field]
    if scope_prompt == "multiclass":
        classes = list(range(7))
        pool = [a for a in pool if a.revision_label in classes]
    else:
        prompt = int(scope_prompt)
        if prompt not in range(1, 7):
            raise DetectorError(f"prompt scope must be 1..6 or 'multiclass', got {scope_prompt!r}")
        classes = [0, prompt]
        pool = [a for a in pool if a.revision_label in classes]
    return pool, classes


def crossval_train(
    train_articles,
    scope_field: str = "all",
    scope_prompt: int | str = "multiclass",
    k: int = 5,
    patience: int = 10,
    l2_grid=(0.1, 1.0, 10.0),
    dim_grid=(2**14, 2**18),
    token_dim: int = 2**15,
    ngram_range: tuple[int, int] = (3, 5),
    lexicons: LexiconSet | None = None,
    embeddings: PrecomputedEmbeddings | None = None,
    seed: int = 0,
    max_lbfgs_iter: int = 300,
    meta: dict | None = None,
) -> TrainedDetector:
    """Stratified k-fold model selection plus a full refit.

    The grid walks n-gram hash dimensions (outer) and L2 strengths (inner)
    in a fixed order, keeping the configuration with the best mean
    validation accuracy; selection stops early after `patience` evaluations
    without improvement. With precomputed embeddings the dimension axis
    collapses to a single entry. Deterministic for a given seed: reruns
    yield bitwise-identical weights.
    """
    pool, classes = _scope_training_set(train_articles, scope_field, scope_prompt)
    if not pool:
        raise DetectorError(f"no training articles in scope {scope_field!r}/{scope_prompt!r}")
    y = np.array([a.revision_label for a in pool])
    class_to_idx = {c: i for i, c in enumerate(classes)}
    counts = {c: int((y == c).sum()) for c in classes}
    too_few = {c: n for c, n in counts.items() if n < 2 * k}
    if too_few:
        raise DetectorError(f"need at least {2 * k} examples per class; got {too_few}")
    y_idx = np.array([class_to_idx[int(v)] for v in y])

    rng = np.random.default_rng(seed)
    folds = _stratified_folds(y_idx, k, rng)

    if lexicons is None:
        lexicons = load_lexicons()

    if embeddings is not None:
        feature_sets: list[tuple[int, FeatureBlocks, HashedTextFeatures | None]] = [
            (embeddings.dim, embeddings.extract_for(pool), None)
        ]
    else:
        feature_sets = []
        for char_dim in dim_grid:
            extractor = HashedTextFeatures(
                lexicons, char_dim=char_dim, token_dim=token_dim, ngram_range=ngram_range
            )
            feature_sets.append((char_dim, extractor.extract([a.text for a in pool]), extractor))

    evaluations = []  # (mean accuracy, config index) in walk order
    configs = [(fs_idx, l2) for fs_idx in range(len(feature_sets)) for l2 in l2_grid]
    best_idx, best_acc = 0, -1.0
    since_best = 0
    for cfg_idx, (fs_idx, l2) in enumerate(configs):
        _, blocks, _ = feature_sets[fs_idx]
        fold_acc = []
        for fold in range(k):
            val_mask = folds == fold
            train_blocks = blocks.rows(~val_mask)
            std = Standardizer.fit(train_blocks)
            w_s, w_d, b = _fit_head(
                std.transform(train_blocks), y_idx[~val_mask], len(classes), l2, max_lbfgs_iter
            )
            val_probs = _softmax(
                _head_margins(std.transform(blocks.rows(val_mask)), w_s, w_d, b)
            )
            fold_acc.append(float((val_probs.argmax(axis=1) == y_idx[val_mask]).mean()))
        acc = float(np.mean(fold_acc))
        evaluations.append((acc, cfg_idx))
        if acc > best_acc:
            best_acc, best_idx = acc, cfg_idx
            since_best = 0
        else:
            since_best += 1
            if since_best >= patience:
                break

    fs_idx, l2 = configs[best_idx]
    char_dim, blocks, extractor = feature_sets[fs_idx]
    std = Standardizer.fit(blocks)
    w_s, w_d, b = _fit_head(std.transform(blocks), y_idx, len(classes), l2, max_lbfgs_iter)

    info = dict(meta or {})
    info.update(
        {
            "seed": seed,
            "k_folds": k,
            "patience": patience,
            "n_train": len(pool),
            "cv_accuracy": best_acc,
            "evaluations": len(evaluations),
            "class_counts": {str(c): counts[c] for c in classes},
        }
    )
    if extractor is not None:
        info["hash_collisions"] = extractor.collision_counts()

    return TrainedDetector(
        scope_field=scope_field,
        scope_prompt=scope_prompt,
        classes=classes,
        feature_mode="embeddings" if embeddings is not None else "hashed",
        weights_sparse=np.asarray(w_s, dtype=np.float64),
        weights_dense=np.asarray(w_d, dtype=np.float64),
        bias=np.asarray(b, dtype=np.float64),
        sparse_scale=std.sparse_scale,
        dense_mean=std.dense_mean,
        dense_scale=std.dense_scale,
        char_dim=char_dim if embeddings is None else 0,
        token_dim=token_dim if embeddings is None else 0,
        ngram_range=ngram_range,
        l2=l2,
        lexicon_terms={name: sorted(getattr(lexicons, name)) for name in LEXICON_NAMES}
        if embeddings is None
        else None,
        meta=info,
    )


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def metrics_from_counts(tp: int, fp: int, fn: int, tn: int) -> dict[str, float]:
    """Precision/recall/accuracy/F1 from confusion counts; degenerate
    denominators yield 0."""
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    total = tp + fp + fn + tn
    accuracy = (tp + tn) / total if total else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"precision": precision, "recall": recall, "accuracy": accuracy, "f1": f1}


@dataclass
class EvalReport:
    precision: float
    recall: float
    accuracy: float
    f1: float
    classes: list[int]
    confusion: np.ndarray  # row-normalized percentages, rows = true class
    records: list[dict]
    scope_field: str
    scope_prompt: int | str
    threshold: float
    n_test: int

    def format_confusion(self) -> str:
        width = max(len(f"{v:.2f}%") for v in self.confusion.ravel()) if self.confusion.size else 7
        head_w = max(len(str(c)) for c in self.classes) + 5
        lines = ["true\\pred".ljust(head_w) + "  ".join(str(c).rjust(width) for c in self.classes)]
        for i, cls in enumerate(self.classes):
            cells = "  ".join(f"{v:.2f}%".rjust(width) for v in self.confusion[i])
            lines.append(str(cls).ljust(head_w) + cells)
        return "\n".join(lines) + "\n"


def evaluate(
    detector: TrainedDetector,
    test_articles,
    threshold: float = 0.5,
    embeddings: PrecomputedEmbeddings | None = None,
) -> EvalReport:
    """Score a labeled test set within the detector's scope.

    Binary models are evaluated on originals plus their scoped prompt, with
    P(revised) >= threshold as the positive call. Multiclass models use the
    argmax class; the headline metrics collapse to revised-vs-original.
    """
    pool, classes = _scope_training_set(test_articles, detector.scope_field, detector.scope_prompt)
    if not pool:
        raise DetectorError("no test articles in the detector's scope")
    present = {a.revision_label for a in pool}
    missing = [c for c in classes if c not in present]
    if missing:
        raise DetectorError(f"test set is missing classes {missing}; confusion rows would be empty")

    probs = _detector_probs(detector, _blocks_for(detector, pool, embeddings))
    if detector.is_binary:
        prompt = int(detector.scope_prompt)
        p_rev = probs[:, classes.index(prompt)]
        preds = np.where(p_rev >= threshold, prompt, 0)
    else:
        preds = np.array([classes[i] for i in probs.argmax(axis=1)])

    true = np.array([a.revision_label for a in pool])
    true_rev = true > 0
    pred_rev = preds > 0
    tp = int((true_rev & pred_rev).sum())
    fp = int((~true_rev & pred_rev).sum())
    fn = int((true_rev & ~pred_rev).sum())
    tn = int((~true_rev & ~pred_rev).sum())
    metrics = metrics_from_counts(tp, fp, fn, tn)

    confusion = np.zeros((len(classes), len(classes)))
    for t, p in zip(true, preds):
        confusion[classes.index(int(t)), classes.index(int(p))] += 1.0
    confusion = 100.0 * confusion / confusion.sum(axis=1, keepdims=True)

    records = [
        {
            "id": a.id,
            "true": int(t),
            "pred": int(p),
            "probs": [float(v) for v in prob_row],
        }
        for a, t, p, prob_row in zip(pool, true, preds, probs)
    ]
    return EvalReport(
        precision=metrics["precision"],
        recall=metrics["recall"],
        accuracy=metrics["accuracy"],
        f1=metrics["f1"],
        classes=classes,
        confusion=confusion,
        records=records,
        scope_field=detector.scope_field,
        scope_prompt=detector.scope_prompt,
        threshold=threshold,
        n_test=len(pool),
    )


def classify_corpus(
    articles,
    detector: TrainedDetector,
    threshold: float = 0.5,
    embeddings: PrecomputedEmbeddings | None = None,
):
    """Return articles with adopter_flag filled in by the detector."""
    from dataclasses import replace as _replace

    pool = list(articles)
    if not pool:
        return []
    probs = _detector_probs(detector, _blocks_for(detector, pool, embeddings))
    out = []
    for article, prob_row in zip(pool, probs):
        if detector.is_binary:
            flag = bool(prob_row[detector.classes.index(int(detector.scope_prompt))] >= threshold)
        else:
            flag = detector.classes[int(prob_row.argmax())] > 0
        out.append(_replace(article, adopter_flag=flag))
    return out


# ---------------------------------------------------------------------------
# Adoption series
# ---------------------------------------------------------------------------


@dataclass
class AdoptionSeries:
    group: str
    months: list[str]
    raw: list[float | None]  # % of articles flagged as revised
    adjusted: list[float | None]  # raw minus the group's baseline mean
    counts: list[int]
    baseline_mean: float
    event_month: str


def adoption_series(
    articles,
    detector: TrainedDetector | None = None,
    group_filters: dict | None = None,
    event_month: str = "2022-11",
    baseline_window: int | None = None,
    threshold: float = 0.5,
    embeddings: PrecomputedEmbeddings | None = None,
) -> dict[str, AdoptionSeries]:
    """Monthly revised-share series per group, baseline-adjusted.

    The revised flag comes from the detector when one is given, otherwise
    from adopter_flag, otherwise from revision_label > 0. Each group's
    baseline is the mean raw share over its pre-event months (optionally
    only the last `baseline_window` of them); the adjusted series subtracts
    it, so the baseline-window mean is zero by construction.
    """
    pool = list(articles)
    if detector is not None:
        pool = classify_corpus(pool, detector, threshold=threshold, embeddings=embeddings)
    flags = {
        a.id: (a.adopter_flag if a.adopter_flag is not None else a.revision_label > 0) for a in pool
    }

    if not group_filters:
        group_filters = {"all": None}
    out = {}
    for label, spec in group_filters.items():
        pred = spec if callable(spec) else make_filter(spec)
        members = [a for a in pool if pred(a)]
        if not members:
            raise DetectorError(f"group {label!r} matches no articles")
        months = month_range(min(a.month for a in members), max(a.month for a in members))
        raw: list[float | None] = []
        counts = []
        for month in months:
            in_month = [a for a in members if a.month == month]
            counts.append(len(in_month))
            if in_month:
                raw.append(100.0 * sum(1 for a in in_month if flags[a.id]) / len(in_month))
            else:
                raw.append(None)
        baseline = [v for m, v in zip(months, raw) if m < event_month and v is not None]
        if baseline_window is not None:
            baseline = baseline[-baseline_window:]
        if not baseline:
            raise DetectorError(f"group {label!r} has no pre-{event_month} months for a baseline")
        base_mean = float(np.mean(baseline))
        adjusted = [None if v is None else v - base_mean for v in raw]
        out[label] = AdoptionSeries(
            group=label,
            months=months,
            raw=raw,
            adjusted=adjusted,
            counts=counts,
            baseline_mean=base_mean,
            event_month=event_month,
        )
    return out


# ---------------------------------------------------------------------------
# Model persistence (single-file, deterministic)
# ---------------------------------------------------------------------------


def _array_entries(detector: TrainedDetector):
    arrays = [
        ("weights_sparse", detector.weights_sparse),
        ("weights_dense", detector.weights_dense),
        ("bias", detector.bias),
        ("dense_mean", detector.dense_mean),
        ("dense_scale", detector.dense_scale),
    ]
    if detector.sparse_scale is not None:
        arrays.append(("sparse_scale", detector.sparse_scale))
    return arrays


def save_detector(detector: TrainedDetector, path) -> None:
    """Write the model as magic + JSON header + raw float64 arrays.

    The format embeds everything needed to score (including lexicon terms
    for hashed features) and contains no timestamps, so repeated saves of
    the same model are byte-identical.
    """
    entries = []
    payload = bytearray()
    for name, arr in _array_entries(detector):
        data = np.ascontiguousarray(arr, dtype=np.float64).tobytes()
        entries.append(
            {"name": name, "dtype": "float64", "shape": list(np.shape(arr)), "offset": len(payload), "nbytes": len(data)}
        )
        payload.extend(data)
    header = {
        "format": 1,
        "scope_field": detector.scope_field,
        "scope_prompt": detector.scope_prompt,
        "classes": detector.classes,
        "feature_mode": detector.feature_mode,
        "char_dim": detector.char_dim,
        "token_dim": detector.token_dim,
        "ngram_range": list(detector.ngram_range),
        "l2": detector.l2,
        "lexicons": detector.lexicon_terms,
        "meta": detector.meta,
        "arrays": entries,
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(_MAGIC)
        handle.write(len(blob).to_bytes(8, "little"))
        handle.write(blob)
        handle.write(bytes(payload))


def load_detector(path) -> TrainedDetector:
    with open(path, "rb") as handle:
        magic = handle.read(len(_MAGIC))
        if magic != _MAGIC:
            raise DetectorError(f"{path} is not a detector model file")
        header_len = int.from_bytes(handle.read(8), "little")
        header = json.loads(handle.read(header_len).decode("utf-8"))
        payload = handle.read()
    arrays = {}
    for entry in header["arrays"]:
        start, nbytes = entry["offset"], entry["nbytes"]
        arr = np.frombuffer(payload[start : start + nbytes], dtype=np.float64).copy()
        arrays[entry["name"]] = arr.reshape(entry["shape"])
    return TrainedDetector(
        scope_field=header["scope_field"],
        scope_prompt=header["scope_prompt"],
        classes=list(header["classes"]),
        feature_mode=header["feature_mode"],
        weights_sparse=arrays["weights_sparse"],
        weights_dense=arrays["weights_dense"],
        bias=arrays["bias"],
        sparse_scale=arrays.get("sparse_scale"),
        dense_mean=arrays["dense_mean"],
        dense_scale=arrays["dense_scale"],
        char_dim=header["char_dim"],
        token_dim=header["token_dim"],
        ngram_range=tuple(header["ngram_range"]),
        l2=header["l2"],
        lexicon_terms=header["lexicons"],
        meta=header["meta"],
    )


def corpus_fingerprint(articles) -> str:
    """Stable hash of (id, updated, revision_label) for training metadata."""
    digest = hashlib.sha256()
    for a in sorted(articles, key=lambda x: x.id):
        digest.update(f"{a.id}\x00{a.updated}\x00{a.revision_label}\n".encode("utf-8"))
    return digest.hexdigest()
