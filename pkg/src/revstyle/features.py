"""Feature extraction for the revision detector.

Texts become two blocks: a sparse block of hashed character n-grams plus
hashed token unigrams, and a dense block of rule-metric and length
features. Hashing uses CRC32, so feature indices are stable across
processes. An alternative source reads precomputed per-article embedding
vectors from a text file. Standardization statistics are fit on training
data and stored with the model; sparse columns are scaled (not centered)
to preserve sparsity.
"""
from __future__ import annotations

import re
import zlib
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .rules import measure
from .textproc import LexiconSet, tokenize

DENSE_RULE_FIELDS = 11
DENSE_LENGTH_FIELDS = 3  # char count, mean token length, mean sentence length
DENSE_DIM = DENSE_RULE_FIELDS + DENSE_LENGTH_FIELDS

_WS_RUN = re.compile(r"\s+")


class FeatureError(ValueError):
    """Raised for malformed embedding files or unusable feature requests."""


@dataclass
class FeatureBlocks:
    """Aligned sparse and dense feature rows for a batch of texts."""

    sparse: sp.csr_matrix | None
    dense: np.ndarray

    @property
    def n_rows(self) -> int:
        return self.dense.shape[0]

    @property
    def dim(self) -> int:
        return (self.sparse.shape[1] if self.sparse is not None else 0) + self.dense.shape[1]

    def rows(self, index) -> "FeatureBlocks":
        return FeatureBlocks(
            sparse=self.sparse[index] if self.sparse is not None else None,
            dense=self.dense[index],
        )


def _bucket(cache: dict, key: str, prefix: bytes, dim: int) -> int:
    idx = cache.get(key)
    if idx is None:
        idx = zlib.crc32(prefix + key.encode("utf-8")) % dim
        cache[key] = idx
    return idx


class HashedTextFeatures:
    """Hashed char n-grams + token unigrams + rule/length dense features."""

    def __init__(
        self,
        lexicons: LexiconSet,
        char_dim: int = 2**18,
        token_dim: int = 2**15,
        ngram_range: tuple[int, int] = (3, 5),
    ):
        if char_dim <= 0 or token_dim <= 0:
            raise FeatureError("hash dimensions must be positive")
        lo, hi = ngram_range
        if lo < 1 or hi < lo:
            raise FeatureError(f"bad n-gram range {ngram_range!r}")
        self.lexicons = lexicons
        self.char_dim = char_dim
        self.token_dim = token_dim
        self.ngram_range = (lo, hi)
        self._char_cache: dict[str, int] = {}
        self._token_cache: dict[str, int] = {}

    @property
    def sparse_dim(self) -> int:
        return self.char_dim + self.token_dim

    def collision_counts(self) -> dict[str, int]:
        """Distinct keys seen so far minus distinct buckets they occupy."""
        return {
            "char_ngrams": len(self._char_cache) - len(set(self._char_cache.values())),
            "token_unigrams": len(self._token_cache) - len(set(self._token_cache.values())),
        }

    def _text_counts(self, text: str) -> dict[int, float]:
        counts: dict[int, float] = {}
        normalized = _WS_RUN.sub(" ", text.lower()).strip()
        lo, hi = self.ngram_range
        for n in range(lo, hi + 1):
            prefix = f"c{n}:".encode("ascii")
            for i in range(max(0, len(normalized) - n + 1)):
                idx = _bucket(self._char_cache, f"{n}\x00" + normalized[i : i + n], prefix, self.char_dim)
                counts[idx] = counts.get(idx, 0.0) + 1.0
        offset = self.char_dim
        for tok in tokenize(text).tokens:
            idx = offset + _bucket(self._token_cache, tok.lower, b"tok:", self.token_dim)
            counts[idx] = counts.get(idx, 0.0) + 1.0
        return counts

    def extract(self, texts) -> FeatureBlocks:
        texts = list(texts)
        indptr = [0]
        indices: list[int] = []
        data: list[float] = []
        dense = np.zeros((len(texts), DENSE_DIM))
        for row, text in enumerate(texts):
            counts = self._text_counts(text)
            for idx in sorted(counts):
                indices.append(idx)
                data.append(counts[idx])
            indptr.append(len(indices))

            vec = measure(text, self.lexicons)
            dense[row, :DENSE_RULE_FIELDS] = vec.as_row()
            tokenized = tokenize(text)
            n_tok = len(tokenized.tokens)
            dense[row, DENSE_RULE_FIELDS] = len(text)
            dense[row, DENSE_RULE_FIELDS + 1] = (
                sum(len(t.surface) for t in tokenized.tokens) / n_tok if n_tok else 0.0
            )
            dense[row, DENSE_RULE_FIELDS + 2] = (
                n_tok / len(tokenized.sentences) if tokenized.sentences else 0.0
            )
        sparse = sp.csr_matrix(
            (np.array(data), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
            shape=(len(texts), self.sparse_dim),
        )
        return FeatureBlocks(sparse=sparse, dense=dense)


class PrecomputedEmbeddings:
    """Per-article dense vectors from a text file: id<TAB>v1,v2,...

    Replaces the hashed features when an external embedding model has
    already been run; all vectors must share one dimensionality.
    """

    def __init__(self, path):
        self.vectors: dict[str, np.ndarray] = {}
        self.dim = 0
        errors: list[str] = []
        with open(path, encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                line = line.rstrip("\n")
                if not line.strip():
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    errors.append(f"line {line_no}: expected id<TAB>floats")
                    continue
                art_id, payload = parts
                try:
                    vec = np.array([float(v) for v in payload.split(",")], dtype=float)
                except ValueError:
                    errors.append(f"line {line_no}: non-numeric vector component")
                    continue
                if art_id in self.vectors:
                    errors.append(f"line {line_no}: duplicate id {art_id!r}")
                    continue
                if self.dim == 0:
                    self.dim = vec.size
                elif vec.size != self.dim:
                    errors.append(f"line {line_no}: vector length {vec.size} != expected {self.dim}")
                    continue
                self.vectors[art_id] = vec
        if errors:
            raise FeatureError(f"{len(errors)} bad line(s) in {path}:\n" + "\n".join(errors))
        if not self.vectors:
            raise FeatureError(f"{path}: no embedding vectors found")

    def extract_for(self, articles) -> FeatureBlocks:
        missing = [a.id for a in articles if a.id not in self.vectors]
        if missing:
            raise FeatureError(f"no embedding vector for articles: {', '.join(missing[:5])}")
        dense = np.vstack([self.vectors[a.id] for a in articles]) if articles else np.zeros((0, self.dim))
        return FeatureBlocks(sparse=None, dense=dense)


@dataclass
class Standardizer:
    """Training-set standardization: sparse columns are divided by their
    population SD (zeros preserved); dense columns are fully z-scored.
    Constant columns keep scale 1."""

    sparse_scale: np.ndarray | None
    dense_mean: np.ndarray
    dense_scale: np.ndarray

    @classmethod
    def fit(cls, blocks: FeatureBlocks) -> "Standardizer":
        n = max(blocks.n_rows, 1)
        if blocks.sparse is not None:
            mean = np.asarray(blocks.sparse.mean(axis=0)).ravel()
            mean_sq = np.asarray(blocks.sparse.multiply(blocks.sparse).mean(axis=0)).ravel()
            var = np.maximum(mean_sq - mean**2, 0.0)
            scale = np.sqrt(var)
            scale[scale == 0.0] = 1.0
        else:
            scale = None
        dense_mean = blocks.dense.mean(axis=0) if n else np.zeros(blocks.dense.shape[1])
        dense_scale = blocks.dense.std(axis=0)
        dense_scale = np.where(dense_scale == 0.0, 1.0, dense_scale)
        return cls(sparse_scale=scale, dense_mean=dense_mean, dense_scale=dense_scale)

    def transform(self, blocks: FeatureBlocks) -> FeatureBlocks:
        sparse = None
        if blocks.sparse is not None:
            if self.sparse_scale is None:
                raise FeatureError("standardizer was fit without a sparse block")
            sparse = blocks.sparse.multiply(1.0 / self.sparse_scale).tocsr()
        dense = (blocks.dense - self.dense_mean) / self.dense_scale
        return FeatureBlocks(sparse=sparse, dense=dense)
