from __future__ import annotations

import numpy as np
import pytest

from revstyle.corpus import Article
from revstyle.features import (
    DENSE_DIM,
    FeatureError,
    HashedTextFeatures,
    PrecomputedEmbeddings,
    Standardizer,
)
from revstyle.rules import measure
from revstyle.textproc import tokenize


def test_extraction_is_deterministic_across_instances(lexicons):
    texts = ["Some abstract text here.", "Another different abstract."]
    a = HashedTextFeatures(lexicons, char_dim=2**12).extract(texts)
    b = HashedTextFeatures(lexicons, char_dim=2**12).extract(texts)
    assert (a.sparse != b.sparse).nnz == 0
    np.testing.assert_array_equal(a.dense, b.dense)


def test_shapes(lexicons):
    ex = HashedTextFeatures(lexicons, char_dim=2**10, token_dim=2**9)
    blocks = ex.extract(["one two", "three"])
    assert blocks.sparse.shape == (2, 2**10 + 2**9)
    assert blocks.dense.shape == (2, DENSE_DIM)


def test_identical_text_identical_rows(lexicons):
    blocks = HashedTextFeatures(lexicons, char_dim=2**10).extract(["Same text.", "Same text."])
    assert (blocks.sparse[0] != blocks.sparse[1]).nnz == 0
    np.testing.assert_array_equal(blocks.dense[0], blocks.dense[1])


def test_dense_block_carries_rule_metrics(lexicons):
    text = "It is novel. The results were important."
    dense = HashedTextFeatures(lexicons, char_dim=2**10).extract([text]).dense[0]
    vec = measure(text, lexicons)
    np.testing.assert_allclose(dense[:11], np.array(vec.as_row(), dtype=float))
    assert dense[11] == len(text)
    tk = tokenize(text)
    mean_tok = sum(len(t.surface) for t in tk.tokens) / len(tk.tokens)
    assert dense[12] == pytest.approx(mean_tok)
    assert dense[13] == pytest.approx(len(tk.tokens) / len(tk.sentences))


def test_ngram_range_honored(lexicons):
    narrow = HashedTextFeatures(lexicons, char_dim=2**10, ngram_range=(3, 3))
    wide = HashedTextFeatures(lexicons, char_dim=2**10, ngram_range=(3, 5))
    text = ["abcdefghij"]
    assert narrow.extract(text).sparse.nnz < wide.extract(text).sparse.nnz


def test_collision_counts_keys(lexicons):
    ex = HashedTextFeatures(lexicons, char_dim=2**4, token_dim=2**4)
    ex.extract(["many different words force tiny tables to collide badly"])
    counts = ex.collision_counts()
    assert set(counts) == {"char_ngrams", "token_unigrams"}
    assert counts["char_ngrams"] > 0  # 16 buckets cannot hold this many grams


def test_embeddings_parse_and_lookup(tmp_path):
    path = tmp_path / "emb.tsv"
    path.write_text("a1\t0.5,0.5\na2\t1.0,0.0\n", encoding="utf-8")
    emb = PrecomputedEmbeddings(path)
    assert emb.dim == 2
    arts = [Article(id="a2", text="t", field="CS", updated="2021-01-01", revision_label=0)]
    blocks = emb.extract_for(arts)
    assert blocks.sparse is None
    np.testing.assert_allclose(blocks.dense, [[1.0, 0.0]])


def test_embeddings_report_bad_lines(tmp_path):
    path = tmp_path / "emb.tsv"
    path.write_text("a1\t0.5,0.5\na1\t1.0,0.0\na3\t1.0\na4\tx,y\n", encoding="utf-8")
    with pytest.raises(FeatureError) as err:
        PrecomputedEmbeddings(path)
    msg = str(err.value)
    assert "line 2" in msg and "line 3" in msg and "line 4" in msg


def test_embeddings_missing_article(tmp_path):
    path = tmp_path / "emb.tsv"
    path.write_text("a1\t0.5,0.5\n", encoding="utf-8")
    emb = PrecomputedEmbeddings(path)
    arts = [Article(id="zz", text="t", field="CS", updated="2021-01-01", revision_label=0)]
    with pytest.raises(FeatureError, match="zz"):
        emb.extract_for(arts)


def test_standardizer_sparse_scale_only(lexicons):
    ex = HashedTextFeatures(lexicons, char_dim=2**10)
    blocks = ex.extract(["alpha beta gamma", "alpha alpha", "beta gamma gamma delta"])
    std = Standardizer.fit(blocks)
    out = std.transform(blocks)
    # sparsity pattern preserved: scaling never fills in zeros
    assert (out.sparse != 0).sum() == (blocks.sparse != 0).sum()
    dense = out.dense
    np.testing.assert_allclose(dense.mean(axis=0), 0.0, atol=1e-12)
    sd = dense.std(axis=0)
    for col in range(dense.shape[1]):
        assert sd[col] == pytest.approx(1.0) or sd[col] == pytest.approx(0.0)


def test_standardizer_matches_numpy_population_moments(lexicons):
    ex = HashedTextFeatures(lexicons, char_dim=2**8)
    blocks = ex.extract(["one two three", "four five", "six seven eight nine"])
    std = Standardizer.fit(blocks)
    M = blocks.sparse.toarray()
    pop_sd = M.std(axis=0)
    expected = np.where(pop_sd == 0, 1.0, pop_sd)
    np.testing.assert_allclose(std.sparse_scale, expected, atol=1e-12)
    np.testing.assert_allclose(std.dense_mean, blocks.dense.mean(axis=0), atol=1e-12)
