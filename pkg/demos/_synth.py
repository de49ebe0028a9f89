"""Synthetic corpora shared by the demo scripts.

Two artificial writing styles over a filler vocabulary: style 0 leans on
plain connectives, style 1 on ornate ones. The styles differ enough for
a classifier (or a centroid cosine) to tell them apart, while every text
still looks like tokenizable English-ish prose.
"""
from __future__ import annotations

import numpy as np

from revstyle import Article

VOCAB = [f"word{i}" for i in range(160)]
MARKERS = {
    0: ["plain", "simple", "direct", "clear", "brief", "short", "common", "usual"],
    1: ["intricate", "elaborate", "ornate", "nuanced", "layered", "baroque", "dense", "florid"],
}


def styled_text(rng: np.random.Generator, style: int, n_tokens: int = 40) -> str:
    words = []
    for _ in range(n_tokens):
        if rng.random() < 0.12:
            words.append(MARKERS[style][rng.integers(len(MARKERS[style]))])
        else:
            words.append(VOCAB[rng.integers(len(VOCAB))])
    third = max(len(words) // 3, 1)
    sentences = [words[i : i + third] for i in range(0, len(words), third)]
    return " ".join(s[0].capitalize() + " " + " ".join(s[1:]) + "." for s in sentences if s)


def styled_articles(rng, n_per_class, months, field="CS", prefix="demo"):
    """Balanced style-0/style-1 articles dated uniformly over `months`."""
    out = []
    for i in range(2 * n_per_class):
        label = i % 2
        month = months[rng.integers(len(months))]
        out.append(
            Article(
                id=f"{prefix}-{i:05d}",
                text=styled_text(rng, label),
                field=field,
                updated=f"{month}-{int(rng.integers(1, 28)):02d}",
                revision_label=label,
            )
        )
    return out


def adoption_articles(rng, months, rate_for_month, n_per_month=120, field="CS", prefix="ad"):
    """One cohort per month; a known share carries the revised style."""
    out = []
    for month in months:
        n_adopt = round(rate_for_month(month) * n_per_month)
        for j in range(n_per_month):
            label = 1 if j < n_adopt else 0
            out.append(
                Article(
                    id=f"{prefix}-{month}-{j:04d}",
                    text=styled_text(rng, label),
                    field=field,
                    updated=f"{month}-{int(rng.integers(1, 28)):02d}",
                    revision_label=label,
                )
            )
    return out
