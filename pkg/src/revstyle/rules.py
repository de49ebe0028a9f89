"""Writing-rule metrics computed per text from the tagged token stream.

Eleven numeric fields measure compliance with common writing advice:
brevity (word/sentence counts, share of short sentences), tense (present
vs. past), modifier density, novelty and importance claims, superlative
preference, hedging, and evocative vocabulary. Percentages are 0..100.
Degenerate denominators fall back to documented defaults and are flagged
in the measurement's `defaulted` set rather than dropped.

Tense counting is lexicon/suffix based, so passive participles that end in
-ed are counted as past tense even in present-tense clauses; this is a
known limitation of the rule-based tagger.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .textproc import (
    TAG_ADJ,
    TAG_ADV,
    TAG_VERB_PAST,
    TAG_VERB_PRESENT,
    LexiconSet,
    suffix_stems,
    tag_tokens,
    tokenize,
)

RULE_NAMES = (
    "rule1a",
    "rule1b",
    "rule2",
    "rule4",
    "rule5",
    "rule7a",
    "rule7b",
    "rule8",
    "rule9",
    "rule10a",
    "rule10b",
)

SHORT_SENTENCE_WORDS = 20


class RuleError(ValueError):
    """Raised when a rule measurement cannot be produced for an article."""


@dataclass(frozen=True)
class RuleVector:
    """One article's metric values; `defaulted` lists mask-flagged fields."""

    rule1a: int  # word count
    rule1b: int  # sentence count
    rule2: float  # % sentences under SHORT_SENTENCE_WORDS words
    rule4: float  # % present tense among tensed verbs
    rule5: float  # % adjectives+adverbs among words
    rule7a: float  # novelty vocabulary present (0/100)
    rule7b: float  # importance vocabulary present (0/100)
    rule8: float  # % superlatives among superlatives+comparatives
    rule9: float  # hedging present (0/100), or 100 x count in count mode
    rule10a: float  # 100 x pleasant-term occurrences
    rule10b: float  # 100 x unpleasant-term occurrences
    defaulted: frozenset[str] = field(default=frozenset(), compare=False)

    def as_row(self) -> list[float]:
        return [getattr(self, name) for name in RULE_NAMES]


def count_superlatives(lowers: list[str], lexicons: LexiconSet) -> int:
    return sum(
        1
        for w in lowers
        if w in lexicons.irregular_superlatives
        or (w.endswith("est") and any(s in lexicons.adjectives for s in suffix_stems(w, "est")))
    )


def count_comparatives(lowers: list[str], lexicons: LexiconSet) -> int:
    return sum(
        1
        for w in lowers
        if w in lexicons.irregular_comparatives
        or (w.endswith("er") and any(s in lexicons.adjectives for s in suffix_stems(w, "er")))
    )


def measure(text: str, lexicons: LexiconSet, hedge_as_count: bool = False) -> RuleVector:
    """Compute the full rule vector for one text.

    hedge_as_count switches rule9 from presence (0/100) to 100 x the number
    of hedge occurrences.
    """
    tokenized = tag_tokens(tokenize(text), lexicons)
    tokens = tokenized.tokens
    lowers = [t.lower for t in tokens]
    n_words = len(tokens)
    n_sentences = len(tokenized.sentences)
    defaulted = set()

    if n_sentences:
        short = sum(1 for length in tokenized.sentence_lengths() if length < SHORT_SENTENCE_WORDS)
        rule2 = 100.0 * short / n_sentences
    else:
        rule2 = 0.0
        defaulted.add("rule2")

    present = sum(1 for t in tokens if t.tag == TAG_VERB_PRESENT)
    past = sum(1 for t in tokens if t.tag == TAG_VERB_PAST)
    if present + past:
        rule4 = 100.0 * present / (present + past)
    else:
        rule4 = 50.0
        defaulted.add("rule4")

    if n_words:
        modifiers = sum(1 for t in tokens if t.tag in (TAG_ADJ, TAG_ADV))
        rule5 = 100.0 * modifiers / n_words
    else:
        rule5 = 0.0
        defaulted.add("rule5")

    rule7a = 100.0 if any(w in lexicons.novelty for w in lowers) else 0.0
    rule7b = 100.0 if any(w in lexicons.importance for w in lowers) else 0.0

    sup = count_superlatives(lowers, lexicons)
    comp = count_comparatives(lowers, lexicons)
    if sup + comp:
        rule8 = 100.0 * sup / (sup + comp)
    else:
        rule8 = 0.0
        defaulted.add("rule8")

    hedge_hits = sum(1 for w in lowers if w in lexicons.hedges)
    rule9 = 100.0 * hedge_hits if hedge_as_count else (100.0 if hedge_hits else 0.0)

    rule10a = 100.0 * sum(1 for w in lowers if w in lexicons.pleasant)
    rule10b = 100.0 * sum(1 for w in lowers if w in lexicons.unpleasant)

    return RuleVector(
        rule1a=n_words,
        rule1b=n_sentences,
        rule2=rule2,
        rule4=rule4,
        rule5=rule5,
        rule7a=rule7a,
        rule7b=rule7b,
        rule8=rule8,
        rule9=rule9,
        rule10a=rule10a,
        rule10b=rule10b,
        defaulted=frozenset(defaulted),
    )


def measure_corpus(articles, lexicons: LexiconSet, hedge_as_count: bool = False):
    """Rule vectors for every article, sorted by id.

    Returns a list of (article_id, RuleVector). Per-article failures are
    re-raised with the article id attached.
    """
    rows = []
    for article in sorted(articles, key=lambda a: a.id):
        try:
            rows.append((article.id, measure(article.text, lexicons, hedge_as_count=hedge_as_count)))
        except Exception as exc:
            raise RuleError(f"article {article.id!r}: {exc}") from exc
    return rows


def summarize(rows) -> dict[str, dict[str, float]]:
    """Per-rule mean, population SD, lower-interpolation quartiles, min, max."""
    if not rows:
        raise RuleError("cannot summarize an empty rule table")
    table = np.array([vec.as_row() for _, vec in rows], dtype=float)
    out = {}
    for j, name in enumerate(RULE_NAMES):
        col = table[:, j]
        out[name] = {
            "mean": float(col.mean()),
            "sd": float(col.std()),
            "p25": float(np.percentile(col, 25, method="lower")),
            "p75": float(np.percentile(col, 75, method="lower")),
            "min": float(col.min()),
            "max": float(col.max()),
        }
    return out
