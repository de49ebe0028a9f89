"""Deterministic tokenization, sentence segmentation, and lexical tagging.

Every rule metric and term vector in this package consumes the token stream
produced here. The tagger is rule-based (lexicon lookup plus suffix
heuristics) rather than statistical: same input, same output, no model
dependencies. Lexicons ship as plain-text data files and can be overridden
per run.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

TAG_ADJ = "ADJ"
TAG_ADV = "ADV"
TAG_VERB_PRESENT = "VERB_PRESENT"
TAG_VERB_PAST = "VERB_PAST"
TAG_OTHER = "OTHER"

TAGS = (TAG_ADJ, TAG_ADV, TAG_VERB_PRESENT, TAG_VERB_PAST, TAG_OTHER)

LEXICON_NAMES = (
    "hedges",
    "novelty",
    "importance",
    "pleasant",
    "unpleasant",
    "adjectives",
    "adverbs",
    "present_verbs",
    "past_verbs",
)

# Tokens are maximal runs of letters/digits, allowing internal hyphens and
# apostrophes ("state-of-the-art", "don't"). Underscore is excluded.
_TOKEN_RE = re.compile(r"[^\W_]+(?:['’\-][^\W_]+)*", re.UNICODE)

# Characters that may trail a sentence terminator (closing quotes/brackets)
# or precede the first word of the next sentence (opening quotes/brackets).
_CLOSERS = "\"'”’)]"
_OPENERS = "\"'“‘(["

# Dotted abbreviations that never end a sentence. Single letters ("J.",
# and thereby each piece of "i.e." / "e.g.") are suppressed by rule.
ABBREVIATIONS = frozenset(
    {
        "al.",
        "approx.",
        "ca.",
        "cf.",
        "dept.",
        "dr.",
        "eq.",
        "eqs.",
        "etc.",
        "fig.",
        "figs.",
        "inc.",
        "ltd.",
        "mr.",
        "mrs.",
        "ms.",
        "no.",
        "pp.",
        "prof.",
        "ref.",
        "refs.",
        "resp.",
        "sec.",
        "secs.",
        "univ.",
        "vol.",
        "vols.",
        "vs.",
    }
)


class LexiconError(ValueError):
    """Raised when a lexicon file is missing, unreadable, or empty."""


@dataclass(frozen=True)
class Token:
    surface: str
    lower: str
    tag: str = TAG_OTHER


@dataclass(frozen=True)
class TokenizedText:
    """Token stream plus sentence ranges over token indices.

    Sentence ranges are half-open (start, end), disjoint, ordered, and cover
    every token.
    """

    tokens: tuple[Token, ...]
    sentences: tuple[tuple[int, int], ...]

    def sentence_lengths(self) -> list[int]:
        return [end - start for start, end in self.sentences]


@dataclass(frozen=True)
class LexiconSet:
    """Term sets driving lexical tagging and the rule metrics."""

    hedges: frozenset[str]
    novelty: frozenset[str]
    importance: frozenset[str]
    pleasant: frozenset[str]
    unpleasant: frozenset[str]
    adjectives: frozenset[str]
    adverbs: frozenset[str]
    present_verbs: frozenset[str]
    past_verbs: frozenset[str]
    # Irregular forms feeding the superlative/comparative suffix rules.
    irregular_superlatives: frozenset[str] = frozenset({"best", "most", "worst"})
    irregular_comparatives: frozenset[str] = frozenset({"better", "more", "worse"})


def default_lexicon_dir() -> Path:
    return Path(str(resources.files("revstyle").joinpath("lexicons")))


def _read_term_file(path: Path) -> frozenset[str]:
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise LexiconError(f"cannot read lexicon file {path}: {exc}") from exc
    terms = set()
    for line in lines:
        term = line.split("#", 1)[0].strip().lower()
        if term:
            terms.add(term)
    if not terms:
        raise LexiconError(f"lexicon file {path} contains no terms")
    return frozenset(terms)


def load_lexicons(directory: str | Path | None = None) -> LexiconSet:
    """Load the nine term files from `directory` (bundled defaults if None)."""
    base = Path(directory) if directory is not None else default_lexicon_dir()
    sets = {name: _read_term_file(base / f"{name}.txt") for name in LEXICON_NAMES}
    return LexiconSet(**sets)


def _word_before(text: str, pos: int) -> str:
    """The token-characters run immediately preceding `text[pos]`."""
    start = pos
    while start > 0 and (text[start - 1].isalnum() or text[start - 1] in "'’-"):
        start -= 1
    return text[start:pos]


def _is_abbreviation(text: str, dot_pos: int) -> bool:
    word = _word_before(text, dot_pos)
    if not word or word.isdigit():
        return False
    if len(word) == 1 and word.isalpha():
        return True
    return word.lower() + "." in ABBREVIATIONS


def _sentence_boundaries(text: str) -> list[int]:
    """Character offsets just past each sentence terminator (and closers)."""
    bounds = []
    n = len(text)
    i = 0
    while i < n:
        if text[i] not in ".!?":
            i += 1
            continue
        run_start = i
        while i + 1 < n and text[i + 1] in ".!?":
            i += 1
        end = i + 1
        while end < n and text[end] in _CLOSERS:
            end += 1
        if text[run_start] == "." and run_start == i and _is_abbreviation(text, run_start):
            i += 1
            continue
        if end >= n:
            bounds.append(end)
        elif text[end].isspace():
            k = end
            while k < n and text[k].isspace():
                k += 1
            while k < n and text[k] in _OPENERS:
                k += 1
            if k < n and text[k].isupper():
                bounds.append(end)
        i += 1
    return bounds


def tokenize(text: str) -> TokenizedText:
    """Tokenize `text`; tags are left as OTHER (see tag_tokens).

    Punctuation never enters the token stream but does drive sentence
    splitting. Empty text yields zero tokens and zero sentences.
    """
    tokens = []
    starts = []
    for m in _TOKEN_RE.finditer(text):
        surface = m.group()
        tokens.append(Token(surface=surface, lower=surface.lower()))
        starts.append(m.start())

    sentences = []
    cursor = 0
    for bound in _sentence_boundaries(text):
        end = cursor
        while end < len(starts) and starts[end] < bound:
            end += 1
        if end > cursor:
            sentences.append((cursor, end))
            cursor = end
    if cursor < len(tokens):
        sentences.append((cursor, len(tokens)))
    return TokenizedText(tokens=tuple(tokens), sentences=tuple(sentences))


def split_sentences(text: str) -> tuple[tuple[int, int], ...]:
    """Sentence ranges over the token indices produced by tokenize."""
    return tokenize(text).sentences


def suffix_stems(token: str, suffix: str) -> list[str]:
    """Candidate base forms for a suffixed token ("largest" -> ["larg", "large"])."""
    if not token.endswith(suffix) or len(token) <= len(suffix):
        return []
    base = token[: -len(suffix)]
    stems = [base, base + "e"]
    if len(base) >= 2 and base[-1] == base[-2]:
        stems.append(base[:-1])  # biggest -> big
    if base.endswith("i"):
        stems.append(base[:-1] + "y")  # easiest -> easy
    return stems


def _tag_one(lower: str, lexicons: LexiconSet) -> str:
    if lower in lexicons.past_verbs:
        return TAG_VERB_PAST
    if lower in lexicons.present_verbs:
        return TAG_VERB_PRESENT
    if lower in lexicons.adjectives:
        return TAG_ADJ
    if lower in lexicons.adverbs:
        return TAG_ADV
    # Suffix heuristics for tokens outside every lexicon.
    if len(lower) > 3 and lower.endswith("ed") and lower not in lexicons.adjectives:
        return TAG_VERB_PAST
    if len(lower) > 3 and lower.endswith("ly"):
        return TAG_ADV
    if lower.endswith("est") and any(s in lexicons.adjectives for s in suffix_stems(lower, "est")):
        return TAG_ADJ
    return TAG_OTHER


def tag_tokens(tokenized: TokenizedText, lexicons: LexiconSet) -> TokenizedText:
    """Fill in token tags; pure function of (token, lexicons)."""
    tagged = tuple(replace(tok, tag=_tag_one(tok.lower, lexicons)) for tok in tokenized.tokens)
    return TokenizedText(tokens=tagged, sentences=tokenized.sentences)
