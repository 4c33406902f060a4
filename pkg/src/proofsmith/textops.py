"""Deterministic text primitives: tokenization, BLEU-4, Jaccard, cosine.

These are the leaf utilities every other module builds on. All functions
are pure; none of them touches a model backend.
"""
from __future__ import annotations

import math
from collections import Counter

import numpy as np
import re

from .errors import InvalidInputError

# Letters and digits only; underscores, hyphens and all punctuation act as
# separators, so "black-haired" tokenizes to ["black", "haired"].
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

#: Smoothing floor used when an n-gram order has zero matches.
BLEU_EPSILON = 1e-9


def normalize_tokens(text: str) -> list[str]:
    """Lowercase `text` and split it into tokens, dropping punctuation.

    Deterministic and idempotent: re-tokenizing " ".join(tokens) returns
    the same list. Raises InvalidInputError on empty/whitespace-only text.
    """
    if text is None or not text.strip():
        raise InvalidInputError("cannot tokenize empty text")
    return _TOKEN_RE.findall(text.lower())


def normalized_text(text: str) -> str:
    """Canonical single-space form used as a deduplication key."""
    return " ".join(normalize_tokens(text))


class Sentence:
    """A sentence with lazily derived tokens and an optional unit embedding.

    Equality and hashing are by raw text; the embedding is carried along
    as an annotation and never participates in identity.
    """

    __slots__ = ("text", "embedding")

    def __init__(self, text: str, embedding: np.ndarray | None = None):
        if text is None or not str(text).strip():
            raise InvalidInputError("sentence text must be non-empty")
        self.text = str(text)
        if embedding is not None:
            embedding = np.asarray(embedding, dtype=float)
            norm = float(np.linalg.norm(embedding))
            if abs(norm - 1.0) > 1e-6:
                raise InvalidInputError(f"embedding must be unit-norm, got {norm!r}")
        self.embedding = embedding

    @property
    def tokens(self) -> list[str]:
        return normalize_tokens(self.text)

    def __eq__(self, other) -> bool:
        return isinstance(other, Sentence) and self.text == other.text

    def __hash__(self) -> int:
        return hash(self.text)

    def __repr__(self) -> str:
        return f"Sentence({self.text!r})"


def as_text(value: str | Sentence) -> str:
    """Accept plain strings or Sentence objects at API boundaries."""
    return value.text if isinstance(value, Sentence) else str(value)


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu4(candidate: list[str], reference: list[str]) -> float:
    """Sentence-level cumulative BLEU up to 4-grams with uniform weights.

    For candidates shorter than 4 tokens the order is capped at the
    candidate length and the uniform weights are re-spread over the
    orders that exist, so identical sentences score exactly 1.0 at any
    length. An order with zero n-gram matches contributes the
    BLEU_EPSILON floor instead of zero, which keeps unrelated pairs
    finite but near zero. The brevity penalty uses the standard
    exp(1 - r/c) form. Arguments are not symmetric: pass the later step
    as `candidate` and the earlier one as `reference`.
    """
    if not candidate or not reference:
        raise InvalidInputError("bleu4 requires non-empty token lists")
    max_order = min(4, len(candidate))
    log_sum = 0.0
    for n in range(1, max_order + 1):
        cand = _ngram_counts(candidate, n)
        ref = _ngram_counts(reference, n)
        matches = sum(min(count, ref[gram]) for gram, count in cand.items())
        total = len(candidate) - n + 1
        precision = matches / total if matches > 0 else BLEU_EPSILON
        log_sum += math.log(precision) / max_order
    c, r = len(candidate), len(reference)
    brevity = 1.0 if c >= r else math.exp(1.0 - r / c)
    return brevity * math.exp(log_sum)


def jaccard(a: list[str], b: list[str]) -> float:
    """|set(a) & set(b)| / |set(a) | set(b)|, symmetric, in [0, 1]."""
    if not a or not b:
        raise InvalidInputError("jaccard requires non-empty token lists")
    sa, sb = set(a), set(b)
    return len(sa & sb) / len(sa | sb)


def cosine(u, v) -> float:
    """Cosine similarity of two equal-dimension nonzero vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise InvalidInputError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise InvalidInputError("cosine is undefined for zero vectors")
    return float(np.dot(u, v) / (nu * nv))


def count_keywords(sentence: str | Sentence, tagger) -> int:
    """Number of tokens tagged noun, verb, or adjective by `tagger`."""
    tags = tagger.tag(as_text(sentence))
    return sum(1 for _, tag in tags if tag in ("noun", "verb", "adjective"))
