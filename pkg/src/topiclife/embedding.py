"""Hashtag embeddings: per-hashtag documents averaged over pretrained word vectors.

Each retained hashtag gets a document made of every tweet that uses it
(hashtag tokens and @-mentions removed).  Its embedding is the mean of the
pretrained vectors of the document's lexicon-covered token instances, so a
word used more often with a hashtag weighs more.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from topiclife.corpus import Tweet
from topiclife.errors import ConfigurationError

_STRIP_CHARS = string.punctuation + "‘’“”…"


@dataclass
class EmbeddingLexicon:
    """Pretrained word-vector table keyed by lowercase token."""

    dimension: int
    vectors: dict[str, np.ndarray]
    skipped_lines: int = 0
    duplicate_words: int = 0

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass
class HashtagDocument:
    """Concatenated, cleaned word tokens of every tweet using one hashtag."""

    hashtag: str
    tokens: list[str]

    @property
    def token_count(self) -> int:
        return len(self.tokens)


@dataclass
class HashtagEmbedding:
    hashtag: str
    vector: np.ndarray
    covered_tokens: int


def load_lexicon(source: Iterable[str], expected_dimension: int) -> EmbeddingLexicon:
    """Parse `word c1 ... cd` lines into a lexicon.

    Lines whose component count differs from expected_dimension are counted
    and skipped.  Duplicate words: last occurrence wins, counted.  Zero valid
    lines is a configuration error.
    """
    vectors: dict[str, np.ndarray] = {}
    skipped = 0
    duplicates = 0
    for raw in source:
        parts = raw.split()
        if len(parts) != expected_dimension + 1:
            skipped += 1
            continue
        word = parts[0]
        try:
            vec = np.asarray([float(x) for x in parts[1:]], dtype=np.float64)
        except ValueError:
            skipped += 1
            continue
        if not np.all(np.isfinite(vec)):
            skipped += 1
            continue
        if word in vectors:
            duplicates += 1
        vectors[word] = vec
    if not vectors:
        raise ConfigurationError("lexicon contains no valid vector lines")
    return EmbeddingLexicon(expected_dimension, vectors, skipped, duplicates)


def _is_url(token: str) -> bool:
    lower = token.lower()
    return lower.startswith(("http://", "https://", "www."))


def tokenize(text: str) -> list[str]:
    """Split on whitespace, drop hashtags/mentions/URLs, strip edge punctuation, lowercase."""
    tokens: list[str] = []
    for raw in text.split():
        if raw.startswith("#") or raw.startswith("@") or _is_url(raw):
            continue
        word = raw.strip(_STRIP_CHARS).lower()
        if word:
            tokens.append(word)
    return tokens


def build_document(hashtag: str, tweets: Iterable[Tweet]) -> HashtagDocument:
    """Concatenate cleaned tokens of every tweet containing the hashtag.

    Matching is case-sensitive; token repetitions are retained so frequent
    co-occurring words weigh more in the embedding.
    """
    tokens: list[str] = []
    for tweet in tweets:
        if hashtag in tweet.hashtags:
            tokens.extend(tokenize(tweet.text))
    return HashtagDocument(hashtag, tokens)


def embed_hashtag(
    doc: HashtagDocument,
    lexicon: EmbeddingLexicon,
    divisor: str = "covered",
) -> HashtagEmbedding | None:
    """Average the lexicon vectors of the document's covered token instances.

    divisor="covered" divides by the number of lexicon-covered instances (a
    true mean, preserving the convex-hull property); divisor="all" divides by
    the full token count, shrinking vectors proportionally to OOV rate.
    Returns None when no token is covered (caller excludes from clustering).
    """
    if divisor not in ("covered", "all"):
        raise ConfigurationError(f"unknown divisor mode {divisor!r}")
    total = np.zeros(lexicon.dimension, dtype=np.float64)
    covered = 0
    for token in doc.tokens:
        vec = lexicon.vectors.get(token)
        if vec is not None:
            total += vec
            covered += 1
    if covered == 0:
        return None
    denom = covered if divisor == "covered" else doc.token_count
    return HashtagEmbedding(doc.hashtag, total / denom, covered)


def cosine_similarity(v1: np.ndarray, v2: np.ndarray) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1]."""
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    if v1.shape != v2.shape:
        raise ValueError(f"dimension mismatch: {v1.shape} vs {v2.shape}")
    n1 = np.linalg.norm(v1)
    n2 = np.linalg.norm(v2)
    if n1 == 0.0 or n2 == 0.0:
        raise ValueError("cosine similarity undefined for zero-norm vectors")
    return float(np.clip(np.dot(v1, v2) / (n1 * n2), -1.0, 1.0))
