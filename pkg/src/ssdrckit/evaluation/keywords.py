"""Keyword-correct scoring of listening-test transcripts."""

from __future__ import annotations

import string
from collections import Counter
from dataclasses import dataclass

import numpy as np

EXCLUDED_WORDS = frozenset({"a", "the", "in", "to", "on", "of", "for"})

_STRIP_PUNCT = str.maketrans("", "", string.punctuation)


@dataclass(frozen=True)
class KeywordScore:
    correct: int
    total: int

    @property
    def rate(self) -> float:
        return self.correct / self.total


def tokenize(text: str) -> list[str]:
    """Whitespace split, ASCII punctuation removed, lowercased; empty tokens dropped."""
    tokens = (tok.translate(_STRIP_PUNCT).lower() for tok in text.split())
    return [tok for tok in tokens if tok]


def keywords(reference: str) -> list[str]:
    return [tok for tok in tokenize(reference) if tok not in EXCLUDED_WORDS]


def keyword_score(reference: str, transcript: str) -> KeywordScore:
    """Count reference keywords found in the transcript.

    Matching is on multisets: a word that occurs twice in the reference
    needs two occurrences in the transcript to score twice.
    """
    if not reference.strip():
        raise ValueError("reference sentence is empty")
    wanted = Counter(keywords(reference))
    if not wanted:
        raise ValueError(f"reference {reference!r} has no keywords after exclusion")
    heard = Counter(tokenize(transcript))
    correct = sum(min(n, heard[word]) for word, n in wanted.items())
    return KeywordScore(correct, sum(wanted.values()))


def median_rate(scores) -> float:
    return float(np.median([s.rate for s in scores]))
