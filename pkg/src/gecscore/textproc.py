"""Deterministic tokenization and n-gram extraction for the native metrics."""

import string
from collections import Counter
from dataclasses import dataclass, field

_ASCII_PUNCT = set(string.punctuation)


@dataclass
class TokenSeq:
    tokens: list[str]
    source_len_chars: int = 0

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass
class NgramCounts:
    n: int
    counts: Counter = field(default_factory=Counter)

    def total(self) -> int:
        return sum(self.counts.values())


def tokenize_words(text: str, lowercase: bool = True) -> TokenSeq:
    """Split on whitespace; leading/trailing ASCII punctuation become their own tokens.

    Internal punctuation (don't, a.b) is left attached.
    """
    if lowercase:
        text = text.lower()
    tokens: list[str] = []
    for chunk in text.split():
        left: list[str] = []
        right: list[str] = []
        i, j = 0, len(chunk)
        while i < j and chunk[i] in _ASCII_PUNCT:
            left.append(chunk[i])
            i += 1
        while j > i and chunk[j - 1] in _ASCII_PUNCT:
            right.append(chunk[j - 1])
            j -= 1
        tokens.extend(left)
        if j > i:
            tokens.append(chunk[i:j])
        tokens.extend(reversed(right))
    return TokenSeq(tokens=tokens, source_len_chars=len(text))


def word_ngrams(seq: TokenSeq, n: int) -> NgramCounts:
    if n < 1:
        raise ValueError("ngram order must be >= 1")
    toks = seq.tokens
    counts = Counter(tuple(toks[i : i + n]) for i in range(len(toks) - n + 1))
    return NgramCounts(n=n, counts=counts)


def char_ngrams(text: str, n: int, strip_ws: bool = True) -> NgramCounts:
    if n < 1:
        raise ValueError("ngram order must be >= 1")
    if strip_ws:
        text = "".join(text.split())
    counts = Counter(text[i : i + n] for i in range(len(text) - n + 1))
    return NgramCounts(n=n, counts=counts)


def overlap(a: NgramCounts, b: NgramCounts) -> int:
    """Clipped multiset intersection size."""
    small, large = (a.counts, b.counts) if len(a.counts) <= len(b.counts) else (b.counts, a.counts)
    return sum(min(c, large[g]) for g, c in small.items() if g in large)
