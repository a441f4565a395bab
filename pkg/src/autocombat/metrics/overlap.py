"""Token-set overlap, n-gram diversity, and tf-idf cosine similarity."""
from __future__ import annotations

import math
from collections import Counter
from typing import Iterable, Optional, Sequence

from .tokenize import ngrams, tokenize

FLAG_BOTH_EMPTY = "jaccard:both-empty"
FLAG_NO_NGRAMS = "distinct:no-ngrams"
FLAG_ZERO_VECTOR = "tfidf:zero-vector"


def jaccard(hyp: str, ref: str, flags: Optional[set] = None) -> float:
    """Token-set intersection over union; defined 1.0 when both sets are empty."""
    a = set(tokenize(hyp).tokens)
    b = set(tokenize(ref).tokens)
    if not a and not b:
        if flags is not None:
            flags.add(FLAG_BOTH_EMPTY)
        return 1.0
    return len(a & b) / len(a | b)


def distinct_n(texts: Iterable[str] | str, n: int, flags: Optional[set] = None) -> float:
    """Unique n-grams over total n-grams, pooled across the given texts."""
    if n not in (1, 2):
        raise ValueError("n must be 1 or 2")
    if isinstance(texts, str):
        texts = [texts]
    pooled: list[tuple[str, ...]] = []
    for text in texts:
        pooled.extend(ngrams(tokenize(text).tokens, n))
    if not pooled:
        if flags is not None:
            flags.add(FLAG_NO_NGRAMS)
        return 0.0
    return len(set(pooled)) / len(pooled)


class TfidfSpace:
    """Term weights fit over a document corpus (normally the reference set).

    Uses smoothed idf = ln((1+N)/(1+df)) + 1 and l2-normalized raw-count
    term vectors; terms outside the corpus vocabulary are ignored.
    """

    def __init__(self, corpus: Sequence[str]):
        n_docs = len(corpus)
        df: Counter = Counter()
        for doc in corpus:
            df.update(set(tokenize(doc).tokens))
        self.idf = {
            term: math.log((1 + n_docs) / (1 + count)) + 1.0 for term, count in df.items()
        }

    def _vector(self, text: str) -> dict[str, float]:
        counts = Counter(tokenize(text).tokens)
        vec = {}
        for term, count in counts.items():
            weight = self.idf.get(term)
            if weight is not None:
                vec[term] = count * weight
        norm = math.sqrt(sum(v * v for v in vec.values()))
        if norm == 0.0:
            return {}
        return {term: v / norm for term, v in vec.items()}

    def cosine(self, hyp: str, ref: str, flags: Optional[set] = None) -> float:
        a = self._vector(hyp)
        b = self._vector(ref)
        if not a or not b:
            if flags is not None:
                flags.add(FLAG_ZERO_VECTOR)
            return 0.0
        if len(b) < len(a):
            a, b = b, a
        return sum(v * b.get(term, 0.0) for term, v in a.items())


def tfidf_cosine(
    hyp: str, ref: str, corpus: Sequence[str], flags: Optional[set] = None
) -> float:
    return TfidfSpace(corpus).cosine(hyp, ref, flags=flags)
