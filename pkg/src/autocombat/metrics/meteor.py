"""Flexible unigram-matching score with exact and stemmed stages.

This is the exact+stem variant: hypothesis and reference unigrams are
aligned exactly first, then leftover tokens are aligned by shared stem (no
synonym stage, which would need a lexical database). The score is the
recall-weighted harmonic mean 10PR/(R+9P) discounted by a fragmentation
penalty 0.5*(chunks/matches)^3.
"""
from __future__ import annotations

from .porter import stem
from .tokenize import tokenize


def _greedy_align(hyp_keys, ref_keys, hyp_free, ref_free) -> list[tuple[int, int]]:
    """Match each free hypothesis position to the earliest free reference
    position with the same key, consuming both."""
    pairs = []
    for i in sorted(hyp_free):
        key = hyp_keys[i]
        for j in sorted(ref_free):
            if ref_keys[j] == key:
                pairs.append((i, j))
                hyp_free.discard(i)
                ref_free.discard(j)
                break
    return pairs


def _count_chunks(pairs: list[tuple[int, int]]) -> int:
    """Number of maximal runs of matches contiguous in both texts."""
    pairs = sorted(pairs)
    chunks = 0
    prev = None
    for i, j in pairs:
        if prev is None or i != prev[0] + 1 or j != prev[1] + 1:
            chunks += 1
        prev = (i, j)
    return chunks


def meteor(hyp: str, ref: str) -> float:
    hyp_tokens = tokenize(hyp).tokens
    ref_tokens = tokenize(ref).tokens
    if not hyp_tokens or not ref_tokens:
        return 0.0

    hyp_free = set(range(len(hyp_tokens)))
    ref_free = set(range(len(ref_tokens)))
    pairs = _greedy_align(hyp_tokens, ref_tokens, hyp_free, ref_free)

    hyp_stems = [stem(t) for t in hyp_tokens]
    ref_stems = [stem(t) for t in ref_tokens]
    pairs += _greedy_align(hyp_stems, ref_stems, hyp_free, ref_free)

    matches = len(pairs)
    if matches == 0:
        return 0.0
    precision = matches / len(hyp_tokens)
    recall = matches / len(ref_tokens)
    f_mean = 10.0 * precision * recall / (recall + 9.0 * precision)
    penalty = 0.5 * (_count_chunks(pairs) / matches) ** 3
    return f_mean * (1.0 - penalty)
