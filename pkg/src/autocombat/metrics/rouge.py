"""N-gram overlap and longest-common-subsequence F-scores."""
from __future__ import annotations

from collections import Counter

from .tokenize import ngrams, tokenize


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def rouge_n(hyp: str, ref: str, n: int) -> float:
    """N-gram overlap F1 with clipped counts; 0 when either side has no n-grams."""
    if n not in (1, 2):
        raise ValueError("n must be 1 or 2")
    hyp_grams = Counter(ngrams(tokenize(hyp).tokens, n))
    ref_grams = Counter(ngrams(tokenize(ref).tokens, n))
    hyp_total = sum(hyp_grams.values())
    ref_total = sum(ref_grams.values())
    if hyp_total == 0 or ref_total == 0:
        return 0.0
    overlap = sum((hyp_grams & ref_grams).values())
    return _f1(overlap / hyp_total, overlap / ref_total)


def lcs_length(a, b) -> int:
    """Length of the longest common subsequence of two token sequences."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(hyp: str, ref: str) -> float:
    """LCS-based F1; 0 when either side is empty."""
    hyp_tokens = tokenize(hyp).tokens
    ref_tokens = tokenize(ref).tokens
    if not hyp_tokens or not ref_tokens:
        return 0.0
    lcs = lcs_length(hyp_tokens, ref_tokens)
    return _f1(lcs / len(hyp_tokens), lcs / len(ref_tokens))
