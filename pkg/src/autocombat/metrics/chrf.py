"""Character n-gram F-score on a 0-100 scale.

Whitespace is excluded from n-grams; precision and recall are averaged over
orders 1..6 where both sides have n-grams (so short texts still reach 100
on self-comparison), then combined with beta=2, weighting recall twice.
Character case is preserved.
"""
from __future__ import annotations

import re
from collections import Counter

CHRF_ORDER = 6
CHRF_BETA = 2.0

_WS = re.compile(r"\s+")


def _char_ngrams(text: str, n: int) -> Counter:
    return Counter(text[i : i + n] for i in range(len(text) - n + 1))


def chrf(hyp: str, ref: str, order: int = CHRF_ORDER, beta: float = CHRF_BETA) -> float:
    hyp_chars = _WS.sub("", hyp)
    ref_chars = _WS.sub("", ref)

    precision_sum = 0.0
    recall_sum = 0.0
    effective = 0
    for n in range(1, order + 1):
        hyp_grams = _char_ngrams(hyp_chars, n)
        ref_grams = _char_ngrams(ref_chars, n)
        hyp_total = sum(hyp_grams.values())
        ref_total = sum(ref_grams.values())
        if hyp_total == 0 or ref_total == 0:
            continue
        common = sum((hyp_grams & ref_grams).values())
        precision_sum += common / hyp_total
        recall_sum += common / ref_total
        effective += 1
    if effective == 0:
        return 0.0
    precision = precision_sum / effective
    recall = recall_sum / effective
    if precision + recall == 0.0:
        return 0.0
    beta_sq = beta * beta
    return 100.0 * (1 + beta_sq) * precision * recall / (beta_sq * precision + recall)
