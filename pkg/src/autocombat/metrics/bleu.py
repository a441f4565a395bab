"""Cumulative sentence BLEU and pooled corpus BLEU.

Sentence BLEU is the geometric mean of clipped modified n-gram precisions up
to ``max_n``, times a brevity penalty when the hypothesis is shorter than the
reference; zero precisions are floored at a tiny epsilon and flagged. Orders
for which the hypothesis has no n-grams at all (hypothesis shorter than the
order) are dropped from the mean so that identical texts always score 1.0.

Corpus BLEU pools clipped counts and lengths over all pairs before combining
(no smoothing) and is reported on a 0-100 scale.
"""
from __future__ import annotations

import math
from collections import Counter
from typing import Iterable, Optional, Sequence

from .tokenize import ngrams, tokenize

SMOOTH_EPSILON = 1e-9

FLAG_EMPTY_HYPOTHESIS = "bleu:empty-hypothesis"
FLAG_SMOOTHED = "bleu:smoothed-zero-precision"
FLAG_ZERO_CORPUS_PRECISION = "corpus-bleu:zero-precision"


def _clipped_counts(hyp_tokens, ref_tokens, n: int) -> tuple[int, int]:
    hyp_grams = Counter(ngrams(hyp_tokens, n))
    if not hyp_grams:
        return 0, 0
    ref_grams = Counter(ngrams(ref_tokens, n))
    correct = sum((hyp_grams & ref_grams).values())
    return correct, sum(hyp_grams.values())


def _brevity_penalty(hyp_len: int, ref_len: int) -> float:
    if hyp_len == 0:
        return 0.0
    if hyp_len < ref_len:
        return math.exp(1.0 - ref_len / hyp_len)
    return 1.0


def bleu(hyp: str, ref: str, max_n: int = 4, flags: Optional[set] = None) -> float:
    """Cumulative BLEU through order ``max_n`` against a single reference."""
    if max_n not in (1, 2, 3, 4):
        raise ValueError("max_n must be in 1..4")
    hyp_tokens = tokenize(hyp).tokens
    ref_tokens = tokenize(ref).tokens
    if not hyp_tokens:
        if flags is not None:
            flags.add(FLAG_EMPTY_HYPOTHESIS)
        return 0.0

    log_sum = 0.0
    orders = 0
    for n in range(1, max_n + 1):
        correct, total = _clipped_counts(hyp_tokens, ref_tokens, n)
        if total == 0:
            break
        orders += 1
        if correct == 0:
            if flags is not None:
                flags.add(FLAG_SMOOTHED)
            log_sum += math.log(SMOOTH_EPSILON)
        else:
            log_sum += math.log(correct / total)
    return _brevity_penalty(len(hyp_tokens), len(ref_tokens)) * math.exp(log_sum / orders)


def corpus_bleu(
    pairs: Iterable[tuple[str, str]] | Sequence[tuple[str, str]],
    flags: Optional[set] = None,
) -> float:
    """Corpus-level BLEU-4 over (hypothesis, reference) pairs, scale 0-100."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("corpus BLEU needs at least one pair")

    correct = [0] * 4
    total = [0] * 4
    hyp_len = 0
    ref_len = 0
    for hyp, ref in pairs:
        hyp_tokens = tokenize(hyp).tokens
        ref_tokens = tokenize(ref).tokens
        hyp_len += len(hyp_tokens)
        ref_len += len(ref_tokens)
        for n in range(1, 5):
            c, t = _clipped_counts(hyp_tokens, ref_tokens, n)
            correct[n - 1] += c
            total[n - 1] += t

    log_sum = 0.0
    orders = 0
    for n in range(4):
        if total[n] == 0:
            break
        orders += 1
        if correct[n] == 0:
            if flags is not None:
                flags.add(FLAG_ZERO_CORPUS_PRECISION)
            return 0.0
        log_sum += math.log(correct[n] / total[n])
    if orders == 0:
        if flags is not None:
            flags.add(FLAG_EMPTY_HYPOTHESIS)
        return 0.0
    return 100.0 * _brevity_penalty(hyp_len, ref_len) * math.exp(log_sum / orders)
