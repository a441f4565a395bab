"""Inter-rater agreement and rank-sum significance testing."""
from __future__ import annotations

import math
from collections import Counter
from itertools import combinations
from typing import Optional, Sequence

EXACT_MAX_COMBINED_N = 12

FLAG_DEGENERATE_AGREEMENT = "kappa:expected-agreement-one"


def cohens_kappa(labels_a: Sequence, labels_b: Sequence, flags: Optional[set] = None) -> float:
    """Chance-corrected agreement between two categorical label vectors,
    with marginal-product expected agreement."""
    if len(labels_a) != len(labels_b):
        raise ValueError("label vectors differ in length")
    n = len(labels_a)
    if n == 0:
        raise ValueError("label vectors are empty")

    observed = sum(a == b for a, b in zip(labels_a, labels_b)) / n
    counts_a = Counter(labels_a)
    counts_b = Counter(labels_b)
    expected = sum(counts_a[k] * counts_b.get(k, 0) for k in counts_a) / (n * n)
    if expected == 1.0:
        if flags is not None:
            flags.add(FLAG_DEGENERATE_AGREEMENT)
        return 0.0
    return (observed - expected) / (1.0 - expected)


def _midranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def _u_from_ranks(ranks: Sequence[float], n_a: int, n_b: int, a_indices) -> float:
    rank_sum = sum(ranks[i] for i in a_indices)
    return rank_sum - n_a * (n_a + 1) / 2.0


def _exact_p(ranks: list[float], n_a: int, n_b: int, u_observed: float) -> float:
    """Two-sided permutation p: probability of a U at least as far from the
    null center n_a*n_b/2 as the observed one, enumerating all assignments."""
    center = n_a * n_b / 2.0
    observed_dev = abs(u_observed - center)
    total = 0
    extreme = 0
    for combo in combinations(range(n_a + n_b), n_a):
        u = _u_from_ranks(ranks, n_a, n_b, combo)
        total += 1
        # tiny tolerance so midrank arithmetic cannot misclassify equal deviations
        if abs(u - center) >= observed_dev - 1e-12:
            extreme += 1
    return extreme / total


def _normal_p(ranks: list[float], n_a: int, n_b: int, u_observed: float) -> float:
    n = n_a + n_b
    tie_sizes = Counter(ranks).values()
    tie_term = sum(t**3 - t for t in tie_sizes)
    variance = n_a * n_b / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if variance <= 0.0:
        return 1.0
    center = n_a * n_b / 2.0
    # continuity correction toward the center
    deviation = abs(u_observed - center) - 0.5
    if deviation < 0.0:
        deviation = 0.0
    z = deviation / math.sqrt(variance)
    p = 2.0 * 0.5 * math.erfc(z / math.sqrt(2.0))
    return min(p, 1.0)


def mann_whitney_u(sample_a: Sequence[float], sample_b: Sequence[float]) -> tuple[float, float]:
    """Rank-sum U statistic for ``sample_a`` and a two-sided p-value.

    Ties take midranks. For combined sizes up to 12 the p-value is the exact
    permutation probability; beyond that, the normal approximation with tie
    correction and continuity correction is used.
    """
    if not sample_a or not sample_b:
        raise ValueError("both samples must be nonempty")
    n_a, n_b = len(sample_a), len(sample_b)
    ranks = _midranks(list(sample_a) + list(sample_b))
    u_a = _u_from_ranks(ranks, n_a, n_b, range(n_a))

    if n_a + n_b <= EXACT_MAX_COMBINED_N:
        p = _exact_p(ranks, n_a, n_b, u_a)
    else:
        p = _normal_p(ranks, n_a, n_b, u_a)
    return u_a, p
