"""Word-level edit rate with greedy block-shift search, percent scale.

Edits are insertions, deletions, substitutions, and block shifts; each shift
costs one edit. The shift search is greedy: at each round, among all moves
of a hypothesis block to the position where it matches the reference, apply
the one that most reduces the remaining edit distance, as long as the
reduction is positive (full optimal shift search is intractable). The final
rate is 100 * edits / |reference tokens|.
"""
from __future__ import annotations

from .tokenize import tokenize


def edit_distance(a, b) -> int:
    """Word-level Levenshtein distance."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        cur = [i]
        for j, y in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def _matching_blocks(hyp, ref):
    """Yield (hyp_start, ref_start, length) for maximal matching runs that
    start at differing positions."""
    for i in range(len(hyp)):
        for j in range(len(ref)):
            if i == j or hyp[i] != ref[j]:
                continue
            length = 1
            while i + length < len(hyp) and j + length < len(ref) and hyp[i + length] == ref[j + length]:
                length += 1
            yield i, j, length


def _best_shift(hyp, ref, current_distance):
    """The shifted hypothesis with the largest edit-distance reduction, if any."""
    best_gain = 0
    best = None
    for i, j, length in _matching_blocks(hyp, ref):
        shifted = hyp[:i] + hyp[i + length :]
        shifted[j:j] = hyp[i : i + length]
        gain = current_distance - edit_distance(shifted, ref)
        if gain > best_gain:
            best_gain = gain
            best = shifted
    return best_gain, best


def ter(hyp: str, ref: str) -> float:
    ref_tokens = list(tokenize(ref).tokens)
    if not ref_tokens:
        raise ValueError("edit rate needs a nonempty reference")
    hyp_tokens = list(tokenize(hyp).tokens)

    shifts = 0
    distance = edit_distance(hyp_tokens, ref_tokens)
    while distance > 0:
        gain, shifted = _best_shift(hyp_tokens, ref_tokens, distance)
        if gain <= 0:
            break
        shifts += 1
        hyp_tokens = shifted
        distance -= gain
    return 100.0 * (shifts + distance) / len(ref_tokens)
