"""Full per-pair score suite and its aggregation helpers."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Optional, Sequence

from .bleu import bleu, corpus_bleu
from .chrf import chrf
from .meteor import meteor
from .overlap import TfidfSpace, distinct_n, jaccard
from .rouge import rouge_l, rouge_n
from .ter import ter

# Declared ranges; ter has no upper bound, corpus_bleu and chrf run 0-100.
METRIC_RANGES = {
    "rouge1": (0.0, 1.0),
    "rouge2": (0.0, 1.0),
    "rouge_l": (0.0, 1.0),
    "bleu1": (0.0, 1.0),
    "bleu2": (0.0, 1.0),
    "bleu3": (0.0, 1.0),
    "bleu4": (0.0, 1.0),
    "meteor": (0.0, 1.0),
    "ter": (0.0, float("inf")),
    "corpus_bleu": (0.0, 100.0),
    "chrf": (0.0, 100.0),
    "jaccard": (0.0, 1.0),
    "dist1": (0.0, 1.0),
    "dist2": (0.0, 1.0),
    "tfidf_cosine": (0.0, 1.0),
}

METRIC_NAMES = tuple(METRIC_RANGES)

# For these, lower is better; everything else improves upward.
LOWER_IS_BETTER = frozenset({"ter"})


@dataclass(frozen=True)
class PairScores:
    rouge1: float
    rouge2: float
    rouge_l: float
    bleu1: float
    bleu2: float
    bleu3: float
    bleu4: float
    meteor: float
    ter: float
    corpus_bleu: float
    chrf: float
    jaccard: float
    dist1: float
    dist2: float
    tfidf_cosine: float
    flags: tuple[str, ...] = ()

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}

    @classmethod
    def from_dict(cls, doc: dict) -> "PairScores":
        known = {f.name for f in fields(cls)}
        kwargs = {k: v for k, v in doc.items() if k in known and k != "flags"}
        flags = tuple(doc.get("flags", ()))
        return cls(flags=flags, **kwargs)


class PairScorer:
    """Scores hypothesis/reference pairs with the whole syntactic suite.

    The tf-idf space is fit once over ``references`` (the evaluated reference
    set); when omitted, each pair's own reference serves as the corpus.
    """

    def __init__(self, references: Optional[Sequence[str]] = None):
        self._space = TfidfSpace(references) if references is not None else None

    def score(self, hyp: str, ref: str) -> PairScores:
        flags: set[str] = set()
        space = self._space or TfidfSpace([ref])
        return PairScores(
            rouge1=rouge_n(hyp, ref, 1),
            rouge2=rouge_n(hyp, ref, 2),
            rouge_l=rouge_l(hyp, ref),
            bleu1=bleu(hyp, ref, 1, flags=flags),
            bleu2=bleu(hyp, ref, 2, flags=flags),
            bleu3=bleu(hyp, ref, 3, flags=flags),
            bleu4=bleu(hyp, ref, 4, flags=flags),
            meteor=meteor(hyp, ref),
            ter=ter(hyp, ref),
            corpus_bleu=corpus_bleu([(hyp, ref)], flags=flags),
            chrf=chrf(hyp, ref),
            jaccard=jaccard(hyp, ref, flags=flags),
            dist1=distinct_n(hyp, 1, flags=flags),
            dist2=distinct_n(hyp, 2, flags=flags),
            tfidf_cosine=space.cosine(hyp, ref, flags=flags),
            flags=tuple(sorted(flags)),
        )


def score_pair(hyp: str, ref: str, corpus: Optional[Sequence[str]] = None) -> PairScores:
    return PairScorer(corpus).score(hyp, ref)


def mean_scores(scores: Sequence[PairScores]) -> dict[str, float]:
    """Field-wise arithmetic mean (macro average) over pair scores.

    Uses exactly rounded summation so the result is independent of order.
    """
    if not scores:
        raise ValueError("cannot average an empty score list")
    return {
        name: math.fsum(getattr(s, name) for s in scores) / len(scores)
        for name in METRIC_NAMES
    }


def pooled_corpus_bleu(pairs: Sequence[tuple[str, str]]) -> float:
    """Corpus-pooled alternative to macro-averaging the per-pair BLEU column."""
    return corpus_bleu(pairs)
