"""Syntactic text-similarity metric suite with one shared tokenizer."""

from .bleu import bleu, corpus_bleu
from .chrf import chrf
from .external import ExternalScorer, SubprocessScorer
from .meteor import meteor
from .overlap import TfidfSpace, distinct_n, jaccard, tfidf_cosine
from .pair import (
    LOWER_IS_BETTER,
    METRIC_NAMES,
    METRIC_RANGES,
    PairScorer,
    PairScores,
    mean_scores,
    pooled_corpus_bleu,
    score_pair,
)
from .porter import stem
from .rouge import lcs_length, rouge_l, rouge_n
from .ter import edit_distance, ter
from .tokenize import TokenSequence, ngrams, tokenize

__all__ = [
    "bleu",
    "corpus_bleu",
    "chrf",
    "meteor",
    "ter",
    "edit_distance",
    "rouge_n",
    "rouge_l",
    "lcs_length",
    "jaccard",
    "distinct_n",
    "tfidf_cosine",
    "TfidfSpace",
    "stem",
    "tokenize",
    "ngrams",
    "TokenSequence",
    "PairScores",
    "PairScorer",
    "score_pair",
    "mean_scores",
    "pooled_corpus_bleu",
    "METRIC_NAMES",
    "METRIC_RANGES",
    "LOWER_IS_BETTER",
    "ExternalScorer",
    "SubprocessScorer",
]
