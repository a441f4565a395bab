"""
The syntactic similarity suite
==============================

Fifteen scores per hypothesis/reference pair, all over one shared
tokenizer: n-gram and subsequence overlap, cumulative n-gram precision
with brevity penalty, flexible stem-aware matching, edit rate with block
shifts, character n-gram F-score, set overlap, n-gram diversity, and
tf-idf cosine. TER is percent (lower is better); corpus BLEU and chrF run
0-100; everything else lives in [0, 1].
"""

from autocombat.metrics import (
    PairScorer,
    corpus_bleu,
    mean_scores,
    meteor,
    ter,
    tokenize,
)

reference = "The cat sat on the mat near the door."
candidates = [
    "The cat sat on the mat near the door.",       # identical
    "The cat sat on a mat near the door.",         # one substitution
    "Near the door the cat sat on the mat.",       # block moved
    "A dog stood outside.",                        # unrelated
]

scorer = PairScorer(references=[reference])
for hyp in candidates:
    scores = scorer.score(hyp, reference)
    print(f"hyp: {hyp!r}")
    print(
        f"  rouge_l={scores.rouge_l:.3f}  bleu4={scores.bleu4:.3f}  "
        f"meteor={scores.meteor:.3f}  ter={scores.ter:.1f}  chrf={scores.chrf:.1f}  "
        f"jaccard={scores.jaccard:.3f}  tfidf={scores.tfidf_cosine:.3f}"
    )

print("\ntokens:", tokenize("e.Cancel = (e.Reason == CloseReason.UserClosing);").tokens)

# the shift search recognizes a moved block as one edit, not many
print("\nTER with a moved block:", ter("near the door the cat sat", "the cat sat near the door"))
print("METEOR survives stemming:", f"{meteor('the runner was running', 'the run runs'):.3f}")

pairs = [(hyp, reference) for hyp in candidates]
print("\npooled corpus BLEU:", round(corpus_bleu(pairs), 2))
print("macro means:", {k: round(v, 3) for k, v in list(mean_scores([scorer.score(h, r) for h, r in pairs]).items())[:4]})
