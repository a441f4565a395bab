"""
Per-quartile reports and baseline significance
==============================================

Instance-level results aggregate into per-quartile report rows: metric
means, intent-preservation distributions ingested from annotation files,
and question-usage rates. Paired score lists from two systems are compared
per metric with the rank-sum test at the 0.05 level.
"""

import random

from autocombat import IntentLabel, IntentValue, aggregate, compare_baseline, cohens_kappa, mann_whitney_u
from autocombat.harness import InstanceResult, kappa_between
from autocombat.metrics import METRIC_NAMES, PairScores
from autocombat.posts import QuartileTag

rng = random.Random(3)


def scores(**overrides) -> PairScores:
    doc = {name: 0.6 for name in METRIC_NAMES}
    doc.update(ter=35.0, chrf=60.0, corpus_bleu=55.0)
    doc.update(overrides)
    return PairScores(**doc)


results = []
annotations = []
for i in range(24):
    quartile = list(QuartileTag)[i % 4]
    results.append(
        InstanceResult(
            instance_id=f"i{i}",
            quartile=quartile,
            used_question=i % 3 == 0,
            syntactic=scores(rouge1=0.5 + 0.02 * (i % 10)),
        )
    )
    label = IntentValue.YES if i % 5 else IntentValue.PARTIALLY_YES
    annotations.append(IntentLabel(f"i{i}", label, "first"))
    annotations.append(IntentLabel(f"i{i}", label if i % 7 else IntentValue.NO, "second"))

for report in aggregate(results, annotations):
    print(
        f"{report.quartile.value}: n={report.count}  rouge1={report.syntactic['rouge1']:.3f}  "
        f"used_question={report.used_question_rate:.0f}%  intent={report.intent_distribution}"
    )

print("\nannotator agreement:", round(kappa_between(annotations, "first", "second"), 3))
print("kappa on identical vectors:", cohens_kappa(list("ababab"), list("ababab")))

u, p = mann_whitney_u([1, 2, 3], [4, 5, 6])
print(f"\nrank-sum on separated samples: U={u}, p={p}")

ours = [scores(rouge_l=0.80 + 0.01 * (i % 4), ter=25.0 + i) for i in range(10)]
theirs = [scores(rouge_l=0.50 + 0.01 * (i % 4), ter=62.0 + i) for i in range(10)]
print("\nbaseline comparison (first rows):")
for row in compare_baseline(ours, theirs)[:4]:
    verdict = "significant" if row.significant else "n.s."
    print(
        f"  {row.metric:>8}: ours={row.mean_ours:.3f} baseline={row.mean_baseline:.3f} "
        f"p={row.p_value:.4f} ({verdict})"
    )
