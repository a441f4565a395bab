"""Experiment orchestration: per-quartile aggregation, intent-label
ingestion, inter-rater agreement, and baseline significance testing.

Intent labels are always ingested from annotation files (they are human
judgments); the harness only computes their distributions and agreement.
Aggregation uses unweighted arithmetic means per quartile; corpus-pooled
BLEU is available as an alternate mode.
"""
from __future__ import annotations

import csv
import enum
import json
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .concerns import ClassificationScores, confusion, identify_concerns, score
from .curation import BenchmarkInstance, curate_many
from .metrics import (
    LOWER_IS_BETTER,
    METRIC_NAMES,
    PairScorer,
    PairScores,
    pooled_corpus_bleu,
)
from .posts import AnswerThread, QuartileTag
from .providers import ModelProvider
from .refiner import RefinementRequest, RefinementResult, refine
from .stats import cohens_kappa, mann_whitney_u

SIGNIFICANCE_LEVEL = 0.05


class IntentValue(str, enum.Enum):
    YES = "YES"
    PARTIALLY_YES = "PARTIALLY_YES"
    NO = "NO"


@dataclass(frozen=True)
class IntentLabel:
    instance_id: str
    label: IntentValue
    annotator: str


@dataclass(frozen=True)
class InstanceResult:
    instance_id: str
    quartile: QuartileTag
    used_question: bool
    syntactic: PairScores
    classification: Optional[ClassificationScores] = None

    def to_json(self) -> dict:
        doc = {
            "instance_id": self.instance_id,
            "quartile": self.quartile.value,
            "used_question": self.used_question,
            "syntactic": self.syntactic.as_dict(),
        }
        if self.classification is not None:
            doc["classification"] = self.classification.as_dict()
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "InstanceResult":
        classification = doc.get("classification")
        return cls(
            instance_id=doc["instance_id"],
            quartile=QuartileTag(doc["quartile"]),
            used_question=bool(doc["used_question"]),
            syntactic=PairScores.from_dict(doc["syntactic"]),
            classification=(
                ClassificationScores.from_dict(classification)
                if classification is not None
                else None
            ),
        )


@dataclass(frozen=True)
class QuartileReport:
    quartile: QuartileTag
    count: int
    syntactic: dict[str, float]
    classification: Optional[dict[str, float]]
    intent_distribution: Optional[dict[str, float]]
    used_question_rate: float

    def to_json(self) -> dict:
        return {
            "quartile": self.quartile.value,
            "count": self.count,
            "syntactic": self.syntactic,
            "classification": self.classification,
            "intent_distribution": self.intent_distribution,
            "used_question_rate": self.used_question_rate,
        }


def _mean(values: Sequence[float]) -> float:
    # fsum is exactly rounded, so aggregation is order-independent
    return math.fsum(values) / len(values)


def aggregate(
    results: Sequence[InstanceResult],
    annotations: Sequence[IntentLabel] = (),
    corpus_bleu_mode: str = "macro",
    pairs_by_instance: Optional[dict[str, tuple[str, str]]] = None,
) -> list[QuartileReport]:
    """Per-quartile arithmetic means of all carried scores.

    ``corpus_bleu_mode='pooled'`` recomputes the corpus BLEU column from
    pooled n-gram statistics instead of macro-averaging per-pair values;
    it needs the raw text pairs keyed by instance id.
    """
    if corpus_bleu_mode not in ("macro", "pooled"):
        raise ValueError("corpus_bleu_mode must be 'macro' or 'pooled'")
    if corpus_bleu_mode == "pooled" and pairs_by_instance is None:
        raise ValueError("pooled mode needs the raw text pairs")

    labels_by_instance: dict[str, list[IntentValue]] = {}
    for label in annotations:
        labels_by_instance.setdefault(label.instance_id, []).append(label.label)

    reports = []
    for quartile in QuartileTag:
        bucket = [r for r in results if r.quartile == quartile]
        if not bucket:
            warnings.warn(f"no results in quartile {quartile.value}; omitted", stacklevel=2)
            continue

        syntactic = {
            name: _mean([getattr(r.syntactic, name) for r in bucket])
            for name in METRIC_NAMES
        }
        if corpus_bleu_mode == "pooled":
            pairs = [pairs_by_instance[r.instance_id] for r in bucket]
            syntactic["corpus_bleu"] = pooled_corpus_bleu(pairs)

        with_classification = [r.classification for r in bucket if r.classification]
        classification = None
        if with_classification:
            classification = {
                name: _mean([getattr(c, name) for c in with_classification])
                for name in ("accuracy", "precision", "recall", "f1", "specificity", "mcc")
            }

        bucket_labels: list[IntentValue] = []
        for r in bucket:
            bucket_labels.extend(labels_by_instance.get(r.instance_id, []))
        intent = None
        if bucket_labels:
            intent = {
                value.value: 100.0 * sum(lab == value for lab in bucket_labels) / len(bucket_labels)
                for value in IntentValue
            }

        reports.append(
            QuartileReport(
                quartile=quartile,
                count=len(bucket),
                syntactic=syntactic,
                classification=classification,
                intent_distribution=intent,
                used_question_rate=100.0 * sum(r.used_question for r in bucket) / len(bucket),
            )
        )
    return reports


def kappa_between(
    annotations: Sequence[IntentLabel], annotator_a: str, annotator_b: str
) -> float:
    """Agreement between two annotators over their shared instances."""
    by_a = {l.instance_id: l.label for l in annotations if l.annotator == annotator_a}
    by_b = {l.instance_id: l.label for l in annotations if l.annotator == annotator_b}
    shared = sorted(set(by_a) & set(by_b))
    if not shared:
        raise ValueError(f"annotators {annotator_a!r} and {annotator_b!r} share no instances")
    return cohens_kappa([by_a[i] for i in shared], [by_b[i] for i in shared])


@dataclass(frozen=True)
class MetricComparison:
    metric: str
    mean_ours: float
    mean_baseline: float
    u_statistic: float
    p_value: float
    significant: bool
    favors_baseline: bool

    def to_json(self) -> dict:
        return {
            "metric": self.metric,
            "mean_ours": self.mean_ours,
            "mean_baseline": self.mean_baseline,
            "u_statistic": self.u_statistic,
            "p_value": self.p_value,
            "significant": self.significant,
            "favors_baseline": self.favors_baseline,
        }


def compare_baseline(
    our_scores: Sequence[PairScores], baseline_scores: Sequence[PairScores]
) -> list[MetricComparison]:
    """Per-metric means for both systems plus a rank-sum significance test.

    Inputs must be paired by instance (same order, same length); callers
    restrict them to the comparable subset beforehand.
    """
    if len(our_scores) != len(baseline_scores):
        raise ValueError(
            f"score lists must pair up: {len(our_scores)} vs {len(baseline_scores)}"
        )
    if not our_scores:
        raise ValueError("cannot compare empty score lists")

    rows = []
    for name in METRIC_NAMES:
        ours = [getattr(s, name) for s in our_scores]
        base = [getattr(s, name) for s in baseline_scores]
        u, p = mann_whitney_u(ours, base)
        mean_ours = _mean(ours)
        mean_base = _mean(base)
        if name in LOWER_IS_BETTER:
            favors_baseline = mean_base < mean_ours
        else:
            favors_baseline = mean_base > mean_ours
        rows.append(
            MetricComparison(
                metric=name,
                mean_ours=mean_ours,
                mean_baseline=mean_base,
                u_statistic=u,
                p_value=p,
                significant=p < SIGNIFICANCE_LEVEL,
                favors_baseline=favors_baseline,
            )
        )
    return rows


def run_pipeline(
    threads: Sequence[AnswerThread],
    provider: ModelProvider,
    annotations: Sequence[IntentLabel] = (),
    drop_unaddressed: bool = False,
) -> dict:
    """Full benchmark pass: curate, classify, refine, score, aggregate.

    Returns a deterministic report tree; under a replay provider the whole
    run is reproducible byte-for-byte.
    """
    instances, skipped = curate_many(threads, drop_unaddressed=drop_unaddressed)
    scorer = PairScorer([inst.v_final.body_markdown for inst in instances])

    results = []
    refinements = {}
    for inst in instances:
        if inst.relevant_comments:
            identification = identify_concerns(inst, provider)
            counts = confusion(identification.predictions, inst.relevant_comments)
            classification = score(counts)
            request = RefinementRequest(
                original_answer=inst.v_init.body_markdown,
                comments=inst.relevant_comments,
                question=inst.question_body,
            )
            refinement = refine(request, provider)
        else:
            # nothing to act on: no model calls, answer stays as-is
            classification = None
            refinement = RefinementResult(
                concerns=(),
                used_question=False,
                change_log=(),
                improved_answer=inst.v_init.body_markdown,
            )
        refinements[inst.instance_id] = refinement

        results.append(
            InstanceResult(
                instance_id=inst.instance_id,
                quartile=inst.quartile,
                used_question=refinement.used_question,
                syntactic=scorer.score(refinement.improved_answer, inst.v_final.body_markdown),
                classification=classification,
            )
        )

    reports = aggregate(results, annotations)
    return {
        "instances": [r.to_json() for r in results],
        "refinements": {iid: ref.to_json() for iid, ref in sorted(refinements.items())},
        "quartiles": [r.to_json() for r in reports],
        "skipped": [{"answer_id": aid, "reason": reason} for aid, reason in skipped],
    }


def canonical_json(doc) -> str:
    """Stable serialization for byte-identical reports."""
    return json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def write_results_jsonl(results: Iterable[InstanceResult], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for result in results:
            handle.write(json.dumps(result.to_json(), ensure_ascii=False, sort_keys=True) + "\n")


def read_results_jsonl(path) -> list[InstanceResult]:
    out = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                out.append(InstanceResult.from_json(json.loads(line)))
    return out


def read_annotations_csv(path) -> list[IntentLabel]:
    """Annotation files are CSV with columns instance_id, annotator, label."""
    labels = []
    with open(path, encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle):
            raw = row["label"].strip().upper().replace(" ", "_")
            labels.append(
                IntentLabel(
                    instance_id=row["instance_id"].strip(),
                    label=IntentValue(raw),
                    annotator=row["annotator"].strip(),
                )
            )
    return labels


def write_report_csvs(reports: Sequence[QuartileReport], out_dir) -> None:
    """Write the per-quartile tables (classification, syntactic, intent,
    question usage) as CSV files under ``out_dir``."""
    import os

    os.makedirs(out_dir, exist_ok=True)

    with open(os.path.join(out_dir, "classification.csv"), "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["quartile", "accuracy", "precision", "recall", "f1", "specificity", "mcc"])
        for report in reports:
            if report.classification is None:
                continue
            writer.writerow(
                [report.quartile.value]
                + [report.classification[k] for k in ("accuracy", "precision", "recall", "f1", "specificity", "mcc")]
            )

    with open(os.path.join(out_dir, "syntactic.csv"), "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["quartile", *METRIC_NAMES])
        for report in reports:
            writer.writerow(
                [report.quartile.value] + [report.syntactic[name] for name in METRIC_NAMES]
            )

    with open(os.path.join(out_dir, "intent.csv"), "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["quartile", "yes_pct", "partially_yes_pct", "no_pct"])
        for report in reports:
            if report.intent_distribution is None:
                continue
            writer.writerow(
                [report.quartile.value]
                + [report.intent_distribution[v.value] for v in IntentValue]
            )

    with open(os.path.join(out_dir, "question_usage.csv"), "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["quartile", "used_question_pct"])
        for report in reports:
            writer.writerow([report.quartile.value, report.used_question_rate])


def write_baseline_csv(rows: Sequence[MetricComparison], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(
            ["metric", "mean_ours", "mean_baseline", "u_statistic", "p_value", "significant", "favors_baseline"]
        )
        for row in rows:
            writer.writerow(
                [row.metric, row.mean_ours, row.mean_baseline, row.u_statistic, row.p_value, row.significant, row.favors_baseline]
            )
