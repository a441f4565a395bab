from __future__ import annotations

import random

import pytest

from autocombat.concerns import ClassificationScores
from autocombat.harness import (
    InstanceResult,
    IntentLabel,
    IntentValue,
    aggregate,
    compare_baseline,
    kappa_between,
    read_annotations_csv,
    read_results_jsonl,
    write_results_jsonl,
)
from autocombat.metrics import METRIC_NAMES, PairScores
from autocombat.posts import QuartileTag

BASE_SCORES = {name: 0.5 for name in METRIC_NAMES}
BASE_SCORES["ter"] = 40.0
BASE_SCORES["chrf"] = 50.0
BASE_SCORES["corpus_bleu"] = 50.0


def pair_scores(**overrides) -> PairScores:
    doc = dict(BASE_SCORES)
    doc.update(overrides)
    return PairScores(**doc)


def classification(mcc=0.5) -> ClassificationScores:
    return ClassificationScores(
        accuracy=0.8, precision=0.8, recall=0.8, f1=0.8, specificity=0.8, mcc=mcc
    )


def result(iid, quartile, rouge1=0.5, used_question=False, mcc=None) -> InstanceResult:
    return InstanceResult(
        instance_id=iid,
        quartile=QuartileTag(quartile),
        used_question=used_question,
        syntactic=pair_scores(rouge1=rouge1),
        classification=classification(mcc) if mcc is not None else None,
    )


class TestAggregate:
    def test_singleton_mean(self):
        (report,) = aggregate([result("i1", "Q1", rouge1=0.8)])
        assert report.quartile == QuartileTag.Q1
        assert report.count == 1
        assert report.syntactic["rouge1"] == pytest.approx(0.8)

    def test_two_instance_mean(self):
        (report,) = aggregate(
            [result("i1", "Q2", rouge1=0.6), result("i2", "Q2", rouge1=1.0)]
        )
        assert report.syntactic["rouge1"] == pytest.approx(0.8)

    def test_permutation_invariance(self):
        rng = random.Random(9)
        results = [
            result(f"i{i}", rng.choice(["Q1", "Q2", "Q3", "Q4"]), rouge1=rng.random())
            for i in range(40)
        ]
        forward = aggregate(results)
        shuffled = list(results)
        rng.shuffle(shuffled)
        backward = aggregate(shuffled)
        assert [r.to_json() for r in forward] == [r.to_json() for r in backward]

    def test_empty_quartile_omitted_with_warning(self):
        with pytest.warns(UserWarning, match="Q4"):
            reports = aggregate([result("i1", "Q1")])
        assert [r.quartile for r in reports] == [QuartileTag.Q1]

    def test_classification_means(self):
        (report,) = aggregate(
            [result("i1", "Q3", mcc=0.6), result("i2", "Q3", mcc=0.8)]
        )
        assert report.classification["mcc"] == pytest.approx(0.7)

    def test_intent_distribution_sums_to_hundred(self):
        results = [result("i1", "Q1"), result("i2", "Q1"), result("i3", "Q1")]
        labels = [
            IntentLabel("i1", IntentValue.YES, "a1"),
            IntentLabel("i2", IntentValue.YES, "a1"),
            IntentLabel("i3", IntentValue.PARTIALLY_YES, "a1"),
        ]
        (report,) = aggregate(results, labels)
        dist = report.intent_distribution
        assert sum(dist.values()) == pytest.approx(100.0, abs=0.01)
        assert dist["YES"] == pytest.approx(200 / 3)
        assert dist["NO"] == 0.0

    def test_used_question_rate(self):
        results = [
            result("i1", "Q4", used_question=True),
            result("i2", "Q4", used_question=False),
            result("i3", "Q4", used_question=True),
            result("i4", "Q4", used_question=False),
        ]
        (report,) = aggregate(results)
        assert report.used_question_rate == pytest.approx(50.0)

    def test_pooled_corpus_bleu_mode(self):
        results = [result("i1", "Q1"), result("i2", "Q1")]
        pairs = {
            "i1": ("the cat sat", "the cat sat"),
            "i2": ("a dog stood", "a dog stood"),
        }
        (report,) = aggregate(results, corpus_bleu_mode="pooled", pairs_by_instance=pairs)
        assert report.syntactic["corpus_bleu"] == pytest.approx(100.0)
        with pytest.raises(ValueError):
            aggregate(results, corpus_bleu_mode="pooled")


class TestKappaBetween:
    def test_perfect_agreement(self):
        labels = []
        for i in range(10):
            value = IntentValue.YES if i % 2 else IntentValue.NO
            labels.append(IntentLabel(f"i{i}", value, "a1"))
            labels.append(IntentLabel(f"i{i}", value, "a2"))
        assert kappa_between(labels, "a1", "a2") == pytest.approx(1.0)

    def test_no_shared_instances(self):
        labels = [
            IntentLabel("i1", IntentValue.YES, "a1"),
            IntentLabel("i2", IntentValue.YES, "a2"),
        ]
        with pytest.raises(ValueError):
            kappa_between(labels, "a1", "a2")


class TestCompareBaseline:
    def test_identical_lists_not_significant(self):
        ours = [pair_scores(rouge1=v) for v in (0.5, 0.6, 0.7)]
        rows = compare_baseline(ours, list(ours))
        for row in rows:
            assert row.p_value == pytest.approx(1.0)
            assert not row.significant
            assert not row.favors_baseline

    def test_dominance_is_significant_everywhere(self):
        ours = [
            pair_scores(**{n: 0.9 for n in METRIC_NAMES if n != "ter"}, ter=10.0 + i)
            for i in range(8)
        ]
        base = [
            pair_scores(**{n: 0.2 + 0.01 * i for n in METRIC_NAMES if n != "ter"}, ter=70.0 + i)
            for i in range(8)
        ]
        rows = compare_baseline(ours, base)
        for row in rows:
            assert row.significant, row.metric
            assert not row.favors_baseline

    def test_ter_direction_is_inverted(self):
        ours = [pair_scores(ter=80.0 + i) for i in range(4)]
        base = [pair_scores(ter=10.0 + i) for i in range(4)]
        rows = {r.metric: r for r in compare_baseline(ours, base)}
        assert rows["ter"].favors_baseline

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            compare_baseline([pair_scores()], [])


class TestIO:
    def test_results_roundtrip(self, tmp_path):
        results = [result("i1", "Q1", mcc=0.4), result("i2", "Q2")]
        path = tmp_path / "results.jsonl"
        write_results_jsonl(results, path)
        again = read_results_jsonl(path)
        assert [r.instance_id for r in again] == ["i1", "i2"]
        assert again[0].classification.mcc == pytest.approx(0.4)
        assert again[1].classification is None

    def test_annotations_csv(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text(
            "instance_id,annotator,label\n"
            "i1,a1,YES\n"
            "i1,a2,PARTIALLY YES\n"
            "i2,a1,no\n"
        )
        labels = read_annotations_csv(path)
        assert labels[0].label == IntentValue.YES
        assert labels[1].label == IntentValue.PARTIALLY_YES
        assert labels[2].label == IntentValue.NO
