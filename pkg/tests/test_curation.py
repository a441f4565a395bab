from __future__ import annotations

import random

import pytest

from autocombat.curation import (
    BenchmarkInstance,
    CurationError,
    SamplingError,
    ThreadExcluded,
    curate,
    curate_many,
    read_instances_jsonl,
    stratified_sample,
    write_instances_jsonl,
)
from autocombat.posts import Label, LanguageTag, QuartileTag, quartile_of

from conftest import at, make_comment, make_thread, make_version


class TestCurate:
    def test_no_actionable_concerns_keeps_latest(self):
        thread = make_thread(
            versions=[make_version(1, 0), make_version(2, 10), make_version(3, 20)],
            comments=[make_comment("c1", 5, label="GC"), make_comment("c2", 25, label="GC")],
        )
        inst = curate(thread)
        assert inst.v_init == thread.versions[-1]
        assert inst.v_final == thread.versions[-1]
        assert [c.id for c in inst.relevant_comments] == ["c1", "c2"]

    def test_single_addressed_concern(self):
        # versions at t=10,20,30; concern at t=15 linked to v2
        thread = make_thread(
            versions=[make_version(1, 10), make_version(2, 20), make_version(3, 30)],
            comments=[
                make_comment("c1", 15, label="IA"),
                make_comment("c2", 16, label="GC"),
            ],
            concern_links=[("c1", 2)],
        )
        inst = curate(thread)
        assert inst.v_init.revision_ordinal == 1
        assert inst.v_final.revision_ordinal == 2
        assert [c.id for c in inst.relevant_comments] == ["c1", "c2"]

    def test_unlinked_concern_falls_back_to_v_init(self):
        thread = make_thread(
            versions=[make_version(1, 10), make_version(2, 20)],
            comments=[make_comment("c1", 15, label="IA")],
        )
        inst = curate(thread)
        assert inst.v_init.revision_ordinal == 1
        assert inst.v_final.revision_ordinal == 1

    def test_drop_unaddressed_flag(self):
        thread = make_thread(
            versions=[make_version(1, 10), make_version(2, 20)],
            comments=[make_comment("c1", 15, label="IA")],
        )
        with pytest.raises(ThreadExcluded):
            curate(thread, drop_unaddressed=True)

    def test_concern_before_all_versions_is_an_error(self):
        thread = make_thread(
            versions=[make_version(1, 10)],
            comments=[make_comment("c1", 5, label="IA")],
        )
        with pytest.raises(CurationError, match="no pre-concern version"):
            curate(thread)

    def test_simultaneous_comment_counts_as_after(self):
        # strict < on line 6: a comment at exactly the version timestamp
        # cannot use that version as v_init
        thread = make_thread(
            versions=[make_version(1, 0), make_version(2, 10)],
            comments=[make_comment("c1", 10, label="IA")],
            concern_links=[("c1", 2)],
        )
        inst = curate(thread)
        assert inst.v_init.revision_ordinal == 1

    def test_unlabeled_comment_is_an_error(self):
        thread = make_thread(
            versions=[make_version(1, 0)],
            comments=[make_comment("c1", 5)],
        )
        with pytest.raises(CurationError, match="unlabeled"):
            curate(thread)

    def test_ina_excluded_from_relevant(self):
        thread = make_thread(
            versions=[make_version(1, 0), make_version(2, 50)],
            comments=[
                make_comment("c1", 5, label="IA"),
                make_comment("c2", 6, label="INA"),
                make_comment("c3", 7, label="GC"),
            ],
            concern_links=[("c1", 2)],
        )
        inst = curate(thread)
        assert [c.id for c in inst.relevant_comments] == ["c1", "c3"]
        assert inst.quartile == quartile_of(3)
        assert inst.source_comment_count == 3

    def test_curate_is_pure(self, simple_thread):
        assert curate(simple_thread) == curate(simple_thread)

    def test_instance_rejects_ina_comments(self, simple_thread):
        inst = curate(simple_thread)
        with pytest.raises(ValueError, match="INA"):
            BenchmarkInstance(
                question_id=inst.question_id,
                answer_id=inst.answer_id,
                question_title=inst.question_title,
                question_body=inst.question_body,
                v_init=inst.v_init,
                v_final=inst.v_final,
                relevant_comments=(make_comment("x", 1, label="INA"),),
                quartile=inst.quartile,
                language_tag=inst.language_tag,
                source_comment_count=1,
            )

    def test_json_roundtrip(self, tmp_path, simple_thread):
        inst = curate(simple_thread)
        path = tmp_path / "bench.jsonl"
        write_instances_jsonl([inst], path)
        (again,) = read_instances_jsonl(path)
        assert again == inst


def synth_thread(rng: random.Random, index: int):
    """Random thread honoring ordering constraints, for property tests."""
    n_versions = rng.randint(1, 4)
    version_hours = sorted(rng.sample(range(0, 200, 2), n_versions))
    versions = [make_version(i + 1, h) for i, h in enumerate(version_hours)]

    n_comments = rng.randint(1, 13)
    comment_hours = sorted(rng.uniform(0.5, 220.0) for _ in range(n_comments))
    comments = []
    links = []
    for j, hours in enumerate(comment_hours):
        label = rng.choice(["IA", "GC", "INA"])
        comments.append(make_comment(f"s{index}c{j}", hours, label=label))
        if label == "IA" and rng.random() < 0.6:
            links.append((f"s{index}c{j}", rng.choice(versions).revision_ordinal))
    return make_thread(
        versions=versions,
        comments=comments,
        concern_links=links,
        question_id=f"sq{index}",
        answer_id=f"sa{index}",
    )


class TestCurationProperties:
    def test_randomized_threads(self):
        rng = random.Random(20240917)
        fallbacks = 0
        checked = 0
        for index in range(2000):
            thread = synth_thread(rng, index)
            try:
                inst = curate(thread)
            except CurationError:
                continue
            checked += 1
            addressed = [c for c in thread.comments if c.gold_label == Label.IA]
            assert all(c.gold_label != Label.INA for c in inst.relevant_comments)
            if not addressed:
                assert inst.v_init == inst.v_final == thread.versions[-1]
            else:
                assert inst.v_init.timestamp < addressed[0].timestamp
                if inst.v_final == inst.v_init:
                    fallbacks += 1
            assert quartile_of(inst.source_comment_count) == inst.quartile
        assert checked > 500
        assert fallbacks > 0


class TestStratifiedSample:
    def _pool(self):
        instances = []
        rng = random.Random(7)
        for index in range(400):
            n = rng.randint(1, 13)
            comments = [make_comment(f"p{index}c{j}", j + 1.0, label="GC") for j in range(n)]
            thread = make_thread(
                versions=[make_version(1, 0)],
                comments=comments,
                question_id=f"pq{index}",
                answer_id=f"pa{index}",
                tags=("python",) if index % 5 else ("haskell",),
            )
            instances.append(curate(thread))
        return instances

    def test_sizes_and_quartile_preservation(self):
        pool = self._pool()
        sample = stratified_sample(pool, per_quartile=10, rng_seed=42)
        by_quartile = {}
        for inst in sample:
            by_quartile.setdefault(inst.quartile, []).append(inst)
            assert quartile_of(inst.source_comment_count) == inst.quartile
        assert {q: len(v) for q, v in by_quartile.items()} == {q: 10 for q in QuartileTag}

    def test_zero_request_is_empty(self):
        assert stratified_sample(self._pool(), per_quartile=0, rng_seed=1) == []

    def test_seed_reproducibility(self):
        pool = self._pool()
        a = stratified_sample(pool, per_quartile=25, rng_seed=99)
        b = stratified_sample(pool, per_quartile=25, rng_seed=99)
        assert a == b
        c = stratified_sample(pool, per_quartile=25, rng_seed=100)
        assert a != c

    def test_other_language_excluded_by_default(self):
        pool = self._pool()
        sample = stratified_sample(pool, per_quartile=300, rng_seed=5)
        assert all(inst.language_tag != LanguageTag.OTHER for inst in sample)
        with_other = stratified_sample(
            pool, per_quartile=300, rng_seed=5, include_other_languages=True
        )
        assert any(inst.language_tag == LanguageTag.OTHER for inst in with_other)

    def test_empty_bucket_names_quartile(self):
        pool = [inst for inst in self._pool() if inst.quartile != QuartileTag.Q4]
        with pytest.raises(SamplingError, match="Q4"):
            stratified_sample(pool, per_quartile=5, rng_seed=3)

    def test_takes_whole_bucket_when_small(self):
        pool = self._pool()
        sample = stratified_sample(pool, per_quartile=10_000, rng_seed=0)
        eligible = [i for i in pool if i.language_tag != LanguageTag.OTHER]
        assert len(sample) == len(eligible)


class TestCurateMany:
    def test_skips_are_reported(self):
        good = make_thread(
            versions=[make_version(1, 0)],
            comments=[make_comment("c1", 5, label="GC")],
            answer_id="good",
        )
        bad = make_thread(
            versions=[make_version(1, 10)],
            comments=[make_comment("c1", 5, label="IA")],
            answer_id="bad",
        )
        instances, skipped = curate_many([good, bad])
        assert [i.answer_id for i in instances] == ["good"]
        assert skipped[0][0] == "bad"
