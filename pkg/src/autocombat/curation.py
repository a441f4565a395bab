"""Builds benchmark instances out of answer threads.

For each thread, the initial version is the latest answer version strictly
before the earliest addressed concern, the final version is the latest
version a human linked to an addressed concern, and the shipped comment set
keeps addressed concerns plus general chatter while dropping concerns that
were never acted on. Whether a revision incorporates a concern is a human
judgment supplied as ``concern_links``; nothing is inferred here.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .posts import (
    AnswerThread,
    AnswerVersion,
    Comment,
    Label,
    LanguageTag,
    QuartileTag,
    quartile_of,
)


class CurationError(ValueError):
    """The thread cannot yield a benchmark instance."""


class ThreadExcluded(CurationError):
    """Raised under drop_unaddressed when no revision addresses any concern."""


class SamplingError(ValueError):
    """A stratified sample could not be drawn."""


@dataclass(frozen=True)
class BenchmarkInstance:
    question_id: str
    answer_id: str
    question_title: str
    question_body: str
    v_init: AnswerVersion
    v_final: AnswerVersion
    relevant_comments: tuple[Comment, ...]
    quartile: QuartileTag
    language_tag: LanguageTag
    source_comment_count: int

    def __post_init__(self) -> None:
        if any(c.gold_label == Label.INA for c in self.relevant_comments):
            raise ValueError("relevant_comments must not contain INA comments")

    @property
    def instance_id(self) -> str:
        return f"{self.question_id}/{self.answer_id}"

    def to_json(self) -> dict:
        return {
            "question_id": self.question_id,
            "answer_id": self.answer_id,
            "question_title": self.question_title,
            "question_body": self.question_body,
            "v_init": self.v_init.to_json(),
            "v_final": self.v_final.to_json(),
            "relevant_comments": [c.to_json() for c in self.relevant_comments],
            "quartile": self.quartile.value,
            "language_tag": self.language_tag.value,
            "source_comment_count": self.source_comment_count,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "BenchmarkInstance":
        return cls(
            question_id=str(doc["question_id"]),
            answer_id=str(doc["answer_id"]),
            question_title=doc.get("question_title", ""),
            question_body=doc.get("question_body", ""),
            v_init=AnswerVersion.from_json(doc["v_init"]),
            v_final=AnswerVersion.from_json(doc["v_final"]),
            relevant_comments=tuple(Comment.from_json(c) for c in doc["relevant_comments"]),
            quartile=QuartileTag(doc["quartile"]),
            language_tag=LanguageTag(doc["language_tag"]),
            source_comment_count=int(doc["source_comment_count"]),
        )


def curate(thread: AnswerThread, drop_unaddressed: bool = False) -> BenchmarkInstance:
    """Derive the (v_init, v_final, relevant comments) triple from one thread.

    Every comment must carry a gold label. With ``drop_unaddressed`` the
    thread is rejected when it has addressed-concern labels but no revision
    linked to any of them; by default such threads fall back to
    v_final = v_init.
    """
    unlabeled = [c.id for c in thread.comments if c.gold_label is None]
    if unlabeled:
        raise CurationError(f"thread {thread.answer_id!r}: unlabeled comments {unlabeled}")

    concerns_addressed = [c for c in thread.comments if c.gold_label == Label.IA]
    generic = [c for c in thread.comments if c.gold_label == Label.GC]

    if not concerns_addressed:
        v_init = thread.versions[-1]
        v_final = v_init
        relevant = tuple(generic)
    else:
        cutoff = concerns_addressed[0].timestamp
        earlier = [v for v in thread.versions if v.timestamp < cutoff]
        if not earlier:
            raise CurationError(
                f"thread {thread.answer_id!r}: no pre-concern version exists "
                f"(earliest addressed concern at {cutoff.isoformat()})"
            )
        v_init = earlier[-1]

        addressed_ids = {c.id for c in concerns_addressed}
        linked_ordinals = {rev for cid, rev in thread.concern_links if cid in addressed_ids}
        linked_versions = [v for v in thread.versions if v.revision_ordinal in linked_ordinals]
        if linked_versions:
            v_final = linked_versions[-1]
        elif drop_unaddressed:
            raise ThreadExcluded(
                f"thread {thread.answer_id!r}: no revision addresses any concern"
            )
        else:
            v_final = v_init
        relevant = tuple(c for c in thread.comments if c.gold_label in (Label.IA, Label.GC))

    return BenchmarkInstance(
        question_id=thread.question_id,
        answer_id=thread.answer_id,
        question_title=thread.question_title,
        question_body=thread.question_body,
        v_init=v_init,
        v_final=v_final,
        relevant_comments=relevant,
        quartile=quartile_of(len(thread.comments)),
        language_tag=thread.language,
        source_comment_count=len(thread.comments),
    )


def curate_many(
    threads: Iterable[AnswerThread], drop_unaddressed: bool = False
) -> tuple[list[BenchmarkInstance], list[tuple[str, str]]]:
    """Curate a batch, returning instances and (answer_id, reason) skips."""
    instances = []
    skipped = []
    for thread in threads:
        try:
            instances.append(curate(thread, drop_unaddressed=drop_unaddressed))
        except CurationError as exc:
            skipped.append((thread.answer_id, str(exc)))
    return instances, skipped


def stratified_sample(
    instances: Sequence[BenchmarkInstance],
    per_quartile: int,
    rng_seed: int,
    include_other_languages: bool = False,
) -> list[BenchmarkInstance]:
    """Uniform sample without replacement of up to ``per_quartile`` instances
    from each quartile bucket, reproducible from the seed.

    Instances tagged with a language outside the four-language scope are
    excluded unless ``include_other_languages`` is set. Input order is
    preserved within the result.
    """
    if per_quartile < 0:
        raise SamplingError("per_quartile must be nonnegative")
    if per_quartile == 0:
        return []

    pool = [
        inst
        for inst in instances
        if include_other_languages or inst.language_tag != LanguageTag.OTHER
    ]
    rng = random.Random(rng_seed)
    chosen: list[BenchmarkInstance] = []
    for quartile in QuartileTag:
        bucket = [(i, inst) for i, inst in enumerate(pool) if inst.quartile == quartile]
        if not bucket:
            raise SamplingError(f"no instances in quartile {quartile.value}")
        take = min(per_quartile, len(bucket))
        chosen.extend(inst for _, inst in sorted(rng.sample(bucket, take)))
    return chosen


def write_instances_jsonl(instances: Iterable[BenchmarkInstance], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for inst in instances:
            handle.write(json.dumps(inst.to_json(), ensure_ascii=False, sort_keys=True) + "\n")


def read_instances_jsonl(path) -> list[BenchmarkInstance]:
    out = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                out.append(BenchmarkInstance.from_json(json.loads(line)))
    return out
