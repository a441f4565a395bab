from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from autocombat.posts import AnswerThread, AnswerVersion, Comment, Label

BASE = datetime(2020, 1, 1, tzinfo=timezone.utc)


def at(hours: float) -> datetime:
    return BASE + timedelta(hours=hours)


def make_comment(cid: str, hours: float, body: str = "", label: str | None = None) -> Comment:
    return Comment(
        id=cid,
        author=f"user-{cid}",
        body=body or f"comment body {cid}",
        timestamp=at(hours),
        gold_label=Label(label) if label else None,
    )


def make_version(ordinal: int, hours: float, body: str = "") -> AnswerVersion:
    return AnswerVersion(
        revision_ordinal=ordinal,
        body_markdown=body or f"answer text, revision {ordinal}",
        timestamp=at(hours),
    )


def make_thread(
    versions,
    comments,
    concern_links=(),
    question_id="q1",
    answer_id="a1",
    tags=("python",),
    question_body="How do I do the thing?",
) -> AnswerThread:
    return AnswerThread(
        question_id=question_id,
        answer_id=answer_id,
        question_title="How do I do the thing?",
        question_body=question_body,
        versions=tuple(versions),
        comments=tuple(comments),
        concern_links=tuple(concern_links),
        tags=tuple(tags),
    )


@pytest.fixture
def simple_thread() -> AnswerThread:
    """Three versions; one addressed concern between v1 and v2."""
    return make_thread(
        versions=[make_version(1, 0), make_version(2, 10), make_version(3, 20)],
        comments=[
            make_comment("c1", 5, "getToken() is deprecated, use getInstanceId()", "IA"),
            make_comment("c2", 6, "thanks, works great!", "GC"),
        ],
        concern_links=[("c1", 2)],
    )
