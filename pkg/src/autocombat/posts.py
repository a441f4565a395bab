"""Domain types for questions, answers, comments and revisions, plus the
parsers that turn raw page/dump content into them.

Answer bodies are markdown; the only structure this package understands is
triple-backtick code fencing (indented code blocks are treated as prose).
Revision-history pages are consumed as saved local HTML files.
"""
from __future__ import annotations

import enum
import json
import warnings
from dataclasses import dataclass, field
from datetime import datetime, timezone
from html.parser import HTMLParser
from typing import Iterable, Optional


class Label(str, enum.Enum):
    """Gold comment label: improvement-related and addressed, improvement-related
    but never addressed, or general chatter."""

    IA = "IA"
    INA = "INA"
    GC = "GC"


class QuartileTag(str, enum.Enum):
    Q1 = "Q1"
    Q2 = "Q2"
    Q3 = "Q3"
    Q4 = "Q4"


class LanguageTag(str, enum.Enum):
    PYTHON = "python"
    JAVA = "java"
    CSHARP = "csharp"
    JAVASCRIPT = "javascript"
    OTHER = "other"


_LANGUAGE_ALIASES = {
    "python": LanguageTag.PYTHON,
    "python-3.x": LanguageTag.PYTHON,
    "java": LanguageTag.JAVA,
    "c#": LanguageTag.CSHARP,
    "csharp": LanguageTag.CSHARP,
    "javascript": LanguageTag.JAVASCRIPT,
    "js": LanguageTag.JAVASCRIPT,
}


def language_from_tags(tags: Iterable[str]) -> LanguageTag:
    """Map question tags onto the four-language scope; anything else is OTHER."""
    for tag in tags:
        hit = _LANGUAGE_ALIASES.get(tag.strip().lower())
        if hit is not None:
            return hit
    return LanguageTag.OTHER


class QuartileRangeError(ValueError):
    """Comment count falls outside the 1..13 bucket scheme."""


class UnterminatedFenceWarning(UserWarning):
    """A code fence was opened but never closed; the remainder was emitted as code."""


class RevisionOrderWarning(UserWarning):
    """Revision blocks appeared out of timestamp order in the DOM and were re-sorted."""


class RevisionPageError(ValueError):
    """A saved revision-history page could not be parsed."""


def _ensure_utc(ts: datetime) -> datetime:
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def parse_timestamp(raw: str) -> datetime:
    """Parse a timestamp string to a UTC datetime.

    Accepts ISO-8601 (with 'Z' or offset) and the bare 'YYYY-MM-DD HH:MM:SSZ'
    form used on revision pages.
    """
    text = raw.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    return _ensure_utc(datetime.fromisoformat(text))


@dataclass(frozen=True)
class Comment:
    id: str
    author: str
    body: str
    timestamp: datetime
    gold_label: Optional[Label] = None

    def __post_init__(self) -> None:
        if not self.body.strip():
            raise ValueError(f"comment {self.id!r} has an empty body")
        if self.timestamp is None:
            raise ValueError(f"comment {self.id!r} has no timestamp")
        object.__setattr__(self, "timestamp", _ensure_utc(self.timestamp))
        if self.gold_label is not None and not isinstance(self.gold_label, Label):
            object.__setattr__(self, "gold_label", Label(self.gold_label))

    def to_json(self) -> dict:
        doc = {
            "id": self.id,
            "author": self.author,
            "body": self.body,
            "timestamp": self.timestamp.isoformat(),
        }
        if self.gold_label is not None:
            doc["gold_label"] = self.gold_label.value
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "Comment":
        label = doc.get("gold_label")
        return cls(
            id=str(doc["id"]),
            author=doc.get("author", ""),
            body=doc["body"],
            timestamp=parse_timestamp(doc["timestamp"]),
            gold_label=Label(label) if label is not None else None,
        )


class SegmentKind(str, enum.Enum):
    PROSE = "prose"
    CODE = "code"


@dataclass(frozen=True)
class AnswerSegment:
    """One run of an answer body: prose, or the contents of one fenced block.

    ``text`` is the content (fence lines stripped for code); ``raw`` is the
    exact source slice including fence lines, so that concatenating ``raw``
    over all segments reproduces the body byte-for-byte.
    """

    kind: SegmentKind
    text: str
    raw: str
    fence_info: Optional[str] = None


def segment_answer(body_markdown: str) -> list[AnswerSegment]:
    """Split an answer body into prose and fenced-code segments.

    Fences are lines starting with ``` at column zero; the opening fence may
    carry an info string, the closing fence may not. An unterminated fence
    emits the remainder as one code segment and attaches a recoverable
    warning. Concatenating the segments' ``raw`` fields reproduces the input
    exactly.
    """
    if body_markdown == "":
        return []

    lines = body_markdown.splitlines(keepends=True)
    segments: list[AnswerSegment] = []
    prose_parts: list[str] = []

    def flush_prose() -> None:
        if prose_parts:
            text = "".join(prose_parts)
            segments.append(AnswerSegment(SegmentKind.PROSE, text, text))
            prose_parts.clear()

    i = 0
    while i < len(lines):
        line = lines[i]
        if line.startswith("```"):
            flush_prose()
            info = line[3:].strip() or None
            code_parts: list[str] = []
            j = i + 1
            closed = False
            while j < len(lines):
                candidate = lines[j]
                if candidate.startswith("```") and candidate[3:].strip() == "":
                    closed = True
                    break
                code_parts.append(candidate)
                j += 1
            text = "".join(code_parts)
            if closed:
                raw = line + text + lines[j]
                i = j + 1
            else:
                raw = line + text
                warnings.warn(
                    "unterminated code fence; remainder emitted as code",
                    UnterminatedFenceWarning,
                    stacklevel=2,
                )
                i = len(lines)
            segments.append(AnswerSegment(SegmentKind.CODE, text, raw, info))
        else:
            prose_parts.append(line)
            i += 1
    flush_prose()
    return segments


@dataclass(frozen=True)
class AnswerVersion:
    revision_ordinal: int
    body_markdown: str
    timestamp: datetime
    segments: tuple[AnswerSegment, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.revision_ordinal < 1:
            raise ValueError("revision_ordinal must be positive")
        object.__setattr__(self, "timestamp", _ensure_utc(self.timestamp))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UnterminatedFenceWarning)
            segs = tuple(segment_answer(self.body_markdown))
        object.__setattr__(self, "segments", segs)

    def to_json(self) -> dict:
        return {
            "revision_ordinal": self.revision_ordinal,
            "body_markdown": self.body_markdown,
            "timestamp": self.timestamp.isoformat(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "AnswerVersion":
        return cls(
            revision_ordinal=int(doc["revision_ordinal"]),
            body_markdown=doc["body_markdown"],
            timestamp=parse_timestamp(doc["timestamp"]),
        )


@dataclass(frozen=True)
class AnswerThread:
    """A question, one answer's full revision history, and its comment list.

    ``concern_links`` are human annotations mapping a comment id to the
    revision ordinal that incorporated its concern.
    """

    question_id: str
    answer_id: str
    question_title: str
    question_body: str
    versions: tuple[AnswerVersion, ...]
    comments: tuple[Comment, ...]
    concern_links: tuple[tuple[str, int], ...] = ()
    tags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(self.versions) < 1:
            raise ValueError(f"thread {self.answer_id!r} has no versions")
        stamps = [v.timestamp for v in self.versions]
        ordinals = [v.revision_ordinal for v in self.versions]
        if sorted(stamps) != stamps or sorted(ordinals) != ordinals:
            raise ValueError(f"thread {self.answer_id!r}: versions out of order")
        if len(set(ordinals)) != len(ordinals):
            raise ValueError(f"thread {self.answer_id!r}: duplicate revision ordinals")
        ctimes = [c.timestamp for c in self.comments]
        if sorted(ctimes) != ctimes:
            raise ValueError(f"thread {self.answer_id!r}: comments out of order")
        comment_ids = {c.id for c in self.comments}
        known_ordinals = set(ordinals)
        for cid, ordinal in self.concern_links:
            if cid not in comment_ids:
                raise ValueError(f"concern_link references unknown comment {cid!r}")
            if ordinal not in known_ordinals:
                raise ValueError(f"concern_link references unknown revision {ordinal}")

    @property
    def language(self) -> LanguageTag:
        return language_from_tags(self.tags)

    def to_json(self) -> dict:
        return {
            "question_id": self.question_id,
            "answer_id": self.answer_id,
            "question_title": self.question_title,
            "question_body": self.question_body,
            "versions": [v.to_json() for v in self.versions],
            "comments": [c.to_json() for c in self.comments],
            "concern_links": [
                {"comment_id": cid, "revision_ordinal": rev} for cid, rev in self.concern_links
            ],
            "tags": list(self.tags),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "AnswerThread":
        return cls(
            question_id=str(doc["question_id"]),
            answer_id=str(doc["answer_id"]),
            question_title=doc.get("question_title", ""),
            question_body=doc.get("question_body", ""),
            versions=tuple(AnswerVersion.from_json(v) for v in doc["versions"]),
            comments=tuple(Comment.from_json(c) for c in doc["comments"]),
            concern_links=tuple(
                (str(link["comment_id"]), int(link["revision_ordinal"]))
                for link in doc.get("concern_links", [])
            ),
            tags=tuple(doc.get("tags", [])),
        )


def read_threads_jsonl(path) -> list[AnswerThread]:
    threads = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                threads.append(AnswerThread.from_json(json.loads(line)))
    return threads


def quartile_of(comment_count: int) -> QuartileTag:
    """Bucket a comment count into the benchmark's four quartile ranges:
    1 / 2-3 / 4-5 / 6-13. Counts outside 1..13 have no bucket.
    """
    if comment_count == 1:
        return QuartileTag.Q1
    if 2 <= comment_count <= 3:
        return QuartileTag.Q2
    if 4 <= comment_count <= 5:
        return QuartileTag.Q3
    if 6 <= comment_count <= 13:
        return QuartileTag.Q4
    raise QuartileRangeError(f"comment count {comment_count} has no quartile bucket (expected 1..13)")


class _RevisionPageParser(HTMLParser):
    """Stack-based extractor for saved revision-history pages.

    Expected shape: a container element whose class list includes
    ``js-revisions``; each child element with class ``revision`` holds a
    timestamp element (class ``relativetime``, value in its ``title`` or
    ``datetime`` attribute) and a ``post-source`` element whose text is the
    revision's markdown body.
    """

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.depth = 0
        self.container_depth: Optional[int] = None
        self.revision_depth: Optional[int] = None
        self.source_depth: Optional[int] = None
        self.revisions: list[dict] = []
        self.current: Optional[dict] = None
        self.found_container = False

    @staticmethod
    def _classes(attrs: list[tuple[str, Optional[str]]]) -> set[str]:
        for name, value in attrs:
            if name == "class" and value:
                return set(value.split())
        return set()

    def handle_starttag(self, tag, attrs):
        self.depth += 1
        classes = self._classes(attrs)
        attr_map = dict(attrs)
        if self.container_depth is None:
            if "js-revisions" in classes:
                self.container_depth = self.depth
                self.found_container = True
            return
        if self.revision_depth is None:
            if "revision" in classes:
                self.revision_depth = self.depth
                self.current = {"timestamp_raw": None, "source_parts": []}
            return
        if "relativetime" in classes and self.current is not None:
            stamp = attr_map.get("title") or attr_map.get("datetime")
            if stamp and self.current["timestamp_raw"] is None:
                self.current["timestamp_raw"] = stamp
        if "post-source" in classes and self.source_depth is None:
            self.source_depth = self.depth

    def handle_endtag(self, tag):
        if self.source_depth is not None and self.depth == self.source_depth:
            self.source_depth = None
        if self.revision_depth is not None and self.depth == self.revision_depth:
            self.revisions.append(self.current)
            self.current = None
            self.revision_depth = None
        if self.container_depth is not None and self.depth == self.container_depth:
            self.container_depth = None
        self.depth -= 1

    def handle_data(self, data):
        if self.source_depth is not None and self.current is not None:
            self.current["source_parts"].append(data)


def parse_revision_page(html: str) -> list[AnswerVersion]:
    """Extract all answer versions from a saved revision-history page.

    Returns versions ordered oldest-first with ordinals 1..n and timestamps
    normalized to UTC. Blocks out of timestamp order in the DOM are re-sorted
    (ties keep DOM order) and a warning is attached.
    """
    parser = _RevisionPageParser()
    parser.feed(html)
    parser.close()
    if not parser.found_container:
        raise RevisionPageError("revision container not found (missing selector: div.js-revisions)")

    extracted = []
    for dom_index, rev in enumerate(parser.revisions):
        raw_stamp = rev["timestamp_raw"]
        if raw_stamp is None:
            raise RevisionPageError(f"revision block {dom_index + 1} has no timestamp")
        try:
            stamp = parse_timestamp(raw_stamp)
        except ValueError as exc:
            raise RevisionPageError(
                f"revision block {dom_index + 1} has a malformed timestamp: {raw_stamp!r}"
            ) from exc
        body = "".join(rev["source_parts"])
        if body.startswith("\n"):
            body = body[1:]
        extracted.append((stamp, dom_index, body))

    ordered = sorted(extracted, key=lambda item: (item[0], item[1]))
    if [item[1] for item in ordered] != list(range(len(extracted))):
        warnings.warn(
            "revision blocks out of timestamp order; re-sorted ascending",
            RevisionOrderWarning,
            stacklevel=2,
        )
    return [
        AnswerVersion(revision_ordinal=i + 1, body_markdown=body, timestamp=stamp)
        for i, (stamp, _, body) in enumerate(ordered)
    ]
