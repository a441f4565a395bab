"""Comment classification: which comments raise actionable concerns?

The model sees the answer, the numbered comments, and the question, and
returns the concerns it found with their source comment indices. Comments
claimed by at least one concern are predicted improvement-related (IA); the
rest are generic (GC). Concerns whose index is missing or invalid fall back
to fuzzy text matching; concerns that still match nothing are surfaced as
diagnostics, never dropped silently.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .curation import BenchmarkInstance
from .posts import Comment, Label
from .providers import ModelProvider, call_with_retries
from .refiner import format_comments, strip_fence_wrapper

IDENTIFIER_SYSTEM_PROMPT = """You are a Stack Overflow comment triage assistant.

Extract only actionable improvement concerns from the numbered comments
(ignore thanks, jokes, meta, vague, generic remarks). A concern may quote a
comment, paraphrase it, or add context, but it must come from a comment.

Output JSON only:
{ "concerns": [{"comment_index": <1-based number of the source comment>, "concern": "..."}] }

Return {"concerns": []} when no comment raises an actionable concern."""

FUZZY_MATCH_THRESHOLD = 0.6

FLAG_UNDEFINED = "score:zero-denominator"


class IdentificationError(ValueError):
    """The classification task cannot run on this input."""


@dataclass(frozen=True)
class ConcernPrediction:
    comment_id: str
    predicted_label: Label
    concern_text: Optional[str] = None

    def __post_init__(self) -> None:
        if self.predicted_label == Label.IA and not (self.concern_text or "").strip():
            raise ValueError("IA prediction requires nonempty concern text")
        if self.predicted_label == Label.INA:
            raise ValueError("predictions are binary: IA or GC")


@dataclass(frozen=True)
class ConcernIdentification:
    predictions: tuple[ConcernPrediction, ...]
    unmatched: tuple[str, ...] = ()


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.tp + other.tp, self.fp + other.fp, self.tn + other.tn, self.fn + other.fn
        )


@dataclass(frozen=True)
class ClassificationScores:
    accuracy: float
    precision: float
    recall: float
    f1: float
    specificity: float
    mcc: float
    undefined: tuple[str, ...] = field(default_factory=tuple)

    def as_dict(self) -> dict[str, float]:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "specificity": self.specificity,
            "mcc": self.mcc,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ClassificationScores":
        return cls(
            accuracy=doc["accuracy"],
            precision=doc["precision"],
            recall=doc["recall"],
            f1=doc["f1"],
            specificity=doc["specificity"],
            mcc=doc["mcc"],
        )


def _longest_common_substring(a: str, b: str) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    best = 0
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            length = prev[j - 1] + 1 if x == y else 0
            cur.append(length)
            if length > best:
                best = length
        prev = cur
    return best


def fuzzy_match(concern: str, comments: Sequence[Comment]) -> Optional[int]:
    """Index of the comment best containing the concern text, or None.

    The ratio is the longest common substring over the concern length,
    case-insensitive; matches below the threshold don't count. Ties go to
    the earliest comment.
    """
    needle = concern.strip().lower()
    if not needle:
        return None
    best_ratio = 0.0
    best_index = None
    for i, comment in enumerate(comments):
        ratio = _longest_common_substring(needle, comment.body.lower()) / len(needle)
        if ratio > best_ratio:
            best_ratio = ratio
            best_index = i
    if best_index is not None and best_ratio >= FUZZY_MATCH_THRESHOLD:
        return best_index
    return None


def build_identifier_prompt(instance: BenchmarkInstance) -> tuple[str, str]:
    user_text = (
        f"Original Answer: {instance.v_init.body_markdown};\n"
        "Comments (mix of actionable + generic; order preserved as provided):\n"
        f"{format_comments(instance.relevant_comments)};\n"
        f"Question (use ONLY if needed): {instance.question_body}"
    )
    return IDENTIFIER_SYSTEM_PROMPT, user_text


def _parse_identifier_output(raw: str) -> list[dict]:
    payload = strip_fence_wrapper(raw).strip()
    try:
        doc = json.loads(payload)
    except ValueError as exc:
        raise IdentificationError(f"identifier output is not JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("concerns"), list):
        raise IdentificationError("identifier output must be {\"concerns\": [...]}")
    return doc["concerns"]


def identify_concerns(
    instance: BenchmarkInstance,
    provider: ModelProvider,
    max_retries: int = 3,
    sleep: Optional[Callable[[float], None]] = None,
) -> ConcernIdentification:
    """Classify each of the instance's comments as IA or GC via the model."""
    comments = instance.relevant_comments
    if not comments:
        raise IdentificationError(f"instance {instance.instance_id} has no comments")

    system_text, user_text = build_identifier_prompt(instance)
    kwargs = {"max_retries": max_retries}
    if sleep is not None:
        kwargs["sleep"] = sleep
    raw = call_with_retries(provider, system_text, user_text, **kwargs)

    concern_texts: dict[int, list[str]] = {}
    unmatched: list[str] = []
    for entry in _parse_identifier_output(raw):
        if not isinstance(entry, dict):
            unmatched.append(json.dumps(entry, ensure_ascii=False))
            continue
        text = entry.get("concern")
        if not isinstance(text, str) or not text.strip():
            unmatched.append(json.dumps(entry, ensure_ascii=False))
            continue
        index = entry.get("comment_index")
        if isinstance(index, int) and 1 <= index <= len(comments):
            concern_texts.setdefault(index - 1, []).append(text)
            continue
        fallback = fuzzy_match(text, comments)
        if fallback is not None:
            concern_texts.setdefault(fallback, []).append(text)
        else:
            unmatched.append(text)

    predictions = []
    for i, comment in enumerate(comments):
        if i in concern_texts:
            predictions.append(
                ConcernPrediction(comment.id, Label.IA, "; ".join(concern_texts[i]))
            )
        else:
            predictions.append(ConcernPrediction(comment.id, Label.GC))
    return ConcernIdentification(tuple(predictions), tuple(unmatched))


def confusion(
    predictions: Sequence[ConcernPrediction], gold: Sequence[Comment]
) -> ConfusionCounts:
    """Tally predictions against gold labels.

    IA is the positive class: tp = predicted IA and gold IA, fp = predicted
    IA but gold GC, tn = predicted GC and gold GC, fn = predicted GC but
    gold IA.
    """
    gold_by_id = {}
    for comment in gold:
        if comment.gold_label not in (Label.IA, Label.GC):
            raise ValueError(f"comment {comment.id!r} lacks a binary gold label")
        gold_by_id[comment.id] = comment.gold_label

    tp = fp = tn = fn = 0
    for pred in predictions:
        try:
            truth = gold_by_id[pred.comment_id]
        except KeyError:
            raise ValueError(f"prediction for unknown comment {pred.comment_id!r}") from None
        if pred.predicted_label == Label.IA:
            if truth == Label.IA:
                tp += 1
            else:
                fp += 1
        else:
            if truth == Label.GC:
                tn += 1
            else:
                fn += 1
    return ConfusionCounts(tp, fp, tn, fn)


def _ratio(numerator: float, denominator: float, name: str, undefined: list[str]) -> float:
    if denominator == 0:
        undefined.append(name)
        return 0.0
    return numerator / denominator


def score(counts: ConfusionCounts) -> ClassificationScores:
    """Standard binary classification metrics from a confusion matrix.

    Zero denominators yield 0.0 and are recorded in ``undefined`` so that
    aggregation stays total.
    """
    if counts.total == 0:
        raise ValueError("cannot score an empty confusion matrix")
    tp, fp, tn, fn = counts.tp, counts.fp, counts.tn, counts.fn
    undefined: list[str] = []

    accuracy = (tp + tn) / counts.total
    precision = _ratio(tp, tp + fp, "precision", undefined)
    recall = _ratio(tp, tp + fn, "recall", undefined)
    f1 = _ratio(2 * precision * recall, precision + recall, "f1", undefined)
    specificity = _ratio(tn, tn + fp, "specificity", undefined)
    mcc_denominator = math.sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn))
    mcc = _ratio(tp * tn - fp * fn, mcc_denominator, "mcc", undefined)

    return ClassificationScores(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        specificity=specificity,
        mcc=mcc,
        undefined=tuple(undefined),
    )
