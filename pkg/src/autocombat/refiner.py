"""Answer refinement: prompt assembly, model invocation, and validation of
the structured output.

The system prompt pins the deployed editing policy: edit only on actionable
concerns, apply suggestions without judging their correctness, prefer the
later comment on conflicts, never fabricate, and consult the question text
only when needed. The model must answer with a single JSON object carrying
``concerns``, ``used_question``, ``change_log`` and ``improved_answer``.
"""
from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

from .posts import Comment
from .providers import ModelProvider, call_with_retries

REFINER_SYSTEM_PROMPT = """You are a Stack Overflow Answer Refiner.

Policy:
- Edit ONLY if comments contain actionable, improvement-related concerns
- Do NOT add your own corrections or ideas. Do not evaluate technical correctness
- Even if a suggested change appears incorrect, apply it if it is an actionable improvement request
- You MAY read/use the question ONLY if needed to resolve those concerns
- Keep edits minimal, targeted, and concise; preserve original answer structure; SO tone; fenced code when useful
- Do not fabricate APIs/behavior/version claims. If a detail is not in comments (or necessary question context), do not invent it

Output JSON only:
{ "concerns": ["actionable concerns"],
"used_question": true|false,
"change_log": [{"concern": "...", "change": "..."}],
"improved_answer": "final answer text" }

Tasks:
1) Extract only actionable improvement concerns from comments (ignore thanks, jokes, meta, vague, generic remarks).
2) Set used_question=true if you needed the question to resolve concerns; else false.
3) Produce a revised answer addressing ONLY those concerns; minimal edits; keep helpful structure.
4) If no actionable concerns, return the original answer unchanged.
5) If concerns conflict, follow the later one based on the given order."""

RESULT_FIELDS = ("concerns", "used_question", "change_log", "improved_answer")

FLAG_UNCHANGED_ANSWER_ENFORCED = "policy:unchanged-answer-enforced"

_FENCE_WRAPPER = re.compile(r"\A\s*```[^\n]*\n(.*)\n```\s*\Z", re.DOTALL)


class EmptyQuestionWarning(UserWarning):
    """The request carried no question text; the template slot stays empty."""


class ResultSchemaError(ValueError):
    """The model output does not satisfy the structured-output contract.

    Carries the raw model output for audit.
    """

    def __init__(self, message: str, raw_output: str):
        super().__init__(message)
        self.raw_output = raw_output


@dataclass(frozen=True)
class RefinementRequest:
    original_answer: str
    comments: tuple[Comment, ...]
    question: str = ""

    def __post_init__(self) -> None:
        if not self.original_answer:
            raise ValueError("original_answer must be nonempty")


@dataclass(frozen=True)
class RefinementResult:
    concerns: tuple[str, ...]
    used_question: bool
    change_log: tuple[tuple[str, str], ...]
    improved_answer: str
    violations: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not self.improved_answer:
            raise ValueError("improved_answer must be nonempty")
        listed = set(self.concerns)
        for concern, _change in self.change_log:
            if concern not in listed:
                raise ValueError(f"change_log references unlisted concern {concern!r}")

    def to_json(self) -> dict:
        return {
            "concerns": list(self.concerns),
            "used_question": self.used_question,
            "change_log": [{"concern": c, "change": ch} for c, ch in self.change_log],
            "improved_answer": self.improved_answer,
        }


def format_comments(comments: tuple[Comment, ...]) -> str:
    """Number comments 1..n in source order, one per line."""
    return "\n".join(f"{i}. {c.body}" for i, c in enumerate(comments, start=1))


def build_prompt(request: RefinementRequest) -> tuple[str, str]:
    """Assemble (system_text, user_text) for a refinement request.

    Pure: identical requests produce identical prompt bytes. An empty
    question keeps its template slot (empty) and attaches a warning.
    """
    if not request.question.strip():
        warnings.warn(
            "refinement request has no question text; leaving the slot empty",
            EmptyQuestionWarning,
            stacklevel=2,
        )
    user_text = (
        f"Original Answer: {request.original_answer};\n"
        "Comments (mix of actionable + generic; order preserved as provided):\n"
        f"{format_comments(request.comments)};\n"
        f"Question (use ONLY if needed): {request.question}"
    )
    return REFINER_SYSTEM_PROMPT, user_text


def strip_fence_wrapper(raw: str) -> str:
    """Remove a single ```...``` wrapper around the whole payload, if present."""
    match = _FENCE_WRAPPER.match(raw)
    if match:
        return match.group(1)
    return raw


def parse_result(raw_model_output: str, original_answer: str) -> RefinementResult:
    """Validate the model's structured output against the four-field schema.

    When the model lists no concerns but altered the answer anyway, the
    original text is restored and the violation flagged rather than failing.
    """
    payload = strip_fence_wrapper(raw_model_output).strip()
    try:
        doc = json.loads(payload)
    except ValueError as exc:
        raise ResultSchemaError(f"output is not JSON: {exc}", raw_model_output) from exc
    if not isinstance(doc, dict):
        raise ResultSchemaError("output is not a JSON object", raw_model_output)

    missing = [name for name in RESULT_FIELDS if name not in doc]
    if missing:
        raise ResultSchemaError(
            f"missing fields: {', '.join(missing)}", raw_model_output
        )
    extra = [name for name in doc if name not in RESULT_FIELDS]
    if extra:
        raise ResultSchemaError(
            f"unexpected fields: {', '.join(sorted(extra))}", raw_model_output
        )

    concerns = doc["concerns"]
    used_question = doc["used_question"]
    change_log = doc["change_log"]
    improved_answer = doc["improved_answer"]

    if not isinstance(concerns, list) or not all(isinstance(c, str) for c in concerns):
        raise ResultSchemaError("concerns must be a list of strings", raw_model_output)
    if not isinstance(used_question, bool):
        raise ResultSchemaError("used_question must be a boolean", raw_model_output)
    if not isinstance(improved_answer, str) or not improved_answer:
        raise ResultSchemaError("improved_answer must be nonempty text", raw_model_output)
    if not isinstance(change_log, list):
        raise ResultSchemaError("change_log must be a list", raw_model_output)
    entries = []
    for entry in change_log:
        if (
            not isinstance(entry, dict)
            or set(entry) != {"concern", "change"}
            or not isinstance(entry.get("concern"), str)
            or not isinstance(entry.get("change"), str)
        ):
            raise ResultSchemaError(
                "change_log entries must be {concern, change} string pairs",
                raw_model_output,
            )
        entries.append((entry["concern"], entry["change"]))

    violations: tuple[str, ...] = ()
    if not concerns and improved_answer != original_answer:
        improved_answer = original_answer
        violations = (FLAG_UNCHANGED_ANSWER_ENFORCED,)

    try:
        return RefinementResult(
            concerns=tuple(concerns),
            used_question=used_question,
            change_log=tuple(entries),
            improved_answer=improved_answer,
            violations=violations,
        )
    except ValueError as exc:
        raise ResultSchemaError(str(exc), raw_model_output) from exc


def refine(
    request: RefinementRequest,
    provider: ModelProvider,
    max_retries: int = 3,
    sleep: Optional[Callable[[float], None]] = None,
) -> RefinementResult:
    """Run the full prompt -> completion -> validation pipeline.

    Provider failures retry with backoff up to ``max_retries`` and then
    surface as a terminal provider error; schema errors propagate with the
    raw output attached.
    """
    system_text, user_text = build_prompt(request)
    kwargs = {"max_retries": max_retries}
    if sleep is not None:
        kwargs["sleep"] = sleep
    raw = call_with_retries(provider, system_text, user_text, **kwargs)
    return parse_result(raw, request.original_answer)
