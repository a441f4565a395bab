from __future__ import annotations

import json
import warnings

import pytest

from autocombat.posts import UnterminatedFenceWarning, segment_answer
from autocombat.providers import (
    DecodingParams,
    RateLimitError,
    RetriesExhausted,
    Transcript,
    TranscriptStore,
    ReplayProvider,
    request_hash,
)
from autocombat.refiner import (
    FLAG_UNCHANGED_ANSWER_ENFORCED,
    EmptyQuestionWarning,
    RefinementRequest,
    RefinementResult,
    ResultSchemaError,
    build_prompt,
    parse_result,
    refine,
    strip_fence_wrapper,
)

from conftest import make_comment
from test_providers import NO_SLEEP, ScriptedProvider


def request_with(bodies, answer="Original answer text.", question="The question?"):
    comments = tuple(
        make_comment(f"c{i}", float(i), body) for i, body in enumerate(bodies, start=1)
    )
    return RefinementRequest(original_answer=answer, comments=comments, question=question)


def result_json(**overrides) -> str:
    doc = {
        "concerns": ["do the thing"],
        "used_question": False,
        "change_log": [{"concern": "do the thing", "change": "did it"}],
        "improved_answer": "Better answer.",
    }
    doc.update(overrides)
    return json.dumps(doc)


class TestBuildPrompt:
    def test_policy_bullets_present(self):
        system_text, _ = build_prompt(request_with(["fix it"]))
        assert "Do NOT add your own corrections" in system_text
        assert "follow the later one" in system_text
        assert "Do not fabricate" in system_text
        assert "ONLY if needed" in system_text
        assert "return the original answer unchanged" in system_text
        assert "Do not evaluate technical correctness" in system_text

    def test_comments_numbered_in_source_order(self):
        _, user_text = build_prompt(request_with(["first", "second", "third"]))
        assert "1. first" in user_text
        assert "2. second" in user_text
        assert "3. third" in user_text
        assert user_text.index("1. first") < user_text.index("2. second") < user_text.index("3. third")

    def test_template_slots(self):
        _, user_text = build_prompt(request_with(["c"], answer="ANSWER_BODY", question="QUESTION_BODY"))
        assert "Original Answer: ANSWER_BODY" in user_text
        assert "Question (use ONLY if needed): QUESTION_BODY" in user_text
        assert "order preserved as provided" in user_text

    def test_empty_question_warns_but_keeps_slot(self):
        with pytest.warns(EmptyQuestionWarning):
            _, user_text = build_prompt(request_with(["c"], question=""))
        assert user_text.rstrip().endswith("Question (use ONLY if needed):")

    def test_prompt_is_pure(self):
        req = request_with(["alpha", "beta"])
        assert build_prompt(req) == build_prompt(req)

    def test_empty_answer_rejected(self):
        with pytest.raises(ValueError):
            request_with(["c"], answer="")


class TestParseResult:
    def test_well_formed(self):
        result = parse_result(result_json(), "Original answer text.")
        assert result.concerns == ("do the thing",)
        assert result.change_log == (("do the thing", "did it"),)
        assert result.improved_answer == "Better answer."
        assert result.violations == ()

    def test_fenced_output_unwrapped(self):
        result = parse_result(f"```json\n{result_json()}\n```", "x")
        assert result.improved_answer == "Better answer."
        assert strip_fence_wrapper("```\n{}\n```") == "{}"

    def test_empty_document_lists_all_missing_fields(self):
        with pytest.raises(ResultSchemaError) as err:
            parse_result("{}", "orig")
        message = str(err.value)
        for name in ("concerns", "used_question", "change_log", "improved_answer"):
            assert name in message
        assert err.value.raw_output == "{}"

    def test_non_json_keeps_raw_for_audit(self):
        with pytest.raises(ResultSchemaError) as err:
            parse_result("Sorry, I cannot help with that.", "orig")
        assert err.value.raw_output.startswith("Sorry")

    def test_wrong_types_rejected(self):
        with pytest.raises(ResultSchemaError, match="used_question"):
            parse_result(result_json(used_question="yes"), "orig")
        with pytest.raises(ResultSchemaError, match="concerns"):
            parse_result(result_json(concerns="not a list"), "orig")
        with pytest.raises(ResultSchemaError, match="change_log"):
            parse_result(result_json(change_log=[{"concern": "x"}]), "orig")

    def test_extra_fields_rejected(self):
        raw = result_json(notes="extra")
        with pytest.raises(ResultSchemaError, match="unexpected fields: notes"):
            parse_result(raw, "orig")

    def test_unlisted_concern_in_change_log(self):
        raw = result_json(change_log=[{"concern": "never listed", "change": "x"}])
        with pytest.raises(ResultSchemaError, match="unlisted concern"):
            parse_result(raw, "orig")

    def test_no_concern_mutation_reset_and_flagged(self):
        raw = result_json(concerns=[], change_log=[], improved_answer="sneaky edit")
        result = parse_result(raw, "the original")
        assert result.improved_answer == "the original"
        assert FLAG_UNCHANGED_ANSWER_ENFORCED in result.violations

    def test_no_concern_unchanged_is_clean(self):
        raw = result_json(concerns=[], change_log=[], improved_answer="the original")
        result = parse_result(raw, "the original")
        assert result.violations == ()

    def test_empty_improved_answer_rejected(self):
        with pytest.raises(ResultSchemaError, match="improved_answer"):
            parse_result(result_json(improved_answer=""), "orig")


def replay_provider_for(request: RefinementRequest, response: str, tmp_path) -> ReplayProvider:
    store = TranscriptStore(tmp_path / "fixtures.jsonl")
    system_text, user_text = build_prompt(request)
    store.put(Transcript(request_hash(system_text, user_text, DecodingParams()), response))
    return ReplayProvider(store, strict=True)


WINFORMS_ANSWER = (
    "Handle the closing event:\n\n```csharp\nprivate void Form1_FormClosing(object sender, "
    "FormClosingEventArgs e) {\n    e.Cancel = true;\n}\n```\nThis stops the form from closing."
)
WINFORMS_IMPROVED = (
    "Handle the closing event:\n\n```csharp\nprivate void Form1_FormClosing(object sender, "
    "FormClosingEventArgs e) {\n    e.Cancel = (e.Reason == CloseReason.UserClosing);\n}\n```\n"
    "This blocks only user-initiated closes such as Alt+F4."
)

CSS_ANSWER = (
    "Flip with CSS:\n\n```css\n.flip-horizontal {\n    transform: scale(-1, 1);\n"
    "    -moz-transform: scale(-1, 1);\n    -webkit-transform: scale(-1, 1);\n}\n```"
)
CSS_IMPROVED = (
    "Flip with CSS:\n\n```css\n.flip-horizontal {\n    transform: scale(-1, 1);\n"
    "    -moz-transform: scale(-1, 1);\n    -webkit-transform: scale(-1, 1);\n"
    "    -o-transform: scale(-1, 1);\n}\n.flip-vertical {\n    -o-transform: scale(1, -1);\n}\n```"
)


class TestRefine:
    def test_winforms_close_reason_fixture(self, tmp_path):
        request = request_with(
            ["This blocks every close, use e.Cancel = (e.Reason == CloseReason.UserClosing) instead"],
            answer=WINFORMS_ANSWER,
            question="How do I prevent the user from closing the form with Alt+F4?",
        )
        response = json.dumps(
            {
                "concerns": ["blocks all close attempts, should only block user closes"],
                "used_question": True,
                "change_log": [
                    {
                        "concern": "blocks all close attempts, should only block user closes",
                        "change": "condition the cancel on CloseReason.UserClosing",
                    }
                ],
                "improved_answer": WINFORMS_IMPROVED,
            }
        )
        provider = replay_provider_for(request, response, tmp_path)
        result = refine(request, provider)
        assert "e.Cancel = (e.Reason == CloseReason.UserClosing)" in result.improved_answer
        assert result.used_question is True

    def test_css_opera_prefix_fixture(self, tmp_path):
        request = request_with(
            ["Opera needs -o-transform: scale(-1, 1); and -o-transform: scale(1, -1);"],
            answer=CSS_ANSWER,
            question="How can I flip an image with CSS in every browser?",
        )
        response = json.dumps(
            {
                "concerns": ["missing Opera-specific prefixes"],
                "used_question": False,
                "change_log": [
                    {"concern": "missing Opera-specific prefixes", "change": "added -o-transform rules"}
                ],
                "improved_answer": CSS_IMPROVED,
            }
        )
        provider = replay_provider_for(request, response, tmp_path)
        result = refine(request, provider)
        assert "-o-transform: scale(-1, 1)" in result.improved_answer
        assert "-o-transform: scale(1, -1)" in result.improved_answer
        assert result.used_question is False

    def test_all_generic_comments_return_original(self, tmp_path):
        request = request_with(["thanks!", "+1 saved my day"], answer="Keep it as is.")
        response = json.dumps(
            {
                "concerns": [],
                "used_question": False,
                "change_log": [],
                "improved_answer": "Keep it as is.",
            }
        )
        provider = replay_provider_for(request, response, tmp_path)
        result = refine(request, provider)
        assert result.improved_answer == request.original_answer
        assert result.concerns == ()

    def test_fixture_fences_stay_terminated(self, tmp_path):
        for improved in (WINFORMS_IMPROVED, CSS_IMPROVED):
            with warnings.catch_warnings():
                warnings.simplefilter("error", UnterminatedFenceWarning)
                segment_answer(improved)

    def test_replay_determinism(self, tmp_path):
        request = request_with(["fix the loop"], answer="Loop answer.")
        provider = replay_provider_for(request, result_json(), tmp_path)
        first = refine(request, provider)
        second = refine(request, provider)
        assert first == second

    def test_provider_errors_retry_then_surface(self):
        provider = ScriptedProvider(
            [RateLimitError("slow down"), RateLimitError("again"), RateLimitError("still")]
        )
        with pytest.raises(RetriesExhausted):
            refine(request_with(["c"]), provider, max_retries=3, sleep=NO_SLEEP)
        assert provider.calls == 3

    def test_schema_error_propagates_with_raw(self):
        provider = ScriptedProvider(["this is not json"])
        with pytest.raises(ResultSchemaError) as err:
            refine(request_with(["c"]), provider, sleep=NO_SLEEP)
        assert err.value.raw_output == "this is not json"


class TestRefinementResultType:
    def test_requires_nonempty_answer(self):
        with pytest.raises(ValueError):
            RefinementResult((), False, (), "")

    def test_change_log_must_reference_concerns(self):
        with pytest.raises(ValueError):
            RefinementResult(("a",), False, (("b", "x"),), "text")

    def test_json_shape(self):
        result = RefinementResult(("a",), True, (("a", "did"),), "text")
        assert result.to_json() == {
            "concerns": ["a"],
            "used_question": True,
            "change_log": [{"concern": "a", "change": "did"}],
            "improved_answer": "text",
        }
