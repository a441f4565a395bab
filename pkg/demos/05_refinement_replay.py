"""
Refining an answer, deterministically
=====================================

The refiner assembles the editing-policy prompt, calls the provider at
temperature zero, and validates the structured JSON result. Recording a
live session into a transcript store makes every later run a byte-exact
replay: no network, no drift.
"""

import json
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from autocombat import Comment, RefinementRequest, build_prompt, refine
from autocombat.providers import DecodingParams, record_replay_store


class FakeBackend:
    """Stands in for a live chat-completions endpoint."""

    name = "fake-live"
    model = "fake-model"
    decoding = DecodingParams()
    calls = 0

    def complete(self, system_text: str, user_text: str) -> str:
        self.calls += 1
        return json.dumps(
            {
                "concerns": ["use .get() so missing keys do not raise"],
                "used_question": False,
                "change_log": [
                    {
                        "concern": "use .get() so missing keys do not raise",
                        "change": "replaced indexing with .get() and a default",
                    }
                ],
                "improved_answer": 'Use settings.get("timeout", 30) instead of indexing.',
            }
        )


request = RefinementRequest(
    original_answer='Use settings["timeout"].',
    comments=(
        Comment("c1", "ada", "this raises KeyError for absent keys, use .get()",
                datetime(2022, 3, 14, 1, tzinfo=timezone.utc)),
        Comment("c2", "lin", "thanks, very helpful!",
                datetime(2022, 3, 14, 2, tzinfo=timezone.utc)),
    ),
    question="How do I read a config value that may be absent?",
)

system_text, user_text = build_prompt(request)
print("system prompt starts:", system_text.splitlines()[0])
print("user prompt:")
for line in user_text.splitlines():
    print("  " + line)

store_path = Path(tempfile.mkdtemp()) / "transcripts.jsonl"
backend = FakeBackend()

recorder = record_replay_store(store_path, mode="record", inner=backend)
first = refine(request, recorder)
print("\nrecorded run  :", first.improved_answer)

replayer = record_replay_store(store_path, mode="replay")
second = refine(request, replayer)
print("replayed run  :", second.improved_answer)
print("identical     :", first == second, f"(live calls: {backend.calls})")
print("change log    :", second.change_log[0][1])
