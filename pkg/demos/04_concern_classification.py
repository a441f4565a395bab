"""
Classifying comments as actionable or generic
=============================================

The model reads the answer, the numbered comments, and the question, and
reports which comments raise actionable concerns. Predictions are scored
against gold labels with the standard confusion-matrix metrics, including
the balanced Matthews coefficient.
"""

import json
from datetime import datetime, timezone

from autocombat import (
    AnswerThread,
    AnswerVersion,
    Comment,
    confusion,
    curate,
    identify_concerns,
    score,
)
from autocombat.concerns import build_identifier_prompt
from autocombat.providers import DecodingParams


class OneShotProvider:
    """Minimal in-memory provider: one canned completion."""

    name = "canned"
    model = "canned"
    decoding = DecodingParams()

    def __init__(self, response: str):
        self.response = response

    def complete(self, system_text: str, user_text: str) -> str:
        return self.response


def ts(hour):
    return datetime(2022, 3, 14, hour, tzinfo=timezone.utc)


thread = AnswerThread(
    question_id="q7",
    answer_id="a7",
    question_title="Reading config values safely",
    question_body="KeyError when the setting is absent.",
    versions=(
        AnswerVersion(1, 'Use settings["timeout"].', ts(0)),
        AnswerVersion(2, 'Use settings.get("timeout", 30).', ts(9)),
    ),
    comments=(
        Comment("c1", "ada", "this raises KeyError when the key is missing, use .get()", ts(1), gold_label="IA"),
        Comment("c2", "lin", "worked for me, thanks a ton", ts(2), gold_label="GC"),
        Comment("c3", "kai", "maybe add type hints too?", ts(3), gold_label="GC"),
    ),
    concern_links=(("c1", 2),),
    tags=("python",),
)
instance = curate(thread)

canned = json.dumps(
    {"concerns": [{"comment_index": 1, "concern": "raises KeyError when the key is missing"}]}
)
outcome = identify_concerns(instance, OneShotProvider(canned))

for prediction in outcome.predictions:
    print(f"{prediction.comment_id}: {prediction.predicted_label.value:>2}", end="")
    print(f"  <- {prediction.concern_text}" if prediction.concern_text else "")

counts = confusion(outcome.predictions, instance.relevant_comments)
print(f"\ntp={counts.tp} fp={counts.fp} tn={counts.tn} fn={counts.fn}")

scores = score(counts)
print(
    f"accuracy={scores.accuracy:.2f} precision={scores.precision:.2f} "
    f"recall={scores.recall:.2f} f1={scores.f1:.2f} mcc={scores.mcc:.2f}"
)

system_text, _ = build_identifier_prompt(instance)
print("\nthe identification contract, verbatim:")
print("  " + system_text.splitlines()[-1])
