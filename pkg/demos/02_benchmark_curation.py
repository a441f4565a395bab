"""
Curating benchmark instances from answer threads
================================================

A thread pairs an answer's revision history with its labeled comment
stream. Curation picks the version just before the first addressed concern
(v_init), the last version a human linked to a concern (v_final), and the
comment set shipped to the model: addressed concerns plus generic chatter,
with never-addressed concerns dropped.
"""

from datetime import datetime, timezone

from autocombat import AnswerThread, AnswerVersion, Comment, curate, stratified_sample


def ts(day, hour=0):
    return datetime(2021, 6, day, hour, tzinfo=timezone.utc)


thread = AnswerThread(
    question_id="q100",
    answer_id="a200",
    question_title="How do I disable Alt+F4 in a dialog?",
    question_body="I want to prevent the user from closing the form.",
    versions=(
        AnswerVersion(1, "Set e.Cancel = true in FormClosing.", ts(1)),
        AnswerVersion(2, "Set e.Cancel = (e.Reason == CloseReason.UserClosing).", ts(5)),
    ),
    comments=(
        Comment("c1", "mara", "this also blocks shutdown, check CloseReason", ts(2), gold_label="IA"),
        Comment("c2", "omer", "lifesaver, thanks!", ts(3), gold_label="GC"),
        Comment("c3", "finn", "should also mention modal dialogs", ts(6), gold_label="INA"),
    ),
    concern_links=(("c1", 2),),
    tags=("c#", "winforms"),
)

instance = curate(thread)
print("v_init :", instance.v_init.body_markdown)
print("v_final:", instance.v_final.body_markdown)
print("shipped comments:", [c.id for c in instance.relevant_comments])
print("quartile:", instance.quartile.value, "| language:", instance.language_tag.value)

# Stratified sampling draws the same subset for the same seed.
pool = []
for i in range(40):
    n_comments = (1, 3, 5, 7)[i % 4]  # one thread per quartile, round robin
    comments = tuple(
        Comment(f"c{i}.{j}", "someone", "thanks for this!", ts(2, hour=j), gold_label="GC")
        for j in range(n_comments)
    )
    clone = AnswerThread(
        question_id=f"q{i}",
        answer_id=f"a{i}",
        question_title=thread.question_title,
        question_body=thread.question_body,
        versions=thread.versions,
        comments=comments,
        tags=("python",),
    )
    pool.append(curate(clone))

sample = stratified_sample(pool, per_quartile=2, rng_seed=7)
print("\nsampled:", [inst.answer_id for inst in sample])
print("same seed again:", [inst.answer_id for inst in stratified_sample(pool, per_quartile=2, rng_seed=7)])
