"""Command-line entry points for the curation, classification, scoring,
evaluation, and serving workflows."""
from __future__ import annotations

import json
import os
import sys

import click

from .concerns import ConfusionCounts, confusion, identify_concerns, score
from .curation import curate_many, read_instances_jsonl, stratified_sample, write_instances_jsonl
from .harness import (
    aggregate,
    canonical_json,
    compare_baseline,
    read_annotations_csv,
    read_results_jsonl,
    write_baseline_csv,
    write_report_csvs,
)
from .metrics import METRIC_NAMES, PairScorer, PairScores, mean_scores
from .posts import QuartileTag, read_threads_jsonl
from .providers import record_replay_store
from .service import load_config, serve


@click.group()
def main() -> None:
    """Comment-driven answer refinement toolkit."""


@main.command("curate")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True), help="AnswerThread JSON lines")
@click.option("--out", "out_path", required=True, type=click.Path(), help="BenchmarkInstance JSON lines")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--per-quartile", default=0, show_default=True, type=int, help="0 keeps every instance")
@click.option("--drop-unaddressed", is_flag=True, help="drop threads whose concerns were never addressed by any revision")
@click.option("--include-other-languages", is_flag=True)
def curate_command(in_path, out_path, seed, per_quartile, drop_unaddressed, include_other_languages):
    """Build benchmark instances from answer threads."""
    threads = read_threads_jsonl(in_path)
    instances, skipped = curate_many(threads, drop_unaddressed=drop_unaddressed)
    for answer_id, reason in skipped:
        click.echo(f"skipped {answer_id}: {reason}", err=True)
    if per_quartile > 0:
        instances = stratified_sample(
            instances, per_quartile, seed, include_other_languages=include_other_languages
        )
    write_instances_jsonl(instances, out_path)
    click.echo(f"wrote {len(instances)} instances to {out_path}")


def _open_provider(name: str, replay_store: str | None, strict: bool):
    if replay_store:
        return record_replay_store(replay_store, mode="replay", strict=strict)
    from .providers import ChatCompletionsProvider, DecodingParams

    endpoint = os.environ.get("AUTOCOMBAT_ENDPOINT", "")
    model = os.environ.get("AUTOCOMBAT_MODEL", "")
    if not endpoint or not model:
        raise click.UsageError(
            "live provider needs AUTOCOMBAT_ENDPOINT and AUTOCOMBAT_MODEL "
            "(or pass --replay-store)"
        )
    return ChatCompletionsProvider(name=name, endpoint=endpoint, model=model, decoding=DecodingParams())


@main.command("classify")
@click.option("--bench", required=True, type=click.Path(exists=True), help="BenchmarkInstance JSON lines")
@click.option("--provider", "provider_name", default="deepseek", show_default=True)
@click.option("--replay-store", type=click.Path(), help="serve completions from this transcript store")
@click.option("--no-strict", is_flag=True, help="fall through to the live provider on replay misses")
@click.option("--out", "out_path", required=True, type=click.Path())
def classify_command(bench, provider_name, replay_store, no_strict, out_path):
    """Run concern identification and report per-quartile scores."""
    instances = read_instances_jsonl(bench)
    provider = _open_provider(provider_name, replay_store, not no_strict)

    pooled: dict[QuartileTag, ConfusionCounts] = {}
    unmatched_total = 0
    for inst in instances:
        if not inst.relevant_comments:
            continue
        outcome = identify_concerns(inst, provider)
        unmatched_total += len(outcome.unmatched)
        counts = confusion(outcome.predictions, inst.relevant_comments)
        if inst.quartile in pooled:
            pooled[inst.quartile] = pooled[inst.quartile] + counts
        else:
            pooled[inst.quartile] = counts

    header = ["quartile", "accuracy", "precision", "recall", "f1", "specificity", "mcc"]
    rows = []
    for quartile in QuartileTag:
        if quartile not in pooled:
            continue
        scores = score(pooled[quartile])
        rows.append(
            {
                "quartile": quartile.value,
                **{k: round(v, 4) for k, v in scores.as_dict().items()},
            }
        )
    with open(out_path, "w", encoding="utf-8") as handle:
        handle.write(canonical_json(rows))

    click.echo("  ".join(f"{h:>11}" for h in header))
    for row in rows:
        click.echo("  ".join(f"{row[h]:>11}" for h in header))
    if unmatched_total:
        click.echo(f"{unmatched_total} concerns could not be matched to a comment", err=True)


def _read_text_lines(path) -> list[str]:
    """Each line is one JSON-encoded string (texts may contain newlines)."""
    texts = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                text = json.loads(line)
                if not isinstance(text, str):
                    raise click.UsageError(f"{path}: every line must be a JSON string")
                texts.append(text)
    return texts


@main.command("score")
@click.option("--hyp", required=True, type=click.Path(exists=True), help="hypotheses, one JSON string per line")
@click.option("--ref", required=True, type=click.Path(exists=True), help="references, one JSON string per line")
@click.option("--report", "report_path", required=True, type=click.Path())
def score_command(hyp, ref, report_path):
    """Score hypothesis/reference pairs with the full syntactic suite."""
    hyps = _read_text_lines(hyp)
    refs = _read_text_lines(ref)
    if len(hyps) != len(refs):
        raise click.UsageError(f"{len(hyps)} hypotheses vs {len(refs)} references")
    scorer = PairScorer(refs)
    scores = [scorer.score(h, r) for h, r in zip(hyps, refs)]

    report = {
        "pairs": [s.as_dict() for s in scores],
        "aggregate": mean_scores(scores),
    }
    with open(report_path, "w", encoding="utf-8") as handle:
        handle.write(canonical_json(report))

    csv_path = os.path.splitext(report_path)[0] + ".csv"
    import csv as csv_module

    with open(csv_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv_module.writer(handle)
        writer.writerow(["pair", *METRIC_NAMES])
        for i, s in enumerate(scores):
            writer.writerow([i, *[getattr(s, name) for name in METRIC_NAMES]])
        writer.writerow(["mean", *[report["aggregate"][name] for name in METRIC_NAMES]])
    click.echo(f"scored {len(scores)} pairs -> {report_path}, {csv_path}")


@main.command("evaluate")
@click.option("--results", required=True, type=click.Path(exists=True), help="InstanceResult JSON lines")
@click.option("--annotations", type=click.Path(exists=True), help="intent labels CSV (instance_id, annotator, label)")
@click.option("--baseline", type=click.Path(exists=True), help="baseline PairScores JSON lines, paired with --results order")
@click.option("--out", "out_dir", required=True, type=click.Path())
def evaluate_command(results, annotations, baseline, out_dir):
    """Aggregate per-instance results into per-quartile reports."""
    instance_results = read_results_jsonl(results)
    labels = read_annotations_csv(annotations) if annotations else []
    reports = aggregate(instance_results, labels)

    os.makedirs(out_dir, exist_ok=True)
    tree = {"quartiles": [r.to_json() for r in reports]}

    if baseline:
        with open(baseline, encoding="utf-8") as handle:
            baseline_scores = [
                PairScores.from_dict(json.loads(line)) for line in handle if line.strip()
            ]
        ours = [r.syntactic for r in instance_results]
        comparisons = compare_baseline(ours, baseline_scores)
        tree["baseline"] = [c.to_json() for c in comparisons]
        write_baseline_csv(comparisons, os.path.join(out_dir, "baseline.csv"))

    with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8") as handle:
        handle.write(canonical_json(tree))
    write_report_csvs(reports, out_dir)
    click.echo(f"wrote reports for {len(reports)} quartiles to {out_dir}")


@main.command("serve")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def serve_command(config_path):
    """Run the refinement HTTP service."""
    serve(load_config(config_path))


if __name__ == "__main__":
    sys.exit(main())
