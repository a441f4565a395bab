"""Process-boundary hook for plugging in external (e.g. neural) scorers.

The built-in suite is purely syntactic; heavyweight learned metrics stay out
of process. An external scorer is any command that reads JSON lines
``{"hyp": ..., "ref": ...}`` on stdin and writes one JSON object of named
scores per input line on stdout.
"""
from __future__ import annotations

import json
import subprocess
from typing import Protocol, Sequence


class ExternalScorer(Protocol):
    def score_pairs(self, pairs: Sequence[tuple[str, str]]) -> list[dict[str, float]]:
        """One dict of named scores per (hypothesis, reference) pair."""


class SubprocessScorer:
    """Runs an external scorer command over the JSONL pair protocol."""

    def __init__(self, command: Sequence[str], timeout_secs: float = 600.0):
        self.command = list(command)
        self.timeout_secs = timeout_secs

    def score_pairs(self, pairs: Sequence[tuple[str, str]]) -> list[dict[str, float]]:
        payload = "".join(
            json.dumps({"hyp": hyp, "ref": ref}, ensure_ascii=False) + "\n"
            for hyp, ref in pairs
        )
        proc = subprocess.run(
            self.command,
            input=payload.encode("utf-8"),
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            timeout=self.timeout_secs,
            check=True,
        )
        lines = proc.stdout.decode("utf-8").splitlines()
        results = [json.loads(line) for line in lines if line.strip()]
        if len(results) != len(pairs):
            raise ValueError(
                f"external scorer returned {len(results)} results for {len(pairs)} pairs"
            )
        return results
