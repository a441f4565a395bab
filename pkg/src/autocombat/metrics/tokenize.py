"""Shared tokenizer for all word-level similarity metrics.

Every word-level metric in this package tokenizes the same way so that
scores are comparable across metrics; divergence from any external tool is
confined to this module.
"""
from __future__ import annotations

from dataclasses import dataclass

# Characters that mark a whitespace-delimited chunk as code-like; such chunks
# are kept whole ("e.cancel", "foo_bar()", "dict.get(key)").
_CODE_CHARS = frozenset("_.()")


@dataclass(frozen=True)
class TokenSequence:
    tokens: tuple[str, ...]
    source_text: str

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


def _split_chunk(chunk: str) -> list[str]:
    """Split one whitespace-free chunk into word runs and single punctuation
    characters, unless the chunk is code-like, in which case it stays whole."""
    if any(ch in _CODE_CHARS for ch in chunk):
        return [chunk]
    out: list[str] = []
    run: list[str] = []
    for ch in chunk:
        if ch.isalnum():
            run.append(ch)
        else:
            if run:
                out.append("".join(run))
                run = []
            out.append(ch)
    if run:
        out.append("".join(run))
    return out


def tokenize(text: str) -> TokenSequence:
    """Lowercase, split on Unicode whitespace, then split punctuation into
    separate tokens except inside code-like chunks (containing any of
    ``_ . ( )``), which are kept whole.
    """
    tokens: list[str] = []
    for chunk in text.lower().split():
        tokens.extend(_split_chunk(chunk))
    return TokenSequence(tuple(tokens), text)


def ngrams(tokens: tuple[str, ...] | list[str], n: int) -> list[tuple[str, ...]]:
    """All contiguous n-grams of a token sequence, in order."""
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]
