"""Uniform interface to chat-completion backends, plus a deterministic
record/replay provider for tests and offline runs.

Every backend speaks the chat-completions wire shape over HTTPS with key
auth, so swapping vendors is configuration, not code. Requests are hashed
over prompt bytes plus decoding parameters; a transcript store keyed by that
hash makes any pipeline replayable byte-for-byte.
"""
from __future__ import annotations

import hashlib
import json
import os
import random
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol

import httpx

API_KEY_ENV = "AUTOCOMBAT_API_KEY"

DEFAULT_TIMEOUT_SECS = 120.0
DEFAULT_MAX_RETRIES = 3
BACKOFF_BASE_SECS = 0.5


class ProviderError(Exception):
    """Base for all provider failures."""

    retryable = False


class AuthError(ProviderError):
    """Credentials rejected; retrying cannot help."""


class RateLimitError(ProviderError):
    retryable = True


class ProviderTimeout(ProviderError):
    retryable = True


class TransportError(ProviderError):
    """Server-side or network failure."""

    retryable = True


class MalformedResponseError(ProviderError):
    """Transport succeeded but the payload is not a completion."""

    retryable = True


class MissingFixtureError(ProviderError):
    """Replay store has no transcript for the request hash."""

    def __init__(self, request_hash: str):
        super().__init__(f"no recorded transcript for request hash {request_hash}")
        self.request_hash = request_hash


class ReplayStoreError(ProviderError):
    """The transcript store could not be loaded."""


class RetriesExhausted(ProviderError):
    """Terminal failure after the configured retry budget."""

    def __init__(self, attempts: int, last_error: ProviderError):
        super().__init__(f"gave up after {attempts} attempts: {last_error}")
        self.attempts = attempts
        self.last_error = last_error


@dataclass(frozen=True)
class DecodingParams:
    temperature: float = 0.0
    max_output_tokens: Optional[int] = None

    def __post_init__(self) -> None:
        if self.temperature != 0.0:
            raise ValueError("decoding temperature is fixed at 0.0")


def request_hash(system_text: str, user_text: str, decoding: DecodingParams) -> str:
    """Digest of the prompt bytes plus decoding parameters, nothing else, so
    a transcript recorded against one backend replays against any other.
    A transcript store is therefore per-model by construction."""
    payload = json.dumps(
        {
            "system": system_text,
            "user": user_text,
            "temperature": decoding.temperature,
            "max_output_tokens": decoding.max_output_tokens,
        },
        ensure_ascii=False,
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Transcript:
    request_hash: str
    response_text: str
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "request_hash": self.request_hash,
            "response_text": self.response_text,
            "metadata": self.metadata,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Transcript":
        return cls(
            request_hash=doc["request_hash"],
            response_text=doc["response_text"],
            metadata=doc.get("metadata", {}),
        )


class ModelProvider(Protocol):
    name: str
    model: str
    decoding: DecodingParams

    def complete(self, system_text: str, user_text: str) -> str: ...


def resolve_api_key(credentials_file: Optional[str] = None) -> str:
    """Secrets come from the environment or a credentials file, never argv."""
    key = os.environ.get(API_KEY_ENV, "").strip()
    if key:
        return key
    if credentials_file:
        with open(credentials_file, encoding="utf-8") as handle:
            key = handle.read().strip()
        if key:
            return key
    raise AuthError(f"no API key in ${API_KEY_ENV} or credentials file")


def assemble_messages(system_text: str, user_text: str, prompt_style: str) -> list[dict]:
    """Per-vendor prompt shim: backends without a system role get the system
    text prepended to the user turn."""
    if prompt_style == "system_user":
        return [
            {"role": "system", "content": system_text},
            {"role": "user", "content": user_text},
        ]
    if prompt_style == "user_only":
        return [{"role": "user", "content": f"{system_text}\n\n{user_text}"}]
    raise ValueError(f"unknown prompt style {prompt_style!r}")


class ChatCompletionsProvider:
    """Synchronous client for any chat-completions endpoint with key auth."""

    def __init__(
        self,
        name: str,
        endpoint: str,
        model: str,
        decoding: DecodingParams = DecodingParams(),
        credentials_file: Optional[str] = None,
        timeout_secs: float = DEFAULT_TIMEOUT_SECS,
        prompt_style: str = "system_user",
        transport: Optional[httpx.BaseTransport] = None,
    ):
        self.name = name
        self.endpoint = endpoint
        self.model = model
        self.decoding = decoding
        self.credentials_file = credentials_file
        self.prompt_style = prompt_style
        self._client = httpx.Client(timeout=timeout_secs, transport=transport)

    def complete(self, system_text: str, user_text: str) -> str:
        body = {
            "model": self.model,
            "messages": assemble_messages(system_text, user_text, self.prompt_style),
            "temperature": self.decoding.temperature,
        }
        if self.decoding.max_output_tokens is not None:
            body["max_tokens"] = self.decoding.max_output_tokens
        headers = {"Authorization": f"Bearer {resolve_api_key(self.credentials_file)}"}

        try:
            response = self._client.post(self.endpoint, json=body, headers=headers)
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(f"provider call timed out: {exc}") from exc
        except httpx.HTTPError as exc:
            raise TransportError(f"transport failure: {exc}") from exc

        if response.status_code in (401, 403):
            raise AuthError(f"authentication rejected (HTTP {response.status_code})")
        if response.status_code == 429:
            raise RateLimitError("rate limited (HTTP 429)")
        if response.status_code >= 500:
            raise TransportError(f"server error (HTTP {response.status_code})")
        if response.status_code != 200:
            raise TransportError(f"unexpected status (HTTP {response.status_code})")

        try:
            doc = response.json()
            content = doc["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise MalformedResponseError(f"cannot extract completion: {exc}") from exc
        if not isinstance(content, str):
            raise MalformedResponseError("completion content is not text")
        return content


class TranscriptStore:
    """JSON-lines store of transcripts, loaded whole and appended under a lock."""

    def __init__(self, path):
        self.path = path
        self._lock = threading.Lock()
        self._by_hash: dict[str, Transcript] = {}
        if os.path.exists(path):
            self._load()

    def _load(self) -> None:
        bad_lines = []
        with open(self.path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    transcript = Transcript.from_json(json.loads(line))
                except (ValueError, KeyError) as exc:
                    bad_lines.append(f"line {lineno}: {exc}")
                    continue
                self._by_hash[transcript.request_hash] = transcript
        if bad_lines:
            raise ReplayStoreError(
                f"corrupt transcript store {self.path}: " + "; ".join(bad_lines)
            )

    def __len__(self) -> int:
        return len(self._by_hash)

    def get(self, request_id: str) -> Optional[Transcript]:
        return self._by_hash.get(request_id)

    def put(self, transcript: Transcript) -> None:
        with self._lock:
            self._by_hash[transcript.request_hash] = transcript
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(json.dumps(transcript.to_json(), ensure_ascii=False) + "\n")


class ReplayProvider:
    """Serves recorded completions by request hash; no network, fully
    deterministic. In strict mode an unknown hash is an error; otherwise the
    call falls through to the wrapped live provider (and is recorded)."""

    name = "replay"

    def __init__(
        self,
        store: TranscriptStore,
        strict: bool = True,
        inner: Optional[ModelProvider] = None,
        model: str = "replay",
        decoding: DecodingParams = DecodingParams(),
    ):
        self.store = store
        self.strict = strict
        self.inner = inner
        self.model = model
        self.decoding = decoding

    def complete(self, system_text: str, user_text: str) -> str:
        digest = request_hash(system_text, user_text, self.decoding)
        transcript = self.store.get(digest)
        if transcript is not None:
            return transcript.response_text
        if self.strict or self.inner is None:
            raise MissingFixtureError(digest)
        response = self.inner.complete(system_text, user_text)
        self.store.put(Transcript(digest, response))
        return response


class RecordingProvider:
    """Passes calls through to a live provider and persists every transcript."""

    def __init__(self, inner: ModelProvider, store: TranscriptStore):
        self.inner = inner
        self.store = store
        self.name = f"record({inner.name})"
        self.model = inner.model
        self.decoding = inner.decoding

    def complete(self, system_text: str, user_text: str) -> str:
        digest = request_hash(system_text, user_text, self.decoding)
        start = time.monotonic()
        response = self.inner.complete(system_text, user_text)
        latency_ms = round((time.monotonic() - start) * 1000.0, 3)
        self.store.put(Transcript(digest, response, {"latency_ms": latency_ms}))
        return response


def record_replay_store(
    path,
    mode: str = "replay",
    inner: Optional[ModelProvider] = None,
    strict: bool = True,
):
    """Open a transcript store as a provider wrapper.

    ``record`` wraps a live provider and persists; ``replay`` serves stored
    responses (strict by default).
    """
    store = TranscriptStore(path)
    if mode == "record":
        if inner is None:
            raise ValueError("record mode needs a live provider to wrap")
        return RecordingProvider(inner, store)
    if mode == "replay":
        return ReplayProvider(store, strict=strict, inner=inner)
    raise ValueError(f"unknown mode {mode!r}")


def call_with_retries(
    provider: ModelProvider,
    system_text: str,
    user_text: str,
    max_retries: int = DEFAULT_MAX_RETRIES,
    sleep: Callable[[float], None] = time.sleep,
    rng: Optional[random.Random] = None,
) -> str:
    """Invoke a provider with exponential backoff and jitter on retryable
    failures; non-retryable errors surface immediately."""
    rng = rng or random.Random()
    last_error: Optional[ProviderError] = None
    for attempt in range(max_retries):
        try:
            return provider.complete(system_text, user_text)
        except ProviderError as exc:
            if not exc.retryable:
                raise
            last_error = exc
            if attempt + 1 < max_retries:
                base = BACKOFF_BASE_SECS * (2**attempt)
                sleep(base + rng.uniform(0.0, 0.1 * base))
    assert last_error is not None
    raise RetriesExhausted(max_retries, last_error)
