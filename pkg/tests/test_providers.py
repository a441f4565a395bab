from __future__ import annotations

import json

import httpx
import pytest

from autocombat.providers import (
    AuthError,
    ChatCompletionsProvider,
    DecodingParams,
    MalformedResponseError,
    MissingFixtureError,
    ProviderTimeout,
    RateLimitError,
    ReplayProvider,
    ReplayStoreError,
    RecordingProvider,
    RetriesExhausted,
    Transcript,
    TranscriptStore,
    TransportError,
    assemble_messages,
    call_with_retries,
    record_replay_store,
    request_hash,
)

NO_SLEEP = lambda _seconds: None


class ScriptedProvider:
    """Provider stub with a fixed response per call (or a raised error)."""

    name = "scripted"
    model = "scripted"
    decoding = DecodingParams()

    def __init__(self, outcomes):
        self.outcomes = list(outcomes)
        self.calls = 0

    def complete(self, system_text, user_text):
        outcome = self.outcomes[min(self.calls, len(self.outcomes) - 1)]
        self.calls += 1
        if isinstance(outcome, Exception):
            raise outcome
        return outcome


class TestRequestHash:
    def test_pure_function_of_prompt_and_decoding(self):
        d = DecodingParams()
        assert request_hash("s", "u", d) == request_hash("s", "u", d)
        assert request_hash("s", "u", d) != request_hash("s", "u2", d)
        assert request_hash("s2", "u", d) != request_hash("s", "u", d)
        assert request_hash("s", "u", d) != request_hash(
            "s", "u", DecodingParams(max_output_tokens=64)
        )

    def test_temperature_is_pinned(self):
        with pytest.raises(ValueError):
            DecodingParams(temperature=0.7)


class TestTranscriptStore:
    def test_record_then_replay_round_trip(self, tmp_path):
        path = tmp_path / "store.jsonl"
        live = ScriptedProvider(["the completion"])
        recorder = record_replay_store(path, mode="record", inner=live)
        assert recorder.complete("sys", "user") == "the completion"

        replayer = record_replay_store(path, mode="replay")
        assert replayer.complete("sys", "user") == "the completion"
        assert live.calls == 1

    def test_strict_miss_names_hash(self, tmp_path):
        replayer = record_replay_store(tmp_path / "empty.jsonl", mode="replay")
        digest = request_hash("sys", "user", DecodingParams())
        with pytest.raises(MissingFixtureError) as err:
            replayer.complete("sys", "user")
        assert err.value.request_hash == digest
        assert digest in str(err.value)

    def test_non_strict_falls_through_and_records(self, tmp_path):
        path = tmp_path / "store.jsonl"
        live = ScriptedProvider(["live answer"])
        provider = ReplayProvider(TranscriptStore(path), strict=False, inner=live)
        assert provider.complete("a", "b") == "live answer"
        assert provider.complete("a", "b") == "live answer"
        assert live.calls == 1

    def test_corrupt_store_lists_lines(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        good = Transcript("h1", "ok").to_json()
        path.write_text(json.dumps(good) + "\nnot json at all\n{\"also\": \"bad\"}\n")
        with pytest.raises(ReplayStoreError) as err:
            TranscriptStore(path)
        assert "line 2" in str(err.value)
        assert "line 3" in str(err.value)

    def test_zero_live_calls_with_full_store(self, tmp_path):
        path = tmp_path / "store.jsonl"
        live = ScriptedProvider(["one", "two"])
        recorder = RecordingProvider(live, TranscriptStore(path))
        recorder.complete("s1", "u1")
        recorder.complete("s2", "u2")
        assert live.calls == 2

        sentinel = ScriptedProvider(["never"])
        replayer = ReplayProvider(TranscriptStore(path), strict=True, inner=sentinel)
        assert replayer.complete("s1", "u1") == "one"
        assert replayer.complete("s2", "u2") == "two"
        assert sentinel.calls == 0

    def test_recording_keeps_latency_metadata(self, tmp_path):
        path = tmp_path / "store.jsonl"
        recorder = RecordingProvider(ScriptedProvider(["x"]), TranscriptStore(path))
        recorder.complete("s", "u")
        (line,) = path.read_text().strip().splitlines()
        assert "latency_ms" in json.loads(line)["metadata"]


def http_provider(handler, **kwargs) -> ChatCompletionsProvider:
    return ChatCompletionsProvider(
        name="stub",
        endpoint="https://stub.test/v1/chat/completions",
        model="stub-model",
        transport=httpx.MockTransport(handler),
        **kwargs,
    )


def completion_json(text: str) -> dict:
    return {"choices": [{"message": {"content": text}}]}


class TestChatCompletionsProvider:
    def test_happy_path_payload_shape(self, monkeypatch):
        monkeypatch.setenv("AUTOCOMBAT_API_KEY", "k-123")
        seen = {}

        def handler(request):
            seen["body"] = json.loads(request.content)
            seen["auth"] = request.headers.get("authorization")
            return httpx.Response(200, json=completion_json("hello"))

        provider = http_provider(handler)
        assert provider.complete("sys text", "user text") == "hello"
        assert seen["auth"] == "Bearer k-123"
        assert seen["body"]["temperature"] == 0.0
        assert seen["body"]["messages"][0] == {"role": "system", "content": "sys text"}

    def test_bad_key_no_retry(self, monkeypatch):
        monkeypatch.setenv("AUTOCOMBAT_API_KEY", "bad")
        calls = {"n": 0}

        def handler(request):
            calls["n"] += 1
            return httpx.Response(401, json={"error": "bad key"})

        provider = http_provider(handler)
        with pytest.raises(AuthError):
            call_with_retries(provider, "s", "u", sleep=NO_SLEEP)
        assert calls["n"] == 1

    def test_missing_key_is_auth_error(self, monkeypatch):
        monkeypatch.delenv("AUTOCOMBAT_API_KEY", raising=False)
        provider = http_provider(lambda request: httpx.Response(200))
        with pytest.raises(AuthError):
            provider.complete("s", "u")

    def test_rate_limit_retries_then_succeeds(self, monkeypatch):
        monkeypatch.setenv("AUTOCOMBAT_API_KEY", "k")
        calls = {"n": 0}

        def handler(request):
            calls["n"] += 1
            if calls["n"] < 3:
                return httpx.Response(429, json={})
            return httpx.Response(200, json=completion_json("finally"))

        provider = http_provider(handler)
        assert call_with_retries(provider, "s", "u", sleep=NO_SLEEP) == "finally"
        assert calls["n"] == 3

    def test_retries_exhausted_is_terminal(self, monkeypatch):
        monkeypatch.setenv("AUTOCOMBAT_API_KEY", "k")
        provider = http_provider(lambda request: httpx.Response(503))
        with pytest.raises(RetriesExhausted) as err:
            call_with_retries(provider, "s", "u", max_retries=3, sleep=NO_SLEEP)
        assert err.value.attempts == 3
        assert isinstance(err.value.last_error, TransportError)

    def test_timeout_maps_to_provider_timeout(self, monkeypatch):
        monkeypatch.setenv("AUTOCOMBAT_API_KEY", "k")

        def handler(request):
            raise httpx.ReadTimeout("too slow")

        provider = http_provider(handler)
        with pytest.raises(ProviderTimeout):
            provider.complete("s", "u")

    def test_malformed_response(self, monkeypatch):
        monkeypatch.setenv("AUTOCOMBAT_API_KEY", "k")
        provider = http_provider(lambda request: httpx.Response(200, json={"nope": 1}))
        with pytest.raises(MalformedResponseError):
            provider.complete("s", "u")

    def test_429_maps_to_rate_limit(self, monkeypatch):
        monkeypatch.setenv("AUTOCOMBAT_API_KEY", "k")
        provider = http_provider(lambda request: httpx.Response(429))
        with pytest.raises(RateLimitError):
            provider.complete("s", "u")

    def test_credentials_file_fallback(self, tmp_path, monkeypatch):
        monkeypatch.delenv("AUTOCOMBAT_API_KEY", raising=False)
        keyfile = tmp_path / "key.txt"
        keyfile.write_text("file-key\n")
        seen = {}

        def handler(request):
            seen["auth"] = request.headers.get("authorization")
            return httpx.Response(200, json=completion_json("ok"))

        provider = http_provider(handler, credentials_file=str(keyfile))
        provider.complete("s", "u")
        assert seen["auth"] == "Bearer file-key"


class TestFixtureStoreIntegrity:
    def test_no_hash_collisions_across_shipped_fixtures(self, tmp_path):
        # every recorded request must land on its own hash; a collision would
        # silently overwrite a transcript and change the store size
        import fixture_benchmark

        threads = fixture_benchmark.build_threads()
        path = tmp_path / "bench-store.jsonl"
        store = fixture_benchmark.build_store(threads, path)
        lines = [l for l in path.read_text().splitlines() if l.strip()]
        assert len(lines) == 2 * len(threads)
        assert len(store) == len(lines)
        hashes = [json.loads(l)["request_hash"] for l in lines]
        assert len(set(hashes)) == len(hashes)


class TestPromptShim:
    def test_system_user(self):
        msgs = assemble_messages("sys", "usr", "system_user")
        assert [m["role"] for m in msgs] == ["system", "user"]

    def test_user_only_merges(self):
        (msg,) = assemble_messages("sys", "usr", "user_only")
        assert msg["role"] == "user"
        assert "sys" in msg["content"] and "usr" in msg["content"]

    def test_unknown_style(self):
        with pytest.raises(ValueError):
            assemble_messages("s", "u", "mystery")


class TestCallWithRetries:
    def test_non_retryable_surfaces_immediately(self):
        provider = ScriptedProvider([AuthError("nope"), "never"])
        with pytest.raises(AuthError):
            call_with_retries(provider, "s", "u", sleep=NO_SLEEP)
        assert provider.calls == 1

    def test_backoff_sleeps_grow(self):
        sleeps = []
        provider = ScriptedProvider([RateLimitError("1"), RateLimitError("2"), "done"])
        assert call_with_retries(provider, "s", "u", sleep=sleeps.append) == "done"
        assert len(sleeps) == 2
        assert sleeps[1] > sleeps[0]
