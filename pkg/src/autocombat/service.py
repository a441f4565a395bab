"""Stateless HTTP relay: answer/comments/question in, refined answer out.

The service validates the v1 wire schema, runs the refinement pipeline
against the configured provider, and returns the structured result. It
keeps no per-request state; an optional append-only audit log records
(request hash, result hash) pairs when enabled.
"""
from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.concurrency import run_in_threadpool

from .posts import Comment, parse_timestamp
from .providers import (
    DecodingParams,
    ChatCompletionsProvider,
    MissingFixtureError,
    ModelProvider,
    ProviderError,
    ProviderTimeout,
    ReplayProvider,
    RetriesExhausted,
    TranscriptStore,
)
from .refiner import RefinementRequest, ResultSchemaError, refine

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """The service configuration is unusable; the process must not start."""


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    max_body_bytes: int = 1_048_576
    allowed_origins: tuple[str, ...] = ()
    rate_limit_per_minute: int = 10
    max_in_flight: int = 4
    audit_log: Optional[str] = None
    provider_name: str = "deepseek"
    provider_endpoint: str = ""
    provider_model: str = ""
    provider_timeout_secs: float = 120.0
    provider_max_output_tokens: Optional[int] = None
    provider_prompt_style: str = "system_user"
    replay_store: Optional[str] = None
    replay_strict: bool = True

    def __post_init__(self) -> None:
        if self.max_body_bytes <= 0:
            raise ConfigError("max_body_bytes must be positive")
        if self.rate_limit_per_minute <= 0:
            raise ConfigError("rate_limit_per_minute must be positive")
        if not self.replay_store and not self.provider_endpoint:
            raise ConfigError("exactly one provider must be configured "
                              "(set provider.endpoint or provider.replay_store)")


def parse_config_text(text: str) -> ServiceConfig:
    """Parse the flat ``key = value`` config format (# starts a comment)."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"config line {lineno} is not 'key = value': {line!r}")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()

    def get_int(key: str, default: int) -> int:
        raw = values.get(key)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {raw!r}") from None

    def get_bool(key: str, default: bool) -> bool:
        raw = values.get(key)
        if raw is None:
            return default
        if raw.lower() in ("true", "yes", "1"):
            return True
        if raw.lower() in ("false", "no", "0"):
            return False
        raise ConfigError(f"{key} must be true or false, got {raw!r}")

    origins = tuple(
        origin.strip()
        for origin in values.get("service.allowed_origins", "").split(",")
        if origin.strip()
    )
    max_tokens_raw = values.get("provider.max_output_tokens")
    return ServiceConfig(
        host=values.get("service.host", "127.0.0.1"),
        port=get_int("service.port", 8080),
        max_body_bytes=get_int("service.max_body_bytes", 1_048_576),
        allowed_origins=origins,
        rate_limit_per_minute=get_int("service.rate_limit_per_minute", 10),
        max_in_flight=get_int("service.max_in_flight", 4),
        audit_log=values.get("service.audit_log") or None,
        provider_name=values.get("provider.name", "deepseek"),
        provider_endpoint=values.get("provider.endpoint", ""),
        provider_model=values.get("provider.model", ""),
        provider_timeout_secs=float(values.get("provider.timeout_secs", "120")),
        provider_max_output_tokens=int(max_tokens_raw) if max_tokens_raw else None,
        provider_prompt_style=values.get("provider.prompt_style", "system_user"),
        replay_store=values.get("provider.replay_store") or None,
        replay_strict=get_bool("provider.replay_strict", True),
    )


def load_config(path) -> ServiceConfig:
    with open(path, encoding="utf-8") as handle:
        return parse_config_text(handle.read())


def build_provider(config: ServiceConfig) -> ModelProvider:
    if config.replay_store:
        return ReplayProvider(
            TranscriptStore(config.replay_store), strict=config.replay_strict
        )
    return ChatCompletionsProvider(
        name=config.provider_name,
        endpoint=config.provider_endpoint,
        model=config.provider_model,
        decoding=DecodingParams(max_output_tokens=config.provider_max_output_tokens),
        timeout_secs=config.provider_timeout_secs,
        prompt_style=config.provider_prompt_style,
    )


class TokenBucket:
    """Per-client token bucket: ``rate`` requests per minute, burst = rate."""

    def __init__(self, rate_per_minute: int, clock: Callable[[], float] = time.monotonic):
        self.rate = rate_per_minute
        self.clock = clock
        self._lock = threading.Lock()
        self._buckets: dict[str, tuple[float, float]] = {}

    def allow(self, key: str) -> bool:
        now = self.clock()
        with self._lock:
            tokens, stamp = self._buckets.get(key, (float(self.rate), now))
            tokens = min(float(self.rate), tokens + (now - stamp) * self.rate / 60.0)
            if tokens < 1.0:
                self._buckets[key] = (tokens, now)
                return False
            self._buckets[key] = (tokens - 1.0, now)
            return True


@dataclass
class _ValidationOutcome:
    request: Optional[RefinementRequest] = None
    missing: list[str] = field(default_factory=list)
    malformed: list[str] = field(default_factory=list)

    @property
    def problems(self) -> dict:
        doc = {}
        if self.missing:
            doc["missing"] = self.missing
        if self.malformed:
            doc["malformed"] = self.malformed
        return doc


def _validate_refine_body(doc) -> _ValidationOutcome:
    outcome = _ValidationOutcome()
    if not isinstance(doc, dict):
        outcome.malformed.append("body")
        return outcome

    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        outcome.malformed.append("schema_version")
        return outcome

    answer = doc.get("answer")
    if answer is None:
        outcome.missing.append("answer")
    elif not isinstance(answer, str) or not answer.strip():
        outcome.malformed.append("answer")

    raw_comments = doc.get("comments")
    comments: list[Comment] = []
    if raw_comments is None:
        outcome.missing.append("comments")
    elif not isinstance(raw_comments, list):
        outcome.malformed.append("comments")
    else:
        fallback = datetime(1970, 1, 1, tzinfo=timezone.utc)
        for i, entry in enumerate(raw_comments):
            if not isinstance(entry, dict) or not isinstance(entry.get("body"), str) or not entry["body"].strip():
                outcome.malformed.append(f"comments[{i}]")
                continue
            stamp = fallback
            if entry.get("timestamp") is not None:
                try:
                    stamp = parse_timestamp(str(entry["timestamp"]))
                except ValueError:
                    outcome.malformed.append(f"comments[{i}].timestamp")
                    continue
            comments.append(
                Comment(
                    id=str(entry.get("id", f"c{i + 1}")),
                    author=str(entry.get("author", "")),
                    body=entry["body"],
                    timestamp=stamp,
                )
            )

    question = doc.get("question")
    if question is None:
        outcome.missing.append("question")
    elif not isinstance(question, str):
        outcome.malformed.append("question")

    if not outcome.missing and not outcome.malformed:
        outcome.request = RefinementRequest(
            original_answer=answer, comments=tuple(comments), question=question
        )
    return outcome


def create_app(config: ServiceConfig, provider: Optional[ModelProvider] = None) -> FastAPI:
    """Build the application; provider misconfiguration fails here, at boot."""
    if provider is None:
        provider = build_provider(config)
    replay_mode = isinstance(provider, ReplayProvider)

    app = FastAPI(title="autocombat refinement service", docs_url=None, redoc_url=None)
    if config.allowed_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.allowed_origins),
            allow_methods=["POST", "GET"],
            allow_headers=["content-type"],
        )

    limiter = TokenBucket(config.rate_limit_per_minute)
    in_flight = threading.Semaphore(config.max_in_flight)
    audit_lock = threading.Lock()

    def run_refinement(request: RefinementRequest):
        with in_flight:
            return refine(request, provider)

    def audit(request_digest: str, result_digest: str) -> None:
        if not config.audit_log:
            return
        line = json.dumps(
            {"request_hash": request_digest, "result_hash": result_digest},
            ensure_ascii=False,
        )
        with audit_lock:
            with open(config.audit_log, "a", encoding="utf-8") as handle:
                handle.write(line + "\n")

    @app.get("/healthz")
    async def healthz():
        return {
            "status": "ok",
            "provider": provider.name,
            "replay_mode": replay_mode,
        }

    @app.post("/refine")
    async def refine_endpoint(request: Request):
        client = request.client.host if request.client else "unknown"
        if not limiter.allow(client):
            return JSONResponse(status_code=429, content={"error": "rate limit exceeded"})

        body = await request.body()
        if len(body) > config.max_body_bytes:
            return JSONResponse(
                status_code=413,
                content={"error": f"body exceeds {config.max_body_bytes} bytes"},
            )
        try:
            doc = json.loads(body)
        except ValueError:
            return JSONResponse(
                status_code=400, content={"error": "body is not valid JSON"}
            )

        outcome = _validate_refine_body(doc)
        if outcome.request is None:
            return JSONResponse(
                status_code=400,
                content={"error": "invalid refinement request", **outcome.problems},
            )

        try:
            result = await run_in_threadpool(run_refinement, outcome.request)
        except MissingFixtureError as exc:
            return JSONResponse(
                status_code=502,
                content={"error": "provider failure", "request_hash": exc.request_hash},
            )
        except RetriesExhausted as exc:
            status = 504 if isinstance(exc.last_error, ProviderTimeout) else 502
            return JSONResponse(status_code=status, content={"error": str(exc)})
        except ProviderTimeout as exc:
            return JSONResponse(status_code=504, content={"error": str(exc)})
        except ProviderError as exc:
            return JSONResponse(status_code=502, content={"error": str(exc)})
        except ResultSchemaError as exc:
            return JSONResponse(
                status_code=502,
                content={"error": f"provider returned an invalid result: {exc}"},
            )

        payload = {"schema_version": SCHEMA_VERSION, **result.to_json()}
        audit(
            hashlib.sha256(body).hexdigest(),
            hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest(),
        )
        return JSONResponse(status_code=200, content=payload)

    return app


def serve(config: ServiceConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port)
