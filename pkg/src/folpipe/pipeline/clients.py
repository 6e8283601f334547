"""Language-model clients: HTTP chat-completions, file-backed replay and in-process mocks.

All clients apply stop sequences and the token cap on their side as well, so a
server that ignores either still yields the same text.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Protocol

import httpx

log = logging.getLogger(__name__)

Messages = Sequence[dict]

_TOKEN = re.compile(r"\w+|[^\w\s]")

ENV_ENDPOINT = "FOLPIPE_ENDPOINT"
ENV_API_KEY = "FOLPIPE_API_KEY"
ENV_MODEL = "FOLPIPE_MODEL"


class ClientError(RuntimeError):
    """A request that failed for good (after retries, or not retryable)."""

    def __init__(self, message: str, *, retryable: bool = False, status: int | None = None):
        super().__init__(message)
        self.retryable = retryable
        self.status = status


@dataclass(frozen=True)
class Completion:
    text: str
    prompt_tokens: int
    completion_tokens: int
    finish_reason: str = "stop"  # "stop" | "length"


@dataclass(frozen=True)
class GeneratorConfig:
    endpoint: str | None = None
    model: str | None = None
    api_key: str | None = field(default=None, repr=False)
    temperature: float = 0.1
    max_tokens: int = 1000
    stop: tuple[str, ...] = ()
    retries: int = 3
    backoff: float = 0.5
    timeout: float = 60.0
    rate_limit: float | None = None  # requests per second, shared by all workers
    stage1_share: float = 0.2  # incremental mode: fraction of max_tokens for the predicate stage

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be > 0")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")
        if not 0 < self.stage1_share < 1:
            raise ValueError("stage1_share must be in (0, 1)")
        if self.rate_limit is not None and self.rate_limit <= 0:
            raise ValueError("rate_limit must be > 0")
        object.__setattr__(self, "stop", tuple(self.stop))

    @classmethod
    def from_env(cls, env=None, **overrides) -> GeneratorConfig:
        env = os.environ if env is None else env
        base = {"endpoint": env.get(ENV_ENDPOINT), "model": env.get(ENV_MODEL), "api_key": env.get(ENV_API_KEY)}
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**base)

    def with_(self, **changes) -> GeneratorConfig:
        return replace(self, **changes)


class LanguageModelClient(Protocol):
    def complete(self, messages: Messages, *, max_tokens: int, stop: Sequence[str] = (),
                 temperature: float = 0.1) -> Completion: ...


def count_tokens(text: str) -> int:
    """Approximate token count: words and single punctuation marks."""
    return len(_TOKEN.findall(text))


def truncate_tokens(text: str, n: int) -> tuple[str, bool]:
    """Keep the first ``n`` approximate tokens; returns (text, truncated)."""
    if n <= 0:
        return "", bool(text)
    for i, m in enumerate(_TOKEN.finditer(text)):
        if i == n:
            return text[: m.start()].rstrip(), True
    return text, False


def apply_stop(text: str, stop: Sequence[str]) -> tuple[str, bool]:
    cut = min((i for i in (text.find(s) for s in stop if s) if i >= 0), default=-1)
    if cut < 0:
        return text, False
    return text[:cut], True


def _finish(raw: str, messages: Messages, max_tokens: int, stop: Sequence[str]) -> Completion:
    text, _ = apply_stop(raw, stop)
    text, truncated = truncate_tokens(text, max_tokens)
    prompt = sum(count_tokens(m.get("content", "")) for m in messages)
    return Completion(text, prompt, count_tokens(text), "length" if truncated else "stop")


def key_for(messages: Messages) -> str:
    """Stable key of a conversation (role and content only)."""
    canon = json.dumps([[m["role"], m["content"]] for m in messages], ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


class MockClient:
    """In-process client driven by a function of the messages (or a fixed string)."""

    def __init__(self, responder: Callable[[Messages], str] | str):
        self._responder = responder if callable(responder) else (lambda _m: responder)
        self.calls: list[list[dict]] = []
        self._lock = threading.Lock()

    def complete(self, messages, *, max_tokens, stop=(), temperature=0.1) -> Completion:
        with self._lock:
            self.calls.append([dict(m) for m in messages])
        raw = self._responder(messages)
        return _finish(raw, messages, max_tokens, stop)


def loop_responder(phrase: str = "IsFavorite(x, y)", repeats: int = 5000) -> Callable[[Messages], str]:
    """A degenerate model stuck repeating one phrase; the token cap truncates it."""
    text = " ".join([phrase] * repeats)
    return lambda _messages: text


class FailingClient:
    """Always raises; for exercising the transport-error path."""

    def __init__(self, message: str = "connection refused"):
        self.message = message

    def complete(self, messages, *, max_tokens, stop=(), temperature=0.1) -> Completion:
        raise ClientError(self.message, retryable=True)


class ReplayClient:
    """Answers from a JSON-lines file of ``{"key": ..., "response": ...}``.

    A line may carry ``messages`` instead of ``key``; the key is then computed.
    Unknown conversations raise :class:`ClientError`.
    """

    def __init__(self, responses: dict[str, str]):
        self.responses = dict(responses)

    @classmethod
    def from_file(cls, path: str | Path) -> ReplayClient:
        responses = {}
        with open(path, encoding="utf-8") as fh:
            for n, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                row = json.loads(line)
                key = row.get("key") or key_for(row["messages"])
                if "response" not in row:
                    raise ValueError(f"{path}:{n}: missing 'response'")
                responses[key] = row["response"]
        return cls(responses)

    def complete(self, messages, *, max_tokens, stop=(), temperature=0.1) -> Completion:
        key = key_for(messages)
        if key not in self.responses:
            raise ClientError(f"no recorded response for conversation {key[:12]}")
        return _finish(self.responses[key], messages, max_tokens, stop)


class RecordingClient:
    """Wraps a client and keeps every exchange, for writing replay files."""

    def __init__(self, inner: LanguageModelClient):
        self.inner = inner
        self.rows: list[dict] = []
        self._lock = threading.Lock()

    def complete(self, messages, *, max_tokens, stop=(), temperature=0.1) -> Completion:
        out = self.inner.complete(messages, max_tokens=max_tokens, stop=stop, temperature=temperature)
        with self._lock:
            self.rows.append({"key": key_for(messages), "messages": [dict(m) for m in messages],
                              "response": out.text})
        return out

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.writelines(json.dumps(row, ensure_ascii=False) + "\n" for row in self.rows)


class _RateLimiter:
    def __init__(self, per_second: float | None):
        self.interval = 1.0 / per_second if per_second else 0.0
        self._next = 0.0
        self._lock = threading.Lock()

    def wait(self) -> None:
        if not self.interval:
            return
        with self._lock:
            now = time.monotonic()
            start = max(now, self._next)
            self._next = start + self.interval
        if start > now:
            time.sleep(start - now)


class HttpChatClient:
    """Chat-completions over HTTP with retries, backoff and a shared rate limit."""

    def __init__(self, config: GeneratorConfig, *, transport: httpx.BaseTransport | None = None,
                 sleep: Callable[[float], None] = time.sleep):
        if not config.endpoint:
            raise ValueError(f"no endpoint configured (set {ENV_ENDPOINT} or pass one)")
        self.config = config
        self.url = _chat_url(config.endpoint)
        headers = {"Content-Type": "application/json"}
        if config.api_key:
            headers["Authorization"] = f"Bearer {config.api_key}"
        self._http = httpx.Client(timeout=config.timeout, headers=headers, transport=transport)
        self._limiter = _RateLimiter(config.rate_limit)
        self._sleep = sleep

    def close(self) -> None:
        self._http.close()

    def complete(self, messages, *, max_tokens, stop=(), temperature=None) -> Completion:
        payload = {
            "model": self.config.model,
            "messages": [{"role": m["role"], "content": m["content"]} for m in messages],
            "temperature": self.config.temperature if temperature is None else temperature,
            "max_tokens": max_tokens,
        }
        if stop:
            payload["stop"] = list(stop)[:4]
        last: ClientError | None = None
        for attempt in range(self.config.retries + 1):
            if attempt:
                self._sleep(self.config.backoff * 2 ** (attempt - 1))
            self._limiter.wait()
            try:
                raw = self._request(payload)
            except ClientError as exc:
                last = exc
                log.warning("request failed (attempt %d): %s", attempt + 1, exc)
                if not exc.retryable:
                    raise
                continue
            return _finish(raw, messages, max_tokens, stop)
        assert last is not None
        raise ClientError(f"giving up after {self.config.retries + 1} attempts: {last}", status=last.status)

    def _request(self, payload: dict) -> str:
        try:
            resp = self._http.post(self.url, json=payload)
        except httpx.HTTPError as exc:
            raise ClientError(f"{type(exc).__name__}: {exc}", retryable=True) from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            raise ClientError(f"HTTP {resp.status_code}", retryable=True, status=resp.status_code)
        if resp.status_code >= 400:
            raise ClientError(f"HTTP {resp.status_code}: {resp.text[:200]}", status=resp.status_code)
        try:
            content = resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ClientError(f"malformed response: {exc!r}", retryable=True) from exc
        if not isinstance(content, str):
            raise ClientError("malformed response: content is not a string", retryable=True)
        return content


def _chat_url(endpoint: str) -> str:
    endpoint = endpoint.rstrip("/")
    if endpoint.endswith("/chat/completions"):
        return endpoint
    return endpoint + "/chat/completions"
