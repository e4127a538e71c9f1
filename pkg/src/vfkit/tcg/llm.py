"""LLM access with record/replay.

Every request is hashed (model, prompt, temperature, max_tokens) and the
store keeps one JSON file per hash.  Live mode records everything it gets;
replay mode answers only from the store and a miss is a hard error naming
the missing hash, never a silent fallback to the network.  Temperature
defaults to 0 so recorded transcripts are meaningful.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import requests

API_KEY_ENV = "VF_LLM_KEY"
DEFAULT_MAX_TOKENS = 4096


class LlmError(Exception):
    """Transport or protocol failure talking to the model endpoint."""


class ReplayMissError(LlmError):
    def __init__(self, request_hash: str):
        super().__init__(
            f"no recorded response for request hash {request_hash}; "
            "run once in live mode (or add the fixture) to populate the replay store"
        )
        self.request_hash = request_hash


@dataclass(frozen=True)
class LlmRequest:
    model_tag: str
    prompt: str
    temperature: float = 0.0
    max_tokens: int = DEFAULT_MAX_TOKENS


@dataclass
class LlmResponse:
    text: str
    finish_reason: str = "stop"
    usage: dict = field(default_factory=dict)


def request_hash(request: LlmRequest) -> str:
    canonical = json.dumps(
        {
            "model_tag": request.model_tag,
            "prompt": request.prompt,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        },
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class ReplayStore:
    """Directory of recorded request/response pairs, one file per hash."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, h: str) -> Path:
        return self.root / f"{h}.json"

    def get(self, h: str) -> LlmResponse | None:
        path = self._path(h)
        if not path.exists():
            return None
        rec = json.loads(path.read_text(encoding="utf-8"))
        resp = rec["response"]
        return LlmResponse(
            text=resp["text"],
            finish_reason=resp.get("finish_reason", "stop"),
            usage=resp.get("usage", {}),
        )

    def put(self, request: LlmRequest, response: LlmResponse) -> str:
        h = request_hash(request)
        rec = {
            "hash": h,
            "request": {
                "model_tag": request.model_tag,
                "prompt": request.prompt,
                "temperature": request.temperature,
                "max_tokens": request.max_tokens,
            },
            "response": {
                "text": response.text,
                "finish_reason": response.finish_reason,
                "usage": response.usage,
            },
        }
        path = self._path(h)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(rec, sort_keys=True, ensure_ascii=False, indent=1), encoding="utf-8")
        os.replace(tmp, path)
        return h


class ReplayClient:
    """Answers exclusively from a ReplayStore."""

    def __init__(self, store: ReplayStore):
        self.store = store

    def complete(self, request: LlmRequest) -> LlmResponse:
        h = request_hash(request)
        response = self.store.get(h)
        if response is None:
            raise ReplayMissError(h)
        return response


class LiveClient:
    """Chat-completion style HTTP client with bounded retries.

    Retries transient failures (5xx, network errors) with exponential
    backoff; 4xx responses fail immediately.  Every attempt is appended to
    attempt_history; every success is recorded to the store when one is
    attached.  The API key comes from the VF_LLM_KEY environment variable
    unless passed explicitly.
    """

    def __init__(self, endpoint: str, api_key: str | None = None,
                 record_store: ReplayStore | None = None,
                 max_retries: int = 3, backoff_s: float = 0.5,
                 transport=None, sleeper=time.sleep):
        self.endpoint = endpoint
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        if not self.api_key:
            raise LlmError(f"no API key: set {API_KEY_ENV} or pass api_key")
        self.record_store = record_store
        self.max_retries = max_retries
        self.backoff_s = backoff_s
        self.transport = transport if transport is not None else self._http_post
        self.sleeper = sleeper
        self.attempt_history: list[str] = []

    def _http_post(self, url: str, headers: dict, payload: dict) -> tuple[int, dict]:
        resp = requests.post(url, headers=headers, json=payload, timeout=120)
        try:
            body = resp.json()
        except ValueError:
            body = {"raw": resp.text[:1000]}
        return resp.status_code, body

    def complete(self, request: LlmRequest) -> LlmResponse:
        payload = {
            "model": request.model_tag,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        headers = {"Authorization": f"Bearer {self.api_key}", "Content-Type": "application/json"}
        last_error = None
        for attempt in range(self.max_retries + 1):
            if attempt > 0:
                self.sleeper(self.backoff_s * (2 ** (attempt - 1)))
            try:
                status, body = self.transport(self.endpoint, headers, payload)
            except (requests.RequestException, OSError) as exc:
                self.attempt_history.append(f"error:{type(exc).__name__}")
                last_error = f"network error: {exc}"
                continue
            self.attempt_history.append(f"status:{status}")
            if status >= 500:
                last_error = f"server returned {status}"
                continue
            if status != 200:
                raise LlmError(f"endpoint rejected request with status {status}: {body}")
            try:
                choice = body["choices"][0]
                response = LlmResponse(
                    text=choice["message"]["content"],
                    finish_reason=choice.get("finish_reason", "stop"),
                    usage=body.get("usage", {}),
                )
            except (KeyError, IndexError, TypeError) as exc:
                raise LlmError(f"malformed completion body: {exc}") from exc
            if self.record_store is not None:
                self.record_store.put(request, response)
            return response
        raise LlmError(f"gave up after {self.max_retries + 1} attempts: {last_error}")


def llm_call(request: LlmRequest, client) -> LlmResponse:
    """Uniform entry point over live and replay clients."""
    return client.complete(request)
