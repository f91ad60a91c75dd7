"""HTTP completion client with retries and a content-addressed cache.

Speaks the common chat-completion JSON protocol (messages array,
temperature, seed) against any configurable endpoint. Every response is
persisted under a key derived from the full request, so reruns with a
warm cache are fully offline and byte-deterministic.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import tempfile
import threading
import time
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Optional

import requests

ENV_ENDPOINT = "CHARTFAITH_ENDPOINT"
ENV_API_KEY = "CHARTFAITH_API_KEY"
ENV_CACHE_DIR = "CHARTFAITH_CACHE_DIR"


class ClientError(Exception):
    pass


class BackendUnavailable(ClientError):
    pass


class CacheMiss(ClientError):
    pass


class AuthError(ClientError):
    pass


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    temperature: float
    max_tokens: int
    sample_seed: int
    model_id: str

    def cache_key(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ResponseCache:
    """One file per entry under a hash-prefixed directory, plus an index manifest.

    Append-only: an existing key is never overwritten. Writes go through a
    temp file and an atomic rename, so concurrent writers are safe.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> Optional[dict]:
        path = self._path(key)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def put(self, key: str, entry: dict) -> None:
        path = self._path(key)
        if path.exists():
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(entry, fh, ensure_ascii=False, sort_keys=True)
            os.replace(tmp, path)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)
        with self._lock:
            index = self.root / "index.jsonl"
            with open(index, "a", encoding="utf-8") as fh:
                fh.write(
                    json.dumps(
                        {"key": key, "timestamp": entry.get("timestamp")},
                        sort_keys=True,
                    )
                    + "\n"
                )


class StaticCompletionClient:
    """Deterministic stub: completions indexed by the request's sample seed.

    Used for fixture-driven candidate generation and offline tests.
    """

    def __init__(self, completions: list[str]):
        if not completions:
            raise ValueError("need at least one completion")
        self.completions = list(completions)

    def complete(self, request: CompletionRequest) -> str:
        return self.completions[request.sample_seed % len(self.completions)]


class CompletionClient:
    """Thread-safe client; bounded in-flight requests; cache-first."""

    def __init__(
        self,
        endpoint: Optional[str] = None,
        api_key: Optional[str] = None,
        cache_dir: Optional[str | Path] = None,
        cache_only: bool = False,
        max_attempts: int = 5,
        backoff_base: float = 1.0,
        max_in_flight: int = 8,
        timeout: float = 60.0,
        rng: Optional[random.Random] = None,
    ):
        self.endpoint = endpoint or os.environ.get(ENV_ENDPOINT)
        self.api_key = api_key or os.environ.get(ENV_API_KEY)
        cache_dir = cache_dir or os.environ.get(ENV_CACHE_DIR)
        self.cache = ResponseCache(cache_dir) if cache_dir else None
        self.cache_only = cache_only
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self.timeout = timeout
        self._sem = threading.Semaphore(max_in_flight)
        self._rng = rng or random.Random()
        self.network_calls = 0

    def complete(self, request: CompletionRequest) -> str:
        key = request.cache_key()
        if self.cache is not None:
            entry = self.cache.get(key)
            if entry is not None:
                return entry["completion"]
        if self.cache_only:
            raise CacheMiss(f"cache-only mode and key {key[:12]}… absent")
        if not self.endpoint:
            raise BackendUnavailable("no endpoint configured and cache missed")
        completion, truncated = self._fetch(request)
        if self.cache is not None:
            self.cache.put(
                key,
                {
                    "key": key,
                    "request": asdict(request),
                    "completion": completion,
                    "truncated": truncated,
                    "timestamp": time.time(),
                    "endpoint": self.endpoint,
                },
            )
        return completion

    def _fetch(self, request: CompletionRequest) -> tuple[str, bool]:
        body = {
            "model": request.model_id,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
            "seed": request.sample_seed,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        last_error: Optional[Exception] = None
        for attempt in range(self.max_attempts):
            if attempt > 0:
                delay = self.backoff_base * (2 ** (attempt - 1))
                time.sleep(delay * (1 + 0.1 * self._rng.random()))
            try:
                with self._sem:
                    self.network_calls += 1
                    resp = requests.post(
                        self.endpoint, json=body, headers=headers, timeout=self.timeout
                    )
                if resp.status_code in (401, 403):
                    raise AuthError(f"endpoint returned {resp.status_code}")
                if resp.status_code >= 400:
                    last_error = ClientError(f"HTTP {resp.status_code}")
                    continue
                data = resp.json()
                choice = data["choices"][0]
                text = choice["message"]["content"]
                truncated = choice.get("finish_reason") == "length"
                if truncated:
                    text = text + "\n[truncated]"
                return text, truncated
            except AuthError:
                raise
            except (requests.RequestException, KeyError, ValueError) as exc:
                last_error = exc
        raise BackendUnavailable(
            f"{self.max_attempts} attempts exhausted: {last_error}"
        )
