"""Clients for external services (web search, speech), each with a
deterministic offline stub so the whole engine runs with no network.

Client failures never reach the user: the enclosing action maps them to
no-output and the dispatcher falls back as usual.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from pathlib import Path

from .model import AudioPayload
from .retrieval.rank import RetrievedResult


class ClientError(Exception):
    pass


class NetworkFailure(ClientError):
    pass


class AuthFailure(ClientError):
    pass


class ClientTimeout(ClientError):
    pass


class NoTranscriptError(ClientError):
    pass


class SpeechServiceError(ClientError):
    pass


@dataclass(frozen=True, slots=True)
class WebSearchRequest:
    query: str
    top_k: int = 10
    timeout_ms: int = 1000

    def __post_init__(self):
        if not self.query:
            raise ValueError("query must be non-empty")
        if not (1 <= self.top_k <= 50):
            raise ValueError("top_k must be in [1, 50]")
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")


@dataclass(frozen=True, slots=True)
class SpeechJob:
    direction: str  # recognize | synthesize
    audio_reference: str | None = None
    text: str | None = None
    language: str = "en"


class StubWebSearchClient:
    """Serves fixtures keyed by exact query string; unknown queries get nothing."""

    def __init__(self, fixtures_path: str | Path | None = None):
        self._fixtures: dict[str, list[dict]] = {}
        if fixtures_path is not None:
            with open(fixtures_path, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    obj = json.loads(line)
                    self._fixtures[obj["query"]] = obj["results"]

    def search(self, req: WebSearchRequest) -> list[RetrievedResult]:
        raw = self._fixtures.get(req.query, [])[: req.top_k]
        n = len(raw)
        return [
            RetrievedResult(
                doc_id=r["doc_id"],
                title=r.get("title", ""),
                body=r.get("body", ""),
                score=float(r.get("score", n - i)),
                rank=i + 1,
                source="web",
            )
            for i, r in enumerate(raw)
        ]


class LiveWebSearchClient:
    """Minimal HTTP web-search client; the credential comes from the named
    environment variable, never from a config file."""

    def __init__(self, endpoint: str, credential_env: str = "CIS_WEB_SEARCH_KEY"):
        self.endpoint = endpoint
        self.credential_env = credential_env

    def search(self, req: WebSearchRequest) -> list[RetrievedResult]:
        import requests

        key = os.environ.get(self.credential_env)
        if not key:
            raise AuthFailure(f"missing credential in ${self.credential_env}")
        try:
            resp = requests.get(
                self.endpoint,
                params={"q": req.query, "count": req.top_k},
                headers={"Authorization": f"Bearer {key}"},
                timeout=req.timeout_ms / 1000.0,
            )
        except requests.Timeout as exc:
            raise ClientTimeout(str(exc)) from exc
        except requests.RequestException as exc:
            raise NetworkFailure(str(exc)) from exc
        if resp.status_code in (401, 403):
            raise AuthFailure(f"HTTP {resp.status_code}")
        if resp.status_code != 200:
            raise NetworkFailure(f"HTTP {resp.status_code}")
        results = []
        for i, r in enumerate(resp.json().get("results", [])[: req.top_k]):
            results.append(
                RetrievedResult(
                    doc_id=r.get("doc_id", r.get("url", f"web-{i + 1}")),
                    title=r.get("title", ""),
                    body=r.get("body", r.get("snippet", "")),
                    score=float(r.get("score", len(results) + 1)),
                    rank=i + 1,
                    source="web",
                )
            )
        return results


class StubSpeechClient:
    """Recognition stub: returns the transcript embedded in the audio payload."""

    def transcribe(self, job: SpeechJob, payload: AudioPayload | None = None) -> str:
        if job.direction != "recognize":
            raise ValueError(f"transcribe requires a recognize job, got {job.direction!r}")
        if payload is not None and payload.transcript:
            return payload.transcript
        raise NoTranscriptError("audio payload carries no embedded transcript")


def check_client_timeouts(client_timeout_ms: int, dispatch_timeout_ms: int) -> None:
    """Configuration-time guard: a hung client must not break the dispatch bound."""
    if client_timeout_ms >= dispatch_timeout_ms:
        raise ValueError(
            f"client timeout ({client_timeout_ms} ms) must be below the "
            f"dispatch timeout ({dispatch_timeout_ms} ms)"
        )


class WebSearchAction:
    """Registrable action backed by a web-search client; failures become no-output."""

    name = "web_search"

    def __init__(self, client, top_k: int = 10, timeout_ms: int = 1000):
        self.client = client
        self.top_k = top_k
        self.timeout_ms = timeout_ms

    def __call__(self, conv, cancel=None):
        from .model import ActorRole, TextPayload
        from .retrieval.actions import _wrap_candidates
        from .retrieval.query import GeneratedQuery
        from .retrieval.results import generate_result

        start = time.monotonic()
        last = conv.last()
        if last is None or last.sender is ActorRole.SYSTEM or not isinstance(last.payload, TextPayload):
            return None
        req = WebSearchRequest(query=last.payload.content, top_k=self.top_k, timeout_ms=self.timeout_ms)
        try:
            results = self.client.search(req)
        except ClientError:
            return None
        q = GeneratedQuery(text=req.query, source_message_id=last.message_id, resolution=())
        candidates = generate_result(q, results, "search")
        latency_ms = int((time.monotonic() - start) * 1000)
        return _wrap_candidates(conv, self.name, candidates, latency_ms, {"source": "web"})
