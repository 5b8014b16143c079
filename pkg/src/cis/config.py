"""Flat key-value configuration with environment-variable overrides.

File format: one ``key = value`` per line, ``#`` comments. A key like
``dispatch.timeout_ms`` is overridden by the environment variable
``CIS_DISPATCH_TIMEOUT_MS``.
"""

from __future__ import annotations

import os
from pathlib import Path

from .dispatch import DispatchConfig
from .retrieval.actions import RetrievalConfig

ENV_PREFIX = "CIS_"


def _env_name(key: str) -> str:
    return ENV_PREFIX + key.upper().replace(".", "_")


class Config:
    def __init__(self, values: dict[str, str] | None = None, environ: dict[str, str] | None = None):
        self._values = dict(values or {})
        self._environ = os.environ if environ is None else environ

    def get(self, key: str, default: str | None = None) -> str | None:
        env = self._environ.get(_env_name(key))
        if env is not None:
            return env
        return self._values.get(key, default)

    def get_int(self, key: str, default: int) -> int:
        raw = self.get(key)
        return int(raw) if raw is not None else default

    def get_float(self, key: str, default: float) -> float:
        raw = self.get(key)
        return float(raw) if raw is not None else default

    def get_list(self, key: str, default: tuple[str, ...] = ()) -> tuple[str, ...]:
        raw = self.get(key)
        if raw is None:
            return default
        return tuple(part.strip() for part in raw.split(",") if part.strip())

    def dispatch_config(self) -> DispatchConfig:
        base = DispatchConfig()
        return DispatchConfig(
            timeout_ms=self.get_int("dispatch.timeout_ms", base.timeout_ms),
            selection_policy=self.get("dispatch.policy", base.selection_policy),
            action_priority=self.get_list("dispatch.priority", base.action_priority),
            fallback_text=self.get("dispatch.fallback_text", base.fallback_text),
        )

    def retrieval_config(self) -> RetrievalConfig:
        base = RetrievalConfig()
        return RetrievalConfig(
            k=self.get_int("retrieval.k", base.k),
            rerank_depth=self.get_int("retrieval.rerank_depth", base.rerank_depth),
            proximity_boost=self.get_float("retrieval.proximity_boost", base.proximity_boost),
            context_weight=self.get_float("retrieval.context_weight", base.context_weight),
            qa_docs=self.get_int("retrieval.qa_docs", base.qa_docs),
            snippet_chars=self.get_int("retrieval.snippet_chars", base.snippet_chars),
        )


def load_config(path: str | Path | None = None, environ: dict[str, str] | None = None) -> Config:
    values: dict[str, str] = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected 'key = value'")
                key, _, value = line.partition("=")
                values[key.strip()] = value.strip()
    return Config(values, environ=environ)
