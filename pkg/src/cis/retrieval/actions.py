"""Registrable retrieval actions wrapping the full pipeline:
co-reference resolution -> query generation -> BM25 search -> re-ranking ->
result generation. Pure functions of (conversation, index, config); safe to
invoke from concurrent dispatches.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from ..dispatch import ActionOutput
from ..model import (
    ActorRole,
    Conversation,
    Message,
    OptionsPayload,
    SelectionPayload,
    TextPayload,
)
from .coref import resolve_coreferences
from .index import CorpusIndex
from .query import GeneratedQuery, generate_query
from .rank import RetrievedResult, rerank, search
from .results import Candidate, generate_result


@dataclass(frozen=True, slots=True)
class RetrievalConfig:
    k: int = 10
    rerank_depth: int = 20
    proximity_boost: float = 0.5
    context_weight: float = 0.3
    qa_docs: int = 3
    snippet_chars: int = 160


def run_pipeline(
    conv: Conversation, index: CorpusIndex, cfg: RetrievalConfig
) -> tuple[GeneratedQuery, list[RetrievedResult]]:
    res = resolve_coreferences(conv)
    q = generate_query(conv, res, context_weight=cfg.context_weight)
    results = search(index, q, cfg.k)
    results = rerank(q, results, rerank_depth=cfg.rerank_depth, proximity_boost=cfg.proximity_boost)
    return q, results


def _wrap_candidates(
    conv: Conversation, action_name: str, candidates: list[Candidate], latency_ms: int, diagnostics: dict
) -> ActionOutput | None:
    if not candidates:
        return None
    last = conv.last()
    ordered = sorted(candidates, key=lambda c: -c.confidence)
    messages = tuple(
        Message(
            message_id=f"{conv.conversation_id}-{action_name}-{i}",
            conversation_id=conv.conversation_id,
            sender=ActorRole.SYSTEM,
            payload=c.payload,
            timestamp_ms=last.timestamp_ms + 1,
            in_reply_to=last.message_id,
            origin_action=action_name,
            confidence=c.confidence,
        )
        for i, c in enumerate(ordered, start=1)
    )
    return ActionOutput(action_name=action_name, candidates=messages, latency_ms=latency_ms, diagnostics=diagnostics)


class RetrievalAction:
    """Base action; subclasses fix the result-generation mode."""

    mode = "search"
    name = "search"

    def __init__(self, index: CorpusIndex, cfg: RetrievalConfig | None = None):
        self.index = index
        self.cfg = cfg or RetrievalConfig()

    def _selection_reply(self, conv: Conversation, sel: SelectionPayload) -> list[Candidate]:
        # Option ids on search responses are doc ids: a click asks for the document.
        doc = self.index.documents.get(sel.option_id)
        if doc is None:
            return []
        text = f"{doc.title}. {doc.body}" if doc.title else doc.body
        return [Candidate(TextPayload(text), 0.9)]

    def __call__(self, conv: Conversation, cancel=None) -> ActionOutput | None:
        start = time.monotonic()
        last = conv.last()
        if last is None or last.sender is ActorRole.SYSTEM:
            return None
        diagnostics: dict = {}
        if isinstance(last.payload, SelectionPayload):
            candidates = self._selection_reply(conv, last.payload)
        elif isinstance(last.payload, TextPayload):
            q, results = run_pipeline(conv, self.index, self.cfg)
            diagnostics = {
                "generated_query": q.text,
                "resolution": [
                    {"surface": e.surface, "antecedent": e.antecedent, "span": list(e.span)}
                    for e in q.resolution
                ],
                "results": len(results),
            }
            candidates = generate_result(
                q,
                results,
                self.mode,
                snippet_chars=self.cfg.snippet_chars,
                qa_docs=self.cfg.qa_docs,
                idf=self.index.idf,
            )
        else:
            return None
        latency_ms = int((time.monotonic() - start) * 1000)
        return _wrap_candidates(conv, self.name, candidates, latency_ms, diagnostics)


class SearchAction(RetrievalAction):
    mode = "search"
    name = "search"


class QAAction(RetrievalAction):
    mode = "qa"
    name = "qa"
