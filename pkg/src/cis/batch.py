"""Batch (file IO) interface: run multi-turn topics through the pipeline and
write ranked results in the standard run-file format.

Byte-deterministic: timestamps are turn indices, not wall clock, and the
pipeline itself is pure.
"""

from __future__ import annotations

import json
from pathlib import Path

from .config import Config
from .model import ActorRole, Conversation, ConversationMode, Message, TextPayload
from .retrieval.actions import RetrievalConfig, run_pipeline
from .retrieval.index import index_corpus, load_corpus_file
from .retrieval.results import generate_result
from .store import DEFAULT_RECENT_WINDOW

DEFAULT_RUN_NAME = "cis"


class BatchError(Exception):
    """Malformed batch input; the message names the file and line/topic."""


def load_topics(path: str | Path) -> list[dict]:
    """Newline-delimited {"topic_id":..., "turns":[...]} records, validated."""
    topics = []
    seen_ids = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise BatchError(f"{path}:{lineno}: not JSON: {exc}") from exc
            topic_id = obj.get("topic_id")
            turns = obj.get("turns")
            if not isinstance(topic_id, str) or not topic_id:
                raise BatchError(f"{path}:{lineno}: missing or empty topic_id")
            if topic_id in seen_ids:
                raise BatchError(f"{path}:{lineno}: duplicate topic_id {topic_id!r}")
            if not isinstance(turns, list) or not turns or not all(isinstance(t, str) and t.strip() for t in turns):
                raise BatchError(f"{path}:{lineno}: topic {topic_id!r} needs a non-empty list of non-empty turns")
            seen_ids.add(topic_id)
            topics.append({"topic_id": topic_id, "turns": turns})
    if not topics:
        raise BatchError(f"{path}: no topics")
    return topics


def run_batch(topics_path: str | Path, corpus_path: str | Path, out_path: str | Path, cfg: Config | None = None) -> Path:
    cfg = cfg or Config()
    rcfg = cfg.retrieval_config()
    run_name = cfg.get("batch.run_name", DEFAULT_RUN_NAME)
    window = cfg.get_int("store.recent_window", DEFAULT_RECENT_WINDOW)
    topics = load_topics(topics_path)
    index = index_corpus(load_corpus_file(corpus_path))

    lines: list[str] = []
    for topic in topics:
        history: list[Message] = []
        for turn_no, turn in enumerate(topic["turns"], start=1):
            qid = f"{topic['topic_id']}_{turn_no}"
            user = Message(
                message_id=qid,
                conversation_id=topic["topic_id"],
                sender=ActorRole.SEEKER,
                payload=TextPayload(turn),
                timestamp_ms=2 * turn_no - 1,
            )
            history.append(user)
            conv = Conversation(
                conversation_id=topic["topic_id"],
                messages=tuple(history[-window:]),
                mode=ConversationMode.DIRECT,
            )
            q, results = run_pipeline(conv, index, rcfg)
            for r in results:
                lines.append(f"{qid} Q0 {r.doc_id} {r.rank} {r.score:.6f} {run_name}")
            history.append(_system_response(conv, q, results, rcfg, turn_no))

    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_bytes(("\n".join(lines) + "\n" if lines else "").encode("utf-8"))
    return out_path


def _system_response(conv: Conversation, q, results, rcfg: RetrievalConfig, turn_no: int) -> Message:
    candidates = generate_result(q, results, "search", snippet_chars=rcfg.snippet_chars)
    if candidates:
        payload, confidence = candidates[0].payload, candidates[0].confidence
    else:
        payload, confidence = TextPayload("No results."), 0.0
    last = conv.last()
    return Message(
        message_id=f"{conv.conversation_id}_r{turn_no}",
        conversation_id=conv.conversation_id,
        sender=ActorRole.SYSTEM,
        payload=payload,
        timestamp_ms=2 * turn_no,
        in_reply_to=last.message_id,
        origin_action="search",
        confidence=confidence,
    )
