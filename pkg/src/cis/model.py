"""Multi-modal message and conversation data model plus its canonical wire encoding.

Everything that flows through the engine -- user input, wizard traffic, system
responses -- is a Message. Messages are immutable value objects and are safe to
share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Union


class ActorRole(str, Enum):
    SEEKER = "seeker"
    WIZARD = "wizard"
    SYSTEM = "system"


class ConversationMode(str, Enum):
    DIRECT = "direct"
    WOZ = "woz"


@dataclass(frozen=True, slots=True)
class TextPayload:
    content: str
    kind = "text"


@dataclass(frozen=True, slots=True)
class ImagePayload:
    reference: str
    caption: str | None = None
    kind = "image"


@dataclass(frozen=True, slots=True)
class AudioPayload:
    reference: str
    transcript: str | None = None
    kind = "audio"


@dataclass(frozen=True, slots=True)
class OptionItem:
    option_id: str
    label: str


@dataclass(frozen=True, slots=True)
class OptionsPayload:
    prompt: str
    items: tuple[OptionItem, ...]
    kind = "options"


@dataclass(frozen=True, slots=True)
class SelectionPayload:
    source_message_id: str
    option_id: str
    kind = "selection"


Payload = Union[TextPayload, ImagePayload, AudioPayload, OptionsPayload, SelectionPayload]


@dataclass(frozen=True, slots=True)
class Message:
    """One interaction, from any party, in any modality."""

    message_id: str
    conversation_id: str
    sender: ActorRole
    payload: Payload
    timestamp_ms: int
    in_reply_to: str | None = None
    origin_action: str | None = None
    confidence: float | None = None


@dataclass(frozen=True, slots=True)
class Conversation:
    """Chronological window of recent messages for one conversation id."""

    conversation_id: str
    messages: tuple[Message, ...] = ()
    mode: ConversationMode = ConversationMode.DIRECT

    def last(self) -> Message | None:
        return self.messages[-1] if self.messages else None


@dataclass(frozen=True, slots=True)
class Verdict:
    """Validation outcome; empty violations means the message is acceptable."""

    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


class DecodeError(Exception):
    """Base class for canonical-encoding decode failures."""


class MalformedMessageError(DecodeError):
    """Input is not parseable as a canonical message at all."""


class SchemaViolationError(DecodeError):
    """Parseable input that breaks the message schema; names the offending field."""

    def __init__(self, fld: str, detail: str = ""):
        self.field = fld
        super().__init__(f"schema violation: {fld}" + (f" ({detail})" if detail else ""))


def _payload_violations(m: Message) -> list[str]:
    p = m.payload
    out: list[str] = []
    if isinstance(p, TextPayload):
        if not p.content.strip():
            out.append("empty text")
    elif isinstance(p, OptionsPayload):
        if not p.items:
            out.append("options without items")
        ids = [it.option_id for it in p.items]
        if len(set(ids)) != len(ids):
            out.append("duplicate option ids")
    elif isinstance(p, (ImagePayload, AudioPayload)):
        if not p.reference:
            out.append("empty attachment reference")
    return out


def validate_message(m: Message, history: Conversation) -> Verdict:
    """Check every message invariant; selection payloads are checked against history.

    Never raises: the verdict carries the violated invariants by name.
    """
    v: list[str] = []
    if not m.message_id:
        v.append("empty message id")
    if history.conversation_id and m.conversation_id != history.conversation_id:
        v.append("conversation id mismatch")
    if any(prev.message_id == m.message_id for prev in history.messages):
        v.append("duplicate message id")
    if m.timestamp_ms < 0:
        v.append("negative timestamp")
    if m.sender is not ActorRole.SYSTEM and m.origin_action is not None:
        v.append("origin_action on non-system message")
    if (m.origin_action is None) != (m.confidence is None):
        v.append("confidence must be present iff origin_action is present")
    if m.confidence is not None and not (0.0 <= m.confidence <= 1.0):
        v.append("confidence out of range")
    v.extend(_payload_violations(m))
    if isinstance(m.payload, SelectionPayload):
        source = next(
            (prev for prev in history.messages if prev.message_id == m.payload.source_message_id),
            None,
        )
        if source is None or not isinstance(source.payload, OptionsPayload):
            v.append("selection does not reference a prior options message")
        elif all(it.option_id != m.payload.option_id for it in source.payload.items):
            v.append("unknown option id")
    return Verdict(tuple(v))


# -- canonical encoding -------------------------------------------------------
#
# One JSON object per message, fixed key order, no insignificant whitespace,
# UTF-8. Optional fields are present with null. This is the gateway wire format
# and the interaction-log record format.

_TOP_KEYS = (
    "message_id",
    "conversation_id",
    "sender",
    "payload",
    "timestamp_ms",
    "in_reply_to",
    "origin_action",
    "confidence",
)

_PAYLOAD_KEYS = {
    "text": ("content",),
    "image": ("reference", "caption"),
    "audio": ("reference", "transcript"),
    "options": ("prompt", "items"),
    "selection": ("source_message_id", "option_id"),
}


def payload_to_obj(p: Payload) -> dict:
    if isinstance(p, TextPayload):
        return {"kind": "text", "content": p.content}
    if isinstance(p, ImagePayload):
        return {"kind": "image", "reference": p.reference, "caption": p.caption}
    if isinstance(p, AudioPayload):
        return {"kind": "audio", "reference": p.reference, "transcript": p.transcript}
    if isinstance(p, OptionsPayload):
        return {
            "kind": "options",
            "prompt": p.prompt,
            "items": [{"option_id": it.option_id, "label": it.label} for it in p.items],
        }
    if isinstance(p, SelectionPayload):
        return {"kind": "selection", "source_message_id": p.source_message_id, "option_id": p.option_id}
    raise TypeError(f"unknown payload type: {type(p)!r}")


def message_to_obj(m: Message) -> dict:
    return {
        "message_id": m.message_id,
        "conversation_id": m.conversation_id,
        "sender": m.sender.value,
        "payload": payload_to_obj(m.payload),
        "timestamp_ms": m.timestamp_ms,
        "in_reply_to": m.in_reply_to,
        "origin_action": m.origin_action,
        "confidence": m.confidence,
    }


def encode_message(m: Message) -> bytes:
    """Deterministic canonical encoding; equal messages encode byte-identically."""
    return json.dumps(message_to_obj(m), separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def _require_str(obj: dict, fld: str, optional: bool = False) -> str | None:
    val = obj[fld]
    if val is None and optional:
        return None
    if not isinstance(val, str):
        raise SchemaViolationError(fld, "expected string")
    return val


def payload_from_obj(obj: object) -> Payload:
    if not isinstance(obj, dict):
        raise SchemaViolationError("payload", "expected object")
    kind = obj.get("kind")
    if kind not in _PAYLOAD_KEYS:
        raise SchemaViolationError("payload.kind", f"unknown kind {kind!r}")
    expected = {"kind", *_PAYLOAD_KEYS[kind]}
    extra = set(obj) - expected
    if extra:
        raise SchemaViolationError(f"payload.{sorted(extra)[0]}", "unknown field")
    missing = expected - set(obj)
    if missing:
        raise SchemaViolationError(f"payload.{sorted(missing)[0]}", "missing field")
    if kind == "text":
        content = _require_str(obj, "content")
        if not content.strip():
            raise SchemaViolationError("payload.content", "empty text")
        return TextPayload(content)
    if kind == "image":
        return ImagePayload(_require_str(obj, "reference"), _require_str(obj, "caption", optional=True))
    if kind == "audio":
        return AudioPayload(_require_str(obj, "reference"), _require_str(obj, "transcript", optional=True))
    if kind == "options":
        raw_items = obj["items"]
        if not isinstance(raw_items, list) or not raw_items:
            raise SchemaViolationError("payload.items", "expected non-empty list")
        items = []
        for it in raw_items:
            if not isinstance(it, dict) or set(it) != {"option_id", "label"}:
                raise SchemaViolationError("payload.items", "expected {option_id,label} objects")
            if not isinstance(it["option_id"], str) or not isinstance(it["label"], str):
                raise SchemaViolationError("payload.items", "expected string fields")
            items.append(OptionItem(it["option_id"], it["label"]))
        if len({it.option_id for it in items}) != len(items):
            raise SchemaViolationError("payload.items", "duplicate option ids")
        return OptionsPayload(_require_str(obj, "prompt"), tuple(items))
    return SelectionPayload(_require_str(obj, "source_message_id"), _require_str(obj, "option_id"))


def message_from_obj(obj: object) -> Message:
    """Build a Message from a decoded JSON object, rejecting unknown fields."""
    if not isinstance(obj, dict):
        raise MalformedMessageError("top-level value is not an object")
    extra = set(obj) - set(_TOP_KEYS)
    if extra:
        raise SchemaViolationError(sorted(extra)[0], "unknown field")
    missing = set(_TOP_KEYS) - set(obj)
    if missing:
        raise SchemaViolationError(sorted(missing)[0], "missing field")
    message_id = _require_str(obj, "message_id")
    if not message_id:
        raise SchemaViolationError("message_id", "empty")
    sender_raw = _require_str(obj, "sender")
    try:
        sender = ActorRole(sender_raw)
    except ValueError:
        raise SchemaViolationError("sender", f"unknown role {sender_raw!r}")
    ts = obj["timestamp_ms"]
    if not isinstance(ts, int) or isinstance(ts, bool) or ts < 0:
        raise SchemaViolationError("timestamp_ms", "expected non-negative integer")
    origin_action = _require_str(obj, "origin_action", optional=True)
    confidence = obj["confidence"]
    if confidence is not None:
        if isinstance(confidence, bool) or not isinstance(confidence, (int, float)):
            raise SchemaViolationError("confidence", "expected number")
        confidence = float(confidence)
        if not (0.0 <= confidence <= 1.0):
            raise SchemaViolationError("confidence", "out of [0,1]")
    if (origin_action is None) != (confidence is None):
        raise SchemaViolationError("confidence", "present iff origin_action is present")
    if sender is not ActorRole.SYSTEM and origin_action is not None:
        raise SchemaViolationError("origin_action", "set on non-system message")
    return Message(
        message_id=message_id,
        conversation_id=_require_str(obj, "conversation_id"),
        sender=sender,
        payload=payload_from_obj(obj["payload"]),
        timestamp_ms=ts,
        in_reply_to=_require_str(obj, "in_reply_to", optional=True),
        origin_action=origin_action,
        confidence=confidence,
    )


def decode_message(data: bytes | str) -> Message:
    """Inverse of encode_message; raises MalformedMessageError or SchemaViolationError."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedMessageError(f"not UTF-8: {exc}") from exc
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedMessageError(f"not JSON: {exc}") from exc
    return message_from_obj(obj)
