"""Durable append-only interaction log and the recent-window conversation query.

The log is a single newline-delimited UTF-8 file: each line is a canonical
message encoding extended with trailing ``"seq"`` and ``"leg"`` fields. The
index from conversation id to records is rebuilt by a full scan on open, so the
file alone is the source of truth. Appends fsync before returning; study data
is irreplaceable.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterator

from .model import (
    Conversation,
    ConversationMode,
    Message,
    MalformedMessageError,
    SchemaViolationError,
    encode_message,
    message_from_obj,
    validate_message,
)

DEFAULT_RECENT_WINDOW = 10


class Leg(str, Enum):
    SEEKER_SYSTEM = "seeker_system"
    SEEKER_WIZARD = "seeker_wizard"
    WIZARD_SYSTEM = "wizard_system"


@dataclass(frozen=True, slots=True)
class InteractionRecord:
    seq: int
    message: Message
    leg: Leg


class StorageError(Exception):
    """I/O failure or use of a closed store; nothing was persisted."""


class ValidationError(Exception):
    """The message breaks an invariant against its stored history."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__("; ".join(self.violations))


def encode_record(rec: InteractionRecord) -> bytes:
    # Canonical message encoding with seq and leg appended as trailing fields.
    body = encode_message(rec.message)
    return body[:-1] + f',"seq":{rec.seq},"leg":"{rec.leg.value}"}}'.encode("utf-8")


def decode_record(line: bytes | str) -> InteractionRecord:
    if isinstance(line, bytes):
        line = line.decode("utf-8")
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedMessageError(f"not JSON: {exc}") from exc
    if not isinstance(obj, dict) or "seq" not in obj or "leg" not in obj:
        raise MalformedMessageError("record missing seq/leg")
    seq = obj.pop("seq")
    leg_raw = obj.pop("leg")
    if not isinstance(seq, int) or isinstance(seq, bool):
        raise SchemaViolationError("seq", "expected integer")
    try:
        leg = Leg(leg_raw)
    except ValueError:
        raise SchemaViolationError("leg", f"unknown leg {leg_raw!r}")
    return InteractionRecord(seq=seq, message=message_from_obj(obj), leg=leg)


class InteractionStore:
    """Append-only store; single serialized writer, concurrent readers."""

    def __init__(self, path: str | Path):
        self._path = Path(path)
        self._lock = threading.RLock()
        self._records: list[InteractionRecord] = []
        self._by_conversation: dict[str, list[InteractionRecord]] = {}
        self._fh = None
        self._open()

    def _open(self) -> None:
        self._path.parent.mkdir(parents=True, exist_ok=True)
        if self._path.exists():
            with open(self._path, "rb") as fh:
                data = fh.read()
            pos = 0
            while pos < len(data):
                nl = data.find(b"\n", pos)
                if nl == -1:
                    # No terminating newline: a torn write from a killed
                    # process. Drop it; everything before is prefix-consistent.
                    break
                try:
                    rec = decode_record(data[pos:nl])
                except Exception:
                    break
                self._ingest(rec)
                pos = nl + 1
            good_offset = pos
            if good_offset < len(data):
                with open(self._path, "r+b") as fh:
                    fh.truncate(good_offset)
        self._fh = open(self._path, "ab")

    def _ingest(self, rec: InteractionRecord) -> None:
        self._records.append(rec)
        self._by_conversation.setdefault(rec.message.conversation_id, []).append(rec)

    @property
    def next_seq(self) -> int:
        with self._lock:
            return self._records[-1].seq + 1 if self._records else 1

    def close(self) -> None:
        with self._lock:
            if self._fh is not None:
                self._fh.close()
                self._fh = None

    def conversation_mode(self, conversation_id: str) -> ConversationMode:
        with self._lock:
            for rec in self._by_conversation.get(conversation_id, ()):
                if rec.leg is not Leg.SEEKER_SYSTEM:
                    return ConversationMode.WOZ
            return ConversationMode.DIRECT

    def append(self, m: Message, leg: Leg) -> int:
        """Durably persist one interaction; returns the assigned seq."""
        with self._lock:
            if self._fh is None:
                raise StorageError("store is closed")
            history = self.recent_conversation(m.conversation_id, k=10**9)
            verdict = validate_message(m, history)
            if not verdict.ok:
                raise ValidationError(verdict.violations)
            existing = self._by_conversation.get(m.conversation_id)
            if existing:
                direct = all(r.leg is Leg.SEEKER_SYSTEM for r in existing)
                if direct != (leg is Leg.SEEKER_SYSTEM):
                    raise ValidationError(["leg inconsistent with conversation mode"])
            rec = InteractionRecord(seq=self.next_seq, message=m, leg=leg)
            try:
                self._fh.write(encode_record(rec) + b"\n")
                self._fh.flush()
                os.fsync(self._fh.fileno())
            except OSError as exc:
                raise StorageError(str(exc)) from exc
            self._ingest(rec)
            return rec.seq

    def recent_conversation(self, conversation_id: str, k: int = DEFAULT_RECENT_WINDOW) -> Conversation:
        """Last <=k messages of the conversation, chronological; empty if unknown."""
        if k < 1:
            raise ValueError("k must be >= 1")
        with self._lock:
            recs = list(self._by_conversation.get(conversation_id, ()))
        # Append order is seq order; sort by timestamp with seq as tie-break.
        recs.sort(key=lambda r: (r.message.timestamp_ms, r.seq))
        msgs = tuple(r.message for r in recs[-k:])
        mode = self.conversation_mode(conversation_id)
        return Conversation(conversation_id=conversation_id, messages=msgs, mode=mode)

    def export_log(self, lo: int | None = None, hi: int | None = None) -> Iterator[InteractionRecord]:
        """Records in seq order, optionally limited to the closed interval [lo, hi]."""
        with self._lock:
            if self._fh is None:
                raise StorageError("store is closed")
            snapshot = list(self._records)
        for rec in snapshot:
            if lo is not None and rec.seq < lo:
                continue
            if hi is not None and rec.seq > hi:
                continue
            yield rec

    def export_lines(self, lo: int | None = None, hi: int | None = None) -> Iterator[bytes]:
        for rec in self.export_log(lo, hi):
            yield encode_record(rec)
