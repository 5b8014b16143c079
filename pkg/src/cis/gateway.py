"""Network chat gateway: direct mode (seeker <-> system) and the Wizard-of-Oz
topology (seeker <-> wizard <-> system), over a small HTTP + streaming API.

Every delivered message is logged with its leg before any recipient can see
it; streams replay from the log by seq, so reconnecting clients never miss or
duplicate a message.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field, replace

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response, StreamingResponse

from .clients import NoTranscriptError, SpeechJob, StubSpeechClient
from .config import Config
from .dispatch import Dispatcher
from .model import (
    ActorRole,
    AudioPayload,
    Conversation,
    ConversationMode,
    Message,
    SchemaViolationError,
    TextPayload,
    message_to_obj,
    payload_from_obj,
    validate_message,
)
from .store import DEFAULT_RECENT_WINDOW, InteractionStore, Leg, encode_record

DEFAULT_WOZ_QUEUE_CAP = 50
DEFAULT_ATTACHMENT_CAP = 8 * 1024 * 1024  # 8 MiB


class GatewayError(Exception):
    def __init__(self, status: int, detail):
        self.status = status
        self.detail = detail
        super().__init__(str(detail))


class AttachmentStore:
    """Opaque blobs keyed by attachment id; messages carry only the reference."""

    def __init__(self, cap_bytes: int = DEFAULT_ATTACHMENT_CAP):
        self.cap_bytes = cap_bytes
        self._blobs: dict[str, tuple[bytes, str]] = {}
        self._lock = threading.Lock()

    def put(self, data: bytes, content_type: str = "application/octet-stream") -> str:
        if len(data) > self.cap_bytes:
            raise GatewayError(413, f"attachment exceeds {self.cap_bytes} bytes")
        attachment_id = uuid.uuid4().hex
        with self._lock:
            self._blobs[attachment_id] = (data, content_type)
        return attachment_id

    def get(self, attachment_id: str) -> tuple[bytes, str]:
        with self._lock:
            blob = self._blobs.get(attachment_id)
        if blob is None:
            raise GatewayError(404, "unknown attachment")
        return blob


@dataclass
class _ConversationState:
    conversation_id: str
    mode: ConversationMode
    lock: threading.Lock = field(default_factory=threading.Lock)
    next_message_no: int = 1
    last_timestamp_ms: int = 0
    wizard_attached: bool = False
    pending_for_wizard: int = 0
    last_diagnostics: dict = field(default_factory=dict)


class Gateway:
    """Protocol-independent gateway core; the FastAPI app is a thin shell."""

    def __init__(
        self,
        store: InteractionStore,
        dispatcher: Dispatcher,
        cfg: Config | None = None,
        speech_client: StubSpeechClient | None = None,
    ):
        self.store = store
        self.dispatcher = dispatcher
        self.cfg = cfg or Config()
        self.speech = speech_client or StubSpeechClient()
        self.attachments = AttachmentStore(self.cfg.get_int("gateway.attachment_cap_bytes", DEFAULT_ATTACHMENT_CAP))
        self.woz_queue_cap = self.cfg.get_int("gateway.woz_queue_cap", DEFAULT_WOZ_QUEUE_CAP)
        self.window = self.cfg.get_int("store.recent_window", DEFAULT_RECENT_WINDOW)
        self._conversations: dict[str, _ConversationState] = {}
        self._lock = threading.Lock()
        self._new_record = threading.Condition()

    # -- conversation lifecycle ------------------------------------------

    def create_conversation(self, mode: str) -> str:
        try:
            conv_mode = ConversationMode(mode)
        except ValueError:
            raise GatewayError(400, f"unknown mode {mode!r}")
        conversation_id = "c" + uuid.uuid4().hex[:12]
        with self._lock:
            self._conversations[conversation_id] = _ConversationState(conversation_id, conv_mode)
        return conversation_id

    def _state(self, conversation_id: str) -> _ConversationState:
        with self._lock:
            state = self._conversations.get(conversation_id)
        if state is None:
            raise GatewayError(404, "unknown conversation")
        return state

    # -- message intake ----------------------------------------------------

    def _build_message(self, state: _ConversationState, sender: ActorRole, body: dict) -> Message:
        allowed = {"payload", "in_reply_to"}
        extra = set(body) - allowed - {"target"}
        if extra:
            raise GatewayError(400, {"violations": [f"unknown field: {sorted(extra)[0]}"]})
        if "payload" not in body:
            raise GatewayError(400, {"violations": ["missing payload"]})
        try:
            payload = payload_from_obj(body["payload"])
        except SchemaViolationError as exc:
            raise GatewayError(400, {"violations": [str(exc)]})
        ts = max(int(time.time() * 1000), state.last_timestamp_ms + 1)
        m = Message(
            message_id=f"{state.conversation_id}-{state.next_message_no}",
            conversation_id=state.conversation_id,
            sender=sender,
            payload=payload,
            timestamp_ms=ts,
            in_reply_to=body.get("in_reply_to"),
        )
        history = self.store.recent_conversation(state.conversation_id, k=10**9)
        verdict = validate_message(m, history)
        if not verdict.ok:
            raise GatewayError(400, {"violations": list(verdict.violations)})
        return m

    def _log(self, state: _ConversationState, m: Message, leg: Leg) -> int:
        seq = self.store.append(m, leg)
        state.next_message_no += 1
        state.last_timestamp_ms = max(state.last_timestamp_ms, m.timestamp_ms)
        with self._new_record:
            self._new_record.notify_all()
        return seq

    def _dispatch_context(self, state: _ConversationState) -> Conversation:
        conv = self.store.recent_conversation(state.conversation_id, k=self.window)
        last = conv.last()
        if last is not None and isinstance(last.payload, AudioPayload):
            # Rewrite audio to text for dispatch; the log keeps the original.
            try:
                transcript = self.speech.transcribe(SpeechJob(direction="recognize",
                                                              audio_reference=last.payload.reference),
                                                    payload=last.payload)
                rewritten = replace(last, payload=TextPayload(transcript))
                conv = replace(conv, messages=conv.messages[:-1] + (rewritten,))
            except NoTranscriptError:
                pass
        return conv

    def _run_dispatch(self, state: _ConversationState) -> Message:
        conv = self._dispatch_context(state)
        result = self.dispatcher.dispatch_full(conv, self.cfg.dispatch_config())
        state.last_diagnostics = result.diagnostics
        ts = max(int(time.time() * 1000), state.last_timestamp_ms + 1)
        return replace(
            result.message,
            message_id=f"{state.conversation_id}-{state.next_message_no}",
            timestamp_ms=ts,
        )

    def post_seeker_message(self, conversation_id: str, body: dict) -> dict:
        """Direct mode: log, dispatch, log and push the response.
        WoZ mode: deliver to the wizard; the dispatcher is never invoked."""
        state = self._state(conversation_id)
        with state.lock:
            if state.mode is ConversationMode.WOZ and not state.wizard_attached:
                if state.pending_for_wizard >= self.woz_queue_cap:
                    raise GatewayError(429, "service busy: no wizard attached and the queue is full")
            m = self._build_message(state, ActorRole.SEEKER, body)
            if state.mode is ConversationMode.DIRECT:
                self._log(state, m, Leg.SEEKER_SYSTEM)
                response = self._run_dispatch(state)
                self._log(state, response, Leg.SEEKER_SYSTEM)
                return {"message": message_to_obj(m), "response": message_to_obj(response)}
            self._log(state, m, Leg.SEEKER_WIZARD)
            if not state.wizard_attached:
                state.pending_for_wizard += 1
            return {"message": message_to_obj(m)}

    def post_wizard_message(self, conversation_id: str, body: dict) -> dict:
        state = self._state(conversation_id)
        if state.mode is not ConversationMode.WOZ:
            raise GatewayError(400, "wizard messages require a woz conversation")
        target = body.get("target")
        if target not in ("to_system", "to_seeker"):
            raise GatewayError(400, f"unknown target {target!r}")
        with state.lock:
            self._attach_wizard(state)
            m = self._build_message(state, ActorRole.WIZARD, body)
            if target == "to_seeker":
                self._log(state, m, Leg.SEEKER_WIZARD)
                return {"message": message_to_obj(m)}
            self._log(state, m, Leg.WIZARD_SYSTEM)
            response = self._run_dispatch(state)
            self._log(state, response, Leg.WIZARD_SYSTEM)
            return {"message": message_to_obj(m), "response": message_to_obj(response)}

    def _attach_wizard(self, state: _ConversationState) -> None:
        state.wizard_attached = True
        state.pending_for_wizard = 0

    def attach_wizard(self, conversation_id: str) -> None:
        state = self._state(conversation_id)
        with state.lock:
            self._attach_wizard(state)

    # -- streaming ----------------------------------------------------------

    def _visible(self, leg: Leg, mode: ConversationMode, role: str) -> bool:
        if mode is ConversationMode.DIRECT:
            return True
        if role == "wizard":
            return True
        return leg is Leg.SEEKER_WIZARD

    def stream(self, conversation_id: str, from_seq: int = 0, role: str = "seeker",
               follow: bool = True, poll_interval: float = 0.25, idle_timeout: float | None = None):
        """Yield log records for one conversation as canonical encoded lines,
        replaying from ``from_seq`` and then following new appends."""
        state = self._state(conversation_id)
        if role not in ("seeker", "wizard"):
            raise GatewayError(400, f"unknown role {role!r}")
        if role == "wizard" and state.mode is ConversationMode.WOZ:
            self.attach_wizard(conversation_id)
        cursor = from_seq
        started = time.monotonic()
        while True:
            batch = [
                rec
                for rec in self.store.export_log(lo=cursor)
                if rec.message.conversation_id == conversation_id and self._visible(rec.leg, state.mode, role)
            ]
            for rec in batch:
                cursor = rec.seq + 1
                yield encode_record(rec) + b"\n"
            if not follow:
                return
            if batch:
                started = time.monotonic()
            elif idle_timeout is not None and time.monotonic() - started > idle_timeout:
                return
            with self._new_record:
                self._new_record.wait(timeout=poll_interval)

    def diagnostics(self, conversation_id: str) -> dict:
        return dict(self._state(conversation_id).last_diagnostics)


def create_app(gateway: Gateway):
    """FastAPI shell over the gateway core."""
    app = FastAPI(title="cis gateway")

    # Browser clients (the wizard/seeker UI) may be served from another origin.
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(GatewayError)
    async def _gateway_error(_request, exc: GatewayError):
        detail = exc.detail if isinstance(exc.detail, dict) else {"error": exc.detail}
        return JSONResponse(status_code=exc.status, content=detail)

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/conversations")
    async def create_conversation(request: Request):
        body = await request.json()
        conversation_id = gateway.create_conversation(body.get("mode", "direct"))
        return {"conversation_id": conversation_id}

    @app.post("/conversations/{conversation_id}/messages")
    async def post_message(conversation_id: str, request: Request):
        body = await request.json()
        return gateway.post_seeker_message(conversation_id, body)

    @app.post("/conversations/{conversation_id}/wizard/messages")
    async def post_wizard_message(conversation_id: str, request: Request):
        body = await request.json()
        return gateway.post_wizard_message(conversation_id, body)

    @app.post("/conversations/{conversation_id}/wizard/attach")
    def attach_wizard(conversation_id: str):
        gateway.attach_wizard(conversation_id)
        return {"attached": True}

    @app.get("/conversations/{conversation_id}/stream")
    def stream(conversation_id: str, from_seq: int = 0, role: str = "seeker", follow: bool = True):
        gen = gateway.stream(conversation_id, from_seq=from_seq, role=role, follow=follow)
        return StreamingResponse(gen, media_type="application/x-ndjson")

    @app.get("/conversations/{conversation_id}/diagnostics")
    def diagnostics(conversation_id: str):
        return gateway.diagnostics(conversation_id)

    @app.post("/attachments")
    async def post_attachment(request: Request):
        data = await request.body()
        content_type = request.headers.get("content-type", "application/octet-stream")
        return {"attachment_id": gateway.attachments.put(data, content_type)}

    @app.get("/attachments/{attachment_id}")
    def get_attachment(attachment_id: str):
        data, content_type = gateway.attachments.get(attachment_id)
        return Response(content=data, media_type=content_type)

    return app
