"""Parallel action dispatch with a hard interaction timeout and output selection.

Every registered action runs concurrently on each incoming conversation.
Outputs that arrive within the timeout are collected; late or failed actions
are simply absent. Selection picks (or combines) one system response; when
nothing usable arrives the caller gets a fallback message, never an error.
"""

from __future__ import annotations

import inspect
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor, wait
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from .model import ActorRole, Conversation, Message, OptionItem, OptionsPayload, TextPayload

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT_MS = 2000
_SPIN_WINDOW_S = 0.1  # fine-grained polling this close to the deadline
DEFAULT_FALLBACK_TEXT = "Sorry, I could not find an answer to that."

# Actions may take (conversation) or (conversation, cancel_event); the event is
# set at timeout so cooperative actions can bail out early.
Action = Callable[..., Optional["ActionOutput"]]


@dataclass(frozen=True, slots=True)
class ActionOutput:
    """One action's candidate responses, best first."""

    action_name: str
    candidates: tuple[Message, ...]
    latency_ms: int
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("candidates must be non-empty; return None for no output")
        if self.latency_ms < 0:
            raise ValueError("latency_ms must be non-negative")
        confs = [c.confidence for c in self.candidates]
        if any(c is None for c in confs):
            raise ValueError("every candidate needs a confidence")
        if confs != sorted(confs, reverse=True):
            raise ValueError("candidates must be sorted by confidence descending")


@dataclass(frozen=True, slots=True)
class DispatchConfig:
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    selection_policy: str = "max_confidence"  # max_confidence | priority | combine
    action_priority: tuple[str, ...] = ()
    fallback_text: str = DEFAULT_FALLBACK_TEXT


@dataclass(frozen=True, slots=True)
class DispatchResult:
    message: Message
    outputs: tuple[ActionOutput, ...]
    diagnostics: dict
    duration_ms: int


class DuplicateActionError(Exception):
    pass


def _fallback_message(conv: Conversation, cfg: DispatchConfig) -> Message:
    last = conv.last()
    ts = last.timestamp_ms + 1 if last else 0
    return Message(
        message_id=f"{conv.conversation_id}-fallback",
        conversation_id=conv.conversation_id,
        sender=ActorRole.SYSTEM,
        payload=TextPayload(cfg.fallback_text),
        timestamp_ms=ts,
        in_reply_to=last.message_id if last else None,
        origin_action="fallback",
        confidence=0.0,
    )


def _candidate_label(m: Message) -> str:
    p = m.payload
    if isinstance(p, TextPayload):
        return p.content
    if isinstance(p, OptionsPayload):
        return p.prompt
    return p.kind


def select_output(
    outputs: list[ActionOutput] | tuple[ActionOutput, ...],
    cfg: DispatchConfig,
    conv: Conversation,
) -> Message:
    """Pick one system response from the collected action outputs.

    max_confidence: globally best candidate, ties broken by priority order then
    action name. priority: top candidate of the first listed action that
    responded. combine: one options message holding each action's best, ordered
    by confidence. Empty input always yields the fallback message.
    """
    outputs = [o for o in outputs if o.candidates]
    if not outputs:
        return _fallback_message(conv, cfg)

    def prio(name: str) -> int:
        try:
            return cfg.action_priority.index(name)
        except ValueError:
            return len(cfg.action_priority)

    if cfg.selection_policy == "priority":
        responded = {o.action_name: o for o in outputs}
        for name in cfg.action_priority:
            if name in responded:
                return responded[name].candidates[0]
        return _fallback_message(conv, cfg)

    if cfg.selection_policy == "combine":
        tops = sorted(
            (o.candidates[0] for o in outputs),
            key=lambda c: (-c.confidence, prio(c.origin_action or ""), c.origin_action or ""),
        )
        best = tops[0]
        items = tuple(OptionItem(option_id=c.message_id, label=_candidate_label(c)) for c in tops)
        return Message(
            message_id=f"{conv.conversation_id}-combined",
            conversation_id=conv.conversation_id,
            sender=ActorRole.SYSTEM,
            payload=OptionsPayload(prompt="I found several possible answers:", items=items),
            timestamp_ms=best.timestamp_ms,
            in_reply_to=best.in_reply_to,
            origin_action="combine",
            confidence=best.confidence,
        )

    # max_confidence (default)
    pool = [(c, o.action_name) for o in outputs for c in o.candidates]
    pool.sort(key=lambda pair: (-(pair[0].confidence or 0.0), prio(pair[1]), pair[1]))
    return pool[0][0]


class Dispatcher:
    """Owns the registered actions and all dispatch timing."""

    def __init__(self):
        self._actions: dict[str, Action] = {}
        self._wants_cancel: dict[str, bool] = {}
        self._lock = threading.Lock()

    def register_action(self, name: str, action: Action) -> None:
        with self._lock:
            if name in self._actions:
                raise DuplicateActionError(name)
            params = None
            try:
                params = inspect.signature(action).parameters
            except (TypeError, ValueError):
                pass
            self._actions[name] = action
            self._wants_cancel[name] = params is not None and len(params) >= 2

    @property
    def action_names(self) -> tuple[str, ...]:
        with self._lock:
            return tuple(self._actions)

    def dispatch_full(self, conv: Conversation, cfg: DispatchConfig) -> DispatchResult:
        start = time.monotonic()
        deadline = start + cfg.timeout_ms / 1000.0
        with self._lock:
            actions = dict(self._actions)
            wants_cancel = dict(self._wants_cancel)
        outputs: list[ActionOutput] = []
        per_action: dict[str, dict] = {}
        cancel = None
        executor = None
        if actions:
            cancel = threading.Event()
            executor = ThreadPoolExecutor(max_workers=len(actions))
            futures = {}
            for name, action in actions.items():
                args = (conv, cancel) if wants_cancel[name] else (conv,)
                futures[executor.submit(action, *args)] = name
            # Deadline-based: submission and thread spawn costs come out of the
            # timeout budget, not on top of it. The tail of the wait polls in
            # 1 ms steps because long timer wakeups on a loaded machine can
            # overshoot by more than the latency slack the engine promises.
            sleep_for = deadline - time.monotonic() - _SPIN_WINDOW_S
            if sleep_for > 0:
                wait(futures, timeout=sleep_for)
            while not all(f.done() for f in futures) and time.monotonic() < deadline:
                time.sleep(0.001)
            done = {f for f in futures if f.done()}
            not_done = set(futures) - done
            for fut in done:
                name = futures[fut]
                try:
                    out = fut.result()
                except Exception as exc:  # action isolation: failure == no output
                    log.warning("action %s failed: %s", name, exc)
                    per_action[name] = {"error": str(exc)}
                    continue
                if out is None:
                    per_action[name] = {"no_output": True}
                    continue
                bad = [c for c in out.candidates if c.conversation_id != conv.conversation_id]
                if bad:
                    log.warning("action %s produced candidates for the wrong conversation", name)
                    per_action[name] = {"error": "conversation id mismatch"}
                    continue
                outputs.append(out)
                per_action[name] = {"latency_ms": out.latency_ms, **out.diagnostics}
            for fut in not_done:
                per_action[futures[fut]] = {"timed_out": True}

        selected = select_output(outputs, cfg, conv)
        last = conv.last()
        if last is not None and selected.in_reply_to != last.message_id:
            selected = replace(selected, in_reply_to=last.message_id)
        duration_ms = int((time.monotonic() - start) * 1000)
        diagnostics = {
            "actions": per_action,
            "selected_action": selected.origin_action,
            "policy": cfg.selection_policy,
            "duration_ms": duration_ms,
        }
        # Cleanup last: waking abandoned threads earlier would let them steal
        # the scheduler from selection on a loaded single-CPU host.
        if executor is not None:
            cancel.set()
            executor.shutdown(wait=False, cancel_futures=True)
        return DispatchResult(message=selected, outputs=tuple(outputs), diagnostics=diagnostics, duration_ms=duration_ms)

    def dispatch(self, conv: Conversation, cfg: DispatchConfig) -> Message:
        return self.dispatch_full(conv, cfg).message
