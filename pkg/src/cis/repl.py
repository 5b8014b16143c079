"""Interactive development interface: dispatch from stdin, responses on stdout,
diagnostics on stderr so output can be piped cleanly."""

from __future__ import annotations

import json
import sys
import time

from .config import Config
from .dispatch import Dispatcher
from .model import ActorRole, Message, OptionsPayload, TextPayload
from .retrieval.actions import QAAction, SearchAction
from .retrieval.index import index_corpus, load_corpus_file
from .store import DEFAULT_RECENT_WINDOW, InteractionStore, Leg, encode_record

USAGE = "commands: \\quit  |  \\log N (print last N interaction records)"


def _render(m: Message) -> str:
    p = m.payload
    if isinstance(p, TextPayload):
        return p.content
    if isinstance(p, OptionsPayload):
        lines = [p.prompt]
        lines += [f"  [{it.option_id}] {it.label}" for it in p.items]
        return "\n".join(lines)
    return f"[{p.kind}]"


def build_dispatcher(corpus_path, cfg: Config) -> Dispatcher:
    index = index_corpus(load_corpus_file(corpus_path))
    rcfg = cfg.retrieval_config()
    dispatcher = Dispatcher()
    dispatcher.register_action("search", SearchAction(index, rcfg))
    dispatcher.register_action("qa", QAAction(index, rcfg))
    return dispatcher


def run_repl(corpus_path, cfg: Config | None = None, store: InteractionStore | None = None,
             stdin=None, stdout=None, stderr=None) -> None:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    cfg = cfg or Config()
    dcfg = cfg.dispatch_config()
    window = cfg.get_int("store.recent_window", DEFAULT_RECENT_WINDOW)
    dispatcher = build_dispatcher(corpus_path, cfg)
    own_store = store is None
    if own_store:
        store = InteractionStore(cfg.get("store.path", "interactions.log"))
    conversation_id = "repl"
    seq_no = len(store.recent_conversation(conversation_id, k=10**9).messages)

    try:
        print("cis repl -- type a message, \\quit to exit", file=stderr)
        while True:
            print("> ", end="", file=stderr, flush=True)
            line = stdin.readline()
            if not line:
                break
            line = line.strip()
            if not line:
                continue
            if line == "\\quit":
                break
            if line.startswith("\\log"):
                parts = line.split()
                if len(parts) != 2 or not parts[1].isdigit():
                    print(USAGE, file=stderr)
                    continue
                records = list(store.export_log())[-int(parts[1]):]
                for rec in records:
                    print(encode_record(rec).decode("utf-8"), file=stderr)
                continue
            if line.startswith("\\"):
                print(USAGE, file=stderr)
                continue

            seq_no += 1
            user = Message(
                message_id=f"{conversation_id}-{seq_no}",
                conversation_id=conversation_id,
                sender=ActorRole.SEEKER,
                payload=TextPayload(line),
                timestamp_ms=int(time.time() * 1000),
            )
            store.append(user, Leg.SEEKER_SYSTEM)
            conv = store.recent_conversation(conversation_id, k=window)
            result = dispatcher.dispatch_full(conv, dcfg)
            seq_no += 1
            from dataclasses import replace

            response = replace(
                result.message,
                message_id=f"{conversation_id}-{seq_no}",
                timestamp_ms=max(int(time.time() * 1000), user.timestamp_ms + 1),
            )
            store.append(response, Leg.SEEKER_SYSTEM)
            print(_render(response), file=stdout, flush=True)
            print(json.dumps(result.diagnostics, indent=2, default=str), file=stderr)
    finally:
        if own_store:
            store.close()
