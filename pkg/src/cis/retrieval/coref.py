"""Rule-based co-reference resolution over the conversation window.

Each anaphor in the latest user message is mapped to the most recent usable
antecedent found in earlier user-side messages: the longest capitalized or
quoted phrase of a message if it has one, otherwise the maximal trailing run
of non-stopword tokens. Deterministic by construction and swappable behind
``resolve_coreferences``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..model import ActorRole, Conversation, Message, TextPayload
from .text import STOPWORDS, tokenize

ANAPHORS = frozenset(
    ["it", "its", "they", "them", "their", "he", "she", "him", "her", "his", "hers", "this", "that"]
)

_WORD_RE = re.compile(r"[A-Za-z0-9']+")
_QUOTED_RE = re.compile(r"\"([^\"]+)\"|'([^']+)'")
_CAPITALIZED_RUN_RE = re.compile(r"\b[A-Z][\w'-]*(?:\s+[A-Z][\w'-]*)*")


@dataclass(frozen=True, slots=True)
class ResolutionEntry:
    span: tuple[int, int]  # character interval in the last user message
    surface: str
    antecedent: str
    source_message_id: str


ResolutionMap = tuple[ResolutionEntry, ...]


def _is_user_text(m: Message) -> bool:
    return m.sender in (ActorRole.SEEKER, ActorRole.WIZARD) and isinstance(m.payload, TextPayload)


def _antecedent_candidate(text: str) -> str | None:
    """Best antecedent phrase of one message, or None if it offers nothing."""
    candidates: list[tuple[int, int, str]] = []  # (token_count, position, phrase)
    for match in _QUOTED_RE.finditer(text):
        phrase = (match.group(1) or match.group(2)).strip()
        if phrase:
            candidates.append((len(phrase.split()), match.start(), phrase))
    for match in _CAPITALIZED_RUN_RE.finditer(text):
        # A lone capitalized first word is just sentence case, not a name.
        if match.start() == 0 and " " not in match.group(0):
            continue
        candidates.append((len(match.group(0).split()), match.start(), match.group(0)))
    if candidates:
        candidates.sort(key=lambda c: (-c[0], -c[1]))
        return candidates[0][2]
    tokens = tokenize(text)
    tail: list[str] = []
    for tok in reversed(tokens):
        if tok in STOPWORDS:
            break
        tail.append(tok)
    if tail:
        return " ".join(reversed(tail))
    return None


def resolve_coreferences(conv: Conversation) -> ResolutionMap:
    """Map each anaphor token of the last user message to its antecedent.

    Produces no entry when no earlier user message offers an antecedent.
    """
    last = conv.last()
    if last is None or not _is_user_text(last):
        return ()
    text = last.payload.content

    antecedent = None
    source_id = None
    for m in reversed(conv.messages[:-1]):
        if not _is_user_text(m):
            continue
        cand = _antecedent_candidate(m.payload.content)
        if cand is not None:
            antecedent, source_id = cand, m.message_id
            break
    if antecedent is None:
        return ()

    entries = []
    for match in _WORD_RE.finditer(text):
        if match.group(0).lower() in ANAPHORS:
            entries.append(
                ResolutionEntry(
                    span=(match.start(), match.end()),
                    surface=match.group(0),
                    antecedent=antecedent,
                    source_message_id=source_id,
                )
            )
    return tuple(entries)
