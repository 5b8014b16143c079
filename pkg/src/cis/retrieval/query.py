"""Query generation: anaphor rewriting plus weighted context-term expansion."""

from __future__ import annotations

from dataclasses import dataclass

from ..model import ActorRole, Conversation, TextPayload
from .coref import ResolutionMap, _is_user_text
from .text import STOPWORDS, tokenize


@dataclass(frozen=True, slots=True)
class ContextTerm:
    term: str
    weight: float


@dataclass(frozen=True, slots=True)
class GeneratedQuery:
    text: str
    source_message_id: str
    resolution: ResolutionMap
    context_terms: tuple[ContextTerm, ...] = ()


def generate_query(conv: Conversation, res: ResolutionMap, context_weight: float = 0.0) -> GeneratedQuery:
    """Rewrite the last user message with resolved antecedents and expand it
    with non-stopword terms of the previous user turn at ``context_weight``."""
    last = conv.last()
    if last is None or not isinstance(last.payload, TextPayload):
        raise ValueError("conversation must end with a user text message")
    text = last.payload.content
    for entry in sorted(res, key=lambda e: e.span[0], reverse=True):
        start, end = entry.span
        text = text[:start] + entry.antecedent + text[end:]

    context_terms: tuple[ContextTerm, ...] = ()
    if context_weight > 0:
        prev = next((m for m in reversed(conv.messages[:-1]) if _is_user_text(m)), None)
        if prev is not None:
            seen: list[str] = []
            for tok in tokenize(prev.payload.content):
                if tok not in STOPWORDS and tok not in seen:
                    seen.append(tok)
            context_terms = tuple(ContextTerm(t, context_weight) for t in seen)

    return GeneratedQuery(
        text=text,
        source_message_id=last.message_id,
        resolution=res,
        context_terms=context_terms,
    )
