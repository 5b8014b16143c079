"""Result generation: options lists for search, extractive answers for QA."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from ..model import OptionItem, OptionsPayload, Payload, TextPayload
from .query import GeneratedQuery
from .rank import RetrievedResult
from .text import split_sentences, tokenize

DEFAULT_SNIPPET_CHARS = 160
DEFAULT_QA_DOCS = 3


@dataclass(frozen=True, slots=True)
class Candidate:
    """A payload plus its confidence, ready to be wrapped into a system Message."""

    payload: Payload
    confidence: float


def _confidence(score: float) -> float:
    # Monotone squash of a non-negative score into [0, 1); preserves argmax.
    return score / (score + 1.0)


def _results_idf(results: list[RetrievedResult]) -> Callable[[str], float]:
    n = len(results)
    df: dict[str, int] = {}
    for r in results:
        for term in set(tokenize(r.title) + tokenize(r.body)):
            df[term] = df.get(term, 0) + 1
    return lambda t: math.log((n - df.get(t, 0) + 0.5) / (df.get(t, 0) + 0.5) + 1.0)


def generate_result(
    q: GeneratedQuery,
    results: list[RetrievedResult],
    mode: str,
    snippet_chars: int = DEFAULT_SNIPPET_CHARS,
    qa_docs: int = DEFAULT_QA_DOCS,
    idf: Callable[[str], float] | None = None,
) -> list[Candidate]:
    """Post-process a ranked result list into response candidates.

    search: one options message, one item per result in rank order.
    qa: the best sentence of each of the top documents by idf-weighted query
    term overlap, one text candidate per document, best first.

    ``idf`` normally comes from the corpus index; without one, document
    frequencies over the result list itself are used.
    """
    if not results:
        return []
    if mode == "search":
        items = tuple(
            OptionItem(
                option_id=r.doc_id,
                label=(r.title + (" " + r.body[:snippet_chars] if r.body else "")).strip(),
            )
            for r in results
        )
        payload = OptionsPayload(prompt="Here is what I found for: " + q.text, items=items)
        return [Candidate(payload, _confidence(results[0].score))]
    if mode != "qa":
        raise ValueError(f"unknown result mode {mode!r}")

    if idf is None:
        idf = _results_idf(results)
    query_terms = set(tokenize(q.text))
    scored: list[tuple[float, int, str]] = []
    for pos, r in enumerate(results[:qa_docs]):
        sentences = split_sentences(r.body) or ([r.title] if r.title else [])
        best_sentence, best_score = None, -1.0
        for sent in sentences:
            sent_tokens = set(tokenize(sent))
            score = sum(idf(t) for t in query_terms if t in sent_tokens)
            if score > best_score:
                best_sentence, best_score = sent, score
        if best_sentence:
            scored.append((best_score, pos, best_sentence))
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [Candidate(TextPayload(sent), _confidence(score)) for score, _, sent in scored]
