"""BM25 ranking and the proximity-boost second stage."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .index import CorpusIndex, EmptyCorpusError
from .query import GeneratedQuery
from .text import tokenize

K1 = 1.2
B = 0.75


@dataclass(frozen=True, slots=True)
class RetrievedResult:
    doc_id: str
    title: str
    body: str
    score: float
    rank: int
    source: str = "local"  # local | web


def query_weights(q: GeneratedQuery) -> dict[str, float]:
    """Aggregate term weights: query-text tokens at 1 each, context terms added
    at their own weights."""
    weights: dict[str, float] = {}
    for tok in tokenize(q.text):
        weights[tok] = weights.get(tok, 0.0) + 1.0
    for ct in q.context_terms:
        weights[ct.term] = weights.get(ct.term, 0.0) + ct.weight
    return weights


def search(index: CorpusIndex, q: GeneratedQuery, k: int) -> list[RetrievedResult]:
    """Top-k BM25 over the inverted index; ties broken by doc_id."""
    if index.doc_count == 0:
        raise EmptyCorpusError("empty index")
    scores: dict[str, float] = {}
    for term, weight in query_weights(q).items():
        postings = index.postings.get(term)
        if not postings:
            continue
        idf = index.idf(term)
        for doc_id, tf in postings:
            norm = tf + K1 * (1.0 - B + B * index.doc_lengths[doc_id] / index.avg_doc_length)
            scores[doc_id] = scores.get(doc_id, 0.0) + weight * idf * tf * (K1 + 1.0) / norm
    ranked = sorted(((s, d) for d, s in scores.items() if s > 0.0), key=lambda p: (-p[0], p[1]))
    results = []
    for rank, (score, doc_id) in enumerate(ranked[:k], start=1):
        doc = index.documents[doc_id]
        results.append(RetrievedResult(doc_id, doc.title, doc.body, score, rank))
    return results


def _bigrams(tokens: list[str]) -> set[tuple[str, str]]:
    return {(tokens[i], tokens[i + 1]) for i in range(len(tokens) - 1)}


def rerank(
    q: GeneratedQuery,
    results: list[RetrievedResult],
    rerank_depth: int = 20,
    proximity_boost: float = 0.0,
) -> list[RetrievedResult]:
    """Re-score the head by exact query-bigram overlap; the tail keeps its order.

    new_score = score * (1 + proximity_boost * matched_bigrams / max(1, query_bigrams)).
    Any scorer with this signature can be substituted as the second stage.
    """
    if not results:
        return []
    query_bigrams = _bigrams(tokenize(q.text))
    denom = max(1, len(query_bigrams))
    head, tail = results[:rerank_depth], results[rerank_depth:]
    rescored = []
    for r in head:
        # Title and body are separate token streams; no bigram spans the boundary.
        doc_bigrams = _bigrams(tokenize(r.title)) | _bigrams(tokenize(r.body))
        overlap = len(query_bigrams & doc_bigrams) / denom
        rescored.append(replace(r, score=r.score * (1.0 + proximity_boost * overlap)))
    rescored.sort(key=lambda r: (-r.score, r.doc_id))
    return [replace(r, rank=i) for i, r in enumerate(rescored + tail, start=1)]
