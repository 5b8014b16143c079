"""Local inverted index over a document corpus with the BM25 statistics."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .text import tokenize


class DuplicateDocIdError(Exception):
    pass


class EmptyCorpusError(Exception):
    pass


@dataclass(frozen=True, slots=True)
class Document:
    doc_id: str
    title: str
    body: str


@dataclass(frozen=True)
class CorpusIndex:
    """Immutable after construction; shareable across concurrent dispatches."""

    postings: dict[str, tuple[tuple[str, int], ...]]
    doc_lengths: dict[str, int]
    documents: dict[str, Document]
    doc_count: int
    avg_doc_length: float

    def idf(self, term: str) -> float:
        df = len(self.postings.get(term, ()))
        return math.log((self.doc_count - df + 0.5) / (df + 0.5) + 1.0)

    def doc_tokens(self, doc_id: str) -> list[str]:
        doc = self.documents[doc_id]
        return tokenize(doc.title) + tokenize(doc.body)


def index_corpus(docs: Iterable[Document | dict]) -> CorpusIndex:
    """Build the index; title tokens are indexed together with the body."""
    postings: dict[str, list[tuple[str, int]]] = {}
    doc_lengths: dict[str, int] = {}
    documents: dict[str, Document] = {}
    for raw in docs:
        doc = raw if isinstance(raw, Document) else Document(raw["doc_id"], raw.get("title", ""), raw.get("body", ""))
        if doc.doc_id in documents:
            raise DuplicateDocIdError(doc.doc_id)
        documents[doc.doc_id] = doc
        tokens = tokenize(doc.title) + tokenize(doc.body)
        doc_lengths[doc.doc_id] = len(tokens)
        counts: dict[str, int] = {}
        for tok in tokens:
            counts[tok] = counts.get(tok, 0) + 1
        for term, tf in counts.items():
            postings.setdefault(term, []).append((doc.doc_id, tf))
    if not documents:
        raise EmptyCorpusError("corpus has no documents")
    n = len(documents)
    return CorpusIndex(
        postings={t: tuple(p) for t, p in postings.items()},
        doc_lengths=doc_lengths,
        documents=documents,
        doc_count=n,
        avg_doc_length=sum(doc_lengths.values()) / n,
    )


def load_corpus_file(path: str | Path) -> list[Document]:
    """Newline-delimited records {"doc_id":..., "title":..., "body":...}."""
    docs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                docs.append(Document(obj["doc_id"], obj.get("title", ""), obj.get("body", "")))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed corpus record: {exc}") from exc
    return docs
