from .actions import QAAction, RetrievalAction, RetrievalConfig, SearchAction, run_pipeline
from .coref import ANAPHORS, ResolutionEntry, ResolutionMap, resolve_coreferences
from .index import CorpusIndex, Document, DuplicateDocIdError, EmptyCorpusError, index_corpus, load_corpus_file
from .query import ContextTerm, GeneratedQuery, generate_query
from .rank import B, K1, RetrievedResult, query_weights, rerank, search
from .results import Candidate, generate_result
from .text import STOPWORDS, split_sentences, tokenize

__all__ = [
    "ANAPHORS",
    "B",
    "K1",
    "Candidate",
    "ContextTerm",
    "CorpusIndex",
    "Document",
    "DuplicateDocIdError",
    "EmptyCorpusError",
    "GeneratedQuery",
    "QAAction",
    "ResolutionEntry",
    "ResolutionMap",
    "RetrievalAction",
    "RetrievalConfig",
    "RetrievedResult",
    "SearchAction",
    "STOPWORDS",
    "generate_query",
    "generate_result",
    "index_corpus",
    "load_corpus_file",
    "query_weights",
    "rerank",
    "resolve_coreferences",
    "run_pipeline",
    "search",
    "split_sentences",
    "tokenize",
]
