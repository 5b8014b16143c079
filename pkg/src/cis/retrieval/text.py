"""Shared text utilities: tokenization, stopwords, sentence splitting."""

from __future__ import annotations

import re

_TOKEN_RE = re.compile(r"[a-z0-9]+")
_SENTENCE_RE = re.compile(r"[^.?!]+")

# Small closed stopword list; enough for tail-phrase extraction and query
# expansion filtering. Indexing keeps stopwords on purpose.
STOPWORDS = frozenset(
    """a an the and or but if then else of in on at to for from with without by as is are was
    were be been being am do does did have has had will would can could shall should may might
    must not no nor so too very just about into over under again once here there when where why
    how what which who whom whose this that these those it its they them their he she him her
    his hers i me my we us our you your yours tell please show give find get make want know
    any all some more most other such only own same than up down out off""".split()
)


def tokenize(text: str) -> list[str]:
    """Lowercase, split on any non-alphanumeric run; no stemming, stopwords kept."""
    return _TOKEN_RE.findall(text.lower())


def split_sentences(text: str) -> list[str]:
    """Split on terminal punctuation (. ? !); whitespace-trimmed, empties dropped."""
    return [s.strip() for s in _SENTENCE_RE.findall(text) if s.strip()]
