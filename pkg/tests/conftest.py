from __future__ import annotations

import math

import pytest
from hypothesis import strategies as st

from cis.model import (
    ActorRole,
    AudioPayload,
    ImagePayload,
    Message,
    OptionItem,
    OptionsPayload,
    SelectionPayload,
    TextPayload,
)
from cis.retrieval.index import Document
from cis.retrieval.text import tokenize

TOY_CORPUS = [
    Document("d1", "", "macaw parrot species of south america"),
    Document("d2", "", "conversational search systems answer questions"),
    Document("d3", "", "parrot species conversation"),
]


def bm25_oracle(docs, weights, k1=1.2, b=0.75):
    """Brute-force BM25: direct formula evaluation over every document.

    Independent of the inverted index: term statistics are recounted from the
    raw token lists on every call. Returns [(doc_id, score)] sorted by score
    descending, doc_id ascending; zero-score documents excluded.
    """
    texts = {d.doc_id: tokenize(d.title) + tokenize(d.body) for d in docs}
    n = len(docs)
    avgdl = sum(len(t) for t in texts.values()) / n
    out = []
    for doc_id, toks in texts.items():
        score = 0.0
        for term, weight in weights.items():
            tf = toks.count(term)
            if tf == 0:
                continue
            df = sum(1 for t in texts.values() if term in t)
            idf = math.log((n - df + 0.5) / (df + 0.5) + 1.0)
            score += weight * idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len(toks) / avgdl))
        if score > 0.0:
            out.append((doc_id, score))
    out.sort(key=lambda p: (-p[1], p[0]))
    return out


# -- hypothesis strategies ---------------------------------------------------

_ids = st.text(alphabet="abcdefghij0123456789-", min_size=1, max_size=12)
_free_text = st.text(min_size=1, max_size=60).filter(lambda s: s.strip())


def _options_payloads():
    return st.lists(
        st.tuples(_ids, st.text(max_size=30)), min_size=1, max_size=5,
        unique_by=lambda t: t[0],
    ).flatmap(
        lambda items: st.builds(
            OptionsPayload,
            prompt=st.text(max_size=40),
            items=st.just(tuple(OptionItem(oid, label) for oid, label in items)),
        )
    )


def payloads():
    return st.one_of(
        st.builds(TextPayload, content=_free_text),
        st.builds(ImagePayload, reference=_ids, caption=st.none() | st.text(max_size=30)),
        st.builds(AudioPayload, reference=_ids, transcript=st.none() | st.text(max_size=30)),
        _options_payloads(),
        st.builds(SelectionPayload, source_message_id=_ids, option_id=_ids),
    )


@st.composite
def messages(draw):
    sender = draw(st.sampled_from(list(ActorRole)))
    if sender is ActorRole.SYSTEM and draw(st.booleans()):
        origin_action = draw(_ids)
        confidence = draw(st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
    else:
        origin_action, confidence = None, None
    return Message(
        message_id=draw(_ids),
        conversation_id=draw(_ids),
        sender=sender,
        payload=draw(payloads()),
        timestamp_ms=draw(st.integers(min_value=0, max_value=2**53 - 1)),
        in_reply_to=draw(st.none() | _ids),
        origin_action=origin_action,
        confidence=confidence,
    )


@pytest.fixture
def toy_corpus():
    return list(TOY_CORPUS)


@pytest.fixture
def store(tmp_path):
    from cis.store import InteractionStore

    s = InteractionStore(tmp_path / "interactions.log")
    yield s
    s.close()
