"""Planted-topic corpora for tests and trend checks.

Each topic owns a disjoint set of real English content words taken from the
bundled frequency list (so phonetic substitution has candidates to draw
from) with Zipf-shaped weights. Every document has one dominant topic and a
share of general-vocabulary background tokens drawn from the frequency list
in proportion to word frequency.

The output imitates an already preprocessed corpus: stopwords never occur,
so pipelines on it normally run with ``stopwords=None``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import make_rng
from .corpus import Corpus, Document, resolve_stopwords, term_frequencies
from .phonetics import FrequencyList, bundled_frequency_list


@dataclass(frozen=True)
class PlantedTopics:
    corpus: Corpus
    topics: tuple[tuple[str, ...], ...]  # generating words, most probable first

    def ranked_lists(self, m=25):
        """Each topic's words ranked by their count in the generated corpus,
        ties broken lexicographically, zero counts dropped."""
        counts = term_frequencies(self.corpus)
        out = []
        for words in self.topics:
            present = sorted((w for w in words if counts[w]), key=lambda w: (-counts[w], w))
            out.append(present[:m])
        return out


def planted_corpus(n_docs=1000, n_topics=5, doc_length=100, words_per_topic=200,
                   zipf_exponent=1.0, dominant_share=0.85, background_share=0.15,
                   seed=0, freq_list: FrequencyList | None = None,
                   name="synthetic") -> PlantedTopics:
    """Generate a corpus with ``n_topics`` planted topics.

    Token sources per document: ``background_share`` general English
    content words (drawn by list frequency), the rest from topics with ``dominant_share`` of that mass on
    the document's own topic and the remainder spread evenly over the others.
    """
    rng = make_rng(seed)
    freq_list = freq_list or bundled_frequency_list()
    stop = resolve_stopwords("english")

    content = [t for t in freq_list.terms[100:] if t not in stop and len(t) >= 4]
    if len(content) < n_topics * words_per_topic:
        raise ValueError("frequency list too small for the requested topic vocabulary")
    chosen = rng.choice(len(content), size=n_topics * words_per_topic, replace=False)
    topics = [tuple(content[i] for i in chosen[k * words_per_topic:(k + 1) * words_per_topic])
              for k in range(n_topics)]
    ranks = np.arange(1, words_per_topic + 1, dtype=np.float64)
    word_p = ranks ** -zipf_exponent
    word_p /= word_p.sum()

    bg_entries = [(t, f) for t, f in freq_list.entries if t not in stop]
    bg_terms = [t for t, _ in bg_entries]
    bg_p = np.array([f for _, f in bg_entries], dtype=np.float64)
    bg_p /= bg_p.sum()

    if n_topics > 1:
        off = (1.0 - dominant_share) / (n_topics - 1)
    else:
        off = 0.0
    width = max(6, len(str(n_docs)))
    docs = []
    for d in range(n_docs):
        label = d % n_topics
        mix = np.full(n_topics, off)
        mix[label] = dominant_share if n_topics > 1 else 1.0
        src = rng.random(doc_length)
        topic_of = rng.choice(n_topics, size=doc_length, p=mix)
        word_of = rng.choice(words_per_topic, size=doc_length, p=word_p)
        bg_of = rng.choice(len(bg_terms), size=doc_length, p=bg_p)
        tokens = [
            bg_terms[bg_of[i]] if src[i] < background_share else topics[topic_of[i]][word_of[i]]
            for i in range(doc_length)
        ]
        docs.append(Document(f"{d:0{width}d}", tuple(tokens), f"topic{label}"))
    return PlantedTopics(Corpus(tuple(docs), name), tuple(topics))


def disjoint_topic_corpus(n_docs=60, doc_length=50, n_topics=3, words_per_topic=30, seed=0) -> PlantedTopics:
    """Small corpus where every document draws uniformly from one topic's
    private vocabulary of made-up words."""
    rng = make_rng(seed)
    letters = "bcdfghjklmnpqrstvwxz"
    topics = []
    for k in range(n_topics):
        topics.append(tuple(f"{letters[k]}{letters[i // 20]}{letters[i % 20]}term"
                            for i in range(words_per_topic)))
    width = max(6, len(str(n_docs)))
    docs = []
    for d in range(n_docs):
        k = d % n_topics
        idx = rng.integers(0, words_per_topic, size=doc_length)
        docs.append(Document(f"{d:0{width}d}", tuple(topics[k][i] for i in idx), f"topic{k}"))
    return PlantedTopics(Corpus(tuple(docs), "disjoint"), tuple(topics))
