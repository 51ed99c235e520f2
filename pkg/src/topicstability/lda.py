"""LDA trained by collapsed Gibbs sampling.

All randomness comes from a PCG64 stream seeded by ``LDAConfig.seed``: one
draw of ``K``-way integers for the initial assignments, then one vector of
uniforms per sweep consumed in token order. The sweep itself is a compiled
numba kernel that performs no random draws of its own.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from numba import njit
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import (
    DataError,
    check_positive_float,
    check_positive_int,
    check_seed,
    make_rng,
)
from .corpus import Corpus, Vocabulary, build_vocabulary, tokenize

logger = logging.getLogger(__name__)

DEFAULT_DEPTH = 25


@dataclass(frozen=True)
class LDAConfig:
    K: int
    alpha_sum: float = 5.0
    beta: float = 0.01
    iterations: int = 1000
    seed: int = 0

    def __post_init__(self):
        check_positive_int(self.K, name="K", minimum=2)
        check_positive_float(self.alpha_sum, name="alpha_sum")
        check_positive_float(self.beta, name="beta")
        check_positive_int(self.iterations, name="iterations")
        check_seed(self.seed)

    @property
    def alpha(self) -> float:
        return self.alpha_sum / self.K

    def header(self) -> str:
        return (f"K={self.K} alpha_sum={self.alpha_sum!r} beta={self.beta!r} "
                f"iterations={self.iterations} seed={self.seed}")


@dataclass
class TopicModel:
    """Final Gibbs state summarised as counts plus the vocabulary.

    Models read back from an export file carry only their ranked term lists;
    ``topic_word_counts`` is then ``None``.
    """

    config: LDAConfig
    terms: tuple[str, ...]
    topic_word_counts: np.ndarray | None
    doc_topic_counts: np.ndarray | None = None
    corpus_name: str = ""
    doc_ids: tuple[str, ...] = ()
    ranked: list[list[str]] | None = field(default=None, repr=False)

    @property
    def K(self) -> int:
        return self.config.K

    @property
    def topics(self) -> list[list[str]]:
        return self.ranked_lists(DEFAULT_DEPTH)

    def ranked_lists(self, m: int = DEFAULT_DEPTH) -> list[list[str]]:
        return [top_terms(self, k, m) for k in range(self.K)]


def top_terms(model: TopicModel, topic: int, m: int = DEFAULT_DEPTH) -> list[str]:
    """Terms of ``topic`` by descending count, ties broken lexicographically.

    Only terms with a nonzero count are returned, so the list may be shorter
    than ``m``.
    """
    if not 0 <= topic < model.K:
        raise IndexError(f"topic {topic} out of range for K={model.K}")
    m = check_positive_int(m, name="m")
    if model.topic_word_counts is None:
        return list(model.ranked[topic][:m])
    counts = model.topic_word_counts[topic]
    nz = np.flatnonzero(counts)
    # terms are in lexicographic id order, so a stable sort on -count breaks ties by term
    order = nz[np.argsort(-counts[nz], kind="stable")]
    return [model.terms[i] for i in order[:m]]


# -- sampler -------------------------------------------------------------------


@njit(cache=True)
def _sweep(words, docs, z, ndk, nwk, nk, alpha, beta, vbeta, u, learn):
    K = nk.shape[0]
    cdf = np.empty(K, dtype=np.float64)
    for i in range(words.shape[0]):
        w = words[i]
        d = docs[i]
        k = z[i]
        ndk[d, k] -= 1
        if learn:
            nwk[w, k] -= 1
            nk[k] -= 1
        total = 0.0
        for t in range(K):
            total += (ndk[d, t] + alpha) * (nwk[w, t] + beta) / (nk[t] + vbeta)
            cdf[t] = total
        r = u[i] * total
        k = 0
        while k < K - 1 and cdf[k] <= r:
            k += 1
        z[i] = k
        ndk[d, k] += 1
        if learn:
            nwk[w, k] += 1
            nk[k] += 1


def topic_conditional(ndk_row, nwk_row, nk, alpha, beta, vbeta) -> np.ndarray:
    """Normalized full conditional over topics for one token (counts already
    decremented). Mirrors the arithmetic in the compiled sweep."""
    p = (np.asarray(ndk_row, float) + alpha) * (np.asarray(nwk_row, float) + beta) / (np.asarray(nk, float) + vbeta)
    return p / p.sum()


def encode(corpus: Corpus, vocab: Vocabulary):
    """Flatten ``corpus`` to (word id, document index) arrays, dropping
    tokens outside ``vocab``."""
    ids = vocab.ids
    words, docs = [], []
    for d, doc in enumerate(corpus.documents):
        for t in doc.tokens:
            i = ids.get(t)
            if i is not None:
                words.append(i)
                docs.append(d)
    return np.asarray(words, dtype=np.int64), np.asarray(docs, dtype=np.int64)


def _counts(words, docs, z, n_docs, V, K):
    ndk = np.zeros((n_docs, K), dtype=np.int64)
    nwk = np.zeros((V, K), dtype=np.int64)
    np.add.at(ndk, (docs, z), 1)
    np.add.at(nwk, (words, z), 1)
    return ndk, nwk, nwk.sum(axis=0)


def gibbs_sample(words, docs, n_docs, V, config: LDAConfig, callback=None):
    """Run ``config.iterations`` sweeps; returns ``(z, ndk, nwk, nk)``.

    ``callback(iteration, z, ndk, nwk, nk)`` is invoked after each sweep when
    given (used by tests to check count conservation).
    """
    rng = make_rng(config.seed)
    K = config.K
    z = rng.integers(0, K, size=words.shape[0]).astype(np.int64)
    ndk, nwk, nk = _counts(words, docs, z, n_docs, V, K)
    alpha, beta = config.alpha, config.beta
    vbeta = V * beta
    for it in range(config.iterations):
        u = rng.random(words.shape[0])
        _sweep(words, docs, z, ndk, nwk, nk, alpha, beta, vbeta, u, True)
        if callback is not None:
            callback(it, z, ndk, nwk, nk)
    return z, ndk, nwk, nk


def train_lda(corpus: Corpus, vocab: Vocabulary, config: LDAConfig) -> TopicModel:
    """Fit LDA on ``corpus`` restricted to ``vocab``."""
    words, docs = encode(corpus, vocab)
    if words.size == 0:
        raise DataError(f"corpus {corpus.name!r} is empty after vocabulary filtering")
    if config.K > len(corpus):
        warnings.warn(f"K={config.K} exceeds the number of documents ({len(corpus)})", stacklevel=2)
    _, ndk, nwk, _ = gibbs_sample(words, docs, len(corpus), len(vocab), config)
    return TopicModel(
        config=config,
        terms=vocab.terms,
        topic_word_counts=np.ascontiguousarray(nwk.T),
        doc_topic_counts=ndk,
        corpus_name=corpus.name,
        doc_ids=tuple(d.id for d in corpus.documents),
    )


# -- export format ----------------------------------------------------------------


def save_model(model: TopicModel, path, m: int = DEFAULT_DEPTH) -> Path:
    """Write the header line and one ``topic_id: term ...`` line per topic."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {model.config.header()} corpus={model.corpus_name} depth={m}"]
    lines += [f"{k}: {' '.join(terms)}" for k, terms in enumerate(model.ranked_lists(m))]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def load_model(path) -> TopicModel:
    path = Path(path)
    text = path.read_text(encoding="utf-8").splitlines()
    if not text or not text[0].startswith("#"):
        raise DataError(f"{path}: missing model header line")
    meta = dict(kv.split("=", 1) for kv in text[0][1:].split() if "=" in kv)
    try:
        config = LDAConfig(K=int(meta["K"]), alpha_sum=float(meta["alpha_sum"]),
                           beta=float(meta["beta"]), iterations=int(meta["iterations"]),
                           seed=int(meta["seed"]))
    except (KeyError, ValueError) as exc:
        raise DataError(f"{path}: malformed header: {exc}") from exc
    ranked: dict[int, list[str]] = {}
    for line in text[1:]:
        if not line.strip():
            continue
        head, _, rest = line.partition(":")
        try:
            ranked[int(head)] = rest.split()
        except ValueError as exc:
            raise DataError(f"{path}: malformed topic line {line!r}") from exc
    if sorted(ranked) != list(range(config.K)):
        raise DataError(f"{path}: expected topics 0..{config.K - 1}, found {sorted(ranked)}")
    return TopicModel(config=config, terms=(), topic_word_counts=None,
                      corpus_name=meta.get("corpus", path.stem),
                      ranked=[ranked[k] for k in range(config.K)])


# -- estimator ----------------------------------------------------------------------


def as_corpus(X, name="corpus") -> Corpus:
    """Accept a Corpus, an iterable of raw strings or an iterable of token lists."""
    if isinstance(X, Corpus):
        return X
    if isinstance(X, (str, bytes)):
        raise TypeError("expected a collection of documents, got a single string")
    docs = [tokenize(x) if isinstance(x, str) else list(x) for x in X]
    return Corpus.from_token_lists(docs, name=name)


class GibbsLDA(TransformerMixin, BaseEstimator):
    """Latent Dirichlet Allocation fitted with collapsed Gibbs sampling.

    Parameters
    ----------
    n_topics : int
    alpha_sum : float
        Total document-topic concentration; each topic gets ``alpha_sum / n_topics``.
    beta : float
        Topic-word smoothing.
    n_iter : int
        Number of full Gibbs sweeps.
    random_state : int
    min_df, stopwords
        Vocabulary filtering used when ``fit`` is not given a vocabulary.
    transform_iter : int
        Sweeps used to fold unseen documents in with the topics held fixed.

    Attributes
    ----------
    vocabulary_ : Vocabulary
    components_ : ndarray of shape (n_topics, n_terms)
        Topic-word counts of the final sample.
    model_ : TopicModel
    """

    def __init__(self, n_topics=10, alpha_sum=5.0, beta=0.01, n_iter=1000, random_state=0,
                 min_df=3, stopwords="english", transform_iter=50):
        self.n_topics = n_topics
        self.alpha_sum = alpha_sum
        self.beta = beta
        self.n_iter = n_iter
        self.random_state = random_state
        self.min_df = min_df
        self.stopwords = stopwords
        self.transform_iter = transform_iter

    def _config(self) -> LDAConfig:
        return LDAConfig(K=self.n_topics, alpha_sum=self.alpha_sum, beta=self.beta,
                         iterations=self.n_iter, seed=self.random_state)

    def fit(self, X, y=None, vocabulary: Vocabulary | None = None):
        corpus = as_corpus(X)
        config = self._config()
        vocab = vocabulary if vocabulary is not None else build_vocabulary(
            corpus, self.min_df, self.stopwords)
        self.vocabulary_ = vocab
        self.model_ = train_lda(corpus, vocab, config)
        self.components_ = self.model_.topic_word_counts
        self.n_features_in_ = len(vocab)
        return self

    def _normalize(self, ndk):
        theta = ndk + self.model_.config.alpha
        return theta / theta.sum(axis=1, keepdims=True)

    def fit_transform(self, X, y=None, vocabulary=None):
        """Fit and return the training documents' topic proportions."""
        self.fit(X, y, vocabulary=vocabulary)
        return self._normalize(self.model_.doc_topic_counts)

    def transform(self, X) -> np.ndarray:
        """Topic proportions of ``X`` with the fitted topics held fixed."""
        check_is_fitted(self, "model_")
        corpus = as_corpus(X)
        words, docs = encode(corpus, self.vocabulary_)
        config = self.model_.config
        K, V = config.K, len(self.vocabulary_)
        rng = make_rng(config.seed)
        z = rng.integers(0, K, size=words.shape[0]).astype(np.int64)
        ndk = np.zeros((len(corpus), K), dtype=np.int64)
        np.add.at(ndk, (docs, z), 1)
        nwk = np.ascontiguousarray(self.model_.topic_word_counts.T)
        nk = nwk.sum(axis=0)
        for _ in range(self.transform_iter):
            u = rng.random(words.shape[0])
            _sweep(words, docs, z, ndk, nwk, nk, config.alpha, config.beta, V * config.beta, u, False)
        return self._normalize(ndk)

    def top_terms(self, topic: int, m: int = DEFAULT_DEPTH) -> list[str]:
        check_is_fitted(self, "model_")
        return top_terms(self.model_, topic, m)


def with_seed(config: LDAConfig, K: int, seed: int) -> LDAConfig:
    return replace(config, K=K, seed=seed)


def ranked_lists(model_or_lists, m: int = DEFAULT_DEPTH) -> list[list[str]]:
    if isinstance(model_or_lists, TopicModel):
        return model_or_lists.ranked_lists(m)
    return [list(terms)[:m] for terms in model_or_lists]

