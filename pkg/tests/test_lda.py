import numpy as np
import pytest
from sklearn.base import clone

from topicstability._validation import DataError
from topicstability.corpus import Corpus, build_vocabulary
from topicstability.lda import (
    GibbsLDA,
    LDAConfig,
    TopicModel,
    encode,
    gibbs_sample,
    load_model,
    save_model,
    top_terms,
    topic_conditional,
    train_lda,
)
from topicstability.synthetic import disjoint_topic_corpus


@pytest.fixture(scope="module")
def disjoint():
    return disjoint_topic_corpus(seed=1)


def reference_gibbs(words, docs, n_docs, V, config):
    """Token-by-token sampler in plain numpy drawing from the normalized conditional."""
    rng = np.random.Generator(np.random.PCG64(config.seed))
    K = config.K
    z = rng.integers(0, K, size=len(words)).astype(np.int64)
    ndk = np.zeros((n_docs, K), np.int64)
    nwk = np.zeros((V, K), np.int64)
    for w, d, k in zip(words, docs, z):
        ndk[d, k] += 1
        nwk[w, k] += 1
    nk = nwk.sum(axis=0)
    for _ in range(config.iterations):
        u = rng.random(len(words))
        for i, (w, d) in enumerate(zip(words, docs)):
            k = z[i]
            ndk[d, k] -= 1; nwk[w, k] -= 1; nk[k] -= 1
            p = topic_conditional(ndk[d], nwk[w], nk, config.alpha, config.beta, V * config.beta)
            assert abs(p.sum() - 1.0) < 1e-9
            k = min(int(np.searchsorted(np.cumsum(p), u[i], side="right")), K - 1)
            z[i] = k
            ndk[d, k] += 1; nwk[w, k] += 1; nk[k] += 1
    return z, ndk, nwk, nk


@pytest.mark.parametrize("K", [2, 5])
def test_kernel_matches_reference_sampler(disjoint, K):
    corpus = disjoint.corpus
    vocab = build_vocabulary(corpus, 1, None)
    words, docs = encode(corpus, vocab)
    config = LDAConfig(K=K, iterations=3, seed=42)
    got = gibbs_sample(words, docs, len(corpus), len(vocab), config)
    want = reference_gibbs(words, docs, len(corpus), len(vocab), config)
    for a, b in zip(got, want):
        np.testing.assert_array_equal(a, b)


def test_count_conservation_every_sweep(disjoint):
    corpus = disjoint.corpus
    vocab = build_vocabulary(corpus, 1, None)
    words, docs = encode(corpus, vocab)
    lengths = np.bincount(docs, minlength=len(corpus))
    calls = []

    def check(it, z, ndk, nwk, nk):
        calls.append(it)
        np.testing.assert_array_equal(ndk.sum(axis=1), lengths)
        np.testing.assert_array_equal(nwk.sum(axis=0), nk)
        assert nk.sum() == len(words)
        np.testing.assert_array_equal(np.bincount(z, minlength=nk.size), nk)

    gibbs_sample(words, docs, len(corpus), len(vocab), LDAConfig(K=4, iterations=20, seed=3), callback=check)
    assert calls == list(range(20))


def test_model_totals(disjoint):
    corpus = disjoint.corpus
    vocab = build_vocabulary(corpus, 3, "english")
    model = train_lda(corpus, vocab, LDAConfig(K=3, iterations=50, seed=0))
    n_filtered = len(encode(corpus, vocab)[0])
    assert model.topic_word_counts.sum() == model.doc_topic_counts.sum() == n_filtered
    assert model.topic_word_counts.shape == (3, len(vocab))
    for terms in model.topics:
        assert len(terms) == len(set(terms)) <= 25


@pytest.mark.parametrize("iterations", [1, 30])
def test_seeded_determinism(disjoint, iterations):
    corpus = disjoint.corpus
    vocab = build_vocabulary(corpus, 1, None)
    cfg = LDAConfig(K=3, iterations=iterations, seed=9)
    a, b = train_lda(corpus, vocab, cfg), train_lda(corpus, vocab, cfg)
    np.testing.assert_array_equal(a.topic_word_counts, b.topic_word_counts)
    np.testing.assert_array_equal(a.doc_topic_counts, b.doc_topic_counts)
    c = train_lda(corpus, vocab, LDAConfig(K=3, iterations=iterations, seed=10))
    assert not np.array_equal(a.doc_topic_counts, c.doc_topic_counts)


def test_identical_one_word_documents():
    corpus = Corpus.from_token_lists([["apple"]] * 10 + [["pear"]])
    vocab = build_vocabulary(corpus, 1, None)
    model = train_lda(corpus, vocab, LDAConfig(K=2, iterations=20, seed=0))
    assert all(t[0] == "apple" for t in model.topics)


def test_recovers_disjoint_topics(disjoint):
    corpus = disjoint.corpus
    vocab = build_vocabulary(corpus, 1, None)
    model = train_lda(corpus, vocab, LDAConfig(K=3, iterations=200, seed=0))
    generating = [set(t) for t in disjoint.topics]
    for terms in model.topics:
        assert max(len(set(terms) & g) for g in generating) / len(terms) >= 0.9


def _fixed_model(counts, terms):
    K = len(counts)
    return TopicModel(LDAConfig(K=max(K, 2)), tuple(terms), np.array(counts))


def test_top_terms_ties_and_truncation():
    model = _fixed_model([[10, 3, 3, 0], [0, 0, 1, 2]], ["apple", "cat", "dog", "eel"])
    assert top_terms(model, 0, 2) == ["apple", "cat"]
    assert top_terms(model, 0, 25) == ["apple", "cat", "dog"]
    assert top_terms(model, 1, 25) == ["eel", "dog"]
    with pytest.raises(IndexError):
        top_terms(model, 2)


def test_top_terms_sort_oracle():
    rng = np.random.default_rng(0)
    terms = sorted({"".join(rng.choice(list("abcdef"), 4)) for _ in range(80)})
    counts = rng.integers(0, 4, size=(3, len(terms)))
    model = _fixed_model(counts, terms)
    for k in range(3):
        oracle = sorted((t for t, c in zip(terms, counts[k]) if c), key=lambda t: (-counts[k][terms.index(t)], t))
        assert top_terms(model, k, 25) == oracle[:25]


def test_permuting_documents_keeps_word_totals(disjoint):
    corpus = disjoint.corpus
    shuffled = Corpus(tuple(reversed(corpus.documents)), corpus.name)
    vocab = build_vocabulary(corpus, 1, None)
    cfg = LDAConfig(K=3, iterations=10, seed=0)
    a, b = train_lda(corpus, vocab, cfg), train_lda(shuffled, vocab, cfg)
    np.testing.assert_array_equal(a.topic_word_counts.sum(axis=0), b.topic_word_counts.sum(axis=0))
    assert a.doc_ids == tuple(reversed(b.doc_ids))


def test_empty_filtered_corpus():
    corpus = Corpus.from_token_lists([["the", "and"], ["of"]])
    with pytest.raises(DataError):
        train_lda(corpus, build_vocabulary(corpus, 1, "english"), LDAConfig(K=2, iterations=1))


def test_k_above_documents_warns():
    corpus = Corpus.from_token_lists([["aa", "bb"], ["cc", "dd"]])
    with pytest.warns(UserWarning):
        train_lda(corpus, build_vocabulary(corpus, 1, None), LDAConfig(K=3, iterations=2))


@pytest.mark.parametrize("kwargs", [{"K": 1}, {"K": 3, "alpha_sum": 0}, {"K": 3, "beta": -1},
                                    {"K": 3, "iterations": 0}, {"K": 3, "seed": -2}])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        LDAConfig(**kwargs)


def test_export_round_trip(tmp_path, disjoint):
    corpus = disjoint.corpus
    vocab = build_vocabulary(corpus, 1, None)
    model = train_lda(corpus, vocab, LDAConfig(K=3, iterations=20, seed=5))
    path = save_model(model, tmp_path / "m.txt")
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# K=3 alpha_sum=5.0 beta=0.01 iterations=20 seed=5")
    assert len(lines) == 4 and lines[1].startswith("0: ")
    back = load_model(path)
    assert back.config == model.config
    assert back.ranked_lists() == model.ranked_lists()
    assert back.ranked_lists(5) == model.ranked_lists(5)


@pytest.mark.parametrize("text", ["", "0: a b\n", "# K=2 alpha_sum=5 beta=0.01 iterations=1 seed=0\n0: a\n",
                                  "# K=x\n", "# K=2 alpha_sum=5 beta=0.01 iterations=1 seed=0\nzero: a\n1: b\n"])
def test_load_model_errors(tmp_path, text):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    with pytest.raises(DataError):
        load_model(p)


def test_estimator(disjoint):
    docs = [" ".join(d.tokens) for d in disjoint.corpus]
    est = GibbsLDA(n_topics=3, n_iter=100, min_df=1, stopwords=None, random_state=2)
    assert est.get_params()["n_topics"] == 3
    theta = est.fit_transform(docs)
    assert theta.shape == (60, 3)
    np.testing.assert_allclose(theta.sum(axis=1), 1.0)
    assert est.components_.shape == (3, est.n_features_in_)
    # folding in the training documents recovers the same dominant topics
    folded = est.transform(docs[:9])
    np.testing.assert_array_equal(folded.argmax(axis=1), theta[:9].argmax(axis=1))
    assert len(est.top_terms(0, 5)) == 5
    c = clone(est).set_params(n_topics=2)
    assert c.fit(disjoint.corpus).model_.K == 2


def test_estimator_requires_fit():
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        GibbsLDA().transform([["aa"]])
