import pytest

from topicstability.corpus import Corpus
from topicstability.phonetics import build_metaphone_index, bundled_frequency_list
from topicstability.synthetic import planted_corpus


@pytest.fixture(scope="session")
def freq_list():
    return bundled_frequency_list()


@pytest.fixture(scope="session")
def metaphone_index(freq_list):
    return build_metaphone_index(freq_list)


@pytest.fixture(scope="session")
def small_planted(freq_list):
    # 10,000 tokens of real English words
    return planted_corpus(n_docs=100, doc_length=100, words_per_topic=60, seed=7, freq_list=freq_list)


@pytest.fixture
def tiny_corpus():
    return Corpus.from_token_lists([["cat", "sat", "mat"], ["dog", "ran"], [], ["cat", "dog", "cat"]], name="tiny")
