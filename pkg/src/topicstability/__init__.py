"""Topic model stability under simulated transcription noise."""

__version__ = "0.1.0"

from .agreement import AgreementResult, agreement, average_jaccard, hungarian_match, similarity_matrix
from .corpus import Corpus, Document, Vocabulary, build_vocabulary, load_corpus, save_corpus, tokenize
from .experiment import ExperimentConfig, ResultTable, StabilityRecord, aggregate, emit_outputs, run_experiment
from .lda import GibbsLDA, LDAConfig, TopicModel, load_model, save_model, train_lda
from .noise import CorpusNoise, NoiseReport, NoiseSpec, inject, wer
from .phonetics import FrequencyList, MetaphoneIndex, build_metaphone_index, double_metaphone, load_frequency_list

__all__ = [
    "AgreementResult", "agreement", "average_jaccard", "hungarian_match", "similarity_matrix",
    "Corpus", "Document", "Vocabulary", "build_vocabulary", "load_corpus", "save_corpus", "tokenize",
    "ExperimentConfig", "ResultTable", "StabilityRecord", "aggregate", "emit_outputs", "run_experiment",
    "GibbsLDA", "LDAConfig", "TopicModel", "load_model", "save_model", "train_lda",
    "CorpusNoise", "NoiseReport", "NoiseSpec", "inject", "wer",
    "FrequencyList", "MetaphoneIndex", "build_metaphone_index", "double_metaphone", "load_frequency_list",
]
