"""Simulated transcription noise at a controlled word error rate.

Each injector corrupts a single channel (deletion, insertion or phonetic
substitution) over the whole token stream of a corpus and returns the noisy
corpus together with a :class:`NoiseReport` holding exact S/D/I/N counts.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_corpus, check_rate, check_seed, make_rng
from .corpus import Corpus
from .phonetics import FrequencyList, MetaphoneIndex, build_metaphone_index

NOISE_KINDS = ("deletion", "insertion", "metaphone")
REPORT_FIELDS = ("kind", "rate", "seed", "S", "D", "I", "N", "achieved_wer")


def wer(S: int, D: int, I: int, N: int) -> float:
    """Word error rate ``(S + D + I) / N``; can exceed 1."""
    if N <= 0:
        raise ZeroDivisionError("word error rate is undefined for an empty reference (N = 0)")
    return (S + D + I) / N


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    rate: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        object.__setattr__(self, "rate", check_rate(self.rate))
        object.__setattr__(self, "seed", check_seed(self.seed))


@dataclass(frozen=True)
class NoiseReport:
    kind: str
    rate: float
    seed: int
    S: int
    D: int
    I: int
    N: int

    @property
    def achieved_wer(self) -> float:
        return wer(self.S, self.D, self.I, self.N) if self.N else 0.0

    @property
    def target(self) -> int:
        return target_count(self.rate, self.N)

    def as_row(self) -> dict:
        row = asdict(self)
        row["achieved_wer"] = self.achieved_wer
        return {k: row[k] for k in REPORT_FIELDS}

    def to_csv(self, header=True) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=REPORT_FIELDS, lineterminator="\n")
        if header:
            writer.writeheader()
        row = self.as_row()
        row["achieved_wer"] = f"{row['achieved_wer']:.6f}"
        writer.writerow(row)
        return buf.getvalue()


def target_count(rate: float, n: int) -> int:
    """``floor(rate * n)``, robust to binary rounding (0.29 * 100 is 28.999...)."""
    return math.floor(round(rate * n, 9))


def _flatten(corpus: Corpus):
    tokens = [t for d in corpus.documents for t in d.tokens]
    lengths = np.array([len(d.tokens) for d in corpus.documents], dtype=np.int64)
    return tokens, lengths


def _split(tokens, lengths):
    out, start = [], 0
    for n in lengths:
        out.append(tokens[start:start + n])
        start += n
    return out


def inject_deletion(corpus: Corpus, rate: float, seed: int = 0) -> tuple[Corpus, NoiseReport]:
    """Remove ``floor(rate * N)`` token positions chosen uniformly without replacement."""
    check_corpus(corpus)
    rate = check_rate(rate)
    rng = make_rng(seed)
    tokens, lengths = _flatten(corpus)
    n = len(tokens)
    n_delete = target_count(rate, n)

    keep = np.ones(n, dtype=bool)
    if n_delete:
        keep[rng.choice(n, size=n_delete, replace=False)] = False
    doc_of = np.repeat(np.arange(len(lengths)), lengths)
    new_lengths = np.bincount(doc_of[keep], minlength=len(lengths))
    kept = [t for t, k in zip(tokens, keep) if k]
    noisy = corpus.with_tokens(_split(kept, new_lengths))
    return noisy, NoiseReport("deletion", rate, seed, 0, n_delete, 0, n)


def inject_insertion(corpus: Corpus, rate: float, freq_list: FrequencyList, seed: int = 0
                     ) -> tuple[Corpus, NoiseReport]:
    """Insert ``floor(rate * N)`` frequency-weighted terms at uniform gap positions.

    A document of ``n`` tokens has ``n + 1`` gaps; gaps are drawn uniformly
    with replacement over all documents, and terms with replacement with
    probability proportional to their listed frequency.
    """
    check_corpus(corpus)
    rate = check_rate(rate)
    if freq_list is None or len(freq_list) == 0:
        raise ValueError("insertion noise needs a non-empty frequency list")
    rng = make_rng(seed)
    _, lengths = _flatten(corpus)
    n = int(lengths.sum())
    n_insert = target_count(rate, n)

    terms = freq_list.terms
    weights = np.asarray(freq_list.frequencies, dtype=np.float64)
    picks = rng.choice(len(terms), size=n_insert, replace=True, p=weights / weights.sum())
    n_gaps = n + len(lengths)
    gaps = rng.integers(0, n_gaps, size=n_insert)

    gap_start = np.concatenate(([0], np.cumsum(lengths + 1)))
    order = np.argsort(gaps, kind="stable")

    new_docs = []
    j = 0
    for d, doc in enumerate(corpus.documents):
        toks = []
        for offset in range(len(doc.tokens) + 1):
            g = gap_start[d] + offset
            while j < n_insert and gaps[order[j]] == g:
                toks.append(terms[picks[order[j]]])
                j += 1
            if offset < len(doc.tokens):
                toks.append(doc.tokens[offset])
        new_docs.append(toks)
    return corpus.with_tokens(new_docs), NoiseReport("insertion", rate, seed, 0, 0, n_insert, n)


def inject_metaphone(corpus: Corpus, rate: float, index: MetaphoneIndex, seed: int = 0
                     ) -> tuple[Corpus, NoiseReport]:
    """Replace up to ``floor(rate * N)`` tokens by sound-alike frequent words.

    Positions are visited in a uniformly random order. A token whose primary
    code bucket holds no other term is skipped and the next position is
    tried, so fewer substitutions than requested are made only when the
    whole corpus runs out of replaceable tokens.
    """
    check_corpus(corpus)
    rate = check_rate(rate)
    if index is None or len(index) == 0:
        raise ValueError("metaphone noise needs a non-empty MetaphoneIndex")
    rng = make_rng(seed)
    tokens, lengths = _flatten(corpus)
    n = len(tokens)
    target = target_count(rate, n)

    cache: dict[str, tuple | None] = {}

    def sampler(term):
        if term not in cache:
            cands = index.candidates(term)
            if cands:
                cum = np.cumsum([f for _, f in cands], dtype=np.float64)
                cache[term] = ([t for t, _ in cands], cum / cum[-1])
            else:
                cache[term] = None
        return cache[term]

    replaced = 0
    noisy = list(tokens)
    if target:
        for pos in rng.permutation(n):
            s = sampler(tokens[pos])
            if s is None:
                continue
            cand_terms, cdf = s
            k = int(np.searchsorted(cdf, rng.random(), side="right"))
            noisy[pos] = cand_terms[min(k, len(cand_terms) - 1)]
            replaced += 1
            if replaced == target:
                break
    return corpus.with_tokens(_split(noisy, lengths)), NoiseReport("metaphone", rate, seed, replaced, 0, 0, n)


def inject(corpus: Corpus, spec: NoiseSpec, freq_list: FrequencyList | None = None,
           index: MetaphoneIndex | None = None) -> tuple[Corpus, NoiseReport]:
    """Dispatch ``spec`` to the matching injector."""
    if spec.kind == "deletion":
        return inject_deletion(corpus, spec.rate, spec.seed)
    if spec.kind == "insertion":
        return inject_insertion(corpus, spec.rate, freq_list, spec.seed)
    if index is None and freq_list is not None:
        index = build_metaphone_index(freq_list)
    return inject_metaphone(corpus, spec.rate, index, spec.seed)


class CorpusNoise(TransformerMixin, BaseEstimator):
    """Transformer wrapping the injectors.

    ``transform`` returns the noisy corpus and stores the last report in
    ``report_``. The transformer is stateless apart from the phonetic index
    built in ``fit`` for metaphone noise.

    Parameters
    ----------
    kind : {"deletion", "insertion", "metaphone"}
    rate : float in [0, 0.5]
    seed : int
    frequency_list : FrequencyList, required for insertion and metaphone
        unless ``index`` is given for metaphone.
    index : MetaphoneIndex, optional
    """

    def __init__(self, kind="deletion", rate=0.1, seed=0, frequency_list=None, index=None):
        self.kind = kind
        self.rate = rate
        self.seed = seed
        self.frequency_list = frequency_list
        self.index = index

    def fit(self, X=None, y=None):
        spec = NoiseSpec(self.kind, self.rate, self.seed)
        self.spec_ = spec
        self.index_ = None
        if spec.kind == "insertion" and self.frequency_list is None:
            raise ValueError("insertion noise needs frequency_list")
        if spec.kind == "metaphone":
            if self.index is not None:
                self.index_ = self.index
            elif self.frequency_list is not None:
                self.index_ = build_metaphone_index(self.frequency_list)
            else:
                raise ValueError("metaphone noise needs frequency_list or index")
        return self

    def transform(self, X: Corpus) -> Corpus:
        if not hasattr(self, "spec_"):
            self.fit(X)
        noisy, self.report_ = inject(X, self.spec_, self.frequency_list, self.index_)
        return noisy


INJECTORS: dict[str, Callable] = {
    "deletion": inject_deletion,
    "insertion": inject_insertion,
    "metaphone": inject_metaphone,
}
