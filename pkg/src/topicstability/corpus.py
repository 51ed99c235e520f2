"""Corpus loading, tokenization and vocabulary statistics."""
from __future__ import annotations

import logging
import os
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from sklearn.feature_extraction.text import ENGLISH_STOP_WORDS

from ._validation import DataError, check_positive_int

logger = logging.getLogger(__name__)

FORMATS = ("dir-of-txt", "one-doc-per-line")

_NON_ALPHA = re.compile(r"[^a-z]+")
_MIN_TOKEN_LEN = 2


def tokenize(raw: str) -> list[str]:
    """Lowercase ``raw``, split on any non a-z character, drop 1-letter tokens.

    >>> tokenize("U.S.-based firm's Q3")
    ['based', 'firm']
    """
    return [t for t in _NON_ALPHA.split(raw.lower()) if len(t) >= _MIN_TOKEN_LEN]


@dataclass(frozen=True)
class Document:
    id: str
    tokens: tuple[str, ...]
    label: str | None = None

    def __post_init__(self):
        # accept any sequence but store immutably
        object.__setattr__(self, "tokens", tuple(self.tokens))

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]
    name: str = "corpus"

    def __post_init__(self):
        docs = tuple(self.documents)
        ids = [d.id for d in docs]
        if len(set(ids)) != len(ids):
            dupes = sorted(i for i, c in Counter(ids).items() if c > 1)
            raise DataError(f"duplicate document ids: {dupes[:5]}")
        object.__setattr__(self, "documents", docs)

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def __getitem__(self, i):
        return self.documents[i]

    @property
    def n_tokens(self) -> int:
        """Total number of tokens (the reference length N in WER terms)."""
        return sum(len(d.tokens) for d in self.documents)

    def with_tokens(self, token_lists: Sequence[Sequence[str]], name: str | None = None) -> "Corpus":
        """Copy of this corpus with per-document tokens replaced, ids and labels kept."""
        if len(token_lists) != len(self.documents):
            raise ValueError("token_lists must have one entry per document")
        docs = tuple(
            Document(d.id, tuple(toks), d.label) for d, toks in zip(self.documents, token_lists)
        )
        return Corpus(docs, self.name if name is None else name)

    @classmethod
    def from_token_lists(cls, token_lists: Iterable[Sequence[str]], name="corpus", labels=None) -> "Corpus":
        token_lists = list(token_lists)
        width = max(6, len(str(len(token_lists))))
        labels = labels if labels is not None else [None] * len(token_lists)
        return cls(
            tuple(
                Document(f"{i:0{width}d}", tuple(toks), lab)
                for i, (toks, lab) in enumerate(zip(token_lists, labels))
            ),
            name,
        )


@dataclass(frozen=True)
class Vocabulary:
    """Filtered term inventory with ids assigned in lexicographic order."""

    terms: tuple[str, ...]
    document_frequency: Mapping[str, int]
    corpus_frequency: Mapping[str, int]
    ids: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "ids", {t: i for i, t in enumerate(self.terms)})

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term):
        return term in self.ids


def term_frequencies(corpus: Corpus) -> Counter:
    """Count every token occurrence in ``corpus``."""
    counts = Counter()
    for doc in corpus.documents:
        counts.update(doc.tokens)
    return counts


def document_frequencies(corpus: Corpus) -> Counter:
    counts = Counter()
    for doc in corpus.documents:
        counts.update(set(doc.tokens))
    return counts


def resolve_stopwords(stopwords) -> frozenset[str]:
    """``"english"`` selects the bundled list; ``None`` or ``"none"`` means no stopwords."""
    if stopwords is None or stopwords == "none":
        return frozenset()
    if isinstance(stopwords, str):
        if stopwords == "english":
            return frozenset(ENGLISH_STOP_WORDS)
        return load_stopwords(stopwords)
    return frozenset(stopwords)


def build_vocabulary(corpus: Corpus, min_df: int = 3, stopwords="english") -> Vocabulary:
    """Keep terms occurring in at least ``min_df`` documents and not in ``stopwords``.

    ``stopwords`` may be ``"english"`` (the bundled scikit-learn list), a path
    to a one-term-per-line file, any iterable of terms, or ``None``.
    """
    min_df = check_positive_int(min_df, name="min_df")
    stop = resolve_stopwords(stopwords)
    df = document_frequencies(corpus)
    cf = term_frequencies(corpus)
    kept = sorted(t for t, n in df.items() if n >= min_df and t not in stop)
    return Vocabulary(
        tuple(kept),
        {t: df[t] for t in kept},
        {t: cf[t] for t in kept},
    )


def load_stopwords(path) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return frozenset(w for line in fh for w in tokenize(line))


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def load_corpus(path, format: str = "dir-of-txt", name: str | None = None) -> Corpus:
    """Load a corpus from disk.

    ``dir-of-txt``: every ``*.txt`` file below ``path`` (at most one level of
    label sub-directories) is one document; its id is the relative path
    without suffix and its label the sub-directory name.
    ``one-doc-per-line``: each line holding at least one token is a document.
    Documents are ordered lexicographically by id.
    """
    path = Path(path)
    if format not in FORMATS:
        raise ValueError(f"unknown corpus format {format!r}; expected one of {FORMATS}")
    if not path.exists():
        raise DataError(f"corpus path does not exist: {path}")
    name = name or path.stem

    if format == "dir-of-txt":
        if not path.is_dir():
            raise DataError(f"dir-of-txt corpus must be a directory: {path}")
        docs = []
        for f in path.glob("*.txt"):
            docs.append(Document(f.stem, tokenize(_read_text(f)), None))
        for sub in sorted(p for p in path.iterdir() if p.is_dir()):
            for f in sub.glob("*.txt"):
                docs.append(Document(f"{sub.name}/{f.stem}", tokenize(_read_text(f)), sub.name))
        docs.sort(key=lambda d: d.id)
    else:
        if not path.is_file():
            raise DataError(f"one-doc-per-line corpus must be a file: {path}")
        lines = [tokenize(line) for line in _read_text(path).splitlines()]
        lines = [toks for toks in lines if toks]
        return _nonempty(Corpus.from_token_lists(lines, name=name))

    return _nonempty(Corpus(tuple(docs), name))


def _nonempty(corpus: Corpus) -> Corpus:
    if len(corpus) == 0:
        raise DataError(f"corpus {corpus.name!r} contains zero documents")
    logger.info("loaded corpus %s: %d documents, %d tokens", corpus.name, len(corpus), corpus.n_tokens)
    return corpus


def save_corpus(corpus: Corpus, path, format: str = "dir-of-txt") -> Path:
    """Write ``corpus`` so that :func:`load_corpus` reads it back unchanged.

    The one-doc-per-line format cannot represent documents without tokens;
    those are dropped with a warning.
    """
    path = Path(path)
    if format == "dir-of-txt":
        path.mkdir(parents=True, exist_ok=True)
        for doc in corpus.documents:
            rel = doc.id + ".txt"
            if doc.label is not None and "/" not in doc.id:
                rel = f"{doc.label}/{rel}"
            target = path / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(" ".join(doc.tokens) + "\n", encoding="utf-8")
    elif format == "one-doc-per-line":
        path.parent.mkdir(parents=True, exist_ok=True)
        empty = sum(1 for d in corpus.documents if not d.tokens)
        if empty:
            logger.warning("dropping %d empty documents from one-doc-per-line output", empty)
        with open(path, "w", encoding="utf-8") as fh:
            for doc in corpus.documents:
                if doc.tokens:
                    fh.write(" ".join(doc.tokens) + "\n")
    else:
        raise ValueError(f"unknown corpus format {format!r}; expected one of {FORMATS}")
    return path


def detect_format(path) -> str:
    return "dir-of-txt" if os.path.isdir(path) else "one-doc-per-line"
