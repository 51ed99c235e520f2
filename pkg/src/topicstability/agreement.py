"""Ranked-list similarity and model-level topic agreement."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._validation import DimensionMismatchError
from .lda import DEFAULT_DEPTH, ranked_lists

logger = logging.getLogger(__name__)


def jaccard(a, b) -> float:
    a, b = set(a), set(b)
    union = len(a | b)
    if union == 0:
        return 1.0
    return len(a & b) / union


def average_jaccard(a: Sequence[str], b: Sequence[str]) -> float:
    """Mean Jaccard index over all top-t prefixes, t = 1..d.

    Lists of unequal length are truncated to the shorter one. Prefix sets
    are grown incrementally so the cost is O(d) set operations.
    """
    d = min(len(a), len(b))
    if d == 0:
        raise ValueError("average_jaccard needs two non-empty ranked lists")
    a, b = a[:d], b[:d]
    if len(set(a)) != d or len(set(b)) != d:
        raise ValueError("ranked lists must not contain duplicate terms")
    seen_a, seen_b = set(), set()
    inter = 0
    total = 0.0
    for t in range(d):
        x, y = a[t], b[t]
        if x in seen_b:
            inter += 1
        seen_a.add(x)
        if y in seen_a:
            inter += 1
        seen_b.add(y)
        # when x == y it was counted once above via seen_a
        total += inter / (len(seen_a) + len(seen_b) - inter)
    return total / d


@dataclass(frozen=True)
class SimilarityMatrix:
    values: np.ndarray
    row_model: str = ""
    col_model: str = ""
    truncated: bool = False

    @property
    def k(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class AgreementResult:
    score: float
    matching: tuple[int, ...]
    per_pair: tuple[float, ...]
    truncated: bool = False


def similarity_matrix(s1, s2, m: int = DEFAULT_DEPTH, row_model="", col_model="") -> SimilarityMatrix:
    """``values[i, j] = average_jaccard(s1[i], s2[j])`` over top-``m`` lists."""
    l1, l2 = ranked_lists(s1, m), ranked_lists(s2, m)
    if len(l1) != len(l2):
        raise DimensionMismatchError(f"topic counts differ: {len(l1)} vs {len(l2)}")
    truncated = any(len(t) < m for t in l1 + l2)
    k = len(l1)
    values = np.empty((k, k))
    for i in range(k):
        for j in range(k):
            values[i, j] = average_jaccard(l1[i], l2[j])
    return SimilarityMatrix(values, row_model, col_model, truncated)


def hungarian_match(matrix) -> AgreementResult:
    """Bijection maximizing total similarity; score is the mean matched value."""
    sm = matrix if isinstance(matrix, SimilarityMatrix) else SimilarityMatrix(np.asarray(matrix, float))
    values = sm.values
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise DimensionMismatchError(f"similarity matrix must be square, got {values.shape}")
    rows, cols = linear_sum_assignment(1.0 - values)
    matching = tuple(int(c) for c in cols[np.argsort(rows)])
    per_pair = tuple(float(values[i, j]) for i, j in enumerate(matching))
    return AgreementResult(float(np.mean(per_pair)), matching, per_pair, sm.truncated)


def agreement(m1, m2, m: int = DEFAULT_DEPTH) -> AgreementResult:
    """Topic agreement of two models (or two collections of ranked lists)."""
    result = hungarian_match(similarity_matrix(m1, m2, m))
    if result.truncated:
        logger.info("agreement: some topics had fewer than %d nonzero terms; lists truncated", m)
    return result


AGREEMENT_FIELDS = ("model1", "model2", "k", "depth", "score")


def write_agreement(result: AgreementResult, path, model1: str, model2: str, depth: int,
                    detail_path=None) -> None:
    """Append one CSV row (with header if new); optionally write matched pairs."""
    path = Path(path)
    new = not path.exists()
    with open(path, "a", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if new:
            w.writerow(AGREEMENT_FIELDS)
        w.writerow([model1, model2, len(result.matching), depth, f"{result.score:.6f}"])
    if detail_path is not None:
        with open(detail_path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("topic1", "topic2", "average_jaccard"))
            for i, (j, s) in enumerate(zip(result.matching, result.per_pair)):
                w.writerow((i, j, f"{s:.6f}"))
