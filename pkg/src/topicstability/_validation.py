"""Input validation helpers shared by the estimators and functional API."""
from __future__ import annotations

import numbers

import numpy as np

MAX_NOISE_RATE = 0.5


class DataError(ValueError):
    """Raised when input data is unusable (empty corpus, bad file, ...)."""


class DimensionMismatchError(ValueError):
    """Raised when two topic models or term-list collections differ in size."""


def check_rate(rate, *, name="rate", upper=MAX_NOISE_RATE) -> float:
    if isinstance(rate, bool) or not isinstance(rate, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(rate).__name__}")
    rate = float(rate)
    if not (0.0 <= rate <= upper):
        raise ValueError(f"{name} must lie in [0, {upper}], got {rate}")
    return rate


def check_positive_int(value, *, name, minimum=1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_positive_float(value, *, name) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    if not value > 0:
        raise ValueError(f"{name} must be > 0, got {value}")
    return float(value)


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return int(seed)


def make_rng(seed) -> np.random.Generator:
    """Return a PCG64 generator for ``seed``.

    PCG64 is the fixed, documented stream for every random draw in the
    package, so outputs reproduce across platforms and numpy versions that
    keep the PCG64 contract.
    """
    return np.random.Generator(np.random.PCG64(check_seed(seed)))


def check_corpus(corpus):
    from .corpus import Corpus

    if not isinstance(corpus, Corpus):
        raise TypeError(f"expected a Corpus, got {type(corpus).__name__}")
    return corpus
