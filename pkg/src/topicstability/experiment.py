"""Noise x K x seed sweeps scoring noisy models against clean references."""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import lda as _lda
from ._validation import DataError, check_positive_int, check_rate
from .agreement import agreement
from .corpus import Corpus, build_vocabulary, detect_format, load_corpus
from .lda import LDAConfig
from .noise import NOISE_KINDS, NoiseSpec, inject
from .phonetics import (
    FrequencyList,
    MetaphoneIndex,
    build_metaphone_index,
    bundled_frequency_list,
    load_frequency_list,
)

logger = logging.getLogger(__name__)

# indirection so tests can count training calls
train_lda = _lda.train_lda

DEFAULT_LEVELS = tuple(round(0.05 * i, 2) for i in range(1, 11))
DEFAULT_SEEDS = (0, 1, 2, 3, 4)
K_MULTIPLIERS = (1, 2, 3, 4, 6)
SYNTHETIC_CORPUS = "synthetic"

RECORD_FIELDS = ("noise_kind", "noise_level", "k", "corpus_seed", "lda_seed",
                 "achieved_wer", "agreement_score")
SUMMARY_FIELDS = ("noise_kind", "noise_level", "k", "mean_score", "std_dev", "n_runs")


@dataclass(frozen=True)
class ExperimentConfig:
    corpus_path: str = SYNTHETIC_CORPUS
    corpus_format: str = "auto"
    noise_kinds: tuple[str, ...] = NOISE_KINDS
    noise_levels: tuple[float, ...] = DEFAULT_LEVELS
    reference_k: int = 5
    k_values: tuple[int, ...] = ()
    corpus_seeds: tuple[int, ...] = DEFAULT_SEEDS
    lda_seeds: tuple[int, ...] = DEFAULT_SEEDS
    alpha_sum: float = 5.0
    beta: float = 0.01
    iterations: int = 1000
    depth: int = 25
    min_df: int = 3
    stopwords: str = "english"
    frequency_list_path: str = ""
    output_dir: str = "results"
    n_jobs: int = 1

    def __post_init__(self):
        set_ = lambda name, value: object.__setattr__(self, name, value)  # noqa: E731
        set_("noise_kinds", tuple(self.noise_kinds))
        set_("noise_levels", tuple(float(x) for x in self.noise_levels))
        set_("corpus_seeds", tuple(int(x) for x in self.corpus_seeds))
        set_("lda_seeds", tuple(int(x) for x in self.lda_seeds))
        if not self.k_values:
            set_("k_values", tuple(m * self.reference_k for m in K_MULTIPLIERS))
        set_("k_values", tuple(int(k) for k in self.k_values))
        for kind in self.noise_kinds:
            if kind not in NOISE_KINDS:
                raise ValueError(f"unknown noise kind {kind!r}")
        for level in self.noise_levels:
            check_rate(level, name="noise level")
            if level <= 0:
                raise ValueError("noise levels must be in (0, 0.5]")
        for name in ("corpus_seeds", "lda_seeds"):
            seeds = getattr(self, name)
            if len(set(seeds)) != len(seeds):
                raise ValueError(f"{name} must be distinct")
        check_positive_int(self.depth, name="depth")
        check_positive_int(self.n_jobs, name="n_jobs")
        self.lda_template(self.k_values[0], self.lda_seeds[0] if self.lda_seeds else 0)

    def lda_template(self, k: int, seed: int) -> LDAConfig:
        return LDAConfig(K=k, alpha_sum=self.alpha_sum, beta=self.beta,
                         iterations=self.iterations, seed=seed)

    def fingerprint(self) -> str:
        """Hash of everything that affects results (not output_dir / n_jobs)."""
        d = asdict(self)
        d.pop("output_dir")
        d.pop("n_jobs")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:12]


@dataclass(frozen=True)
class StabilityRecord:
    noise_kind: str
    noise_level: float
    k: int
    corpus_seed: int
    lda_seed: int
    achieved_wer: float
    agreement_score: float


@dataclass(frozen=True)
class SummaryRow:
    noise_kind: str
    noise_level: float
    k: int
    mean_score: float
    std_dev: float
    n_runs: int


@dataclass
class ResultTable:
    rows: list[SummaryRow] = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def lookup(self, kind, level, k) -> SummaryRow:
        for r in self.rows:
            if r.noise_kind == kind and math.isclose(r.noise_level, level) and r.k == k:
                return r
        raise KeyError((kind, level, k))


# -- config file -----------------------------------------------------------------

_LIST_FIELDS = {"noise_kinds": str, "noise_levels": float, "k_values": int,
                "corpus_seeds": int, "lda_seeds": int}


def parse_config(text: str, **overrides) -> ExperimentConfig:
    """Parse ``key = value`` lines; list values are comma separated.

    Blank lines and ``#`` comments are ignored; unknown keys are rejected.
    """
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        if key not in types:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, value)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**values)


def _coerce(key, value):
    if key in _LIST_FIELDS:
        conv = _LIST_FIELDS[key]
        return tuple(conv(v.strip()) for v in value.split(",") if v.strip())
    if key in ("reference_k", "iterations", "depth", "min_df", "n_jobs"):
        return int(value)
    if key in ("alpha_sum", "beta"):
        return float(value)
    return value


def load_config(path, **overrides) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), **overrides)


def format_config(config: ExperimentConfig) -> str:
    lines = []
    for f in fields(ExperimentConfig):
        v = getattr(config, f.name)
        if isinstance(v, tuple):
            v = ", ".join(str(x) for x in v)
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


# -- sweep ---------------------------------------------------------------------------


def noise_seed(corpus_seed: int, kind: str, level: float) -> int:
    """Seed of the noisy corpus for one (kind, level, corpus_seed) cell."""
    key = [corpus_seed, NOISE_KINDS.index(kind), round(level * 1_000_000)]
    return int(np.random.SeedSequence(key).generate_state(1, dtype=np.uint32)[0])


def load_experiment_corpus(config: ExperimentConfig) -> Corpus:
    if config.corpus_path == SYNTHETIC_CORPUS:
        from .synthetic import planted_corpus
        return planted_corpus().corpus
    fmt = config.corpus_format
    if fmt == "auto":
        fmt = detect_format(config.corpus_path)
    return load_corpus(config.corpus_path, fmt)


def load_noise_resources(config: ExperimentConfig):
    if not set(config.noise_kinds) & {"insertion", "metaphone"}:
        return None, None
    if config.frequency_list_path:
        freq = load_frequency_list(config.frequency_list_path)
    else:
        freq = bundled_frequency_list()
    index = build_metaphone_index(freq) if "metaphone" in config.noise_kinds else None
    return freq, index


def _vocab(corpus, config):
    return build_vocabulary(corpus, config.min_df, config.stopwords)


def train_references(corpus: Corpus, config: ExperimentConfig) -> dict:
    """Clean-corpus ranked lists keyed by (k, lda_seed); one training each."""
    vocab = _vocab(corpus, config)
    refs = {}
    for k in config.k_values:
        for s in config.lda_seeds:
            model = train_lda(corpus, vocab, config.lda_template(k, s))
            refs[(k, s)] = model.ranked_lists(config.depth)
    return refs


def run_cell(corpus: Corpus, config: ExperimentConfig, kind: str, level: float, corpus_seed: int,
             refs: dict, freq: FrequencyList | None, index: MetaphoneIndex | None) -> list[StabilityRecord]:
    """Corrupt once, then train and score every (k, lda_seed) on the noisy corpus."""
    spec = NoiseSpec(kind, level, noise_seed(corpus_seed, kind, level))
    noisy, report = inject(corpus, spec, freq, index)
    vocab = _vocab(noisy, config)
    out = []
    for k in config.k_values:
        for s in config.lda_seeds:
            model = train_lda(noisy, vocab, config.lda_template(k, s))
            score = agreement(refs[(k, s)], model, config.depth).score
            out.append(StabilityRecord(kind, level, k, corpus_seed, s, report.achieved_wer, score))
    return out


def _cell_worker(args):
    return run_cell(*args)


def _cell_path(cells_dir: Path, fp: str, kind, level, corpus_seed) -> Path:
    return cells_dir / f"{fp}_{kind}_{level:g}_{corpus_seed}.csv"


def run_experiment(config: ExperimentConfig, corpus: Corpus | None = None, write=True) -> tuple[ResultTable, list[StabilityRecord]]:
    """Run the full sweep; returns the aggregated table and per-run records.

    With ``write`` set, finished cells are saved under ``output_dir/cells``
    as they complete (and reused by later runs with an identical config),
    then merged into ``records.csv``, ``summary.csv`` and plot-data files.
    """
    corpus = corpus if corpus is not None else load_experiment_corpus(config)
    freq, index = load_noise_resources(config)
    out_dir = Path(config.output_dir)
    cells_dir = out_dir / "cells"
    fp = config.fingerprint()

    cells = [(kind, level, cs) for kind in config.noise_kinds
             for level in config.noise_levels for cs in config.corpus_seeds]
    done: dict = {}
    if write:
        cells_dir.mkdir(parents=True, exist_ok=True)
        for cell in cells:
            p = _cell_path(cells_dir, fp, *cell)
            if p.exists():
                done[cell] = read_records(p)
    todo = [c for c in cells if c not in done]
    logger.info("sweep %s: %d cells (%d cached)", fp, len(cells), len(done))

    if todo:
        refs = train_references(corpus, config)
        jobs = [(corpus, config, kind, level, cs, refs, freq, index) for kind, level, cs in todo]
        try:
            if config.n_jobs > 1:
                with ProcessPoolExecutor(config.n_jobs) as pool:
                    for cell, recs in zip(todo, pool.map(_cell_worker, jobs)):
                        _finish_cell(done, cell, recs, write, cells_dir, fp)
            else:
                for cell, job in zip(todo, jobs):
                    _finish_cell(done, cell, _cell_worker(job), write, cells_dir, fp)
        except Exception:
            logger.error("sweep aborted after %d of %d cells; finished cells kept in %s",
                         len(done), len(cells), cells_dir)
            raise

    records = [r for cell in cells for r in done[cell]]
    records.sort(key=record_key)
    table = aggregate(records)
    if write:
        emit_outputs(table, records, out_dir)
    return table, records


def _finish_cell(done, cell, recs, write, cells_dir, fp):
    done[cell] = recs
    if write:
        write_records(recs, _cell_path(cells_dir, fp, *cell))
    logger.info("cell %s level=%g corpus_seed=%d done", *cell)


def record_key(r: StabilityRecord):
    return (NOISE_KINDS.index(r.noise_kind), r.noise_level, r.k, r.corpus_seed, r.lda_seed)


def aggregate(records: Sequence[StabilityRecord]) -> ResultTable:
    """Mean and sample standard deviation per (kind, level, k)."""
    if not records:
        raise ValueError("cannot aggregate an empty record set")
    groups: dict = {}
    for r in records:
        groups.setdefault((r.noise_kind, r.noise_level, r.k), []).append(r.agreement_score)
    sizes = {len(v) for v in groups.values()}
    if len(sizes) != 1:
        raise ValueError(f"groups have unequal run counts: {sorted(sizes)}")
    rows = []
    for key in sorted(groups, key=lambda g: (NOISE_KINDS.index(g[0]) if g[0] in NOISE_KINDS else -1, g[1], g[2])):
        scores = groups[key]
        std = statistics.stdev(scores) if len(scores) > 1 else 0.0
        rows.append(SummaryRow(*key, statistics.fmean(scores), std, len(scores)))
    return ResultTable(rows)


# -- files -------------------------------------------------------------------------


def _fmt(v):
    return repr(v) if isinstance(v, float) else str(v)


def write_records(records: Iterable[StabilityRecord], path) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_FIELDS)
        for r in records:
            w.writerow([_fmt(getattr(r, f)) for f in RECORD_FIELDS])
    return path


def read_records(path) -> list[StabilityRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [
            StabilityRecord(row["noise_kind"], float(row["noise_level"]), int(row["k"]),
                            int(row["corpus_seed"]), int(row["lda_seed"]),
                            float(row["achieved_wer"]), float(row["agreement_score"]))
            for row in csv.DictReader(fh)
        ]


def write_summary(table: ResultTable, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_FIELDS)
        for r in table.rows:
            w.writerow([_fmt(getattr(r, f)) for f in SUMMARY_FIELDS])
    return path


def read_summary(path) -> ResultTable:
    with open(path, newline="", encoding="utf-8") as fh:
        return ResultTable([
            SummaryRow(row["noise_kind"], float(row["noise_level"]), int(row["k"]),
                       float(row["mean_score"]), float(row["std_dev"]), int(row["n_runs"]))
            for row in csv.DictReader(fh)
        ])


def emit_outputs(table: ResultTable, records: Sequence[StabilityRecord], output_dir) -> list[Path]:
    """Write records.csv, summary.csv and one ``plot_<kind>.csv`` per noise kind.

    Plot files have a ``noise_level`` column followed by one ``k=<K>`` column
    of mean scores per topic count.
    """
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        written = [write_records(records, out / "records.csv"), write_summary(table, out / "summary.csv")]
        kinds = sorted({r.noise_kind for r in table.rows}, key=NOISE_KINDS.index)
        for kind in kinds:
            rows = [r for r in table.rows if r.noise_kind == kind]
            ks = sorted({r.k for r in rows})
            levels = sorted({r.noise_level for r in rows})
            means = {(r.noise_level, r.k): r.mean_score for r in rows}
            p = out / f"plot_{kind}.csv"
            with open(p, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["noise_level"] + [f"k={k}" for k in ks])
                for level in levels:
                    w.writerow([_fmt(level)] + [_fmt(means[(level, k)]) if (level, k) in means else ""
                                                for k in ks])
            written.append(p)
    except OSError as exc:
        raise DataError(f"cannot write outputs to {out}: {exc}") from exc
    return written
