import math
import random
import statistics

import pytest

from topicstability import experiment as ex
from topicstability.experiment import (
    ExperimentConfig,
    ResultTable,
    StabilityRecord,
    SummaryRow,
    aggregate,
    emit_outputs,
    format_config,
    parse_config,
    read_records,
    read_summary,
    run_cell,
    run_experiment,
    train_references,
)
from topicstability.synthetic import planted_corpus


@pytest.fixture(scope="module")
def corpus():
    return planted_corpus(n_docs=40, doc_length=30, n_topics=3, words_per_topic=30, seed=3).corpus


def small_config(tmp_path, **kw):
    base = dict(noise_kinds=("deletion",), noise_levels=(0.2,), k_values=(3,), corpus_seeds=(0,),
                lda_seeds=(0,), iterations=5, min_df=1, stopwords="none", output_dir=str(tmp_path / "out"))
    base.update(kw)
    return ExperimentConfig(**base)


@pytest.fixture
def count_training(monkeypatch):
    calls = []
    real = ex.train_lda

    def counting(corpus, vocab, config):
        calls.append((corpus, config.K, config.seed))
        return real(corpus, vocab, config)

    monkeypatch.setattr(ex, "train_lda", counting)
    return calls


def test_defaults():
    c = ExperimentConfig()
    assert c.noise_levels == (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5)
    assert c.k_values == (5, 10, 15, 20, 30)
    assert ExperimentConfig(reference_k=10).k_values == (10, 20, 30, 40, 60)
    assert len(c.corpus_seeds) == len(c.lda_seeds) == 5
    n = len(c.noise_kinds) * len(c.noise_levels) * len(c.k_values) * len(c.corpus_seeds) * len(c.lda_seeds)
    assert n == 3750


@pytest.mark.parametrize("kw", [{"noise_levels": (0.0,)}, {"noise_levels": (0.6,)}, {"corpus_seeds": (1, 1)},
                                {"lda_seeds": (2, 2)}, {"noise_kinds": ("swap",)}, {"depth": 0},
                                {"k_values": (1,)}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        ExperimentConfig(**kw)


def test_single_record(tmp_path, corpus):
    table, records = run_experiment(small_config(tmp_path), corpus=corpus)
    assert len(records) == 1 and len(table) == 1
    r = records[0]
    assert (r.noise_kind, r.noise_level, r.k) == ("deletion", 0.2, 3)
    assert r.achieved_wer == math.floor(0.2 * corpus.n_tokens) / corpus.n_tokens
    assert 0.0 <= r.agreement_score <= 1.0
    assert table.rows[0].n_runs == 1 and table.rows[0].std_dev == 0.0


def test_references_trained_once(tmp_path, corpus, count_training):
    config = small_config(tmp_path, noise_kinds=("deletion", "insertion"), noise_levels=(0.1, 0.3),
                          k_values=(2, 3), corpus_seeds=(0, 1), lda_seeds=(5, 6))
    table, records = run_experiment(config, corpus=corpus)
    assert len(records) == 2 * 2 * 2 * 2 * 2
    assert len(table) == 8 and all(r.n_runs == 4 for r in table.rows)
    clean = [(k, s) for c, k, s in count_training if c is corpus]
    assert sorted(clean) == [(2, 5), (2, 6), (3, 5), (3, 6)]
    assert len(count_training) == 4 + len(records)


def test_clean_vs_clean_scores_one(tmp_path, corpus):
    config = small_config(tmp_path, k_values=(2, 3, 4), lda_seeds=(0, 1))
    refs = train_references(corpus, config)
    records = run_cell(corpus, config, "deletion", 0.0, 0, refs, None, None)
    assert [r.agreement_score for r in records] == [1.0] * 6


def test_cells_are_reused(tmp_path, corpus, count_training):
    config = small_config(tmp_path, noise_levels=(0.1, 0.2))
    first = run_experiment(config, corpus=corpus)[1]
    n = len(count_training)
    second = run_experiment(config, corpus=corpus)[1]
    assert len(count_training) == n and first == second
    # a changed setting must not pick up stale cells
    run_experiment(small_config(tmp_path, noise_levels=(0.1, 0.2), iterations=6), corpus=corpus)
    assert len(count_training) > n


def test_abort_keeps_finished_cells(tmp_path, corpus, monkeypatch):
    real = ex.train_lda
    calls = []

    def flaky(c, vocab, config):
        calls.append(1)
        if len(calls) > 3:
            raise RuntimeError("boom")
        return real(c, vocab, config)

    monkeypatch.setattr(ex, "train_lda", flaky)
    config = small_config(tmp_path, noise_levels=(0.1, 0.2, 0.3))
    with pytest.raises(RuntimeError):
        run_experiment(config, corpus=corpus)
    # one reference and two noisy cells finished before the failure
    assert len(list((tmp_path / "out" / "cells").glob("*.csv"))) == 2


def test_parallel_matches_serial(tmp_path, corpus):
    kw = dict(noise_kinds=("deletion", "metaphone"), noise_levels=(0.1, 0.4), lda_seeds=(0, 1))
    serial = run_experiment(small_config(tmp_path / "a", **kw), corpus=corpus, write=False)[1]
    parallel = run_experiment(small_config(tmp_path / "b", n_jobs=2, **kw), corpus=corpus, write=False)[1]
    assert serial == parallel


def test_aggregate_examples():
    rec = lambda s, cs=0: StabilityRecord("deletion", 0.1, 5, cs, 0, 0.1, s)  # noqa: E731
    t = aggregate([rec(0.5), rec(0.7, 1)])
    assert t.rows[0].mean_score == pytest.approx(0.6) and t.rows[0].n_runs == 2
    t = aggregate([rec(0.3)])
    assert (t.rows[0].mean_score, t.rows[0].std_dev) == (0.3, 0.0)
    with pytest.raises(ValueError):
        aggregate([])
    with pytest.raises(ValueError):
        aggregate([rec(0.5), rec(0.5, 1), StabilityRecord("deletion", 0.2, 5, 0, 0, 0.2, 0.4)])


def test_aggregate_streaming_oracle():
    rnd = random.Random(5)
    records = [StabilityRecord(kind, level, k, cs, ls, level, rnd.random())
               for kind in ("deletion", "metaphone") for level in (0.1, 0.5) for k in (5, 10)
               for cs in range(5) for ls in range(5)]
    rnd.shuffle(records)
    table = aggregate(records)
    assert len(table) == 8
    for row in table.rows:
        n, mean, m2 = 0, 0.0, 0.0
        for r in records:
            if (r.noise_kind, r.noise_level, r.k) == (row.noise_kind, row.noise_level, row.k):
                n += 1
                delta = r.agreement_score - mean
                mean += delta / n
                m2 += delta * (r.agreement_score - mean)
        assert row.n_runs == n == 25
        assert row.mean_score == pytest.approx(mean, abs=1e-12)
        assert row.std_dev == pytest.approx(math.sqrt(m2 / (n - 1)), abs=1e-12)


def test_emit_empty(tmp_path):
    paths = emit_outputs(ResultTable(), [], tmp_path)
    assert [p.read_text() for p in paths] == [
        "noise_kind,noise_level,k,corpus_seed,lda_seed,achieved_wer,agreement_score\n",
        "noise_kind,noise_level,k,mean_score,std_dev,n_runs\n",
    ]


def test_emit_full_grid_and_round_trip(tmp_path):
    rnd = random.Random(0)
    rows = [SummaryRow(kind, level, k, rnd.random(), rnd.random() / 10, 25)
            for kind in ("deletion", "insertion", "metaphone") for level in ExperimentConfig().noise_levels
            for k in (5, 10, 15, 20, 30)]
    table = ResultTable(rows)
    emit_outputs(table, [], tmp_path)
    assert len((tmp_path / "summary.csv").read_text().splitlines()) == 151
    assert read_summary(tmp_path / "summary.csv") == table
    plot = (tmp_path / "plot_insertion.csv").read_text().splitlines()
    assert plot[0] == "noise_level,k=5,k=10,k=15,k=20,k=30" and len(plot) == 11
    assert table.lookup("insertion", 0.05, 10).mean_score == float(plot[1].split(",")[2])


def test_emit_unwritable(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ValueError, match="file"):
        emit_outputs(ResultTable(), [], blocker / "sub")


def test_records_round_trip(tmp_path, corpus):
    table, records = run_experiment(small_config(tmp_path, lda_seeds=(0, 1)), corpus=corpus)
    assert read_records(tmp_path / "out" / "records.csv") == records
    assert statistics.fmean(r.agreement_score for r in records) == table.rows[0].mean_score


def test_parse_config():
    text = """
    # sweep on a small corpus
    corpus_path = data/bbc
    noise_kinds = deletion, metaphone
    noise_levels = 0.1,0.2
    reference_k = 4
    lda_seeds = 7
    beta = 0.1   # smoother topics
    """
    c = parse_config(text, output_dir="elsewhere")
    assert c.noise_kinds == ("deletion", "metaphone") and c.noise_levels == (0.1, 0.2)
    assert c.k_values == (4, 8, 12, 16, 24) and c.lda_seeds == (7,) and c.beta == 0.1
    assert c.output_dir == "elsewhere" and c.corpus_path == "data/bbc"
    assert parse_config(format_config(c)) == c


@pytest.mark.parametrize("text", ["bogus = 1", "noise_kinds deletion", "iterations = many"])
def test_parse_config_errors(text):
    with pytest.raises(ValueError):
        parse_config(text)


def test_fingerprint_ignores_output_location():
    a = ExperimentConfig(output_dir="a", n_jobs=1)
    assert a.fingerprint() == ExperimentConfig(output_dir="b", n_jobs=4).fingerprint()
    assert a.fingerprint() != ExperimentConfig(iterations=10).fingerprint()


def test_noise_seed_is_keyed():
    seeds = {ex.noise_seed(cs, kind, lvl) for cs in range(5) for kind in ex.NOISE_KINDS for lvl in (0.05, 0.1)}
    assert len(seeds) == 30
    assert ex.noise_seed(1, "deletion", 0.1) == ex.noise_seed(1, "deletion", 0.1)


def test_shipped_config_parses():
    from pathlib import Path
    c = ex.load_config(Path(__file__).parents[1] / "configs" / "synthetic.cfg")
    assert c.stopwords == "none" and c.k_values == (5, 10, 15, 20, 30)
    assert c.fingerprint() == ExperimentConfig(stopwords="none", output_dir="x").fingerprint()
