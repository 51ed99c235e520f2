"""Command line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields
from pathlib import Path

from . import __version__
from ._validation import DataError, DimensionMismatchError
from .agreement import agreement, write_agreement
from .corpus import FORMATS, build_vocabulary, detect_format, load_corpus, save_corpus
from .experiment import (
    SYNTHETIC_CORPUS,
    ExperimentConfig,
    _coerce,
    aggregate,
    emit_outputs,
    load_config,
    read_records,
    run_experiment,
)
from .lda import LDAConfig, load_model, save_model, train_lda
from .noise import NOISE_KINDS, NoiseSpec, inject
from .phonetics import build_metaphone_index, bundled_frequency_list, load_frequency_list

logger = logging.getLogger("topicstability")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read_corpus(path, fmt):
    if path == SYNTHETIC_CORPUS:
        from .synthetic import planted_corpus
        return planted_corpus().corpus
    return load_corpus(path, detect_format(path) if fmt == "auto" else fmt)


def _freq_list(path):
    return load_frequency_list(path) if path else bundled_frequency_list()


def cmd_ingest(args):
    corpus = _read_corpus(args.corpus, args.format)
    vocab = build_vocabulary(corpus, args.min_df, args.stopwords)
    if args.out:
        save_corpus(corpus, args.out, args.out_format)
    print(f"documents={len(corpus)} tokens={corpus.n_tokens} vocabulary={len(vocab)}")


def cmd_corrupt(args):
    corpus = _read_corpus(args.corpus, args.format)
    spec = NoiseSpec(args.kind, args.rate, args.seed)
    freq = _freq_list(args.frequency_list) if args.kind != "deletion" else None
    index = build_metaphone_index(freq) if args.kind == "metaphone" else None
    noisy, report = inject(corpus, spec, freq, index)
    save_corpus(noisy, args.out, args.out_format)
    if args.report:
        Path(args.report).write_text(report.to_csv(), encoding="utf-8")
    sys.stdout.write(report.to_csv())


def cmd_train(args):
    corpus = _read_corpus(args.corpus, args.format)
    vocab = build_vocabulary(corpus, args.min_df, args.stopwords)
    config = LDAConfig(K=args.k, alpha_sum=args.alpha_sum, beta=args.beta,
                       iterations=args.iterations, seed=args.seed)
    model = train_lda(corpus, vocab, config)
    save_model(model, args.out, args.depth)
    print(f"wrote {args.out}")


def cmd_agree(args):
    m1, m2 = load_model(args.model1), load_model(args.model2)
    result = agreement(m1, m2, args.depth)
    if args.out:
        write_agreement(result, args.out, args.model1, args.model2, args.depth, args.detail)
    flag = " (truncated lists)" if result.truncated else ""
    print(f"{args.model1},{args.model2},{len(result.matching)},{args.depth},{result.score:.6f}{flag}")


def _config_overrides(args):
    out = {}
    for f in fields(ExperimentConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            out[f.name] = _coerce(f.name, v) if isinstance(v, str) else v
    if args.seed is not None:
        out.setdefault("corpus_seeds", (args.seed,))
        out.setdefault("lda_seeds", (args.seed,))
    return out


def cmd_sweep(args):
    overrides = _config_overrides(args)
    config = load_config(args.config, **overrides) if args.config else ExperimentConfig(**overrides)
    table, records = run_experiment(config)
    print(f"{len(records)} records, {len(table)} summary rows -> {config.output_dir}")


def cmd_report(args):
    records = read_records(args.records)
    table = aggregate(records)
    out = args.out or str(Path(args.records).parent)
    for p in emit_outputs(table, records, out):
        print(p)


def build_parser():
    p = _Parser(prog="topicstability", description="Topic model stability under simulated transcription noise.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def corpus_args(sp):
        sp.add_argument("corpus", help=f"corpus path, or '{SYNTHETIC_CORPUS}' for the bundled planted corpus")
        sp.add_argument("--format", default="auto", choices=("auto",) + FORMATS)

    def vocab_args(sp):
        sp.add_argument("--min-df", type=int, default=3)
        sp.add_argument("--stopwords", default="english", help="'english', 'none' or a file path")

    sp = sub.add_parser("ingest", help="load a corpus and write its canonical tokenized form")
    corpus_args(sp)
    vocab_args(sp)
    sp.add_argument("--out")
    sp.add_argument("--out-format", default="one-doc-per-line", choices=FORMATS)
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("corrupt", help="apply one noise channel at a given rate")
    corpus_args(sp)
    sp.add_argument("--kind", required=True, choices=NOISE_KINDS)
    sp.add_argument("--rate", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--frequency-list")
    sp.add_argument("--out", required=True)
    sp.add_argument("--out-format", default="one-doc-per-line", choices=FORMATS)
    sp.add_argument("--report", help="also write the noise report CSV here")
    sp.set_defaults(func=cmd_corrupt)

    sp = sub.add_parser("train", help="train one LDA model and export its top terms")
    corpus_args(sp)
    vocab_args(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--alpha-sum", type=float, default=5.0)
    sp.add_argument("--beta", type=float, default=0.01)
    sp.add_argument("--iterations", type=int, default=1000)
    sp.add_argument("--depth", type=int, default=25)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("agree", help="agreement score of two exported models")
    sp.add_argument("model1")
    sp.add_argument("model2")
    sp.add_argument("--depth", type=int, default=25)
    sp.add_argument("--out", help="append a CSV row here")
    sp.add_argument("--detail", help="write matched topic pairs here")
    sp.set_defaults(func=cmd_agree)

    sp = sub.add_parser("sweep", help="run a full noise x K x seed experiment")
    sp.add_argument("--config", help="key = value config file")
    for f in fields(ExperimentConfig):
        sp.add_argument("--" + f.name.replace("_", "-"), dest=f.name, default=None)
    sp.add_argument("--seed", type=int, help="use a single corpus and LDA seed")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("report", help="aggregate records.csv into summary and plot data")
    sp.add_argument("records")
    sp.add_argument("--out", help="output directory (default: next to records)")
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ValueError, TypeError, DimensionMismatchError) as exc:
        if isinstance(exc, (DataError, DimensionMismatchError)):
            print(f"data error: {exc}", file=sys.stderr)
            return EXIT_DATA
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, UnicodeDecodeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception:
        logger.exception("internal error")
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
