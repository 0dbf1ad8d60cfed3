"""Command-line interface.

Subcommands: preprocess, freq-report, train, predict, evaluate,
experiment run / experiment list. All failures exit nonzero with a
stage-tagged message on stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiment as exp
from . import features, forest, svm
from .corpus import ColumnMap, Label, Language, Split, load_dataset
from .errors import CheckworthyError
from .evaluation import (
    Prediction,
    evaluate,
    format_report,
    read_predictions,
    write_predictions,
)
from .preprocess import PreprocessConfig, clean


def _add_column_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--id-col", default="tweet_id")
    parser.add_argument("--text-col", default="tweet_text")
    parser.add_argument("--label-col", default="class_label")
    parser.add_argument("--greedy-text", action="store_true",
                        help="treat the text column as the line remainder")
    parser.add_argument("--label-map", default=None, metavar="RAW:MAPPED,...",
                        help="rewrite raw label strings, e.g. 1:Yes,0:No")


def _add_column_overrides(parser: argparse.ArgumentParser) -> None:
    """Column flags that override the config only when given."""
    parser.add_argument("--id-col", default=None)
    parser.add_argument("--text-col", default=None)
    parser.add_argument("--label-col", default=None)
    parser.add_argument("--label-map", default=None, metavar="RAW:MAPPED,...")


def _apply_column_overrides(config, args):
    import dataclasses

    cols = config.columns
    changes = {}
    if args.id_col:
        changes["id_col"] = args.id_col
    if args.text_col:
        changes["text_col"] = args.text_col
    if args.label_col:
        changes["label_col"] = args.label_col
    if args.label_map:
        changes["label_map"] = dict(
            item.split(":", 1) for item in args.label_map.split(",")
        )
    if not changes:
        return config
    return dataclasses.replace(config, columns=dataclasses.replace(cols, **changes))


def _columns_from_args(args) -> ColumnMap:
    label_map = None
    if args.label_map:
        label_map = dict(item.split(":", 1) for item in args.label_map.split(","))
    return ColumnMap(
        id_col=args.id_col,
        text_col=args.text_col,
        label_col=args.label_col,
        greedy_text=args.greedy_text,
        label_map=label_map,
    )


def _preprocess_config(args) -> PreprocessConfig:
    overrides = {}
    if args.stopwords:
        from .preprocess import load_stopwords

        overrides["stopword_list"] = load_stopwords(Path(args.stopwords))
    return PreprocessConfig.for_language(Language(args.lang), **overrides)


def cmd_preprocess(args) -> int:
    columns = _columns_from_args(args)
    pre = _preprocess_config(args)
    in_path, out_path = Path(args.infile), Path(args.outfile)
    lines = in_path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise CheckworthyError("preprocess: input file is empty")
    header = lines[0].split("\t")
    if columns.text_col not in header:
        raise CheckworthyError(
            f"preprocess: missing column {columns.text_col!r} in {in_path}"
        )
    text_idx = header.index(columns.text_col)
    with out_path.open("w", encoding="utf-8", newline="") as fh:
        fh.write("\t".join(header + ["clean_text"]) + "\n")
        for line in lines[1:]:
            if not line:
                continue
            fields = line.split("\t")
            tokens = clean(fields[text_idx], pre)
            fh.write("\t".join(fields + [" ".join(tokens)]) + "\n")
    print(f"wrote {out_path}")
    return 0


def cmd_freq_report(args) -> int:
    import dataclasses

    # Frequencies are counted over every row; the label column is irrelevant
    # and may hold anything, so it is not parsed at all.
    columns = dataclasses.replace(_columns_from_args(args), label_col="")
    pre = _preprocess_config(args)
    dataset = load_dataset(args.infile, Language(args.lang), Split.TEST, columns)
    ranked = exp.freq_report(dataset, pre, args.top_k)
    for token, count in ranked:
        print(f"{token}\t{count}")
    if args.out:
        with Path(args.out).open("w", encoding="utf-8", newline="") as fh:
            fh.write("token\tcount\n")
            for token, count in ranked:
                fh.write(f"{token}\t{count}\n")
    if args.figure:
        from . import figures

        figures.render_frequency_bars(
            ranked, args.figure, title=f"top tokens ({args.lang})"
        )
    return 0


def _load_experiment_config(args) -> exp.ExperimentConfig:
    name_or_path = args.config
    if Path(name_or_path).exists():
        config = exp.load_config(name_or_path)
    else:
        config = exp.load_bundled_config(name_or_path)
    config = _apply_column_overrides(config, args)
    return exp.with_paths(
        config,
        train=getattr(args, "train", None),
        dev=getattr(args, "dev", None),
        test=getattr(args, "test", None),
        out_dir=getattr(args, "out_dir", None),
    )


def cmd_train(args) -> int:
    config = _load_experiment_config(args)
    paths = config.paths
    if paths.train is None or paths.dev is None:
        raise CheckworthyError("train: --train and --dev files are required")
    from .corpus import merge

    train_ds = load_dataset(paths.train, config.language, Split.TRAIN, config.columns)
    dev_ds = load_dataset(paths.dev, config.language, Split.DEV, config.columns)
    merged = merge(train_ds, dev_ds)
    pre = config.preprocess_config()
    docs = [clean(row.text, pre) for row in merged.rows]
    tfidf = features.fit(docs, config.ngram_max, config.max_features)
    vectors = features.transform_corpus(tfidf, docs)
    labels = [row.label.value for row in merged.rows]
    from . import balance as balance_mod

    vectors, labels = balance_mod.smote(vectors, labels, config.balance)
    if config.model == "svm":
        ys = [1 if lab == Label.YES.value else -1 for lab in labels]
        model = svm.train(vectors, ys, config.svm_config)
    else:
        model = forest.train(
            vectors, labels, config.forest_config,
            dim=tfidf.size, positive_label=Label.YES.value,
        )
    exp.save_bundle(args.model_out, config, tfidf, model)
    print(f"wrote model bundle to {args.model_out}")
    return 0


def cmd_predict(args) -> int:
    config, tfidf, model = exp.load_bundle(args.model)
    test_ds = load_dataset(args.infile, config.language, Split.TEST, config.columns)
    pre = config.preprocess_config()
    predictions = []
    for row in test_ds.rows:
        vec = features.transform(tfidf, clean(row.text, pre))
        if config.model == "svm":
            value = svm.decision_value(model, vec)
            label = Label.YES if value > 0.0 else Label.NO
            score = exp._logistic(value)
        else:
            score = forest.vote_fraction(model, vec)
            label = Label.YES if score > 0.5 else Label.NO
        predictions.append(Prediction(row.id, label, score))
    write_predictions(predictions, args.out)
    print(f"wrote {len(predictions)} predictions to {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    columns = _columns_from_args(args)
    gold = load_dataset(args.gold, Language(args.lang), Split.TEST, columns)
    predictions = read_predictions(args.pred)
    report = evaluate(gold, predictions)
    text = format_report(report, model_name=args.model_name)
    print(text, end="")
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.txt").write_text(text, encoding="utf-8")
        from . import figures

        figures.render_confusion_matrix(report, out_dir / "confusion_matrix.png",
                                        title=args.model_name)
        figures.render_class_metrics(report, out_dir / "class_metrics.png",
                                     title=args.model_name)
        print(f"report and figures written to {out_dir}", file=sys.stderr)
    return 0


def cmd_experiment_run(args) -> int:
    config = _load_experiment_config(args)
    result = exp.run(config)
    print(f"predictions: {result.predictions_path}")
    print(f"manifest:    {result.manifest_path}")
    if result.report is not None:
        print(f"report:      {result.report_path}")
        print(format_report(result.report, model_name=config.model.upper()), end="")
    return 0


def cmd_experiment_list(args) -> int:
    for name in sorted(exp.bundled_recipes()):
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="checkworthy",
        description="Check-worthiness classification toolkit for tweets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="clean tweet text in a TSV file")
    p.add_argument("--lang", required=True, choices=[l.value for l in Language])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--stopwords", default=None, help="custom stopword file")
    _add_column_options(p)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("freq-report", help="rank the most frequent cleaned tokens")
    p.add_argument("--lang", required=True, choices=[l.value for l in Language])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--top-k", type=int, default=30)
    p.add_argument("--out", default=None, help="write the ranking as TSV")
    p.add_argument("--figure", default=None, help="render a bar chart PNG")
    p.add_argument("--stopwords", default=None)
    _add_column_options(p)
    p.set_defaults(func=cmd_freq_report)

    p = sub.add_parser("train", help="train a classifier bundle")
    p.add_argument("config", help="config file path or bundled recipe name")
    p.add_argument("--train", default=None)
    p.add_argument("--dev", default=None)
    p.add_argument("--model-out", required=True)
    _add_column_overrides(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict with a trained bundle")
    p.add_argument("--model", required=True, help="bundle directory")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score a prediction file against gold")
    p.add_argument("--lang", default="english", choices=[l.value for l in Language])
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--out-dir", default=None,
                   help="also write report.txt and figures here")
    p.add_argument("--model-name", default="model")
    _add_column_options(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("experiment", help="run or list end-to-end experiments")
    esub = p.add_subparsers(dest="exp_command", required=True)
    pr = esub.add_parser("run", help="run a recipe or config file")
    pr.add_argument("config", help="config file path or bundled recipe name")
    pr.add_argument("--train", default=None)
    pr.add_argument("--dev", default=None)
    pr.add_argument("--test", default=None)
    pr.add_argument("--out-dir", default=None)
    _add_column_overrides(pr)
    pr.set_defaults(func=cmd_experiment_run)
    pl = esub.add_parser("list", help="list bundled recipes")
    pl.set_defaults(func=cmd_experiment_list)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CheckworthyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
