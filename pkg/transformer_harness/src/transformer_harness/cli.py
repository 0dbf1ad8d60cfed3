"""CLI: `transformer-harness finetune` and `transformer-harness predict`."""

from __future__ import annotations

import argparse
import sys

from .config import bundled_recipes, resolve_config, with_overrides
from .data import read_dataset
from .errors import HarnessError
from .inference import load_checkpoint, predict_file
from .training import finetune


def cmd_finetune(args) -> int:
    config = resolve_config(args.config)
    config = with_overrides(
        config,
        epochs=args.epochs,
        learning_rate=args.lr,
        seed=args.seed,
        toy_scale=args.toy_scale,
        batch_size=args.batch_size,
        text_col=args.text_col,
        preprocessed=True if args.preprocessed else None,
    )
    read_kwargs = dict(
        id_col=config.id_col, text_col=config.text_col,
        label_col=config.label_col, label_map=config.label_map,
        require_labels=True,
    )
    train_rows = read_dataset(args.train, **read_kwargs)
    dev_rows = read_dataset(args.dev, **read_kwargs) if args.dev else []
    out = finetune(config, train_rows, dev_rows, args.out)
    print(f"checkpoint written to {out}")
    losses = [line for line in (out / "run.log").read_text().splitlines()
              if line.startswith("loss ")]
    for line in losses:
        print(line)
    return 0


def cmd_predict(args) -> int:
    config, _, _ = load_checkpoint(args.checkpoint)
    rows = read_dataset(
        args.test,
        id_col=config.id_col,
        text_col=args.text_col or config.text_col,
        label_col=config.label_col,
        label_map=config.label_map,
    )
    out = predict_file(args.checkpoint, rows, args.out)
    print(f"wrote {len(rows)} predictions to {out}")
    return 0


def cmd_list(args) -> int:
    for name in sorted(bundled_recipes()):
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transformer-harness",
        description="Fine-tune multilingual transformer encoders for tweet "
                    "check-worthiness and emit evaluator-format predictions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("finetune", help="fine-tune a model from a config/recipe")
    p.add_argument("--config", required=True,
                   help="config file path or bundled recipe name")
    p.add_argument("--train", required=True)
    p.add_argument("--dev", default=None)
    p.add_argument("--out", required=True, help="checkpoint directory")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--toy-scale", type=int, default=None,
                   help="cap training rows for a smoke run")
    p.add_argument("--preprocessed", action="store_true",
                   help="input text is already cleaned; recorded in the log")
    p.add_argument("--text-col", default=None)
    p.set_defaults(func=cmd_finetune)

    p = sub.add_parser("predict", help="predict a test TSV with a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--text-col", default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("list", help="list bundled recipes")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HarnessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
