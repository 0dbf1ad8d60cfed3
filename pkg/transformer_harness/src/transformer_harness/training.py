"""Fine-tuning loop and checkpoint layout.

A run writes one directory: model/ and tokenizer/ (save_pretrained format),
config.txt (the effective config echo plus the model source), and run.log.
The log records the evaluation loss on the training rows before any update
("loss initial") and after every epoch ("loss epoch_k"), so even a 1-epoch
run yields a comparable before/after pair; per-epoch mean batch loss and dev
loss are logged alongside. Runs are seeded (python/numpy/torch); exact
repeatability holds on CPU for a fixed software stack, which is as much as
the underlying libraries guarantee.
"""

from __future__ import annotations

import random
from pathlib import Path

import numpy as np
import torch

from .config import FinetuneConfig, render_config
from .data import TweetRow
from .errors import UsageError
from .modeling import build_tokenizer_and_model


def _seed_everything(seed: int) -> None:
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)


def _encode(tokenizer, texts: list[str], config: FinetuneConfig):
    return tokenizer(
        texts,
        padding=True,
        truncation=True,
        max_length=config.max_sequence_length,
        return_tensors="pt",
    )


def _batches(n: int, batch_size: int, order=None):
    index = np.arange(n) if order is None else order
    for start in range(0, n, batch_size):
        yield index[start:start + batch_size]


@torch.no_grad()
def _eval_loss(model, tokenizer, rows: list[TweetRow], config: FinetuneConfig) -> float:
    model.eval()
    losses, weights = [], []
    labels = torch.tensor([row.label for row in rows])
    for batch in _batches(len(rows), config.batch_size):
        enc = _encode(tokenizer, [rows[i].text for i in batch], config)
        out = model(**enc, labels=labels[batch])
        losses.append(float(out.loss.detach()))
        weights.append(len(batch))
    return float(np.average(losses, weights=weights))


def finetune(
    config: FinetuneConfig,
    train_rows: list[TweetRow],
    dev_rows: list[TweetRow],
    out_dir: str | Path,
) -> Path:
    """Run the fine-tune and return the checkpoint directory."""
    if not train_rows:
        raise UsageError("training set is empty")
    if any(row.label is None for row in train_rows + dev_rows):
        raise UsageError("fine-tuning needs fully labeled train/dev rows")

    if config.toy_scale is not None:
        train_rows = train_rows[: config.toy_scale]
        dev_rows = dev_rows[: max(2, config.toy_scale // 5)]
    if len({row.label for row in train_rows}) < 2:
        raise UsageError("training rows must contain both classes")

    _seed_everything(config.seed)
    tokenizer, model, source = build_tokenizer_and_model(
        config, [row.text for row in train_rows]
    )

    log_lines = [f"config {line}" for line in render_config(config).splitlines()]
    log_lines.append(f"config model_source={source}")
    log_lines.append(f"config train_rows={len(train_rows)}")
    log_lines.append(f"config dev_rows={len(dev_rows)}")
    log_lines.append(
        "config text_input=" + ("preprocessed" if config.preprocessed else "raw")
    )

    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
    labels = torch.tensor([row.label for row in train_rows])
    order_rng = np.random.default_rng(config.seed)

    initial = _eval_loss(model, tokenizer, train_rows, config)
    log_lines.append(f"loss initial {initial:.6f}")

    for epoch in range(1, config.epochs + 1):
        model.train()
        order = order_rng.permutation(len(train_rows))
        batch_losses = []
        for batch in _batches(len(train_rows), config.batch_size, order):
            enc = _encode(tokenizer, [train_rows[i].text for i in batch], config)
            out = model(**enc, labels=labels[batch])
            optimizer.zero_grad()
            out.loss.backward()
            optimizer.step()
            batch_losses.append(float(out.loss.detach()))
        log_lines.append(f"mean_batch_loss epoch_{epoch} {np.mean(batch_losses):.6f}")
        train_loss = _eval_loss(model, tokenizer, train_rows, config)
        log_lines.append(f"loss epoch_{epoch} {train_loss:.6f}")
        if dev_rows:
            dev_loss = _eval_loss(model, tokenizer, dev_rows, config)
            log_lines.append(f"dev_loss epoch_{epoch} {dev_loss:.6f}")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out_dir / "model")
    tokenizer.save_pretrained(out_dir / "tokenizer")
    (out_dir / "config.txt").write_text(
        render_config(config) + f"# model_source={source}\n", encoding="utf-8"
    )
    (out_dir / "run.log").write_text("\n".join(log_lines) + "\n", encoding="utf-8")
    return out_dir


def read_logged_losses(checkpoint_dir: str | Path) -> list[tuple[str, float]]:
    """(stage, value) pairs for every `loss <stage> <value>` line, in order."""
    out = []
    for line in (Path(checkpoint_dir) / "run.log").read_text(encoding="utf-8").splitlines():
        parts = line.split()
        if len(parts) == 3 and parts[0] == "loss":
            out.append((parts[1], float(parts[2])))
    return out
