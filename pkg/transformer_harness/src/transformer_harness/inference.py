"""Prediction over a test TSV, written in the shared evaluator format."""

from __future__ import annotations

from pathlib import Path

import torch
from transformers import AutoModelForSequenceClassification, AutoTokenizer

from .config import load_config
from .data import TweetRow

PREDICTION_HEADER = "tweet_id\tlabel\tscore"


def load_checkpoint(checkpoint_dir: str | Path):
    checkpoint_dir = Path(checkpoint_dir)
    config = load_config(checkpoint_dir / "config.txt")
    tokenizer = AutoTokenizer.from_pretrained(checkpoint_dir / "tokenizer")
    model = AutoModelForSequenceClassification.from_pretrained(checkpoint_dir / "model")
    model.eval()
    return config, tokenizer, model


@torch.no_grad()
def predict_rows(config, tokenizer, model, rows: list[TweetRow]) -> list[tuple[str, str, float]]:
    """(id, label, positive-class probability) per row; exact 0.5 goes No."""
    out = []
    for start in range(0, len(rows), config.batch_size):
        chunk = rows[start:start + config.batch_size]
        enc = tokenizer(
            [row.text for row in chunk],
            padding=True,
            truncation=True,
            max_length=config.max_sequence_length,
            return_tensors="pt",
        )
        probs = torch.softmax(model(**enc).logits, dim=-1)[:, 1]
        for row, p in zip(chunk, probs):
            score = min(max(float(p), 0.0), 1.0)
            out.append((row.id, "Yes" if score > 0.5 else "No", score))
    return out


def predict_file(checkpoint_dir: str | Path, rows: list[TweetRow], out_path: str | Path) -> Path:
    config, tokenizer, model = load_checkpoint(checkpoint_dir)
    predictions = predict_rows(config, tokenizer, model, rows)
    out_path = Path(out_path)
    with out_path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(PREDICTION_HEADER + "\n")
        for row_id, label, score in predictions:
            fh.write(f"{row_id}\t{label}\t{score:.6f}\n")
    return out_path
