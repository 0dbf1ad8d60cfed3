"""Minimal reader for the shared tweet dataset TSVs.

Same file conventions as the classical pipeline: UTF-8, header row, default
columns tweet_id/tweet_text/class_label, labels Yes/No (an optional label map
rewrites e.g. 1/0), unlabeled rows allowed for test files. This package talks
to the classical toolkit only through files, so the loader is its own.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import UsageError


@dataclass(frozen=True)
class TweetRow:
    id: str
    text: str
    label: int | None   # 1 = check-worthy ("Yes"), 0 = "No", None = unlabeled


def _parse_label(raw: str, label_map: dict[str, str] | None) -> int:
    text = raw.strip()
    if label_map and text in label_map:
        text = label_map[text]
    lowered = text.lower()
    if lowered == "yes":
        return 1
    if lowered == "no":
        return 0
    raise UsageError(f"unknown label string: {raw!r}")


def read_dataset(
    path: str | Path,
    id_col: str = "tweet_id",
    text_col: str = "tweet_text",
    label_col: str = "class_label",
    label_map: dict[str, str] | None = None,
    require_labels: bool = False,
) -> list[TweetRow]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise UsageError(f"{path}: empty file, expected a header row")
    header = lines[0].split("\t")
    for required in (id_col, text_col):
        if required not in header:
            raise UsageError(f"{path}: missing column {required!r}")
    id_idx = header.index(id_col)
    text_idx = header.index(text_col)
    label_idx = header.index(label_col) if label_col in header else None

    rows: list[TweetRow] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != len(header):
            raise UsageError(
                f"{path}:{lineno}: expected {len(header)} columns, got {len(fields)}"
            )
        label = None
        if label_idx is not None and fields[label_idx].strip():
            label = _parse_label(fields[label_idx], label_map)
        if require_labels and label is None:
            raise UsageError(f"{path}:{lineno}: row has no label")
        rows.append(TweetRow(id=fields[id_idx], text=fields[text_idx], label=label))
    return rows
