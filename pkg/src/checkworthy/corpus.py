"""Loading, validating, splitting and merging the tab-separated tweet datasets."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import IntegrityError, LabelError, ParseError, UsageError


class Label(str, Enum):
    YES = "Yes"  # check-worthy, the positive class
    NO = "No"

    @classmethod
    def parse(cls, raw: str, label_map: dict[str, str] | None = None) -> "Label":
        text = raw.strip()
        if label_map and text in label_map:
            text = label_map[text]
        lowered = text.lower()
        if lowered == "yes":
            return cls.YES
        if lowered == "no":
            return cls.NO
        raise LabelError(f"unknown label string: {raw!r}")


class Language(str, Enum):
    DUTCH = "dutch"
    ENGLISH = "english"
    SPANISH = "spanish"


class Split(str, Enum):
    TRAIN = "train"
    DEV = "dev"
    TEST = "test"
    MERGED = "merged"


@dataclass(frozen=True)
class LabeledTweet:
    id: str
    text: str
    label: Label | None = None


@dataclass(frozen=True)
class Dataset:
    """Immutable ordered collection of tweets for one language and split."""

    language: Language
    split: Split
    rows: tuple[LabeledTweet, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def labeled(self) -> bool:
        return all(r.label is not None for r in self.rows)


@dataclass(frozen=True)
class ColumnMap:
    """Names the id/text/label columns of a TSV file.

    ``greedy_text`` treats the text column as the remainder of each line after
    the fixed leading columns (the text column must then be last in the
    header). ``label_map`` rewrites raw label strings (e.g. "1" -> "Yes")
    before validation. ``unescape`` decodes \\t, \\n, \\r, \\\\ sequences in
    the text field, matching what ``save_dataset`` writes.
    """

    id_col: str = "tweet_id"
    text_col: str = "tweet_text"
    label_col: str = "class_label"
    greedy_text: bool = False
    label_map: dict[str, str] | None = None
    unescape: bool = True


_ESCAPES = [("\\", "\\\\"), ("\t", "\\t"), ("\n", "\\n"), ("\r", "\\r")]


def escape_text(text: str) -> str:
    for raw, esc in _ESCAPES:
        text = text.replace(raw, esc)
    return text


def unescape_text(text: str) -> str:
    out, i = [], 0
    while i < len(text):
        if text[i] == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            mapped = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}.get(nxt)
            if mapped is not None:
                out.append(mapped)
                i += 2
                continue
        out.append(text[i])
        i += 1
    return "".join(out)


def load_dataset(
    path: str | Path,
    language: Language,
    split: Split,
    columns: ColumnMap | None = None,
) -> Dataset:
    """Parse one TSV file into a Dataset.

    Train/dev/merged splits must be fully labeled; test rows may omit the
    label column or leave it empty. File order is preserved and duplicate
    ids are rejected.
    """
    columns = columns or ColumnMap()
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("empty file, expected a header row", line=1)

    header = lines[0].rstrip("\r").split("\t")
    col_idx = {name: i for i, name in enumerate(header)}
    for required in (columns.id_col, columns.text_col):
        if required not in col_idx:
            raise ParseError(f"missing column {required!r} in header {header}", line=1)
    text_idx = col_idx[columns.text_col]
    if columns.greedy_text and text_idx != len(header) - 1:
        raise UsageError("greedy_text requires the text column to be last")

    # In greedy mode only columns before the text remainder stay addressable.
    has_labels = columns.label_col in col_idx and (
        not columns.greedy_text or col_idx[columns.label_col] < text_idx
    )
    if split is not Split.TEST and not has_labels:
        raise LabelError(
            f"split {split.value!r} requires a {columns.label_col!r} column"
        )

    rows: list[LabeledTweet] = []
    seen: set[str] = set()
    for lineno, raw_line in enumerate(lines[1:], start=2):
        line = raw_line.rstrip("\r")
        if line == "":
            continue
        if columns.greedy_text:
            fields = line.split("\t", text_idx)
        else:
            fields = line.split("\t")
            if len(fields) != len(header):
                raise ParseError(
                    f"expected {len(header)} columns, found {len(fields)}",
                    line=lineno,
                )
        if len(fields) <= text_idx:
            raise ParseError(
                f"expected at least {text_idx + 1} columns, found {len(fields)}",
                line=lineno,
            )

        tweet_id = fields[col_idx[columns.id_col]].strip()
        if not tweet_id:
            raise ParseError("empty id field", line=lineno)
        if tweet_id in seen:
            raise IntegrityError(f"duplicate id {tweet_id!r} at line {lineno}")
        seen.add(tweet_id)

        text = fields[text_idx]
        if columns.unescape and not columns.greedy_text:
            text = unescape_text(text)

        label: Label | None = None
        if has_labels:
            raw_label = fields[col_idx[columns.label_col]].strip()
            if raw_label:
                try:
                    label = Label.parse(raw_label, columns.label_map)
                except LabelError as exc:
                    raise LabelError(f"line {lineno}: {exc}") from None
        if label is None and split is not Split.TEST:
            raise LabelError(f"line {lineno}: row {tweet_id!r} has no label "
                             f"but split {split.value!r} must be labeled")
        rows.append(LabeledTweet(id=tweet_id, text=text, label=label))

    return Dataset(language=language, split=split, rows=tuple(rows))


def save_dataset(dataset: Dataset, path: str | Path, columns: ColumnMap | None = None) -> None:
    """Write a Dataset back to TSV (text escaped so load/save round-trips)."""
    columns = columns or ColumnMap()
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"{columns.id_col}\t{columns.text_col}\t{columns.label_col}\n")
        for row in dataset.rows:
            label = row.label.value if row.label is not None else ""
            fh.write(f"{row.id}\t{escape_text(row.text)}\t{label}\n")


def merge(train: Dataset, dev: Dataset) -> Dataset:
    """Concatenate train and dev into one Merged training set."""
    if train.language is not dev.language:
        raise UsageError(
            f"language mismatch: {train.language.value} vs {dev.language.value}"
        )
    if not train.labeled or not dev.labeled:
        raise UsageError("merge requires both datasets fully labeled")
    collisions = {r.id for r in train.rows} & {r.id for r in dev.rows}
    if collisions:
        raise IntegrityError(
            f"id collision between splits: {sorted(collisions)[:5]}"
        )
    return Dataset(
        language=train.language,
        split=Split.MERGED,
        rows=train.rows + dev.rows,
    )


def class_distribution(dataset: Dataset) -> dict[Label, int]:
    """Count rows per class label; both labels always present in the result."""
    if not dataset.labeled:
        raise UsageError("class_distribution requires a fully labeled dataset")
    counts = {Label.YES: 0, Label.NO: 0}
    for row in dataset.rows:
        counts[row.label] += 1
    return counts
