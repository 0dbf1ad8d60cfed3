import os
from pathlib import Path

import pytest

# huggingface_hub freezes HF_HUB_OFFLINE at import time, so the offline pin
# must happen before anything imports transformers. The opt-in pretrained
# test needs the hub, so the pin is skipped for full runs.
if os.environ.get("TRANSFORMER_HARNESS_FULL") != "1":
    os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("HF_HUB_DISABLE_PROGRESS_BARS", "1")


def make_rows(prefix, count, start=0):
    """Alternating claim-flavoured / chatter rows with recoverable labels."""
    rows = []
    for i in range(start, start + count):
        if i % 2 == 0:
            text = f"study proves claim{i % 3} cures covid in {i + 2} days"
            label = "Yes"
        else:
            text = f"good morning friends feeling mood{i % 3} today lovely"
            label = "No"
        rows.append((f"{prefix}{i}", text, label))
    return rows


def write_tsv(path: Path, rows):
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write("tweet_id\ttweet_text\tclass_label\n")
        for row_id, text, label in rows:
            fh.write(f"{row_id}\t{text}\t{label if label is not None else ''}\n")
    return path


@pytest.fixture
def toy_files(tmp_path):
    train = write_tsv(tmp_path / "train.tsv", make_rows("t", 50))
    dev = write_tsv(tmp_path / "dev.tsv", make_rows("d", 10, start=100))
    test = write_tsv(tmp_path / "test.tsv", make_rows("s", 10, start=200))
    return train, dev, test
