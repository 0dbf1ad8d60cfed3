import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # makes oracles importable


def write_tsv(path: Path, rows, header=("tweet_id", "tweet_text", "class_label")):
    """rows: iterable of (id, text, label-or-None)."""
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write("\t".join(header) + "\n")
        for row_id, text, label in rows:
            fh.write(f"{row_id}\t{text}\t{label if label is not None else ''}\n")
    return path


@pytest.fixture
def tsv_writer(tmp_path):
    def _write(name, rows, header=("tweet_id", "tweet_text", "class_label")):
        return write_tsv(tmp_path / name, rows, header)

    return _write


def synthetic_corpus(root: Path, n_train=28, n_dev=6, n_test=6):
    """40-row learnable fixture split into train/dev/test TSVs.

    Positive rows carry claim-like markers, negative rows chatter; labels are
    recoverable from the text so tiny models separate them.
    """
    def rows(prefix, count, start=0):
        out = []
        for i in range(start, start + count):
            if i % 2 == 0:
                text = (f"@gov the new study proves claim{i % 3} cures covid "
                        f"in {i + 2} days #covid https://t.co/x{i}")
                label = "Yes"
            else:
                text = (f"good morning friends feeling mood{i % 3} today "
                        f"#blessed have a nice day")
                label = "No"
            out.append((f"{prefix}{i}", text, label))
        return out

    train = write_tsv(root / "train.tsv", rows("t", n_train))
    dev = write_tsv(root / "dev.tsv", rows("d", n_dev, start=100))
    test = write_tsv(root / "test.tsv", rows("s", n_test, start=200))
    return train, dev, test
