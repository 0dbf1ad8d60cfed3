import pytest
from hypothesis import given, strategies as st

from checkworthy.corpus import (
    ColumnMap,
    Dataset,
    LabeledTweet,
    Label,
    Language,
    Split,
    class_distribution,
    load_dataset,
    merge,
    save_dataset,
)
from checkworthy.errors import IntegrityError, LabelError, ParseError, UsageError


def test_load_three_row_fixture(tsv_writer):
    path = tsv_writer("train.tsv", [
        ("1", "first tweet", "Yes"),
        ("2", "second tweet", "No"),
        ("3", "third tweet", "Yes"),
    ])
    ds = load_dataset(path, Language.ENGLISH, Split.TRAIN)
    assert len(ds) == 3
    assert class_distribution(ds) == {Label.YES: 2, Label.NO: 1}
    assert [r.id for r in ds.rows] == ["1", "2", "3"]


def test_load_header_only_file(tsv_writer):
    path = tsv_writer("empty.tsv", [])
    ds = load_dataset(path, Language.DUTCH, Split.TEST)
    assert len(ds) == 0


def test_wrong_column_count_reports_line_number(tsv_writer):
    path = tsv_writer("bad.tsv", [("1", "ok", "Yes")])
    with path.open("a", encoding="utf-8") as fh:
        fh.write("2\tonly-two-fields\n")
    with pytest.raises(ParseError) as err:
        load_dataset(path, Language.ENGLISH, Split.TRAIN)
    assert "line 3" in str(err.value)


def test_unknown_label_string(tsv_writer):
    path = tsv_writer("bad.tsv", [("1", "text", "Maybe")])
    with pytest.raises(LabelError):
        load_dataset(path, Language.ENGLISH, Split.TRAIN)


def test_label_map_accepts_numeric_labels(tsv_writer):
    path = tsv_writer("numeric.tsv", [("1", "text", "1"), ("2", "more", "0")])
    columns = ColumnMap(label_map={"1": "Yes", "0": "No"})
    ds = load_dataset(path, Language.ENGLISH, Split.TRAIN, columns)
    assert class_distribution(ds) == {Label.YES: 1, Label.NO: 1}


def test_duplicate_id_rejected(tsv_writer):
    path = tsv_writer("dup.tsv", [("1", "a", "Yes"), ("1", "b", "No")])
    with pytest.raises(IntegrityError):
        load_dataset(path, Language.ENGLISH, Split.TRAIN)


def test_unlabeled_rows_allowed_only_in_test(tsv_writer):
    path = tsv_writer("test.tsv", [("1", "a", None), ("2", "b", None)])
    ds = load_dataset(path, Language.ENGLISH, Split.TEST)
    assert all(r.label is None for r in ds.rows)
    with pytest.raises(LabelError):
        load_dataset(path, Language.ENGLISH, Split.TRAIN)


def test_greedy_text_takes_line_remainder(tmp_path):
    path = tmp_path / "greedy.tsv"
    path.write_text(
        "tweet_id\tclass_label\ttweet_text\n"
        "1\tYes\ttext with\ta real tab\n",
        encoding="utf-8",
    )
    columns = ColumnMap(greedy_text=True)
    ds = load_dataset(path, Language.ENGLISH, Split.TRAIN, columns)
    assert ds.rows[0].text == "text with\ta real tab"
    assert ds.rows[0].label is Label.YES


def test_merge_concatenates_in_order(tsv_writer):
    a = load_dataset(
        tsv_writer("a.tsv", [("1", "x", "Yes"), ("2", "y", "No")]),
        Language.ENGLISH, Split.TRAIN,
    )
    b = load_dataset(
        tsv_writer("b.tsv", [("3", "z", "No"), ("4", "w", "No"), ("5", "v", "Yes")]),
        Language.ENGLISH, Split.DEV,
    )
    merged = merge(a, b)
    assert merged.split is Split.MERGED
    assert [r.id for r in merged.rows] == ["1", "2", "3", "4", "5"]


def test_merge_with_empty_dev_is_identity(tsv_writer):
    a = load_dataset(
        tsv_writer("a.tsv", [("1", "x", "Yes")]), Language.ENGLISH, Split.TRAIN
    )
    empty = Dataset(language=Language.ENGLISH, split=Split.DEV, rows=())
    merged = merge(a, empty)
    assert [(r.id, r.text, r.label) for r in merged.rows] == \
        [(r.id, r.text, r.label) for r in a.rows]


def test_merge_language_mismatch(tsv_writer):
    a = load_dataset(tsv_writer("a.tsv", [("1", "x", "Yes")]),
                     Language.ENGLISH, Split.TRAIN)
    b = load_dataset(tsv_writer("b.tsv", [("2", "y", "No")]),
                     Language.DUTCH, Split.DEV)
    with pytest.raises(UsageError):
        merge(a, b)


def test_merge_id_collision(tsv_writer):
    a = load_dataset(tsv_writer("a.tsv", [("1", "x", "Yes")]),
                     Language.ENGLISH, Split.TRAIN)
    b = load_dataset(tsv_writer("b.tsv", [("1", "y", "No")]),
                     Language.ENGLISH, Split.DEV)
    with pytest.raises(IntegrityError):
        merge(a, b)


def test_merge_counts_are_elementwise_sums(tsv_writer):
    a = load_dataset(
        tsv_writer("a.tsv", [("1", "x", "Yes"), ("2", "y", "No"), ("3", "z", "Yes")]),
        Language.ENGLISH, Split.TRAIN,
    )
    b = load_dataset(
        tsv_writer("b.tsv", [("4", "u", "No"), ("5", "v", "No")]),
        Language.ENGLISH, Split.DEV,
    )
    da, db, dm = class_distribution(a), class_distribution(b), class_distribution(merge(a, b))
    assert dm == {lab: da[lab] + db[lab] for lab in (Label.YES, Label.NO)}


def test_single_row_distribution(tsv_writer):
    ds = load_dataset(tsv_writer("one.tsv", [("1", "x", "Yes")]),
                      Language.SPANISH, Split.TRAIN)
    assert class_distribution(ds) == {Label.YES: 1, Label.NO: 0}


def test_distribution_requires_labels():
    ds = Dataset(Language.ENGLISH, Split.TEST,
                 rows=(LabeledTweet("1", "x", None),))
    with pytest.raises(UsageError):
        class_distribution(ds)


_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",)), max_size=40
)


@given(
    rows=st.lists(
        st.tuples(st.uuids().map(str), _text,
                  st.sampled_from([Label.YES, Label.NO])),
        max_size=12,
        unique_by=lambda r: r[0],
    )
)
def test_save_load_round_trip(rows, tmp_path_factory):
    tmp = tmp_path_factory.mktemp("roundtrip")
    ds = Dataset(
        language=Language.ENGLISH,
        split=Split.TRAIN,
        rows=tuple(LabeledTweet(i, t, lab) for i, t, lab in rows),
    )
    path = tmp / "ds.tsv"
    save_dataset(ds, path)
    loaded = load_dataset(path, Language.ENGLISH, Split.TRAIN)
    assert [(r.id, r.text, r.label) for r in loaded.rows] == \
        [(r.id, r.text, r.label) for r in ds.rows]
