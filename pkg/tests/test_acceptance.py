"""Acceptance suite: one test per criterion, each printing a PASS line with
its measured runtime. The two dataset-dependent criteria need the official
split files (see README) under CHECKWORTHY_DATA_DIR and skip otherwise.

Run with ``pytest tests/test_acceptance.py -s`` to see the status lines.
"""

import dataclasses
import os
import random
import time
from pathlib import Path

import numpy as np
import pytest

from checkworthy.balance import BalanceConfig, oversample
from checkworthy.corpus import (
    ColumnMap,
    Label,
    Language,
    Split,
    class_distribution,
    load_dataset,
)
from checkworthy.evaluation import Prediction, evaluate, read_predictions
from checkworthy.experiment import (
    load_bundled_config,
    parse_config_text,
    run,
    with_paths,
)
from checkworthy.features import SparseVector, fit, transform
from checkworthy.forest import ForestConfig, best_split_on_feature, save_model
from checkworthy.forest import train as forest_train
from checkworthy.svm import SvmConfig, decision_value, dual_objective, predict
from checkworthy.svm import train as svm_train
from conftest import synthetic_corpus
from oracles import exhaustive_best_split, naive_tfidf_vector, pg_dual_solve

DATA_ENV = "CHECKWORTHY_DATA_DIR"


def _announce(name: str, elapsed: float | None = None) -> None:
    suffix = f" ({elapsed:.2f}s)" if elapsed is not None else ""
    print(f"[PASS] {name}{suffix}")


def _skip(name: str, reason: str) -> None:
    print(f"[SKIP] {name}: {reason}")
    pytest.skip(reason)


# --- criterion 1: TF-IDF oracle equivalence ----------------------------------

def test_tfidf_oracle_equivalence_100_corpora():
    start = time.perf_counter()
    rng = random.Random(20814)
    alphabet = [f"w{i}" for i in range(9)]
    for _ in range(100):
        docs = [
            [rng.choice(alphabet) for _ in range(rng.randint(0, 10))]
            for _ in range(rng.randint(1, 20))
        ]
        ngram_max = rng.randint(1, 3)
        cap = rng.randint(1, 50)
        model = fit(docs, ngram_max, cap)
        for index in rng.sample(range(len(docs)), k=min(2, len(docs))):
            got = transform(model, docs[index]).entries
            want = naive_tfidf_vector(docs, index, ngram_max, cap)
            assert set(got) == set(want)
            for key, value in want.items():
                assert abs(got[key] - value) <= 1e-9
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"TF-IDF oracle suite took {elapsed:.2f}s (budget 5s)"
    _announce("TF-IDF transform == brute-force oracle on 100 corpora (1e-9)",
              elapsed)


# --- criterion 2: SMOTE suite -------------------------------------------------

def _random_balance_instance(rng):
    dim = rng.randint(2, 8)
    n_maj = rng.randint(3, 30)
    n_min = rng.randint(2, n_maj)
    vectors, labels = [], []
    for klass, count in (("No", n_maj), ("Yes", n_min)):
        for _ in range(count):
            entries = {
                i: round(rng.uniform(-2, 2), 6)
                for i in range(dim) if rng.random() < 0.75
            }
            vectors.append(SparseVector(entries=entries))
            labels.append(klass)
    order = list(range(len(vectors)))
    rng.shuffle(order)
    return [vectors[i] for i in order], [labels[i] for i in order]


def test_smote_suite_100_instances():
    start = time.perf_counter()
    rng = random.Random(514)
    seeds_differ = False
    for trial in range(100):
        vectors, labels = _random_balance_instance(rng)
        config = BalanceConfig(seed=trial)
        majority = labels.count("No")
        result = oversample(vectors, labels, config)

        # exact target count
        assert result.labels.count("Yes") == int(np.floor(1.0 * majority + 0.5))
        # originals first, majority rows bit-identical
        assert result.vectors[: len(vectors)] == vectors
        for i, lab in enumerate(labels):
            if lab == "No":
                assert result.vectors[i].entries == vectors[i].entries
        # parent-pair box constraint on every synthetic sample
        for vec, (pi, pj) in zip(result.vectors[len(vectors):], result.parents):
            a, b = vectors[pi].entries, vectors[pj].entries
            for coord in vec.entries.keys() | a.keys() | b.keys():
                lo = min(a.get(coord, 0.0), b.get(coord, 0.0))
                hi = max(a.get(coord, 0.0), b.get(coord, 0.0))
                assert lo <= vec.entries.get(coord, 0.0) <= hi
        # seeded determinism
        again = oversample(vectors, labels, config)
        assert again.vectors == result.vectors
        assert again.parents == result.parents
        if result.parents:
            other = oversample(vectors, labels, BalanceConfig(seed=trial + 1000))
            if other.vectors != result.vectors:
                seeds_differ = True
    assert seeds_differ, "different seeds never changed any synthetic output"
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"SMOTE suite took {elapsed:.2f}s (budget 5s)"
    _announce("SMOTE counts/box/bit-identity/determinism on 100 instances",
              elapsed)


# --- criterion 3: SVM suite ---------------------------------------------------

def _separable_set(rng, n_max=20, dim_max=5):
    dim = rng.randint(2, dim_max)
    w = np.array([rng.uniform(-1, 1) for _ in range(dim)])
    w /= np.linalg.norm(w)
    b = rng.uniform(-0.5, 0.5)
    vectors, labels = [], []
    while len(vectors) < rng.randint(4, n_max) or len(set(labels)) < 2:
        x = np.array([rng.uniform(-2, 2) for _ in range(dim)])
        margin = float(w @ x + b)
        if abs(margin) < 0.3:
            continue
        vectors.append(SparseVector({i: float(x[i]) for i in range(dim)}))
        labels.append(1 if margin > 0 else -1)
        if len(vectors) >= n_max and len(set(labels)) == 2:
            break
    return vectors, labels, dim


def _worst_kkt_violation(model, vectors, labels, c):
    alphas = [0.0] * len(vectors)
    for idx, alpha in zip(model.support_indices, model.alphas):
        alphas[idx] = alpha
    worst = 0.0
    for alpha, vec, y in zip(alphas, vectors, labels):
        margin = y * decision_value(model, vec)
        if alpha <= 1e-9:
            worst = max(worst, 1.0 - margin)
        elif alpha >= c - 1e-9:
            worst = max(worst, margin - 1.0)
        else:
            worst = max(worst, abs(margin - 1.0))
    return worst


def test_svm_suite_50_separable_sets():
    start = time.perf_counter()
    rng = random.Random(2814)
    for trial in range(50):
        vectors, labels, dim = _separable_set(rng)
        config = SvmConfig(seed=trial)
        model = svm_train(vectors, labels, config)

        violation = _worst_kkt_violation(model, vectors, labels, config.c)
        assert violation <= 1e-3, f"trial {trial}: KKT violation {violation}"

        alphas = [0.0] * len(vectors)
        for idx, alpha in zip(model.support_indices, model.alphas):
            alphas[idx] = alpha
        smo_obj = dual_objective(vectors, labels, alphas)
        dense = np.zeros((len(vectors), dim))
        for row, vec in enumerate(vectors):
            for i, value in vec.entries.items():
                dense[row, i] = value
        _, pg_obj = pg_dual_solve(dense, labels, config.c, iters=6000)
        assert abs(smo_obj - pg_obj) <= 1e-3, \
            f"trial {trial}: objective gap {abs(smo_obj - pg_obj)}"

    four_point = (
        [SparseVector({0: 1.0, 1: 1.0}), SparseVector({0: 2.0, 1: 2.0}),
         SparseVector({0: -1.0, 1: -1.0}), SparseVector({0: -2.0, 1: -2.0})],
        [1, 1, -1, -1],
    )
    model = svm_train(*four_point, SvmConfig(seed=2814))
    assert all(predict(model, v) == y for v, y in zip(*four_point))

    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"SVM suite took {elapsed:.2f}s (budget 30s)"
    _announce("SVM KKT<=1e-3 + dual objective within 1e-3 of oracle on 50 sets",
              elapsed)


# --- criterion 4: forest suite -------------------------------------------------

def test_forest_suite_determinism_and_gini(tmp_path):
    start = time.perf_counter()
    rng = random.Random(41)

    # byte-identical parallel vs sequential training under seed 2814
    n, dim = 60, 8
    vectors = [
        SparseVector({j: round(rng.uniform(-2, 2), 4)
                      for j in range(dim) if rng.random() < 0.8})
        for _ in range(n)
    ]
    labels = [rng.choice(["Yes", "No"]) for _ in range(n)]
    labels[0], labels[1] = "Yes", "No"
    config = ForestConfig(n_trees=100, seed=2814)
    sequential = forest_train(vectors, labels, config, positive_label="Yes")
    parallel = forest_train(vectors, labels, config, positive_label="Yes",
                            n_workers=4)
    seq_path, par_path = tmp_path / "seq.txt", tmp_path / "par.txt"
    save_model(sequential, seq_path)
    save_model(parallel, par_path)
    assert seq_path.read_bytes() == par_path.read_bytes()

    # depth-1 split equals exhaustive Gini search on 20 random small tables
    for _ in range(20):
        rows = rng.randint(4, 12)
        cols = rng.randint(1, 4)
        x = np.array([[round(rng.uniform(-3, 3), 3) for _ in range(cols)]
                      for _ in range(rows)])
        ys_str = [rng.choice(["Yes", "No"]) for _ in range(rows)]
        while len(set(ys_str)) < 2:
            ys_str[rng.randrange(rows)] = "Yes" if ys_str[0] == "No" else "No"
        oracle = exhaustive_best_split(x, ys_str)
        ys = np.array([1 if lab == "Yes" else 0 for lab in ys_str])
        best = None
        for feature in range(cols):
            found = best_split_on_feature(x[:, feature], ys)
            if found and (best is None or found[0] < best[0]):
                best = found
        if oracle is None:
            assert best is None
        else:
            assert best is not None
            assert abs(best[0] - oracle[0]) <= 1e-12

    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"forest suite took {elapsed:.2f}s (budget 30s)"
    _announce("forest parallel==sequential bytes + depth-1 Gini == exhaustive",
              elapsed)


# --- criterion 5: metrics suite -------------------------------------------------

def test_metrics_suite_fixture_and_degenerate():
    from checkworthy.corpus import Dataset, LabeledTweet

    gold_labels = ["Yes"] * 4 + ["No"] * 6
    pred_labels = ["Yes", "Yes", "No", "No", "Yes", "No", "No", "No", "No", "No"]
    gold = Dataset(
        Language.ENGLISH, Split.TEST,
        tuple(LabeledTweet(str(i), "t", Label(lab))
              for i, lab in enumerate(gold_labels)),
    )
    preds = [Prediction(str(i), Label(lab), 0.5)
             for i, lab in enumerate(pred_labels)]
    report = evaluate(gold, preds)
    assert (report.tp, report.fp, report.fn, report.tn) == (2, 1, 2, 5)
    assert abs(report.headline_f1_positive - 0.5714) <= 1e-4

    degenerate = evaluate(gold, [Prediction(str(i), Label.NO, 0.0)
                                 for i in range(10)])
    assert degenerate.headline_f1_positive == 0.0
    _announce("metrics: F1+=0.5714 +-1e-4 on tp2/fp1/fn2/tn5; 0 on all-negative")


# --- criteria 6 & 7: conditional on the official data files ---------------------

OFFICIAL_SPLIT_COUNTS = {
    Language.DUTCH: {"train": (546, 377), "dev": (44, 28), "test": (350, 316)},
    Language.ENGLISH: {"train": (1675, 447), "dev": (151, 44), "test": (110, 39)},
    Language.SPANISH: {"train": (3087, 1903), "dev": (2195, 305), "test": (4296, 704)},
}
TOTALS = {Language.DUTCH: 1661, Language.ENGLISH: 2466, Language.SPANISH: 12490}

REPRODUCTION_TARGETS = [
    # (recipe, reference positive-class F1 in percent, +- band)
    ("dutch_svm", 56.46, 3.0),
    ("english_rf", 27.45, 4.0),
    ("spanish_rf", 52.14, 3.0),
]

_OFFICIAL_COLUMNS = ColumnMap(label_map={"1": "Yes", "0": "No"})


def _official_file(data_dir: Path, language: Language, split: str) -> Path | None:
    for candidate in (
        data_dir / language.value / f"{split}.tsv",
        data_dir / f"{language.value}_{split}.tsv",
    ):
        if candidate.exists():
            return candidate
    return None


def _require_data_dir(criterion: str) -> Path:
    raw = os.environ.get(DATA_ENV)
    if not raw:
        _skip(criterion, f"{DATA_ENV} not set; official split files required")
    data_dir = Path(raw)
    if not data_dir.is_dir():
        _skip(criterion, f"{DATA_ENV}={raw} is not a directory")
    return data_dir


def test_dataset_validation_against_official_counts():
    criterion = "dataset split sizes and class counts match the official statistics"
    data_dir = _require_data_dir(criterion)
    for language, per_split in OFFICIAL_SPLIT_COUNTS.items():
        total = 0
        for split_name, (n_no, n_yes) in per_split.items():
            path = _official_file(data_dir, language, split_name)
            if path is None:
                _skip(criterion, f"missing {language.value}/{split_name}.tsv")
            ds = load_dataset(path, language, Split(split_name), _OFFICIAL_COLUMNS)
            assert len(ds) == n_no + n_yes, (language, split_name, len(ds))
            dist = class_distribution(ds)
            assert dist[Label.NO] == n_no, (language, split_name, dist)
            assert dist[Label.YES] == n_yes, (language, split_name, dist)
            total += len(ds)
        assert total == TOTALS[language]
    _announce(criterion)


@pytest.mark.parametrize("recipe,reference,band", REPRODUCTION_TARGETS)
def test_result_reproduction_on_official_files(tmp_path, recipe, reference, band):
    criterion = f"{recipe} positive-class F1 within +-{band} of {reference}"
    data_dir = _require_data_dir(criterion)
    config = load_bundled_config(recipe)
    files = {
        split: _official_file(data_dir, config.language, split)
        for split in ("train", "dev", "test")
    }
    if any(path is None for path in files.values()):
        _skip(criterion, f"missing official files for {config.language.value}")
    config = dataclasses.replace(config, columns=_OFFICIAL_COLUMNS)
    config = with_paths(config, train=files["train"], dev=files["dev"],
                        test=files["test"], out_dir=tmp_path / recipe)
    start = time.perf_counter()
    result = run(config)
    elapsed = time.perf_counter() - start
    assert result.report is not None, "official test split carries no labels"
    achieved = 100.0 * result.report.headline_f1_positive
    assert abs(achieved - reference) <= band, (
        f"{recipe}: positive F1 {achieved:.2f} outside {reference}+-{band}"
    )
    assert elapsed < 120.0, f"{recipe} run took {elapsed:.1f}s (budget 120s)"
    _announce(f"{criterion} (got {achieved:.2f})", elapsed)


# --- criterion 8: end-to-end smoke ----------------------------------------------

SMOKE_CONFIG = """
language=english
model=svm
seed=2814
features.ngram_max=2
features.max_features=300
balance.strategy=smote
balance.ratio=1.0
balance.k_neighbors=3
"""


def test_end_to_end_smoke_deterministic(tmp_path):
    train, dev, test = synthetic_corpus(tmp_path)   # 28 + 6 + 6 = 40 rows
    config = with_paths(parse_config_text(SMOKE_CONFIG),
                        train=train, dev=dev, test=test,
                        out_dir=tmp_path / "out")
    start = time.perf_counter()
    first = run(config)
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"smoke run took {elapsed:.2f}s (budget 10s)"

    assert first.predictions_path.exists()
    assert first.report_path is not None and first.report_path.exists()
    assert first.manifest_path.exists()
    assert len(read_predictions(first.predictions_path)) == 6

    snapshot = {
        path: path.read_bytes()
        for path in (first.predictions_path, first.report_path,
                     first.manifest_path)
    }
    second = run(config)
    for path, content in snapshot.items():
        assert path.read_bytes() == content, f"{path.name} changed between runs"
    assert second.manifest == first.manifest
    _announce("end-to-end smoke: 40-row corpus, outputs present, reruns "
              "byte-identical", elapsed)
