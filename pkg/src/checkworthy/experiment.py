"""Config-driven end-to-end runner: corpus -> preprocess -> features ->
balance -> model -> eval, with a replayable run manifest.

Configs are flat ``key=value`` text with dotted section prefixes
(``balance.ratio=1.0``). Six bundled recipes carry the per-language
feature counts and n-gram orders used by the reference experiments; they are
listed by ``bundled_recipes()`` and shipped as package data.

The TF-IDF model is always fitted on the merged train+dev text only (fitting
on test would leak), and balancing is never applied to the test set. The
manifest records every effective parameter plus content hashes of the inputs
and of the fit corpus, and contains no timestamps, so a repeated run is
byte-identical.
"""

from __future__ import annotations

import hashlib
import math
import os
from collections import Counter
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from . import balance as balance_mod
from . import features, forest, svm
from .corpus import ColumnMap, Dataset, Label, Language, Split, load_dataset, merge
from .errors import CheckworthyError, UsageError
from .evaluation import (
    EvalReport,
    Prediction,
    evaluate,
    format_report,
    write_predictions,
)
from .preprocess import PreprocessConfig, clean, load_stopwords


class StageError(CheckworthyError):
    """Wraps a module error with the pipeline stage that raised it."""

    def __init__(self, stage: str, original: Exception):
        self.stage = stage
        self.original = original
        super().__init__(f"{stage}: {original}")


@dataclass(frozen=True)
class ExperimentPaths:
    train: Path | None = None
    dev: Path | None = None
    test: Path | None = None
    out_dir: Path | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    language: Language
    model: str                      # "svm" | "forest"
    seed: int = 2814
    ngram_max: int = 3
    max_features: int = 1000
    stopwords_path: Path | None = None   # None -> bundled list for language
    preprocess_flags: dict = field(default_factory=dict)
    balance: balance_mod.BalanceConfig = field(
        default_factory=balance_mod.BalanceConfig
    )
    svm_config: svm.SvmConfig = field(default_factory=svm.SvmConfig)
    forest_config: forest.ForestConfig = field(default_factory=forest.ForestConfig)
    columns: ColumnMap = field(default_factory=ColumnMap)
    paths: ExperimentPaths = field(default_factory=ExperimentPaths)

    def __post_init__(self):
        if self.model not in ("svm", "forest"):
            raise UsageError(f"model must be 'svm' or 'forest', got {self.model!r}")

    def preprocess_config(self) -> PreprocessConfig:
        flags = dict(self.preprocess_flags)
        if flags.get("remove_stopwords", True):
            source = self.stopwords_path or self.language
            flags["stopword_list"] = load_stopwords(source)
        return PreprocessConfig(language=self.language, **flags)


_BOOL_STRINGS = {"true": True, "1": True, "yes": True,
                 "false": False, "0": False, "no": False}

_PREPROCESS_FLAG_KEYS = (
    "remove_urls", "remove_invisible", "strip_mentions",
    "strip_hashtag_sign", "remove_stopwords", "lowercase",
)


def _parse_bool(raw: str, key: str) -> bool:
    try:
        return _BOOL_STRINGS[raw.strip().lower()]
    except KeyError:
        raise UsageError(f"{key}: expected a boolean, got {raw!r}") from None


def parse_config_text(text: str) -> ExperimentConfig:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        pairs[key.strip()] = value.strip()
    return config_from_pairs(pairs)


def config_from_pairs(pairs: dict[str, str]) -> ExperimentConfig:
    pairs = {k: v for k, v in pairs.items() if v != ""}

    def pop(key: str, default: str | None = None) -> str | None:
        return pairs.pop(key, default)

    language = Language(pop("language", "english"))
    model = pop("model", "svm")
    seed = int(pop("seed", "2814"))

    ngram_max = int(pop("features.ngram_max", "3"))
    max_features = int(pop("features.max_features", "1000"))

    stopwords_path = pop("preprocess.stopwords")
    preprocess_flags = {}
    for flag in _PREPROCESS_FLAG_KEYS:
        raw = pop(f"preprocess.{flag}")
        if raw is not None:
            preprocess_flags[flag] = _parse_bool(raw, f"preprocess.{flag}")

    balance_config = balance_mod.BalanceConfig(
        target_ratio=float(pop("balance.ratio", "1.0")),
        k_neighbors=int(pop("balance.k_neighbors", "5")),
        seed=int(pop("balance.seed", str(seed))),
        strategy=pop("balance.strategy", "smote"),
    )
    svm_config = svm.SvmConfig(
        c=float(pop("svm.c", "1.0")),
        tol_kkt=float(pop("svm.tol_kkt", "1e-3")),
        max_passes=int(pop("svm.max_passes", "10")),
        seed=int(pop("svm.seed", str(seed))),
    )
    rule = pop("forest.features_per_split", "sqrt")
    forest_config = forest.ForestConfig(
        n_trees=int(pop("forest.n_trees", "100")),
        max_depth=(lambda d: int(d) if d is not None else None)(pop("forest.max_depth")),
        min_samples_split=int(pop("forest.min_samples_split", "2")),
        features_per_split=rule if rule in ("sqrt", "all") else int(rule),
        seed=int(pop("forest.seed", str(seed))),
    )

    label_map = None
    raw_map = pop("columns.label_map")
    if raw_map:
        label_map = dict(item.split(":", 1) for item in raw_map.split(","))
    columns = ColumnMap(
        id_col=pop("columns.id", "tweet_id"),
        text_col=pop("columns.text", "tweet_text"),
        label_col=pop("columns.label", "class_label"),
        greedy_text=_parse_bool(pop("columns.greedy_text", "false"), "columns.greedy_text"),
        label_map=label_map,
    )

    paths = ExperimentPaths(
        train=(lambda p: Path(p) if p else None)(pop("paths.train")),
        dev=(lambda p: Path(p) if p else None)(pop("paths.dev")),
        test=(lambda p: Path(p) if p else None)(pop("paths.test")),
        out_dir=(lambda p: Path(p) if p else None)(pop("paths.out_dir")),
    )

    if pairs:
        raise UsageError(f"unknown config keys: {sorted(pairs)}")
    return ExperimentConfig(
        language=language,
        model=model,
        seed=seed,
        ngram_max=ngram_max,
        max_features=max_features,
        stopwords_path=Path(stopwords_path) if stopwords_path else None,
        preprocess_flags=preprocess_flags,
        balance=balance_config,
        svm_config=svm_config,
        forest_config=forest_config,
        columns=columns,
        paths=paths,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def bundled_recipes() -> dict[str, str]:
    """name -> config text for every recipe shipped with the package."""
    out = {}
    recipe_dir = resources.files("checkworthy").joinpath("recipes")
    for entry in sorted(recipe_dir.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".cfg"):
            out[entry.name[:-4]] = entry.read_text(encoding="utf-8")
    return out


def load_bundled_config(name: str) -> ExperimentConfig:
    recipes = bundled_recipes()
    if name not in recipes:
        raise UsageError(
            f"unknown recipe {name!r}; available: {', '.join(sorted(recipes))}"
        )
    return parse_config_text(recipes[name])


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _sha256_docs(docs: list[list[str]]) -> str:
    digest = hashlib.sha256()
    for tokens in docs:
        digest.update("\x1f".join(tokens).encode("utf-8"))
        digest.update(b"\x1e")
    return digest.hexdigest()


def _logistic(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


@dataclass(frozen=True)
class RunResult:
    predictions_path: Path
    manifest_path: Path
    report_path: Path | None
    report: EvalReport | None
    manifest: dict[str, str]


def _stage(name: str):
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, CheckworthyError):
                raise StageError(name, exc) from exc
            return False

    return _Ctx()


def run(config: ExperimentConfig) -> RunResult:
    """Execute the full pipeline and write predictions/report/manifest."""
    paths = config.paths
    for label, p in (("train", paths.train), ("dev", paths.dev), ("test", paths.test)):
        if p is None:
            raise UsageError(f"paths.{label} is required")
        if not Path(p).exists():
            raise UsageError(f"paths.{label}: no such file: {p}")
    out_dir = paths.out_dir or Path(".")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    manifest: dict[str, str] = {}

    with _stage("corpus"):
        train_ds = load_dataset(paths.train, config.language, Split.TRAIN, config.columns)
        dev_ds = load_dataset(paths.dev, config.language, Split.DEV, config.columns)
        test_ds = load_dataset(paths.test, config.language, Split.TEST, config.columns)
        merged = merge(train_ds, dev_ds)

    with _stage("preprocess"):
        pre = config.preprocess_config()
        train_docs = [clean(row.text, pre) for row in merged.rows]
        test_docs = [clean(row.text, pre) for row in test_ds.rows]

    with _stage("features"):
        tfidf = features.fit(train_docs, config.ngram_max, config.max_features)
        train_vectors = features.transform_corpus(tfidf, train_docs)
        test_vectors = features.transform_corpus(tfidf, test_docs)

    train_labels = [row.label.value for row in merged.rows]
    with _stage("balance"):
        balanced_vectors, balanced_labels = balance_mod.smote(
            train_vectors, train_labels, config.balance
        )

    with _stage(config.model):
        if config.model == "svm":
            ys = [1 if lab == Label.YES.value else -1 for lab in balanced_labels]
            model = svm.train(balanced_vectors, ys, config.svm_config)
            predictions = []
            for row, vec in zip(test_ds.rows, test_vectors):
                value = svm.decision_value(model, vec)
                label = Label.YES if value > 0.0 else Label.NO
                predictions.append(Prediction(row.id, label, _logistic(value)))
        else:
            model = forest.train(
                balanced_vectors,
                balanced_labels,
                config.forest_config,
                dim=tfidf.size,
                positive_label=Label.YES.value,
                n_workers=min(4, os.cpu_count() or 1),
            )
            fractions = forest.vote_fractions(model, test_vectors)
            predictions = []
            for row, fraction in zip(test_ds.rows, fractions):
                label = Label.YES if fraction > 0.5 else Label.NO
                predictions.append(Prediction(row.id, label, float(fraction)))

    predictions_path = out_dir / "predictions.tsv"
    write_predictions(predictions, predictions_path)

    report = None
    report_path = None
    if len(test_ds) > 0 and test_ds.labeled:
        with _stage("eval"):
            report = evaluate(test_ds, predictions)
        report_path = out_dir / "report.txt"
        report_path.write_text(
            format_report(report, model_name=config.model.upper()), encoding="utf-8"
        )
        from . import figures  # imported lazily: pulls in matplotlib

        figures.render_confusion_matrix(
            report, out_dir / "confusion_matrix.png",
            title=f"{config.language.value} {config.model}",
        )
        figures.render_class_metrics(
            report, out_dir / "class_metrics.png",
            title=f"{config.language.value} {config.model}",
        )

    manifest.update(_manifest_entries(config, tfidf, merged, test_ds, train_docs))
    manifest["balance.applied_to"] = "train"
    manifest["counts.balanced_train_rows"] = str(len(balanced_vectors))
    if report is not None:
        manifest["result.headline_f1_positive"] = f"{report.headline_f1_positive:.6f}"
    manifest_path = out_dir / "manifest.txt"
    manifest_path.write_text(
        "".join(f"{k}={manifest[k]}\n" for k in sorted(manifest)), encoding="utf-8"
    )
    return RunResult(
        predictions_path=predictions_path,
        manifest_path=manifest_path,
        report_path=report_path,
        report=report,
        manifest=manifest,
    )


def _manifest_entries(
    config: ExperimentConfig,
    tfidf: features.TfIdfModel,
    merged: Dataset,
    test_ds: Dataset,
    train_docs: list[list[str]],
) -> dict[str, str]:
    pre = config.preprocess_config()
    entries = {
        "language": config.language.value,
        "model": config.model,
        "seed": str(config.seed),
        "features.ngram_max": str(config.ngram_max),
        "features.max_features": str(config.max_features),
        "features.vocabulary_size": str(tfidf.size),
        "balance.strategy": config.balance.strategy,
        "balance.ratio": repr(config.balance.target_ratio),
        "balance.k_neighbors": str(config.balance.k_neighbors),
        "balance.seed": str(config.balance.seed),
        "preprocess.remove_urls": str(pre.remove_urls).lower(),
        "preprocess.remove_invisible": str(pre.remove_invisible).lower(),
        "preprocess.strip_mentions": str(pre.strip_mentions).lower(),
        "preprocess.strip_hashtag_sign": str(pre.strip_hashtag_sign).lower(),
        "preprocess.remove_stopwords": str(pre.remove_stopwords).lower(),
        "preprocess.lowercase": str(pre.lowercase).lower(),
        "preprocess.stopword_count": str(len(pre.stopword_list)),
        "columns.id": config.columns.id_col,
        "columns.text": config.columns.text_col,
        "columns.label": config.columns.label_col,
        "columns.greedy_text": str(config.columns.greedy_text).lower(),
        "paths.train": str(config.paths.train),
        "paths.dev": str(config.paths.dev),
        "paths.test": str(config.paths.test),
        "inputs.train.sha256": _sha256_file(Path(config.paths.train)),
        "inputs.dev.sha256": _sha256_file(Path(config.paths.dev)),
        "inputs.test.sha256": _sha256_file(Path(config.paths.test)),
        "tfidf.fit_corpus_sha256": _sha256_docs(train_docs),
        "counts.train_rows": str(len(merged)),
        "counts.test_rows": str(len(test_ds)),
    }
    if config.stopwords_path is not None:
        entries["preprocess.stopwords"] = str(config.stopwords_path)
    if config.model == "svm":
        entries.update({
            "svm.c": repr(config.svm_config.c),
            "svm.tol_kkt": repr(config.svm_config.tol_kkt),
            "svm.max_passes": str(config.svm_config.max_passes),
            "svm.seed": str(config.svm_config.seed),
        })
    else:
        entries.update({
            "forest.n_trees": str(config.forest_config.n_trees),
            "forest.max_depth": str(config.forest_config.max_depth),
            "forest.min_samples_split": str(config.forest_config.min_samples_split),
            "forest.features_per_split": str(config.forest_config.features_per_split),
            "forest.seed": str(config.forest_config.seed),
        })
    if config.columns.label_map:
        entries["columns.label_map"] = ",".join(
            f"{k}:{v}" for k, v in sorted(config.columns.label_map.items())
        )
    return entries


def freq_report(
    dataset: Dataset, config: PreprocessConfig, top_k: int
) -> list[tuple[str, int]]:
    """Most frequent cleaned tokens, descending count, ties lexicographic."""
    counts: Counter = Counter()
    for row in dataset.rows:
        counts.update(clean(row.text, config))
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[: top_k if top_k > 0 else None]


# --- trained-classifier bundles (used by the train/predict CLI) -------------

def save_bundle(
    out_dir: str | Path,
    config: ExperimentConfig,
    tfidf: features.TfIdfModel,
    model,
) -> None:
    """Persist model + feature model + the config that produced them."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "bundle.cfg").write_text(
        render_config(config, include_paths=False), encoding="utf-8"
    )
    features.save_model(tfidf, out_dir / "tfidf.tsv")
    if config.model == "svm":
        svm.save_model(model, out_dir / "model.txt")
    else:
        forest.save_model(model, out_dir / "model.txt")


def load_bundle(bundle_dir: str | Path):
    bundle_dir = Path(bundle_dir)
    config = load_config(bundle_dir / "bundle.cfg")
    tfidf = features.load_model(bundle_dir / "tfidf.tsv")
    if config.model == "svm":
        model = svm.load_model(bundle_dir / "model.txt")
    else:
        model = forest.load_model(bundle_dir / "model.txt")
    return config, tfidf, model


def render_config(config: ExperimentConfig, include_paths: bool = True) -> str:
    """Write a config back out as flat key=value text."""
    lines = [
        f"language={config.language.value}",
        f"model={config.model}",
        f"seed={config.seed}",
        f"features.ngram_max={config.ngram_max}",
        f"features.max_features={config.max_features}",
        f"balance.strategy={config.balance.strategy}",
        f"balance.ratio={config.balance.target_ratio!r}",
        f"balance.k_neighbors={config.balance.k_neighbors}",
        f"balance.seed={config.balance.seed}",
    ]
    for flag, value in sorted(config.preprocess_flags.items()):
        lines.append(f"preprocess.{flag}={str(value).lower()}")
    if config.stopwords_path is not None:
        lines.append(f"preprocess.stopwords={config.stopwords_path}")
    if config.model == "svm":
        cfg = config.svm_config
        lines += [
            f"svm.c={cfg.c!r}",
            f"svm.tol_kkt={cfg.tol_kkt!r}",
            f"svm.max_passes={cfg.max_passes}",
            f"svm.seed={cfg.seed}",
        ]
    else:
        cfg = config.forest_config
        lines += [
            f"forest.n_trees={cfg.n_trees}",
            f"forest.max_depth={'' if cfg.max_depth is None else cfg.max_depth}",
            f"forest.min_samples_split={cfg.min_samples_split}",
            f"forest.features_per_split={cfg.features_per_split}",
            f"forest.seed={cfg.seed}",
        ]
    cols = config.columns
    lines += [
        f"columns.id={cols.id_col}",
        f"columns.text={cols.text_col}",
        f"columns.label={cols.label_col}",
        f"columns.greedy_text={str(cols.greedy_text).lower()}",
    ]
    if cols.label_map:
        lines.append(
            "columns.label_map="
            + ",".join(f"{k}:{v}" for k, v in sorted(cols.label_map.items()))
        )
    if include_paths:
        paths = config.paths
        for name, value in (
            ("train", paths.train), ("dev", paths.dev),
            ("test", paths.test), ("out_dir", paths.out_dir),
        ):
            if value is not None:
                lines.append(f"paths.{name}={value}")
    return "\n".join(lines) + "\n"


def with_paths(
    config: ExperimentConfig,
    train: str | Path | None = None,
    dev: str | Path | None = None,
    test: str | Path | None = None,
    out_dir: str | Path | None = None,
) -> ExperimentConfig:
    """Copy of config with any given paths overridden."""
    paths = config.paths
    return replace(
        config,
        paths=ExperimentPaths(
            train=Path(train) if train else paths.train,
            dev=Path(dev) if dev else paths.dev,
            test=Path(test) if test else paths.test,
            out_dir=Path(out_dir) if out_dir else paths.out_dir,
        ),
    )
