"""Fine-tuning configuration and the bundled per-language recipes."""

from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .errors import UsageError

MODEL_CHECKPOINTS = {
    "bert-m": "bert-base-multilingual-cased",
    "xlm-r": "xlm-roberta-base",
}
LANGUAGES = ("dutch", "english", "spanish")


@dataclass(frozen=True)
class FinetuneConfig:
    model: str                     # "bert-m" | "xlm-r"
    language: str
    learning_rate: float = 1e-5
    epochs: int = 1
    batch_size: int = 16
    max_sequence_length: int = 128
    seed: int = 2814
    toy_scale: int | None = None   # row cap for smoke runs; None = full scale
    preprocessed: bool = False     # input text was already cleaned upstream
    id_col: str = "tweet_id"
    text_col: str = "tweet_text"
    label_col: str = "class_label"
    label_map: dict[str, str] | None = None

    def __post_init__(self):
        if self.model not in MODEL_CHECKPOINTS:
            raise UsageError(
                f"model must be one of {sorted(MODEL_CHECKPOINTS)}, got {self.model!r}"
            )
        if self.language not in LANGUAGES:
            raise UsageError(f"language must be one of {LANGUAGES}, got {self.language!r}")
        if self.learning_rate <= 0:
            raise UsageError("learning_rate must be positive")
        if self.epochs < 0:
            raise UsageError("epochs must be >= 0")
        if self.batch_size < 1 or self.max_sequence_length < 8:
            raise UsageError("batch_size >= 1 and max_sequence_length >= 8 required")
        if self.toy_scale is not None and self.toy_scale < 2:
            raise UsageError("toy_scale must cap to at least 2 rows")

    @property
    def checkpoint_name(self) -> str:
        return MODEL_CHECKPOINTS[self.model]


def parse_config_text(text: str) -> FinetuneConfig:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        pairs[key.strip()] = value.strip()
    pairs = {k: v for k, v in pairs.items() if v != ""}

    label_map = None
    if "label_map" in pairs:
        label_map = dict(item.split(":", 1) for item in pairs.pop("label_map").split(","))
    known = {
        "model": str, "language": str, "learning_rate": float, "epochs": int,
        "batch_size": int, "max_sequence_length": int, "seed": int,
        "toy_scale": int, "id_col": str, "text_col": str, "label_col": str,
        "preprocessed": lambda v: v.lower() in ("true", "1", "yes"),
    }
    kwargs = {}
    for key, value in pairs.items():
        if key not in known:
            raise UsageError(f"unknown config key {key!r}")
        kwargs[key] = known[key](value)
    if "model" not in kwargs or "language" not in kwargs:
        raise UsageError("config must set model and language")
    return FinetuneConfig(label_map=label_map, **kwargs)


def load_config(path: str | Path) -> FinetuneConfig:
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def bundled_recipes() -> dict[str, str]:
    out = {}
    recipe_dir = resources.files("transformer_harness").joinpath("recipes")
    for entry in sorted(recipe_dir.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".cfg"):
            out[entry.name[:-4]] = entry.read_text(encoding="utf-8")
    return out


def load_bundled_config(name: str) -> FinetuneConfig:
    recipes = bundled_recipes()
    if name not in recipes:
        raise UsageError(
            f"unknown recipe {name!r}; available: {', '.join(sorted(recipes))}"
        )
    return parse_config_text(recipes[name])


def resolve_config(name_or_path: str) -> FinetuneConfig:
    if Path(name_or_path).exists():
        return load_config(name_or_path)
    return load_bundled_config(name_or_path)


def with_overrides(config: FinetuneConfig, **overrides) -> FinetuneConfig:
    effective = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **effective) if effective else config


def render_config(config: FinetuneConfig) -> str:
    lines = [
        f"model={config.model}",
        f"language={config.language}",
        f"learning_rate={config.learning_rate!r}",
        f"epochs={config.epochs}",
        f"batch_size={config.batch_size}",
        f"max_sequence_length={config.max_sequence_length}",
        f"seed={config.seed}",
        f"toy_scale={'' if config.toy_scale is None else config.toy_scale}",
        f"preprocessed={str(config.preprocessed).lower()}",
        f"id_col={config.id_col}",
        f"text_col={config.text_col}",
        f"label_col={config.label_col}",
    ]
    if config.label_map:
        lines.append("label_map=" + ",".join(
            f"{k}:{v}" for k, v in sorted(config.label_map.items())
        ))
    return "\n".join(lines) + "\n"
