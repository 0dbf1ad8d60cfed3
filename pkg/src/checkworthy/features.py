"""TF-IDF weighted n-gram features over token lists.

Fixed conventions so results reproduce exactly: term frequency is the raw
count, idf = ln((1 + n_docs) / (1 + doc_freq)) + 1, document vectors are
L2-normalized. The vocabulary keeps the ``max_features`` n-grams with the
highest total corpus count, ties broken by lexicographic n-gram order;
feature indices then follow lexicographic order of the kept n-grams.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError, UsageError

FORMAT_VERSION = "checkworthy-tfidf v1"


@dataclass
class SparseVector:
    """index -> weight map over one document; treat as immutable once built."""

    entries: dict[int, float] = field(default_factory=dict)

    def dot(self, other: "SparseVector") -> float:
        a, b = self.entries, other.entries
        if len(b) < len(a):
            a, b = b, a
        return sum(w * b[i] for i, w in a.items() if i in b)

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.entries.values()))

    def squared_distance(self, other: "SparseVector") -> float:
        total = 0.0
        for i in self.entries.keys() | other.entries.keys():
            d = self.entries.get(i, 0.0) - other.entries.get(i, 0.0)
            total += d * d
        return total

    def to_dense(self, dim: int) -> list[float]:
        dense = [0.0] * dim
        for i, w in self.entries.items():
            dense[i] = w
        return dense


@dataclass(frozen=True)
class TfIdfModel:
    ngram_max: int
    max_features: int
    n_docs: int
    vocabulary: dict[str, int]          # n-gram -> feature index, gapless 0..V-1
    doc_freq: dict[int, int]            # feature index -> containing-doc count
    idf: dict[int, float]               # feature index -> idf weight

    @property
    def size(self) -> int:
        return len(self.vocabulary)


def extract_ngrams(tokens: list[str], ngram_max: int) -> Counter:
    """All contiguous 1..ngram_max-grams joined by single spaces, with counts."""
    if ngram_max < 1:
        raise UsageError(f"ngram_max must be >= 1, got {ngram_max}")
    grams: Counter = Counter()
    for n in range(1, ngram_max + 1):
        for start in range(len(tokens) - n + 1):
            grams[" ".join(tokens[start:start + n])] += 1
    return grams


def _idf(n_docs: int, df: int) -> float:
    return math.log((1 + n_docs) / (1 + df)) + 1.0


def fit(docs: list[list[str]], ngram_max: int, max_features: int) -> TfIdfModel:
    """Fit vocabulary, document frequencies and idf weights on a token corpus."""
    if not docs:
        raise UsageError("cannot fit TF-IDF on an empty corpus")
    if max_features < 1:
        raise UsageError(f"max_features must be >= 1, got {max_features}")

    totals: Counter = Counter()
    doc_freq_by_gram: Counter = Counter()
    for tokens in docs:
        grams = extract_ngrams(tokens, ngram_max)
        totals.update(grams)
        doc_freq_by_gram.update(grams.keys())

    ranked = sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))[:max_features]
    vocabulary = {gram: idx for idx, gram in enumerate(sorted(g for g, _ in ranked))}
    doc_freq = {idx: doc_freq_by_gram[gram] for gram, idx in vocabulary.items()}
    n_docs = len(docs)
    idf = {idx: _idf(n_docs, df) for idx, df in doc_freq.items()}
    return TfIdfModel(
        ngram_max=ngram_max,
        max_features=max_features,
        n_docs=n_docs,
        vocabulary=vocabulary,
        doc_freq=doc_freq,
        idf=idf,
    )


def transform(model: TfIdfModel, tokens: list[str]) -> SparseVector:
    """tf x idf over in-vocabulary n-grams, L2-normalized when nonzero."""
    grams = extract_ngrams(tokens, model.ngram_max)
    entries: dict[int, float] = {}
    for gram, tf in grams.items():
        idx = model.vocabulary.get(gram)
        if idx is not None:
            entries[idx] = tf * model.idf[idx]
    norm = math.sqrt(sum(w * w for w in entries.values()))
    if norm > 0.0:
        entries = {i: w / norm for i, w in entries.items()}
    return SparseVector(entries=entries)


def transform_corpus(model: TfIdfModel, docs: list[list[str]]) -> list[SparseVector]:
    return [transform(model, tokens) for tokens in docs]


def save_model(model: TfIdfModel, path: str | Path) -> None:
    """Versioned flat file: header, then one `index<TAB>ngram<TAB>doc_freq`
    line per feature. idf is recomputed on load, keeping the format
    independent of float formatting. Tabs in n-grams are escaped."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"{FORMAT_VERSION}\n")
        fh.write(f"ngram_max={model.ngram_max}\tmax_features={model.max_features}"
                 f"\tn_docs={model.n_docs}\n")
        for gram in sorted(model.vocabulary, key=model.vocabulary.get):
            idx = model.vocabulary[gram]
            safe = gram.replace("\\", "\\\\").replace("\t", "\\t")
            fh.write(f"{idx}\t{safe}\t{model.doc_freq[idx]}\n")


def _unescape_gram(safe: str) -> str:
    out, i = [], 0
    while i < len(safe):
        if safe[i] == "\\" and i + 1 < len(safe):
            out.append("\t" if safe[i + 1] == "t" else safe[i + 1])
            i += 2
        else:
            out.append(safe[i])
            i += 1
    return "".join(out)


def load_model(path: str | Path) -> TfIdfModel:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != FORMAT_VERSION:
        raise ParseError(f"not a {FORMAT_VERSION} file", line=1)
    header = dict(item.split("=", 1) for item in lines[1].split("\t"))
    ngram_max = int(header["ngram_max"])
    max_features = int(header["max_features"])
    n_docs = int(header["n_docs"])

    vocabulary: dict[str, int] = {}
    doc_freq: dict[int, int] = {}
    for lineno, line in enumerate(lines[2:], start=3):
        if not line:
            continue
        try:
            idx_s, safe, df_s = line.split("\t")
        except ValueError:
            raise ParseError("expected index<TAB>ngram<TAB>doc_freq", line=lineno)
        gram = _unescape_gram(safe)
        vocabulary[gram] = int(idx_s)
        doc_freq[int(idx_s)] = int(df_s)
    idf = {idx: _idf(n_docs, df) for idx, df in doc_freq.items()}
    return TfIdfModel(
        ngram_max=ngram_max,
        max_features=max_features,
        n_docs=n_docs,
        vocabulary=vocabulary,
        doc_freq=doc_freq,
        idf=idf,
    )
