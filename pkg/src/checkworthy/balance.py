"""Minority-class oversampling in feature space.

Two strategies: SMOTE-style synthetic interpolation (default) and plain
duplication by resampling with replacement. Synthetic points are built as
x + u * (x_nn - x) with x a uniformly drawn minority sample, x_nn one of its
k nearest minority neighbours by Euclidean distance, and u uniform in [0, 1].
Neighbour search is exact brute force: the corpora here are small and
determinism matters more than speed. Synthetic vectors are deliberately not
re-normalized, which would move them off the interpolation segment.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .errors import UsageError
from .features import SparseVector


@dataclass(frozen=True)
class BalanceConfig:
    target_ratio: float = 1.0   # minority/majority after balancing
    k_neighbors: int = 5
    seed: int = 2814
    strategy: str = "smote"     # "smote" | "duplicate"

    def __post_init__(self):
        if not 0.0 < self.target_ratio <= 1.0:
            raise UsageError(f"target_ratio must be in (0, 1], got {self.target_ratio}")
        if self.k_neighbors < 1:
            raise UsageError(f"k_neighbors must be >= 1, got {self.k_neighbors}")
        if self.strategy not in ("smote", "duplicate"):
            raise UsageError(f"unknown strategy {self.strategy!r}")


@dataclass(frozen=True)
class BalanceResult:
    """Balanced sample plus provenance of every synthetic row.

    ``parents`` holds one (base_index, neighbor_index) pair per appended row,
    indices into the *input* vector list. For duplicated rows both entries
    name the copied row.
    """

    vectors: list[SparseVector]
    labels: list[Hashable]
    parents: list[tuple[int, int]]


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def _interpolate(x: SparseVector, x_nn: SparseVector, u: float) -> SparseVector:
    entries: dict[int, float] = {}
    for i in x.entries.keys() | x_nn.entries.keys():
        a = x.entries.get(i, 0.0)
        b = x_nn.entries.get(i, 0.0)
        # Clamp: rounding in a + u*(b - a) must never leave the segment box.
        lo, hi = (a, b) if a <= b else (b, a)
        v = min(max(a + u * (b - a), lo), hi)
        if v != 0.0:
            entries[i] = v
    return SparseVector(entries=entries)


def _neighbor_table(minority: list[SparseVector], k: int) -> list[np.ndarray]:
    """k nearest neighbours per minority row, exact, ties broken by index."""
    m = len(minority)
    dim = 1 + max((max(v.entries) for v in minority if v.entries), default=0)
    dense = np.zeros((m, dim))
    for row, vec in enumerate(minority):
        for i, w in vec.entries.items():
            dense[row, i] = w
    sq_norms = (dense * dense).sum(axis=1)
    gram = dense @ dense.T
    k_eff = min(k, m - 1)
    table = []
    for row in range(m):
        d2 = np.maximum(sq_norms[row] + sq_norms - 2.0 * gram[row], 0.0)
        d2[row] = np.inf  # exclude self, keep duplicate points
        order = np.argsort(d2, kind="stable")
        table.append(order[:k_eff])
    return table


def oversample(
    vectors: Sequence[SparseVector],
    labels: Sequence[Hashable],
    config: BalanceConfig,
) -> BalanceResult:
    """Balance a two-class sample; originals are preserved and come first."""
    if len(vectors) != len(labels):
        raise UsageError("vectors and labels must have the same length")
    counts = Counter(labels)
    if len(counts) != 2:
        raise UsageError(f"expected exactly two classes, got {len(counts)}")

    (maj_label, maj_count), (min_label, min_count) = counts.most_common(2)
    target = _round_half_up(config.target_ratio * maj_count)
    n_needed = target - min_count

    out_vectors = list(vectors)
    out_labels = list(labels)
    parents: list[tuple[int, int]] = []
    if n_needed <= 0:
        return BalanceResult(out_vectors, out_labels, parents)

    minority_idx = [i for i, lab in enumerate(labels) if lab == min_label]
    rng = np.random.default_rng(config.seed)

    strategy = config.strategy
    if strategy == "smote" and len(minority_idx) < 2:
        warnings.warn(
            "minority class has fewer than 2 samples; "
            "falling back to duplication",
            stacklevel=2,
        )
        strategy = "duplicate"

    if strategy == "duplicate":
        for _ in range(n_needed):
            src = minority_idx[rng.integers(len(minority_idx))]
            vec = vectors[src]
            out_vectors.append(SparseVector(entries=dict(vec.entries)))
            out_labels.append(min_label)
            parents.append((src, src))
        return BalanceResult(out_vectors, out_labels, parents)

    minority = [vectors[i] for i in minority_idx]
    neighbors = _neighbor_table(minority, config.k_neighbors)
    for _ in range(n_needed):
        base = int(rng.integers(len(minority)))
        nn_local = int(neighbors[base][rng.integers(len(neighbors[base]))])
        u = float(rng.random())
        out_vectors.append(_interpolate(minority[base], minority[nn_local], u))
        out_labels.append(min_label)
        parents.append((minority_idx[base], minority_idx[nn_local]))
    return BalanceResult(out_vectors, out_labels, parents)


def smote(
    vectors: Sequence[SparseVector],
    labels: Sequence[Hashable],
    config: BalanceConfig,
) -> tuple[list[SparseVector], list[Hashable]]:
    """Oversample and return just (vectors, labels); see ``oversample``."""
    result = oversample(vectors, labels, config)
    return result.vectors, result.labels
