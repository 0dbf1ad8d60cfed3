"""Binary soft-margin SVM trained by sequential minimal optimization.

Linear kernel over sparse vectors. The optimizer keeps the weight vector
explicit (w = sum alpha_i y_i x_i), so kernel evaluations against the full
training set are never materialized; each pair update touches w only on the
union of the two support patterns. Pair selection is the first-order
heuristic: for a KKT-violating sample i, pick j maximizing |E_i - E_j|, ties
and fallback candidates drawn from a seeded random stream. Convergence is
declared after ``max_passes`` consecutive full passes in which no multiplier
moved by more than 1e-8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError, ParseError, UsageError
from .features import SparseVector

FORMAT_VERSION = "checkworthy-svm v1"

_ALPHA_CHANGE_EPS = 1e-8
_HARD_PASS_CAP = 2000


@dataclass(frozen=True)
class SvmConfig:
    c: float = 1.0
    kernel: str = "linear"
    tol_kkt: float = 1e-3
    max_passes: int = 10
    seed: int = 2814

    def __post_init__(self):
        if self.c <= 0:
            raise UsageError(f"c must be positive, got {self.c}")
        if self.tol_kkt <= 0:
            raise UsageError(f"tol_kkt must be positive, got {self.tol_kkt}")
        if self.kernel != "linear":
            raise UsageError(f"unsupported kernel {self.kernel!r}")


@dataclass
class SvmModel:
    """Support expansion of the decision function sum(a_i y_i <x_i, v>) + b."""

    config: SvmConfig
    support_vectors: list[SparseVector]
    alphas: list[float]
    labels: list[int]                 # +1 / -1 per support vector
    bias: float
    support_indices: list[int] = field(default_factory=list)
    _weights: np.ndarray | None = field(default=None, repr=False, compare=False)

    def weight_vector(self) -> np.ndarray:
        if self._weights is None:
            dim = 1 + max(
                (max(v.entries) for v in self.support_vectors if v.entries),
                default=0,
            )
            w = np.zeros(dim)
            for alpha, y, vec in zip(self.alphas, self.labels, self.support_vectors):
                for i, value in vec.entries.items():
                    w[i] += alpha * y * value
            object.__setattr__(self, "_weights", w)
        return self._weights


def _sparse_dot_dense(w: np.ndarray, v: SparseVector) -> float:
    # Features beyond the training dimensionality contribute nothing.
    return float(sum(w[i] * x for i, x in v.entries.items() if i < len(w)))


def decision_value(model: SvmModel, v: SparseVector) -> float:
    return _sparse_dot_dense(model.weight_vector(), v) + model.bias


def predict(model: SvmModel, v: SparseVector) -> int:
    """+1 for the positive side, -1 otherwise; an exact 0 goes negative."""
    return 1 if decision_value(model, v) > 0.0 else -1


def train(
    vectors: Sequence[SparseVector],
    labels: Sequence[int],
    config: SvmConfig | None = None,
) -> SvmModel:
    config = config or SvmConfig()
    n = len(vectors)
    if n != len(labels):
        raise UsageError("vectors and labels must have the same length")
    if set(labels) != {1, -1}:
        if len(set(labels)) == 1:
            raise UsageError("training needs both classes present")
        raise UsageError(f"labels must be +1/-1, got {sorted(set(labels))!r}")
    for vec in vectors:
        for value in vec.entries.values():
            if not math.isfinite(value):
                raise DataError("non-finite feature value in training data")

    dim = 1 + max((max(v.entries) for v in vectors if v.entries), default=0)
    y = np.asarray(labels, dtype=float)
    c = config.c
    tol = config.tol_kkt
    rng = np.random.default_rng(config.seed)

    # Flat sparse layout so per-pass error recomputes are single numpy calls.
    nnz = np.array([len(v.entries) for v in vectors], dtype=np.int64)
    row_ids = np.repeat(np.arange(n, dtype=np.int64), nnz)
    cols = np.empty(int(nnz.sum()), dtype=np.int64)
    vals = np.empty(int(nnz.sum()))
    cursor = 0
    for vec in vectors:
        for col, value in sorted(vec.entries.items()):
            cols[cursor] = col
            vals[cursor] = value
            cursor += 1

    def kernel_column(vec: SparseVector) -> np.ndarray:
        """<x_k, vec> for every training row k."""
        if len(cols) == 0:
            return np.zeros(n)
        dense = np.zeros(dim)
        for col, value in vec.entries.items():
            dense[col] = value
        return np.bincount(row_ids, weights=vals * dense[cols], minlength=n)

    kk = np.array([v.dot(v) for v in vectors])  # diagonal kernel entries
    alphas = np.zeros(n)
    w = np.zeros(dim)
    b = 0.0
    # Error cache: recomputed exactly at every pass start, nudged
    # incrementally after each successful step. A pass that takes no steps
    # therefore checks every sample against the exact current (w, b).
    errors = np.zeros(n)

    def take_step(i: int, j: int) -> bool:
        nonlocal b
        if i == j:
            return False
        e_i, e_j = errors[i], errors[j]
        a_i_old, a_j_old = alphas[i], alphas[j]
        if y[i] != y[j]:
            low = max(0.0, a_j_old - a_i_old)
            high = min(c, c + a_j_old - a_i_old)
        else:
            low = max(0.0, a_i_old + a_j_old - c)
            high = min(c, a_i_old + a_j_old)
        if high - low < 1e-12:
            return False
        k_ij = vectors[i].dot(vectors[j])
        eta = 2.0 * k_ij - kk[i] - kk[j]
        if eta >= 0.0:
            return False
        a_j = a_j_old - y[j] * (e_i - e_j) / eta
        a_j = min(high, max(low, a_j))
        if abs(a_j - a_j_old) < _ALPHA_CHANGE_EPS:
            return False
        a_i = a_i_old + y[i] * y[j] * (a_j_old - a_j)

        delta_i = (a_i - a_i_old) * y[i]
        delta_j = (a_j - a_j_old) * y[j]
        for idx, value in vectors[i].entries.items():
            w[idx] += delta_i * value
        for idx, value in vectors[j].entries.items():
            w[idx] += delta_j * value

        b1 = b - e_i - delta_i * kk[i] - delta_j * k_ij
        b2 = b - e_j - delta_i * k_ij - delta_j * kk[j]
        b_old = b
        if 0.0 < a_i < c:
            b = b1
        elif 0.0 < a_j < c:
            b = b2
        else:
            b = (b1 + b2) / 2.0
        alphas[i], alphas[j] = a_i, a_j
        errors[:] += (
            delta_i * kernel_column(vectors[i])
            + delta_j * kernel_column(vectors[j])
            + (b - b_old)
        )
        return True

    quiet_passes = 0
    total_passes = 0
    while quiet_passes < config.max_passes and total_passes < _HARD_PASS_CAP:
        changed = 0
        total_passes += 1
        if len(cols):
            errors = np.bincount(row_ids, weights=vals * w[cols], minlength=n) + b - y
        else:
            errors = np.full(n, b) - y
        for i in range(n):
            e_i = errors[i]
            r_i = e_i * y[i]
            if not ((r_i < -tol and alphas[i] < c) or (r_i > tol and alphas[i] > 0)):
                continue
            gaps = np.abs(e_i - errors)
            gaps[i] = -1.0
            best = np.flatnonzero(gaps == gaps.max())
            j = int(best[rng.integers(len(best))]) if len(best) > 1 else int(best[0])
            if take_step(i, j):
                changed += 1
                continue
            # Fallback: try the remaining candidates in seeded random order.
            for j in rng.permutation(n):
                j = int(j)
                if j == i:
                    continue
                if take_step(i, j):
                    changed += 1
                    break
        quiet_passes = quiet_passes + 1 if changed == 0 else 0

    b = _refit_bias(vectors, y, alphas, w, b, c)

    support = [i for i in range(n) if alphas[i] > 0.0]
    model = SvmModel(
        config=config,
        support_vectors=[vectors[i] for i in support],
        alphas=[float(alphas[i]) for i in support],
        labels=[int(labels[i]) for i in support],
        bias=float(b),
        support_indices=support,
    )
    return model


def _refit_bias(
    vectors: Sequence[SparseVector],
    y: np.ndarray,
    alphas: np.ndarray,
    w: np.ndarray,
    b_running: float,
    c: float,
    eps: float = 1e-9,
) -> float:
    """Pick the bias from the final multipliers rather than trusting the
    running SMO estimate.

    With free support vectors (0 < alpha < C) the KKT equalities pin b at
    y_i - <w, x_i>; the mean is the least-squares choice. When every
    multiplier sits at a bound the KKT system only constrains b to an
    interval, and the running estimate can land outside it even though the
    multipliers are optimal; the interval midpoint fixes that. The running
    value is kept whenever it scores no worse.
    """
    n = len(y)
    u = np.array([_sparse_dot_dense(w, vectors[i]) for i in range(n)])
    candidates = [b_running]
    free = [y[i] - u[i] for i in range(n) if eps < alphas[i] < c - eps]
    if free:
        candidates.append(float(np.mean(free)))
    else:
        lows = [y[i] - u[i] for i in range(n)
                if (y[i] > 0 and alphas[i] <= eps)
                or (y[i] < 0 and alphas[i] >= c - eps)]
        highs = [y[i] - u[i] for i in range(n)
                 if (y[i] > 0 and alphas[i] >= c - eps)
                 or (y[i] < 0 and alphas[i] <= eps)]
        if lows and highs:
            candidates.append((max(lows) + min(highs)) / 2.0)

    def worst_violation(bias: float) -> float:
        worst = 0.0
        for i in range(n):
            margin = y[i] * (u[i] + bias)
            if alphas[i] <= eps:
                worst = max(worst, 1.0 - margin)
            elif alphas[i] >= c - eps:
                worst = max(worst, margin - 1.0)
            else:
                worst = max(worst, abs(margin - 1.0))
        return worst

    return float(min(candidates, key=worst_violation))


def dual_objective(
    vectors: Sequence[SparseVector], labels: Sequence[int], alphas: Sequence[float]
) -> float:
    """W(alpha) = sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j <x_i, x_j>."""
    n = len(vectors)
    total = float(sum(alphas))
    quad = 0.0
    for i in range(n):
        if alphas[i] == 0.0:
            continue
        for j in range(n):
            if alphas[j] == 0.0:
                continue
            quad += alphas[i] * alphas[j] * labels[i] * labels[j] * vectors[i].dot(vectors[j])
    return total - 0.5 * quad


def save_model(model: SvmModel, path: str | Path) -> None:
    """Versioned flat file: config echo, bias, then one line per support
    vector (alpha, y, index:weight pairs)."""
    cfg = model.config
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"{FORMAT_VERSION}\n")
        fh.write(f"c={cfg.c!r}\tkernel={cfg.kernel}\ttol_kkt={cfg.tol_kkt!r}"
                 f"\tmax_passes={cfg.max_passes}\tseed={cfg.seed}\n")
        fh.write(f"bias={model.bias!r}\n")
        for alpha, label, vec, idx in zip(
            model.alphas, model.labels, model.support_vectors,
            model.support_indices or [-1] * len(model.alphas),
        ):
            entries = " ".join(
                f"{i}:{vec.entries[i]!r}" for i in sorted(vec.entries)
            )
            fh.write(f"{alpha!r}\t{label}\t{idx}\t{entries}\n")


def load_model(path: str | Path) -> SvmModel:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != FORMAT_VERSION:
        raise ParseError(f"not a {FORMAT_VERSION} file", line=1)
    header = dict(item.split("=", 1) for item in lines[1].split("\t"))
    config = SvmConfig(
        c=float(header["c"]),
        kernel=header["kernel"],
        tol_kkt=float(header["tol_kkt"]),
        max_passes=int(header["max_passes"]),
        seed=int(header["seed"]),
    )
    bias = float(lines[2].split("=", 1)[1])
    alphas: list[float] = []
    labels: list[int] = []
    indices: list[int] = []
    support_vectors: list[SparseVector] = []
    for lineno, line in enumerate(lines[3:], start=4):
        if not line:
            continue
        try:
            alpha_s, label_s, idx_s, entries_s = line.split("\t")
        except ValueError:
            raise ParseError("expected alpha<TAB>y<TAB>index<TAB>entries", line=lineno)
        alphas.append(float(alpha_s))
        labels.append(int(label_s))
        indices.append(int(idx_s))
        entries = {}
        if entries_s:
            for pair in entries_s.split(" "):
                key, value = pair.split(":", 1)
                entries[int(key)] = float(value)
        support_vectors.append(SparseVector(entries=entries))
    return SvmModel(
        config=config,
        support_vectors=support_vectors,
        alphas=alphas,
        labels=labels,
        bias=bias,
        support_indices=indices,
    )
