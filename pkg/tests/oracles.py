"""Independent reference implementations used to cross-check the library.

Everything here is deliberately naive (plain loops, recounting, no caching,
no shared code with the package) so that agreement with the fast paths is
meaningful evidence, not circular.
"""

from __future__ import annotations

import math

import numpy as np


# --- TF-IDF ------------------------------------------------------------------

def naive_ngrams(tokens: list[str], ngram_max: int) -> list[str]:
    out = []
    for n in range(1, ngram_max + 1):
        for i in range(len(tokens) - n + 1):
            out.append(" ".join(tokens[i:i + n]))
    return out


def naive_vocabulary(docs, ngram_max: int, max_features: int) -> dict[str, int]:
    totals: dict[str, int] = {}
    for doc in docs:
        for gram in naive_ngrams(doc, ngram_max):
            totals[gram] = totals.get(gram, 0) + 1
    ranked = sorted(totals, key=lambda g: (-totals[g], g))[:max_features]
    return {gram: idx for idx, gram in enumerate(sorted(ranked))}


def naive_tfidf_vector(docs, doc_index: int, ngram_max: int, max_features: int):
    """Recomputes everything per call: vocabulary, df, tf, idf, norm."""
    vocab = naive_vocabulary(docs, ngram_max, max_features)
    n_docs = len(docs)
    weights: dict[int, float] = {}
    doc_grams = naive_ngrams(docs[doc_index], ngram_max)
    for gram, idx in vocab.items():
        tf = sum(1 for g in doc_grams if g == gram)
        if tf == 0:
            continue
        df = sum(1 for d in docs if gram in naive_ngrams(d, ngram_max))
        weights[idx] = tf * (math.log((1 + n_docs) / (1 + df)) + 1.0)
    norm = math.sqrt(sum(w * w for w in weights.values()))
    if norm > 0.0:
        weights = {i: w / norm for i, w in weights.items()}
    return weights


# --- SVM dual ----------------------------------------------------------------

def project_box_hyperplane(a: np.ndarray, y: np.ndarray, c: float) -> np.ndarray:
    """Euclidean projection onto {0 <= alpha <= C, sum(alpha * y) = 0}.

    Bisection on the hyperplane multiplier; sum(y * clip(a + t*y, 0, C)) is
    nondecreasing in t.
    """
    span = c + float(np.abs(a).max(initial=0.0)) + 1.0
    lo, hi = -span, span
    for _ in range(80):
        mid = (lo + hi) / 2.0
        g = float((np.clip(a + mid * y, 0.0, c) * y).sum())
        if g > 0.0:
            hi = mid
        else:
            lo = mid
    return np.clip(a + ((lo + hi) / 2.0) * y, 0.0, c)


def pg_dual_solve(x: np.ndarray, ys, c: float, iters: int = 20000):
    """Projected-gradient ascent on the SVM dual; returns (alpha, objective)."""
    y = np.asarray(ys, dtype=float)
    q = (y[:, None] * y[None, :]) * (x @ x.T)
    step = 1.0 / max(float(np.linalg.eigvalsh(q).max()), 1e-9)
    alpha = np.zeros(len(y))
    for it in range(iters):
        grad = 1.0 - q @ alpha
        updated = project_box_hyperplane(alpha + step * grad, y, c)
        shift = float(np.abs(updated - alpha).max())
        alpha = updated
        if shift < 1e-14:
            break
    objective = float(alpha.sum() - 0.5 * alpha @ q @ alpha)
    return alpha, objective


# --- decision trees ----------------------------------------------------------

def gini_of(labels) -> float:
    n = len(labels)
    if n == 0:
        return 0.0
    acc = 0.0
    for value in set(labels):
        p = sum(1 for lab in labels if lab == value) / n
        acc += p * p
    return 1.0 - acc


def exhaustive_best_split(x: np.ndarray, ys) -> tuple[float, int, float] | None:
    """Scan every (feature, midpoint threshold) pair; smallest weighted Gini."""
    n, dim = x.shape
    best = None
    for feature in range(dim):
        values = sorted(set(float(v) for v in x[:, feature]))
        for low, high in zip(values, values[1:]):
            threshold = (low + high) / 2.0
            left = [ys[i] for i in range(n) if x[i, feature] <= threshold]
            right = [ys[i] for i in range(n) if x[i, feature] > threshold]
            weighted = (len(left) * gini_of(left) + len(right) * gini_of(right)) / n
            if best is None or weighted < best[0]:
                best = (weighted, feature, threshold)
    return best


# --- metrics -----------------------------------------------------------------

def naive_metrics(gold: list[str], predicted: list[str], positive: str = "Yes"):
    """Per-row recount of the confusion matrix and derived metrics."""
    tp = sum(1 for g, p in zip(gold, predicted) if g == positive and p == positive)
    fp = sum(1 for g, p in zip(gold, predicted) if g != positive and p == positive)
    fn = sum(1 for g, p in zip(gold, predicted) if g == positive and p != positive)
    tn = sum(1 for g, p in zip(gold, predicted) if g != positive and p != positive)

    def ratio(num, den):
        return num / den if den else 0.0

    precision = ratio(tp, tp + fp)
    recall = ratio(tp, tp + fn)
    f1 = ratio(2 * precision * recall, precision + recall)
    accuracy = ratio(tp + tn, tp + fp + fn + tn)
    return {
        "tp": tp, "fp": fp, "fn": fn, "tn": tn,
        "precision": precision, "recall": recall, "f1": f1, "accuracy": accuracy,
    }
