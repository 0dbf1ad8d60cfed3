"""Random forest of Gini-impurity CART trees over sparse feature vectors.

Each tree grows on a bootstrap sample (size = training size, with
replacement) drawn from its own generator seeded with master seed + tree
index, so sequential and parallel training produce bit-identical forests.
Split thresholds are midpoints of consecutive distinct observed values,
with absent sparse entries contributing 0. When the per-node random feature
subset admits no valid threshold, the search widens to the remaining
features before the node becomes a leaf; otherwise a node of distinct
vectors with mixed labels could go impure, and bootstrap training accuracy
must only fall short when duplicate vectors carry conflicting labels.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Sequence

import numpy as np

from .errors import ParseError, UsageError
from .features import SparseVector

FORMAT_VERSION = "checkworthy-forest v1"


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int | None = None
    min_samples_split: int = 2
    features_per_split: str | int = "sqrt"   # "sqrt" | "all" | fixed count
    seed: int = 2814

    def __post_init__(self):
        if self.n_trees < 1:
            raise UsageError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.min_samples_split < 2:
            raise UsageError(
                f"min_samples_split must be >= 2, got {self.min_samples_split}"
            )
        if isinstance(self.features_per_split, str):
            if self.features_per_split not in ("sqrt", "all"):
                raise UsageError(
                    f"features_per_split must be 'sqrt', 'all' or an int, "
                    f"got {self.features_per_split!r}"
                )
        elif self.features_per_split < 1:
            raise UsageError("fixed features_per_split must be >= 1")


@dataclass(frozen=True)
class TreeNode:
    """Internal node (feature/threshold/children) or leaf (children = -1)."""

    feature: int
    threshold: float
    left: int
    right: int
    counts: tuple[int, int]   # (negative, positive) training rows routed here

    @property
    def is_leaf(self) -> bool:
        return self.left < 0


@dataclass(frozen=True)
class DecisionTree:
    nodes: tuple[TreeNode, ...]

    def predict_one(self, dense_row: np.ndarray) -> int:
        node = self.nodes[0]
        while not node.is_leaf:
            value = dense_row[node.feature] if node.feature < len(dense_row) else 0.0
            node = self.nodes[node.left if value <= node.threshold else node.right]
        neg, pos = node.counts
        return 1 if pos > neg else 0

    def predict_many(self, x: np.ndarray) -> np.ndarray:
        """Route a whole (rows, dim) matrix at once; one 0/1 vote per row."""
        votes = np.zeros(len(x), dtype=np.int64)
        stack = [(0, np.arange(len(x)))]
        while stack:
            node_id, rows = stack.pop()
            node = self.nodes[node_id]
            if node.is_leaf:
                neg, pos = node.counts
                if pos > neg:
                    votes[rows] = 1
                continue
            mask = x[rows, node.feature] <= node.threshold
            left_rows, right_rows = rows[mask], rows[~mask]
            if len(left_rows):
                stack.append((node.left, left_rows))
            if len(right_rows):
                stack.append((node.right, right_rows))
        return votes


@dataclass(frozen=True)
class ForestModel:
    config: ForestConfig
    dim: int
    classes: tuple[Hashable, Hashable]    # (negative label, positive label)
    trees: tuple[DecisionTree, ...]


def gini(counts: np.ndarray) -> float:
    """1 - sum(p_i^2) over class proportions; 0 for an empty node."""
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(1.0 - (p * p).sum())


def best_split_on_feature(values: np.ndarray, ys: np.ndarray) -> tuple[float, float] | None:
    """Lowest weighted child Gini over midpoint thresholds of one feature.

    Returns (weighted_impurity, threshold) or None when all values tie.
    Evaluated vectorized across all candidate edges; ties keep the first
    (lowest-threshold) candidate.
    """
    order = np.argsort(values, kind="stable")
    v = values[order]
    y_sorted = ys[order]
    n = len(v)
    edges = np.flatnonzero(v[:-1] != v[1:])
    if len(edges) == 0:
        return None
    pos_prefix = np.cumsum(y_sorted)
    total_pos = pos_prefix[-1]

    n_left = edges + 1.0
    n_right = n - n_left
    pos_left = pos_prefix[edges].astype(float)
    pos_right = total_pos - pos_left
    g_left = 1.0 - (pos_left / n_left) ** 2 - ((n_left - pos_left) / n_left) ** 2
    g_right = 1.0 - (pos_right / n_right) ** 2 - ((n_right - pos_right) / n_right) ** 2
    weighted = (n_left * g_left + n_right * g_right) / n

    best = int(np.argmin(weighted))
    edge = edges[best]
    threshold = (v[edge] + v[edge + 1]) / 2.0
    return float(weighted[best]), float(threshold)


def _subset_size(rule: str | int, dim: int) -> int:
    if rule == "all":
        return dim
    if rule == "sqrt":
        return max(1, int(np.sqrt(dim)))
    return min(int(rule), dim)


def _grow_tree(
    x: np.ndarray,
    ys: np.ndarray,
    sample_idx: np.ndarray,
    sample_weight: np.ndarray,
    config: ForestConfig,
    rng: np.random.Generator,
) -> DecisionTree:
    """Grow one CART tree on a weighted sample.

    The bootstrap multiset is collapsed to (unique row, count) pairs before
    growing; weighted Gini over unique rows is arithmetically identical to
    the duplicated computation (all quantities stay exact integers), only
    cheaper to sort.
    """
    dim = x.shape[1]
    k = _subset_size(config.features_per_split, dim)
    nodes: list[TreeNode] = []

    def build(idx: np.ndarray, weight: np.ndarray, depth: int) -> int:
        node_id = len(nodes)
        nodes.append(None)  # reserve slot so child ids stay in preorder
        total = int(weight.sum())
        pos = int((weight * ys[idx]).sum())
        counts = (total - pos, pos)
        is_pure = pos == 0 or pos == total
        depth_capped = config.max_depth is not None and depth >= config.max_depth
        if is_pure or depth_capped or total < config.min_samples_split:
            nodes[node_id] = TreeNode(-1, 0.0, -1, -1, counts)
            return node_id

        subset = rng.choice(dim, size=k, replace=False) if k < dim else np.arange(dim)
        choice = _search_features(x, ys, idx, weight, subset)
        if choice is None and k < dim:
            rest = np.setdiff1d(np.arange(dim), subset)
            choice = _search_features(x, ys, idx, weight, rest)
        if choice is None:
            # Duplicate vectors with conflicting labels: genuinely unsplittable.
            nodes[node_id] = TreeNode(-1, 0.0, -1, -1, counts)
            return node_id

        _, feature, threshold = choice
        mask = x[idx, feature] <= threshold
        left_id = build(idx[mask], weight[mask], depth + 1)
        right_id = build(idx[~mask], weight[~mask], depth + 1)
        nodes[node_id] = TreeNode(int(feature), float(threshold), left_id, right_id, counts)
        return node_id

    build(sample_idx, sample_weight, 0)
    return DecisionTree(nodes=tuple(nodes))


def _search_features(
    x: np.ndarray,
    ys: np.ndarray,
    idx: np.ndarray,
    weight: np.ndarray,
    features: np.ndarray,
) -> tuple[float, int, float] | None:
    """Best (impurity, feature, threshold) over the given features.

    Vectorized across every candidate feature at once; same arithmetic and
    tie-breaking as ``best_split_on_feature`` (first feature in the examined
    order, then lowest threshold). Row weights are the bootstrap
    multiplicities.
    """
    if len(idx) < 2 or len(features) == 0:
        return None
    sub = x[np.ix_(idx, features)]                       # rows x k
    spans = sub.min(axis=0) != sub.max(axis=0)           # constant columns split nothing
    if not spans.any():
        return None
    keep = np.flatnonzero(spans)
    sub = sub[:, keep]

    order = np.argsort(sub, axis=0, kind="stable")
    v_sorted = np.take_along_axis(sub, order, axis=0)
    w_pos = (weight * ys[idx]).astype(float)[order]
    w_all = weight.astype(float)[order]
    pos_prefix = np.cumsum(w_pos, axis=0)
    n_prefix = np.cumsum(w_all, axis=0)
    total_pos = pos_prefix[-1, :]
    n = float(n_prefix[-1, 0])

    valid = v_sorted[:-1, :] != v_sorted[1:, :]
    # For two classes, minimizing weighted Gini is minimizing
    # pos_l*neg_l/n_l + pos_r*neg_r/n_r; cheaper per edge, same ordering.
    n_left = n_prefix[:-1, :]
    n_right = n - n_left
    pos_left = pos_prefix[:-1, :]
    pos_right = total_pos[None, :] - pos_left
    score = (
        pos_left * (n_left - pos_left) / n_left
        + pos_right * (n_right - pos_right) / n_right
    )
    score = np.where(valid, score, np.inf)

    per_feature = score.min(axis=0)
    feature_pos = int(np.argmin(per_feature))
    if not np.isfinite(per_feature[feature_pos]):
        return None
    edge = int(np.argmin(score[:, feature_pos]))

    # exact weighted Gini for the winner, matching best_split_on_feature
    n_l = float(n_prefix[edge, feature_pos])
    n_r = n - n_l
    p_l = float(pos_prefix[edge, feature_pos])
    p_r = float(total_pos[feature_pos]) - p_l
    g_l = 1.0 - (p_l / n_l) ** 2 - ((n_l - p_l) / n_l) ** 2
    g_r = 1.0 - (p_r / n_r) ** 2 - ((n_r - p_r) / n_r) ** 2
    weighted = (n_l * g_l + n_r * g_r) / n
    threshold = (v_sorted[edge, feature_pos] + v_sorted[edge + 1, feature_pos]) / 2.0
    return (weighted, int(features[keep[feature_pos]]), float(threshold))


def _densify(vectors: Sequence[SparseVector], dim: int | None) -> np.ndarray:
    inferred = 1 + max(
        (max(v.entries) for v in vectors if v.entries), default=-1
    )
    dim = max(inferred, 1) if dim is None else dim
    x = np.zeros((len(vectors), dim))
    for row, vec in enumerate(vectors):
        for i, w in vec.entries.items():
            x[row, i] = w
    return x


def train(
    vectors: Sequence[SparseVector],
    labels: Sequence[Hashable],
    config: ForestConfig | None = None,
    dim: int | None = None,
    positive_label: Hashable | None = None,
    n_workers: int = 1,
) -> ForestModel:
    """Grow the forest; n_workers > 1 trains trees concurrently with
    identical results because every tree owns an independent seeded stream."""
    config = config or ForestConfig()
    if len(vectors) < 2:
        raise UsageError("training needs at least 2 samples")
    if len(vectors) != len(labels):
        raise UsageError("vectors and labels must have the same length")
    classes = sorted(set(labels), key=repr)
    if len(classes) != 2:
        raise UsageError(f"expected exactly two classes, got {len(classes)}")
    if positive_label is not None:
        if positive_label not in classes:
            raise UsageError(f"positive_label {positive_label!r} not in data")
        classes = [c for c in classes if c != positive_label] + [positive_label]
    negative, positive = classes

    x = _densify(vectors, dim)
    ys = np.array([1 if lab == positive else 0 for lab in labels])
    n = len(vectors)

    def one_tree(tree_index: int) -> DecisionTree:
        rng = np.random.default_rng(config.seed + tree_index)
        bootstrap = rng.integers(0, n, size=n)
        unique_rows, multiplicity = np.unique(bootstrap, return_counts=True)
        return _grow_tree(x, ys, unique_rows, multiplicity, config, rng)

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            trees = tuple(pool.map(one_tree, range(config.n_trees)))
    else:
        trees = tuple(one_tree(i) for i in range(config.n_trees))

    return ForestModel(
        config=config, dim=x.shape[1], classes=(negative, positive), trees=trees
    )


def vote_fraction(model: ForestModel, v: SparseVector) -> float:
    """Fraction of trees voting for the positive class."""
    dense = np.zeros(model.dim)
    for i, w in v.entries.items():
        if i < model.dim:
            dense[i] = w
    votes = sum(tree.predict_one(dense) for tree in model.trees)
    return votes / len(model.trees)


def vote_fractions(model: ForestModel, vectors: Sequence[SparseVector]) -> np.ndarray:
    """Batch counterpart of vote_fraction; exact same per-row fractions."""
    x = np.zeros((len(vectors), model.dim))
    for row, vec in enumerate(vectors):
        for i, w in vec.entries.items():
            if i < model.dim:
                x[row, i] = w
    votes = np.zeros(len(vectors), dtype=np.int64)
    for tree in model.trees:
        votes += tree.predict_many(x)
    return votes / len(model.trees)


def predict(model: ForestModel, v: SparseVector) -> Hashable:
    """Majority vote over trees; exact ties go to the negative class."""
    fraction = vote_fraction(model, v)
    return model.classes[1] if fraction > 0.5 else model.classes[0]


def save_model(model: ForestModel, path: str | Path) -> None:
    """Versioned flat file with one node table per tree.

    Class labels are persisted as strings (enum labels store their value).
    """
    cfg = model.config
    negative, positive = (getattr(c, "value", c) for c in model.classes)
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"{FORMAT_VERSION}\n")
        fh.write(
            f"n_trees={cfg.n_trees}\tmax_depth={cfg.max_depth}"
            f"\tmin_samples_split={cfg.min_samples_split}"
            f"\tfeatures_per_split={cfg.features_per_split}"
            f"\tseed={cfg.seed}\tdim={model.dim}"
            f"\tnegative={negative}\tpositive={positive}\n"
        )
        for tree in model.trees:
            fh.write(f"tree {len(tree.nodes)}\n")
            for node in tree.nodes:
                fh.write(
                    f"{node.feature}\t{node.threshold!r}\t{node.left}"
                    f"\t{node.right}\t{node.counts[0]}\t{node.counts[1]}\n"
                )


def load_model(path: str | Path) -> ForestModel:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != FORMAT_VERSION:
        raise ParseError(f"not a {FORMAT_VERSION} file", line=1)
    header = dict(item.split("=", 1) for item in lines[1].split("\t"))
    rule = header["features_per_split"]
    config = ForestConfig(
        n_trees=int(header["n_trees"]),
        max_depth=None if header["max_depth"] == "None" else int(header["max_depth"]),
        min_samples_split=int(header["min_samples_split"]),
        features_per_split=rule if rule in ("sqrt", "all") else int(rule),
        seed=int(header["seed"]),
    )
    trees: list[DecisionTree] = []
    pos = 2
    while pos < len(lines):
        line = lines[pos]
        pos += 1
        if not line:
            continue
        if not line.startswith("tree "):
            raise ParseError(f"expected tree header, got {line!r}", line=pos)
        count = int(line.split(" ", 1)[1])
        nodes = []
        for offset in range(count):
            feature_s, thr_s, left_s, right_s, neg_s, pos_s = lines[pos + offset].split("\t")
            nodes.append(
                TreeNode(
                    feature=int(feature_s),
                    threshold=float(thr_s),
                    left=int(left_s),
                    right=int(right_s),
                    counts=(int(neg_s), int(pos_s)),
                )
            )
        pos += count
        trees.append(DecisionTree(nodes=tuple(nodes)))
    return ForestModel(
        config=config,
        dim=int(header["dim"]),
        classes=(header["negative"], header["positive"]),
        trees=tuple(trees),
    )
