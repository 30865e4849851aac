"""Extremely randomized trees regressor with deterministic persistence.

Implemented from scratch so the behaviour needed here is actually
guaranteed: every tree is grown on the full sample (no bootstrap), each
node draws k candidate features and one uniform threshold per candidate
inside the node's observed range, and the best candidate by variance
reduction wins with ties broken toward the lowest feature index, then the
lowest threshold. Tree t derives its RNG from seed + t, so ensembles with
a shared seed share their first trees and scheduling cannot change the
result. Training rows are put into a canonical lexicographic order first,
which makes the model a pure function of the row *set*, the config and the
seed; identical inputs give byte-identical model files.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    CorruptModel,
    EmptyTrainingSet,
    InconsistentLayout,
    LayoutMismatch,
    VersionMismatch,
)
from .feature_assembly import APPROACH_FEATURE_LENGTHS, FeatureVector, column_names
from .ioutil import atomic_write_text

_FORMAT_LINE = "ladderforge-extra-trees v1"


@dataclass(frozen=True)
class ExtraTreesConfig:
    n_trees: int = 100
    min_samples_leaf: int = 1
    k_features: int | None = None  # None: ceil(d / 3)


@dataclass(frozen=True)
class Tree:
    """Flat pre-order node arrays; feature == -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray


@dataclass(frozen=True)
class ExtraTreesModel:
    approach: int
    columns: tuple[str, ...]
    n_trees: int
    min_samples_leaf: int
    k_features: int
    seed: int
    trees: tuple[Tree, ...] = field(repr=False)


def train(rows, config: ExtraTreesConfig | None = None, seed: int = 0) -> ExtraTreesModel:
    """Fit an ensemble on (FeatureVector, target) rows."""
    config = config or ExtraTreesConfig()
    rows = list(rows)
    if not rows:
        raise EmptyTrainingSet("no training rows")
    approach = rows[0][0].approach
    width = len(rows[0][0].values)
    for vec, _ in rows:
        if vec.approach != approach or len(vec.values) != width:
            raise InconsistentLayout(
                f"mixed layouts: approach {vec.approach}/{approach}, "
                f"width {len(vec.values)}/{width}"
            )
    X = np.array([vec.values for vec, _ in rows], dtype=np.float64)
    y = np.array([target for _, target in rows], dtype=np.float64)

    # canonical row order: sort lexicographically by features then target
    keys = [y] + [X[:, j] for j in reversed(range(width))]
    order = np.lexsort(keys)
    X, y = X[order], y[order]

    k = config.k_features if config.k_features is not None else math.ceil(width / 3)
    k = max(1, min(k, width))
    trees = tuple(
        _grow_tree(X, y, k, config.min_samples_leaf, np.random.default_rng(seed + t))
        for t in range(config.n_trees)
    )
    return ExtraTreesModel(
        approach=approach,
        columns=tuple(column_names(approach)),
        n_trees=config.n_trees,
        min_samples_leaf=config.min_samples_leaf,
        k_features=k,
        seed=seed,
        trees=trees,
    )


def _choose_split(sub, ys, k, min_leaf, rng):
    lows = sub.min(axis=0)
    highs = sub.max(axis=0)
    usable = np.flatnonzero(highs > lows)
    if usable.size == 0:
        return None
    cands = rng.choice(usable, size=min(k, usable.size), replace=False)
    thresholds = rng.uniform(lows[cands], highs[cands])
    best = None
    for f, thr in zip(cands, thresholds):
        f, thr = int(f), float(thr)
        if not (lows[f] < thr < highs[f]):
            continue  # degenerate draw at the range edge
        mask = sub[:, f] <= thr
        n_left = int(mask.sum())
        n_right = len(ys) - n_left
        if n_left < min_leaf or n_right < min_leaf:
            continue
        y_left = ys[mask]
        y_right = ys[~mask]
        s_left, s_right = y_left.sum(), y_right.sum()
        # total child SSE; minimizing it maximizes variance reduction
        cost = float(
            (y_left * y_left).sum() - s_left * s_left / n_left
            + (y_right * y_right).sum() - s_right * s_right / n_right
        )
        if (
            best is None
            or cost < best[0]
            or (cost == best[0] and (f, thr) < (best[1], best[2]))
        ):
            best = (cost, f, thr, mask)
    if best is None:
        return None
    return best[1], best[2], best[3]


def _grow_tree(X, y, k, min_leaf, rng) -> Tree:
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    # LIFO with the right child pushed first, so nodes append in pre-order
    stack = [(np.arange(len(y)), -1, False)]
    while stack:
        idx, parent, is_left = stack.pop()
        node = len(feature)
        if parent >= 0:
            (left if is_left else right)[parent] = node
        ys = y[idx]
        lo, hi = ys.min(), ys.max()
        split = None
        if len(idx) >= 2 * min_leaf and lo < hi:
            split = _choose_split(X[idx], ys, k, min_leaf, rng)
        if split is None:
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            # a pure leaf stores the common target exactly, no mean round-off
            value.append(float(ys[0]) if lo == hi else float(ys.mean()))
        else:
            f, thr, mask = split
            feature.append(f)
            threshold.append(thr)
            left.append(-1)
            right.append(-1)
            value.append(0.0)
            stack.append((idx[~mask], node, False))
            stack.append((idx[mask], node, True))
    return Tree(
        np.asarray(feature, dtype=np.int32),
        np.asarray(threshold, dtype=np.float64),
        np.asarray(left, dtype=np.int32),
        np.asarray(right, dtype=np.int32),
        np.asarray(value, dtype=np.float64),
    )


def _tree_predict(tree: Tree, X: np.ndarray) -> np.ndarray:
    idx = np.zeros(len(X), dtype=np.int64)
    active = np.flatnonzero(tree.feature[idx] >= 0)
    while active.size:
        cur = idx[active]
        go_left = X[active, tree.feature[cur]] <= tree.threshold[cur]
        nxt = np.where(go_left, tree.left[cur], tree.right[cur])
        idx[active] = nxt
        active = active[tree.feature[nxt] >= 0]
    return tree.value[idx]


def predict_batch(model: ExtraTreesModel, X) -> np.ndarray:
    """Ensemble predictions for an (n, d) array in the model's layout."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != len(model.columns):
        raise LayoutMismatch(
            f"expected (n, {len(model.columns)}) query, got shape {X.shape}"
        )
    per_tree = np.stack([_tree_predict(tree, X) for tree in model.trees])
    # accumulate tree by tree so the summation order is the same for any
    # batch size; the mean of the votes lies inside their range, so the
    # clip removes the last-ulp slop and identical votes return exactly
    total = np.zeros(X.shape[0])
    for votes in per_tree:
        total += votes
    mean = total / len(model.trees)
    return np.clip(mean, per_tree.min(axis=0), per_tree.max(axis=0))


def predict(model: ExtraTreesModel, vec: FeatureVector) -> float:
    if vec.approach != model.approach:
        raise LayoutMismatch(
            f"model was trained for approach {model.approach}, query is {vec.approach}"
        )
    return float(predict_batch(model, np.asarray(vec.values)[None, :])[0])


# ---------------------------------------------------------------------------
# persistence: versioned structured text with a body checksum
# ---------------------------------------------------------------------------

def _body_lines(model: ExtraTreesModel) -> list[str]:
    lines = []
    for t, tree in enumerate(model.trees):
        lines.append(f"tree {t}")
        for i in range(len(tree.feature)):
            if tree.feature[i] < 0:
                lines.append(f"l {float(tree.value[i])!r}")
            else:
                lines.append(f"s {int(tree.feature[i])} {float(tree.threshold[i])!r}")
    return lines


def save_model(model: ExtraTreesModel, path) -> None:
    body = "\n".join(_body_lines(model)) + "\n"
    digest = hashlib.sha256(body.encode()).hexdigest()
    header = "\n".join(
        [
            _FORMAT_LINE,
            f"approach {model.approach}",
            "columns " + ",".join(model.columns),
            f"n_trees {model.n_trees}",
            f"min_samples_leaf {model.min_samples_leaf}",
            f"k_features {model.k_features}",
            f"seed {model.seed}",
            f"checksum {digest}",
            "---",
        ]
    )
    atomic_write_text(path, header + "\n" + body)


def _parse_header(lines: list[str]) -> dict:
    fields = {}
    for line in lines:
        key, _, rest = line.partition(" ")
        fields[key] = rest
    return fields


def load_model(path) -> ExtraTreesModel:
    text = Path(path).read_text()
    head, sep, body = text.partition("\n---\n")
    if not sep:
        raise CorruptModel(f"{path}: missing header/body separator")
    header_lines = head.split("\n")
    if header_lines[0] != _FORMAT_LINE:
        raise VersionMismatch(
            f"{path}: expected {_FORMAT_LINE!r}, found {header_lines[0]!r}"
        )
    fields = _parse_header(header_lines[1:])
    try:
        approach = int(fields["approach"])
        columns = tuple(fields["columns"].split(","))
        n_trees = int(fields["n_trees"])
        min_samples_leaf = int(fields["min_samples_leaf"])
        k_features = int(fields["k_features"])
        seed = int(fields["seed"])
        checksum = fields["checksum"]
    except (KeyError, ValueError) as exc:
        raise CorruptModel(f"{path}: bad header ({exc})") from None
    if hashlib.sha256(body.encode()).hexdigest() != checksum:
        raise CorruptModel(f"{path}: body checksum mismatch")
    if approach not in APPROACH_FEATURE_LENGTHS or len(columns) != APPROACH_FEATURE_LENGTHS[approach]:
        raise CorruptModel(f"{path}: layout does not match approach {approach}")

    trees = _parse_trees(body, path)
    if len(trees) != n_trees:
        raise CorruptModel(f"{path}: expected {n_trees} trees, found {len(trees)}")
    return ExtraTreesModel(
        approach, columns, n_trees, min_samples_leaf, k_features, seed, tuple(trees)
    )


def _parse_trees(body: str, path) -> list[Tree]:
    trees: list[Tree] = []
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []
    # stack of (node, next slot is left?) for pre-order reconstruction
    pending: list[list] = []

    def flush():
        if not feature:
            return
        if pending:
            raise CorruptModel(f"{path}: tree truncated mid-branch")
        trees.append(
            Tree(
                np.asarray(feature, dtype=np.int32),
                np.asarray(threshold, dtype=np.float64),
                np.asarray(left, dtype=np.int32),
                np.asarray(right, dtype=np.int32),
                np.asarray(value, dtype=np.float64),
            )
        )
        feature.clear(); threshold.clear(); left.clear(); right.clear(); value.clear()

    for line in body.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "tree":
            flush()
            continue
        node = len(feature)
        if pending:
            parent, want_left = pending[-1]
            if want_left:
                left[parent] = node
                pending[-1][1] = False
            else:
                right[parent] = node
                pending.pop()
        elif node != 0:
            raise CorruptModel(f"{path}: dangling node outside any branch")
        try:
            if parts[0] == "l" and len(parts) == 2:
                feature.append(-1); threshold.append(0.0)
                left.append(-1); right.append(-1)
                value.append(float(parts[1]))
            elif parts[0] == "s" and len(parts) == 3:
                feature.append(int(parts[1])); threshold.append(float(parts[2]))
                left.append(-1); right.append(-1); value.append(0.0)
                pending.append([node, True])
            else:
                raise ValueError(f"bad node line {line!r}")
        except ValueError as exc:
            raise CorruptModel(f"{path}: {exc}") from None
    flush()
    return trees


# ---------------------------------------------------------------------------
# evaluation metrics
# ---------------------------------------------------------------------------

def r2_score(y_true, y_pred) -> float:
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    ss_res = float(((y_true - y_pred) ** 2).sum())
    ss_tot = float(((y_true - y_true.mean()) ** 2).sum())
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else 0.0
    return 1.0 - ss_res / ss_tot


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman_rho(a, b) -> float:
    """Rank correlation with average ranks for ties."""
    ra = _average_ranks(np.asarray(a, dtype=np.float64))
    rb = _average_ranks(np.asarray(b, dtype=np.float64))
    ra -= ra.mean()
    rb -= rb.mean()
    denom = math.sqrt(float((ra * ra).sum()) * float((rb * rb).sum()))
    if denom == 0.0:
        return 0.0
    return float((ra * rb).sum() / denom)
