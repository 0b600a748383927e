"""Hyperparameter advisor: summary features over a sequence, a small CART
classifier that picks a model family, and PLA-based hardness scores that
pick between fixed and variable partitioning.

The deviation features use absolute deviations of the k-th order deltas;
the signed sum would cancel to zero and carry no signal.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import IntSequence, ModelFamily, PartitionScheme


class TooShortForFeaturesError(ValueError):
    pass


class InsufficientClassesError(ValueError):
    pass


FEATURE_NAMES = ("log_range", "dev_1", "dev_2", "dev_3",
                 "subrange_trend", "subrange_divergence")

SELECTOR_FAMILIES = (ModelFamily.CONSTANT, ModelFamily.LINEAR,
                     ModelFamily.POLY2, ModelFamily.POLY3,
                     ModelFamily.EXP, ModelFamily.LOG)


def _as_values(seq) -> np.ndarray:
    if isinstance(seq, IntSequence):
        return seq.values
    return np.ascontiguousarray(seq, dtype=np.int64)


@dataclass(frozen=True)
class FeatureVector:
    log_range: float
    dev_1: float
    dev_2: float
    dev_3: float
    subrange_trend: float
    subrange_divergence: float
    subblock_size: int = 64

    def as_array(self) -> np.ndarray:
        return np.array([self.log_range, self.dev_1, self.dev_2, self.dev_3,
                         self.subrange_trend, self.subrange_divergence])


def _delta_deviation(values: np.ndarray, k: int) -> float:
    """Mean absolute deviation of the k-th order deltas, range-normalized."""
    d = values.astype(np.float64)
    for _ in range(k):
        d = np.diff(d)
    spread = d.max() - d.min()
    if spread == 0:
        return 0.0
    return float(np.abs(d - d.mean()).sum() / (d.size * spread))


def extract_features(seq, subblock_size: int = 64) -> FeatureVector:
    values = _as_values(seq)
    n = values.size
    if n < 8:
        raise TooShortForFeaturesError("too short for features")
    log_range = math.log2(float(int(values.max()) - int(values.min())) + 1.0)
    devs = [_delta_deviation(values, k) for k in (1, 2, 3)]

    s = subblock_size
    blocks = n // s
    trend, divergence = 1.0, 0.0
    if blocks >= 2:
        v = values[:blocks * s].reshape(blocks, s)
        r = (v.max(axis=1) - v.min(axis=1)).astype(np.float64)
        ratios = [r[i] / r[i - 1] for i in range(1, blocks) if r[i - 1] > 0]
        if ratios:
            trend = float(np.mean(ratios))
            divergence = float(max(ratios) - min(ratios))
    return FeatureVector(log_range, *devs, trend, divergence, s)


# ---------------------------------------------------------------------------
# CART selector


def _gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(1.0 - (p * p).sum())


def _best_split(x: np.ndarray, y: np.ndarray, n_classes: int,
                min_leaf: int):
    """(feature, threshold, gain) of the best Gini split, or None."""
    n = y.size
    parent = _gini(np.bincount(y, minlength=n_classes))
    best = None
    for j in range(x.shape[1]):
        order = np.argsort(x[:, j], kind="stable")
        xs, ys = x[order, j], y[order]
        left = np.zeros(n_classes)
        right = np.bincount(ys, minlength=n_classes).astype(np.float64)
        for i in range(n - 1):
            left[ys[i]] += 1
            right[ys[i]] -= 1
            if xs[i] == xs[i + 1]:
                continue
            if i + 1 < min_leaf or n - i - 1 < min_leaf:
                continue
            gain = parent - ((i + 1) * _gini(left) + (n - i - 1) * _gini(right)) / n
            if best is None or gain > best[2]:
                best = (j, (xs[i] + xs[i + 1]) / 2.0, gain)
    if best is None or best[2] <= 1e-12:
        return None
    return best


def _grow_tree(x: np.ndarray, y: np.ndarray, n_classes: int, depth: int,
               max_depth: int, min_leaf: int) -> dict:
    counts = np.bincount(y, minlength=n_classes)
    if depth >= max_depth or y.size < 2 * min_leaf or _gini(counts) == 0.0:
        return {"label": int(counts.argmax())}
    split = _best_split(x, y, n_classes, min_leaf)
    if split is None:
        return {"label": int(counts.argmax())}
    j, t, _ = split
    mask = x[:, j] <= t
    return {
        "feature": j,
        "threshold": float(t),
        "left": _grow_tree(x[mask], y[mask], n_classes, depth + 1,
                           max_depth, min_leaf),
        "right": _grow_tree(x[~mask], y[~mask], n_classes, depth + 1,
                            max_depth, min_leaf),
    }


@dataclass
class SelectorModel:
    tree: dict
    classes: tuple[ModelFamily, ...]
    feature_names: tuple[str, ...] = FEATURE_NAMES

    def predict(self, features: FeatureVector) -> ModelFamily:
        x = features.as_array()
        node = self.tree
        while "label" not in node:
            node = node["left"] if x[node["feature"]] <= node["threshold"] \
                else node["right"]
        return self.classes[node["label"]]

    def to_json(self) -> str:
        return json.dumps({
            "classes": [c.name for c in self.classes],
            "feature_names": list(self.feature_names),
            "tree": self.tree,
        })

    @classmethod
    def from_json(cls, text: str) -> "SelectorModel":
        obj = json.loads(text)
        return cls(tree=obj["tree"],
                   classes=tuple(ModelFamily[c] for c in obj["classes"]),
                   feature_names=tuple(obj["feature_names"]))


def train_selector(corpus, max_depth: int = 8,
                   min_leaf: int = 5) -> SelectorModel:
    """Fit a Gini CART on (sequence, family) pairs.

    Returns the trained selector; raises InsufficientClassesError when the
    corpus holds fewer than two distinct labels.
    """
    labels = sorted({fam for _, fam in corpus})
    if len(labels) < 2:
        raise InsufficientClassesError("insufficient classes")
    classes = tuple(labels)
    index = {fam: i for i, fam in enumerate(classes)}
    x = np.stack([extract_features(seq).as_array() for seq, _ in corpus])
    y = np.array([index[fam] for _, fam in corpus])
    tree = _grow_tree(x, y, len(classes), 0, max_depth, min_leaf)
    return SelectorModel(tree=tree, classes=classes)


def selector_accuracy(selector: SelectorModel, corpus) -> float:
    hits = sum(selector.predict(extract_features(seq)) == fam
               for seq, fam in corpus)
    return hits / len(corpus)


def recommend_regressor(seq, selector: SelectorModel) -> ModelFamily:
    return selector.predict(extract_features(seq))


# ---------------------------------------------------------------------------
# PLA hardness


def pla_segments(seq, eps: float) -> list[tuple[int, int]]:
    """Greedy slope-interval PLA: each segment is anchored at its first point
    and grows while some slope keeps every later point within +-eps."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    values = _as_values(seq).astype(np.float64)
    n = values.size
    segments = []
    start = 0
    while start < n:
        lo, hi = -math.inf, math.inf
        j = start + 1
        while j < n:
            dx = j - start
            dy = values[j] - values[start]
            lo = max(lo, (dy - eps) / dx)
            hi = min(hi, (dy + eps) / dx)
            if lo > hi:
                break
            j += 1
        segments.append((start, j))
        start = j
    return segments


@dataclass(frozen=True)
class HardnessScores:
    local: float    # H_l in [0, 1]
    global_: float  # H_g >= 0


def hardness_scores(seq, eps_local: float = 7.0,
                    eps_global: float = 4096.0) -> HardnessScores:
    values = _as_values(seq)
    n = values.size
    if n < 16:
        raise TooShortForFeaturesError("need at least 16 points")
    h_local = len(pla_segments(values, eps_local)) / n

    segs = pla_segments(values, eps_global)
    if len(segs) < 2:
        return HardnessScores(h_local, 0.0)
    value_range = float(int(values.max()) - int(values.min()))
    gaps = [abs(float(values[b]) - float(values[a2 - 1]))
            for (_, a2), (b, _) in zip(segs, segs[1:])]
    norm_gap = float(np.mean(gaps)) / value_range if value_range > 0 else 0.0
    lengths = np.array([b - a for a, b in segs], dtype=np.float64)
    mean_len = n / len(segs)
    norm_var = float(lengths.var()) / (mean_len * mean_len)
    return HardnessScores(h_local, norm_gap + norm_var)


def advise_partitioning(scores: HardnessScores,
                        thresholds: tuple[float, float]) -> PartitionScheme:
    """Variable iff locally easy (H_l below) and globally hard (H_g above)."""
    theta_l, theta_g = thresholds
    if scores.local < theta_l and scores.global_ > theta_g:
        return PartitionScheme.VARIABLE
    return PartitionScheme.FIXED
