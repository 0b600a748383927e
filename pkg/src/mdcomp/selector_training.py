"""Synthetic corpora and the offline training routine behind the shipped
family-selector model. Kept importable so tests and the CLI share one
reproducible pipeline."""

from __future__ import annotations

import json

import numpy as np

from .advisor import SELECTOR_FAMILIES, extract_features, hardness_scores, \
    selector_accuracy, train_selector
from .core import ModelFamily


def synth_sequence(family: ModelFamily, rng: np.random.Generator,
                   n: int | None = None) -> np.ndarray:
    """One noisy sequence whose clean trend matches the given family."""
    if n is None:
        n = int(rng.integers(256, 1025))
    i = np.arange(n, dtype=np.float64)
    noise_scale = rng.uniform(1.0, 8.0)
    if family is ModelFamily.CONSTANT:
        clean = np.full(n, rng.uniform(-1e6, 1e6))
    elif family is ModelFamily.LINEAR:
        clean = rng.uniform(-1e3, 1e3) + rng.uniform(10.0, 500.0) * i
    elif family is ModelFamily.POLY2:
        clean = rng.uniform(-1e3, 1e3) + rng.uniform(-20, 20) * i \
            + rng.uniform(2.0, 30.0) * i ** 2
    elif family is ModelFamily.POLY3:
        clean = rng.uniform(-1e3, 1e3) + rng.uniform(-10, 10) * i \
            + rng.uniform(-5, 5) * i ** 2 + rng.uniform(0.5, 5.0) * i ** 3
    elif family is ModelFamily.EXP:
        clean = rng.uniform(-1e3, 1e3) + rng.uniform(1.0, 50.0) \
            * np.exp(i / 256.0)
    elif family is ModelFamily.LOG:
        clean = rng.uniform(-1e3, 1e3) + rng.uniform(1e4, 1e6) \
            * np.log(i + 1.0)
    else:
        raise ValueError(f"no generator for family {family}")
    noisy = clean + rng.normal(0.0, noise_scale, size=n)
    return np.round(noisy).astype(np.int64)


def make_family_corpus(seed: int, per_family: int):
    rng = np.random.default_rng(seed)
    corpus = []
    for family in SELECTOR_FAMILIES:
        for _ in range(per_family):
            corpus.append((synth_sequence(family, rng), family))
    return corpus


def train_default_selector(seed: int = 7, per_family: int = 120):
    """Train the shipped selector; returns (serializable dict, accuracy).

    The dict also carries corpus-mean hardness thresholds used by the
    partitioning advisor.
    """
    corpus = make_family_corpus(seed, per_family)
    selector = train_selector(corpus)
    accuracy = selector_accuracy(selector, corpus)

    scores = [hardness_scores(seq) for seq, _ in corpus]
    theta_l = float(np.mean([s.local for s in scores]))
    theta_g = float(np.mean([s.global_ for s in scores]))
    obj = {
        "selector": json.loads(selector.to_json()),
        "hardness_thresholds": [theta_l, theta_g],
        "seed": seed,
        "per_family": per_family,
        "train_accuracy": accuracy,
    }
    return obj, accuracy
