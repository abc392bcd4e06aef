"""Synthetic fat-data benchmarks with a planted conjunction of stumps."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .dataset import Dataset
from .rules import Direction, ThresholdRule

LOG_INTENSITY_MEAN = 10.0


@dataclass(frozen=True)
class PlantedTruth:
    rules: tuple
    flipped: tuple

    @property
    def features(self) -> tuple:
        return tuple(r.feature_index for r in self.rules)


def make_planted(
    n: int = 60,
    p: int = 5000,
    n_rules: int = 3,
    noise: float = 0.1,
    seed: int = 0,
    fail_rate: float = 0.5,
    positive_fraction: float = 0.5,
):
    """Sample a dataset whose clean labels are a conjunction of ``n_rules`` GT stumps.

    Features are log-normal intensities. Each planted stump passes iff its
    feature exceeds ``exp(LOG_INTENSITY_MEAN)``. Positives pass every stump;
    each negative fails every stump independently with probability
    ``fail_rate``, conditioned on failing at least one, so the clean labels
    equal the planted conjunction exactly. Then ``round(noise * n)`` labels
    are flipped.

    Returns ``(dataset, truth)``.
    """
    if n_rules > p:
        raise ValueError("n_rules cannot exceed p")
    if not 0 <= noise < 0.5:
        raise ValueError("noise must be in [0, 0.5)")
    if not 0 < fail_rate <= 1:
        raise ValueError("fail_rate must be in (0, 1]")
    rng = np.random.default_rng(seed)
    n_pos = int(round(positive_fraction * n))
    if not 0 < n_pos < n:
        raise ValueError("both classes need at least one sample")
    y = np.zeros(n, dtype=np.int8)
    y[:n_pos] = 1
    y = rng.permutation(y)

    planted = np.sort(rng.choice(p, size=n_rules, replace=False))
    u = rng.uniform(size=(n, p))

    passes = np.ones((n, n_rules), dtype=bool)
    neg = np.flatnonzero(y == 0)
    for i in neg:
        fails = rng.uniform(size=n_rules) < fail_rate
        while not fails.any():
            fails = rng.uniform(size=n_rules) < fail_rate
        passes[i] = ~fails
    # latent uniform in (0.5, 1) passes, (0, 0.5] fails
    half = u[:, planted] / 2.0
    u[:, planted] = np.where(passes, 1.0 - half, np.maximum(half, 1e-12))
    X = np.exp(LOG_INTENSITY_MEAN + ndtri(np.clip(u, 1e-12, 1 - 1e-12)))

    flip = np.sort(rng.choice(n, size=int(round(noise * n)), replace=False))
    y[flip] = 1 - y[flip]
    if y.min() == y.max():
        raise ValueError("label noise removed a class; use a different seed")

    width = max(4, len(str(p - 1)))
    names = [f"f{j:0{width}d}" for j in range(p)]
    ids = [f"s{i + 1:04d}" for i in range(n)]
    threshold = float(np.exp(LOG_INTENSITY_MEAN))
    truth = PlantedTruth(
        tuple(ThresholdRule(int(j), names[j], threshold, Direction.GT) for j in planted),
        tuple(int(i) for i in flip),
    )
    return Dataset(X, y, ids, names), truth
