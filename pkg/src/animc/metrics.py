"""Clustering evaluation (ACC, NMI, purity) and the k-means label extractor."""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning
from sklearn.metrics import normalized_mutual_info_score
from sklearn.metrics.cluster import contingency_matrix


@dataclass(frozen=True)
class MetricBundle:
    acc: float
    nmi: float
    purity: float

    def as_dict(self) -> dict:
        return asdict(self)


def _pair(pred, truth) -> tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape != truth.shape:
        raise ValueError(f"label vectors differ in length: {pred.size} vs {truth.size}")
    if pred.size == 0:
        raise ValueError("empty label vectors")
    return pred, truth


def kmeans(points, k: int, restarts: int = 10, seed: int = 0) -> np.ndarray:
    """Best-of-``restarts`` k-means (k-means++ seeding, Lloyd iterations).

    Deterministic for a fixed ``seed``; empty clusters are re-seeded by the
    underlying solver.
    """
    X = np.atleast_2d(np.asarray(points, dtype=float))
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} must satisfy 1 <= k <= n={n}")
    if k == 1:
        return np.zeros(n, dtype=int)
    with warnings.catch_warnings():
        # duplicate rows can leave fewer distinct centers than k
        warnings.simplefilter("ignore", ConvergenceWarning)
        km = KMeans(n_clusters=k, n_init=restarts, random_state=seed, algorithm="lloyd")
        return km.fit_predict(X).astype(int)


def accuracy(pred, truth) -> float:
    """Fraction correct under the best one-to-one matching of cluster ids to classes."""
    pred, truth = _pair(pred, truth)
    C = contingency_matrix(truth, pred)
    rows, cols = linear_sum_assignment(C, maximize=True)
    return float(C[rows, cols].sum() / pred.size)


def nmi(pred, truth) -> float:
    """Mutual information normalized by the geometric mean of the two entropies."""
    pred, truth = _pair(pred, truth)
    kp, kt = np.unique(pred).size, np.unique(truth).size
    if kp == 1 and kt == 1:
        return 1.0
    if kp == 1 or kt == 1:
        return 0.0
    return float(normalized_mutual_info_score(truth, pred, average_method="geometric"))


def purity(pred, truth) -> float:
    pred, truth = _pair(pred, truth)
    C = contingency_matrix(truth, pred)
    return float(C.max(axis=0).sum() / pred.size)


def evaluate(pred, truth) -> MetricBundle:
    return MetricBundle(accuracy(pred, truth), nmi(pred, truth), purity(pred, truth))
