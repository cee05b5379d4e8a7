# [file name]: core/ivr/kmeans.py
import logging
from typing import Sequence

import numpy as np

from core.errors import ClusteringError
from models.audio_models import ClusterModel

logger = logging.getLogger(__name__)


def zscore(points: np.ndarray) -> np.ndarray:
    """Center every dimension; scale only dimensions with non-zero variance"""
    mean = points.mean(axis=0)
    std = points.std(axis=0)
    scale = np.where(std > 0, std, 1.0)
    return (points - mean) / scale


def kmeans_plusplus_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n_samples = X.shape[0]
    centroids = np.empty((k, X.shape[1]), dtype=np.float64)

    # first centroid
    centroids[0] = X[rng.integers(0, n_samples)]

    # remaining centroids, sampled proportionally to squared distance
    for i in range(1, k):
        dist_sq = np.min(((X[:, None, :] - centroids[None, :i, :]) ** 2).sum(axis=2), axis=1)
        total = dist_sq.sum()
        if total > 0:
            next_idx = rng.choice(n_samples, p=dist_sq / total)
        else:
            next_idx = rng.integers(0, n_samples)
        centroids[i] = X[next_idx]

    return centroids


def _assign(X: np.ndarray, centroids: np.ndarray):
    dist_sq = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    # argmin returns the first minimum: ties go to the lower cluster id
    labels = np.argmin(dist_sq, axis=1)
    inertia = float(dist_sq[np.arange(len(X)), labels].sum())
    return labels, inertia


def kmeans(
    points: Sequence[Sequence[float]],
    k: int,
    seed: int = 0,
    max_iter: int = 100,
    tol: float = 1e-6,
) -> ClusterModel:
    """Lloyd's algorithm on z-scored points with k-means++ seeding.

    Empty clusters keep their previous centroid. Iteration stops once the
    largest centroid shift drops below tol or after max_iter updates.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] < 1:
        raise ClusteringError("points must be a non-empty list of d-vectors")
    if X.shape[0] < k:
        raise ClusteringError(f"Need at least k={k} points, got {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise ClusteringError("Non-finite feature values")

    Z = zscore(X)
    rng = np.random.default_rng(seed)
    centroids = kmeans_plusplus_init(Z, k, rng)

    history = []
    iterations = 0
    for _ in range(max_iter):
        labels, inertia = _assign(Z, centroids)
        history.append(inertia)

        new_centroids = centroids.copy()
        for j in range(k):
            mask = labels == j
            if np.any(mask):
                new_centroids[j] = Z[mask].mean(axis=0)

        shift = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
        centroids = new_centroids
        iterations += 1
        if shift < tol:
            break

    labels, inertia = _assign(Z, centroids)
    history.append(inertia)
    logger.debug(f"k-means converged after {iterations} iteration(s), inertia={inertia:.4f}")

    return ClusterModel(
        centroids=centroids,
        assignments=labels.tolist(),
        inertia=max(inertia, 0.0),
        inertia_history=history,
        iterations=iterations,
    )
