"""Desk-scale locally linear embedding (dense eigensolve, n <= 5000)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import InvalidParameterError, SingularNeighborhoodError, SizeLimitError

MAX_POINTS = 5000


@dataclass(frozen=True)
class EmbeddingSpec:
    k_neighbors: int = 120
    target_dim: int = 3
    regularization: float = 1e-3

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise InvalidParameterError("k_neighbors must be >= 1")
        if self.target_dim < 1:
            raise InvalidParameterError("target_dim must be >= 1")


def knn_indices(points: np.ndarray, k: int) -> np.ndarray:
    """Deterministic k nearest neighbors (self excluded) by full sort."""
    n = points.shape[0]
    out = np.empty((n, k), dtype=np.int64)
    sq = np.einsum("ij,ij->i", points, points)
    for start in range(0, n, 256):
        chunk = points[start:start + 256]
        d2 = sq[start:start + 256, None] + sq[None, :] - 2.0 * (chunk @ points.T)
        order = np.argsort(d2, axis=1, kind="stable")
        for r in range(order.shape[0]):
            row = order[r]
            row = row[row != start + r]
            out[start + r] = row[:k]
    return out


def reconstruction_weights(points, neighbors, reg=1e-3):
    """Constrained least-squares weights; the neighborhood Gram matrix is
    ridge-regularized by reg * trace when (near-)singular."""
    n, k = neighbors.shape
    w = np.zeros((n, k))
    for i in range(n):
        z = points[neighbors[i]] - points[i]
        gram = z @ z.T
        trace = np.trace(gram)
        if k > points.shape[1] or trace <= 0 or np.linalg.cond(gram) > 1e10:
            gram = gram + np.eye(k) * (reg * trace if trace > 0 else reg)
        try:
            wi = np.linalg.solve(gram, np.ones(k))
        except np.linalg.LinAlgError:
            gram = gram + np.eye(k) * max(reg * max(trace, 1.0), reg)
            try:
                wi = np.linalg.solve(gram, np.ones(k))
            except np.linalg.LinAlgError as exc:
                raise SingularNeighborhoodError(
                    f"neighborhood of point {i} stays singular after regularization",
                    point=i,
                ) from exc
        s = wi.sum()
        if s == 0 or not np.all(np.isfinite(wi)):
            raise SingularNeighborhoodError(
                f"degenerate reconstruction weights at point {i}", point=i)
        w[i] = wi / s
    return w


def lle_embed(points, spec: EmbeddingSpec = None) -> np.ndarray:
    """Standard LLE: k-NN graph, reconstruction weights, embedding from the
    bottom non-constant eigenvectors of (I-W)^T (I-W)."""
    if spec is None:
        spec = EmbeddingSpec()
    pts = np.asarray(getattr(points, "points", points), dtype=np.float64)
    n, d = pts.shape
    if n > MAX_POINTS:
        raise SizeLimitError(f"n={n} exceeds the dense-eigensolve cap {MAX_POINTS}", n=n)
    if spec.k_neighbors >= n:
        raise InvalidParameterError(
            f"k_neighbors={spec.k_neighbors} must be smaller than n={n}")
    if spec.target_dim >= d:
        raise InvalidParameterError(
            f"target_dim={spec.target_dim} must be below the input dimension {d}")

    nbrs = knn_indices(pts, spec.k_neighbors)
    weights = reconstruction_weights(pts, nbrs, spec.regularization)

    m = np.eye(n)
    for i in range(n):
        m[i, nbrs[i]] -= weights[i]
    m = m.T @ m

    vals, vecs = linalg.eigh(m, subset_by_index=[0, spec.target_dim])
    emb = vecs[:, 1:spec.target_dim + 1]
    # sign convention: largest-magnitude entry of each axis is positive
    for j in range(emb.shape[1]):
        idx = int(np.argmax(np.abs(emb[:, j])))
        if emb[idx, j] < 0:
            emb[:, j] = -emb[:, j]
    return emb


def embedding_reconstruction_error(points, embedded, spec: EmbeddingSpec = None) -> float:
    """Sum of squared reconstruction residuals of the embedding under the
    original-space weights."""
    if spec is None:
        spec = EmbeddingSpec()
    pts = np.asarray(getattr(points, "points", points), dtype=np.float64)
    nbrs = knn_indices(pts, spec.k_neighbors)
    weights = reconstruction_weights(pts, nbrs, spec.regularization)
    recon = np.einsum("ik,ikj->ij", weights, embedded[nbrs])
    return float(np.sum((embedded - recon) ** 2))


def neighbor_preservation(points, embedded, k: int) -> float:
    """Mean fraction of original k-NN preserved in the embedding."""
    a = knn_indices(np.asarray(points, dtype=np.float64), k)
    b = knn_indices(np.asarray(embedded, dtype=np.float64), k)
    overlap = [len(set(a[i]) & set(b[i])) / k for i in range(a.shape[0])]
    return float(np.mean(overlap))
