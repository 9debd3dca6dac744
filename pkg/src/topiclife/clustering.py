"""Spherical k-means over hashtag embeddings.

Cosine similarity is the affinity: points are unit-normalized, assignment
maximizes dot product with unit centroids, and each centroid update is the
renormalized mean of its assigned unit vectors (which maximizes the summed
cosine for the cluster).  The objective -- total cosine similarity of points
to their centroids -- is therefore non-decreasing across iterations.  A
greedy single-point refinement pass after Lloyd convergence escapes the most
common shallow local optima; it too only applies strictly improving moves.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from topiclife.errors import ConfigurationError


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    seed: int = 0
    max_iterations: int = 100
    tolerance: float = 1e-6


@dataclass
class SemanticCluster:
    cluster_id: int
    members: set[str]
    centroid: np.ndarray


@dataclass
class KMeansResult:
    clusters: list[SemanticCluster]
    assignment: dict[str, int]
    objective_trace: list[float]

    @property
    def objective(self) -> float:
        return self.objective_trace[-1]


def _normalize_rows(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise ConfigurationError("zero-norm embedding cannot be clustered under cosine")
    return x / norms


def _kmeanspp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding with cosine distance (1 - similarity) as the weight."""
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]), dtype=np.float64)
    first = int(rng.integers(n))
    centers[0] = points[first]
    best_sim = points @ centers[0]
    for c in range(1, k):
        dist = np.clip(1.0 - best_sim, 0.0, None)
        total = dist.sum()
        if total <= 0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=dist / total))
        centers[c] = points[idx]
        best_sim = np.maximum(best_sim, points @ centers[c])
    return centers


def _repair_empty(labels: np.ndarray, sims: np.ndarray, k: int) -> np.ndarray:
    """Move the worst-fitting point into each empty cluster.

    The moved point becomes the sole member (its centroid after update is the
    point itself, similarity 1), so the objective cannot decrease.
    """
    for cid in range(k):
        if np.any(labels == cid):
            continue
        assigned_sim = sims[np.arange(len(labels)), labels].copy()
        # points that are alone in their cluster must stay put
        for i in range(len(labels)):
            if np.sum(labels == labels[i]) == 1:
                assigned_sim[i] = np.inf
        worst = int(np.argmin(assigned_sim))
        labels[worst] = cid
    return labels


def _refine_single_moves(
    points: np.ndarray, labels: np.ndarray, k: int, tolerance: float, max_sweeps: int = 50
) -> np.ndarray:
    """Greedy single-point moves after Lloyd converges.

    With renormalized-mean centroids the objective equals sum_c ||S_c|| where
    S_c is the sum of the unit points in cluster c, so the exact gain of
    moving one point is cheap to evaluate.  Only strictly improving moves are
    applied, hence the objective keeps its monotonicity guarantee.
    """
    n, _ = points.shape
    sums = np.zeros((k, points.shape[1]))
    for cid in range(k):
        sums[cid] = points[labels == cid].sum(axis=0)
    sizes = np.bincount(labels, minlength=k)

    for _ in range(max_sweeps):
        moved = False
        for i in range(n):
            a = labels[i]
            if sizes[a] == 1:
                continue  # never empty a cluster
            x = points[i]
            norms = np.linalg.norm(sums, axis=1)
            removed = float(np.linalg.norm(sums[a] - x)) - norms[a]
            added = np.sqrt(norms**2 + 2.0 * (sums @ x) + 1.0) - norms
            added[a] = -np.inf
            b = int(np.argmax(added))
            if removed + added[b] > max(tolerance, 1e-12):
                sums[a] -= x
                sums[b] += x
                sizes[a] -= 1
                sizes[b] += 1
                labels[i] = b
                moved = True
        if not moved:
            break
    return labels


def kmeans_cluster(embeddings: dict[str, np.ndarray], config: KMeansConfig) -> KMeansResult:
    """Cluster hashtag embeddings into k groups under cosine affinity.

    Deterministic given (embeddings, config): hashtags are processed in sorted
    order, assignment ties break to the lowest cluster id, and all randomness
    comes from the seeded generator.
    """
    if not embeddings:
        raise ConfigurationError("no embeddings to cluster")
    hashtags = sorted(embeddings)
    x = np.stack([np.asarray(embeddings[h], dtype=np.float64) for h in hashtags])
    if x.ndim != 2:
        raise ConfigurationError("embeddings must share one dimension")
    n = x.shape[0]
    k = config.k
    if k < 1 or k > n:
        raise ConfigurationError(f"k={k} must be in [1, {n}]")

    points = _normalize_rows(x)
    rng = np.random.default_rng(config.seed)
    centroids = _kmeanspp_init(points, k, rng)

    labels = np.full(n, -1, dtype=np.int64)
    trace: list[float] = []
    for _ in range(config.max_iterations):
        sims = points @ centroids.T
        new_labels = np.argmax(sims, axis=1)  # argmax takes the lowest index on ties
        new_labels = _repair_empty(new_labels, sims, k)

        for cid in range(k):
            mask = new_labels == cid
            mean = points[mask].mean(axis=0)
            norm = np.linalg.norm(mean)
            if norm > 0:
                centroids[cid] = mean / norm
            else:
                centroids[cid] = points[np.flatnonzero(mask)[0]]

        sims = points @ centroids.T
        objective = float(sims[np.arange(n), new_labels].sum())
        converged = bool(np.array_equal(new_labels, labels)) or (
            len(trace) > 0 and objective - trace[-1] < config.tolerance
        )
        trace.append(objective)
        labels = new_labels
        if converged:
            break

    labels = _refine_single_moves(points, labels.copy(), k, config.tolerance)
    for cid in range(k):
        mean = points[labels == cid].mean(axis=0)
        norm = np.linalg.norm(mean)
        if norm > 0:
            centroids[cid] = mean / norm
    sims = points @ centroids.T
    refined = float(sims[np.arange(n), labels].sum())
    if refined > trace[-1]:
        trace.append(refined)

    clusters = [
        SemanticCluster(cid, {hashtags[i] for i in np.flatnonzero(labels == cid)}, centroids[cid].copy())
        for cid in range(k)
    ]
    assignment = {hashtags[i]: int(labels[i]) for i in range(n)}
    return KMeansResult(clusters, assignment, trace)


@dataclass
class SweepResult:
    results: dict[int, KMeansResult] = field(default_factory=dict)
    failures: dict[int, str] = field(default_factory=dict)


def sweep_k(
    embeddings: dict[str, np.ndarray],
    k_values: list[int],
    seed: int = 0,
    max_iterations: int = 100,
    tolerance: float = 1e-6,
) -> SweepResult:
    """Run kmeans_cluster once per k; failures are recorded, not fatal."""
    sweep = SweepResult()
    for k in k_values:
        cfg = KMeansConfig(k=k, seed=seed, max_iterations=max_iterations, tolerance=tolerance)
        try:
            sweep.results[k] = kmeans_cluster(embeddings, cfg)
        except ConfigurationError as exc:
            sweep.failures[k] = str(exc)
    return sweep
