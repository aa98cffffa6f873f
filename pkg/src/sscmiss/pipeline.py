"""End-to-end clustering: self-expression, affinity, spectral step.

Every column of the dataset is expressed against the other columns of
its chosen view (complete, zero-filled, or anchor-projected
zero-filled); the coefficient magnitudes become a symmetric affinity
whose normalized-Laplacian embedding is clustered by seeded k-means.
Per-column solver failures are flagged and skipped, never fatal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .data import MaskedDataset, Variant, design
from .lasso import solve_lasso

SP_THRESHOLD = 1e-6  # relative to the column's largest magnitude


@dataclass(frozen=True)
class LambdaRule:
    """Per-column trade-off choice.

    mode 'fixed' uses value as lam everywhere; mode 'adaptive' sets
    lam_j = value / ||Y_j^T y_j||_inf, which keeps every column's
    solution away from zero when value > 1.
    """

    mode: str
    value: float

    def __post_init__(self):
        if self.mode not in ("fixed", "adaptive"):
            raise ValueError("mode must be 'fixed' or 'adaptive'")
        if self.mode == "fixed" and not self.value > 0:
            raise ValueError("fixed lam must be positive")
        if self.mode == "adaptive" and not self.value > 1:
            raise ValueError("adaptive factor must exceed 1")

    @staticmethod
    def fixed(lam: float) -> "LambdaRule":
        return LambdaRule("fixed", float(lam))

    @staticmethod
    def adaptive(a: float = 2.0) -> "LambdaRule":
        return LambdaRule("adaptive", float(a))


@dataclass(frozen=True)
class SelfExpression:
    """All N self-expressive solutions of one dataset and variant.

    coeffs[:, j] expresses column j (diagonal identically zero);
    lambdas[j] is the trade-off actually used; sp_flags[j] says whether
    every surviving coefficient points to a same-cluster column (all-zero
    columns count as not preserving); failed marks columns skipped for
    degeneracy, gaps/converged record solver quality.
    """

    variant: Variant
    coeffs: np.ndarray
    lambdas: np.ndarray
    sp_flags: np.ndarray
    failed: np.ndarray
    gaps: np.ndarray
    converged: np.ndarray
    labels: np.ndarray


def column_preserves(
    coeffs: np.ndarray,
    dict_labels: np.ndarray,
    anchor_label,
    rel_threshold: float = SP_THRESHOLD,
) -> bool:
    """Whether one coefficient vector survives only on its own cluster.

    A coefficient counts as surviving when its magnitude exceeds
    rel_threshold times the vector's max magnitude; an all-zero vector
    does not preserve.
    """
    a = np.abs(np.asarray(coeffs))
    top = a.max() if a.size else 0.0
    if top <= 0.0:
        return False
    active = a > rel_threshold * top
    return bool((np.asarray(dict_labels)[active] == anchor_label).all())


def subspace_preserving_flags(
    coeffs: np.ndarray, labels: np.ndarray, rel_threshold: float = SP_THRESHOLD
) -> np.ndarray:
    """Per-column preservation flags for an (N, N) coefficient matrix."""
    labels = np.asarray(labels)
    N = coeffs.shape[1]
    flags = np.zeros(N, dtype=bool)
    for j in range(N):
        flags[j] = column_preserves(coeffs[:, j], labels, labels[j], rel_threshold)
    return flags


def self_express(
    dataset: MaskedDataset,
    variant: Variant,
    rule: LambdaRule,
    tol: float = 1e-10,
    max_sweeps: int = 100_000,
) -> SelfExpression:
    """Express every column against the rest of its view.

    Columns with no observed mass (or an adaptive rule with a zero
    scale) are flagged failed and left at zero; the pipeline continues.
    """
    variant = Variant(variant)
    N = dataset.n_points
    C = np.zeros((N, N))
    lambdas = np.full(N, np.nan)
    failed = np.zeros(N, dtype=bool)
    gaps = np.full(N, np.nan)
    converged = np.zeros(N, dtype=bool)
    for j in range(N):
        Y, y, idx = design(dataset, variant, j, reduced=False)
        if np.linalg.norm(y) <= 1e-12:
            failed[j] = True
            continue
        if rule.mode == "fixed":
            lam = rule.value
        else:
            scale = float(np.abs(Y.T @ y).max()) if Y.shape[1] else 0.0
            if scale <= 1e-15:
                failed[j] = True
                continue
            lam = rule.value / scale
        sol = solve_lasso(Y, y, lam, tol, max_sweeps)
        C[idx, j] = sol.coeffs
        lambdas[j] = lam
        gaps[j] = sol.gap
        converged[j] = sol.converged
    flags = subspace_preserving_flags(C, dataset.labels)
    flags[failed] = False
    return SelfExpression(
        variant, C, lambdas, flags, failed, gaps, converged, dataset.labels.copy()
    )


def sp_rate(expr: SelfExpression) -> float:
    """Fraction of columns whose expression is subspace preserving."""
    return float(expr.sp_flags.mean())


def build_affinity(expr: SelfExpression | np.ndarray) -> np.ndarray:
    """Symmetrized coefficient magnitudes |C| + |C|^T with zero diagonal."""
    C = expr.coeffs if isinstance(expr, SelfExpression) else np.asarray(expr)
    W = np.abs(C) + np.abs(C).T
    np.fill_diagonal(W, 0.0)
    return W


def _kmeans(X: np.ndarray, k: int, rng: np.random.Generator, n_init: int, iters: int):
    """Seeded Lloyd k-means with greedy plus-plus inits; returns labels."""
    n = X.shape[0]
    best_labels, best_inertia = None, np.inf
    for _ in range(n_init):
        centers = np.empty((k, X.shape[1]))
        centers[0] = X[rng.integers(n)]
        d2 = ((X - centers[0]) ** 2).sum(axis=1)
        for i in range(1, k):
            tot = d2.sum()
            if tot <= 0:
                centers[i] = X[rng.integers(n)]
            else:
                centers[i] = X[rng.choice(n, p=d2 / tot)]
            d2 = np.minimum(d2, ((X - centers[i]) ** 2).sum(axis=1))
        labels = None
        for _ in range(iters):
            dist = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            new_labels = dist.argmin(axis=1)
            if labels is not None and (new_labels == labels).all():
                break
            labels = new_labels
            for i in range(k):
                mask = labels == i
                if mask.any():
                    centers[i] = X[mask].mean(axis=0)
        inertia = ((X - centers[labels]) ** 2).sum()
        if inertia < best_inertia - 1e-12:
            best_inertia, best_labels = inertia, labels
    return best_labels


def clustering_error(assignments: np.ndarray, labels: np.ndarray) -> float:
    """Misclassification rate under the best cluster-label matching."""
    assignments = np.asarray(assignments)
    labels = np.asarray(labels)
    _, a = np.unique(assignments, return_inverse=True)
    _, b = np.unique(labels, return_inverse=True)
    k = max(a.max(), b.max()) + 1
    conf = np.zeros((k, k))
    for i, j in zip(a, b):
        conf[i, j] += 1
    rows, cols = linear_sum_assignment(-conf)
    return 1.0 - conf[rows, cols].sum() / labels.size


@dataclass(frozen=True)
class ClusteringResult:
    """Spectral clustering outcome.

    connectivity holds each cluster's algebraic connectivity (second
    smallest eigenvalue of the unnormalized Laplacian of its induced
    subgraph; inf for singletons), computed on true labels when given,
    else on the assignments.  isolated lists zero-degree points, which
    are assigned to their nearest embedded neighbor's cluster.
    """

    assignments: np.ndarray
    error: float
    connectivity: tuple[float, ...]
    isolated: tuple[int, ...]
    flags: tuple[str, ...]


def _algebraic_connectivity(W: np.ndarray) -> float:
    n = W.shape[0]
    if n <= 1:
        return float("inf")
    L = np.diag(W.sum(axis=1)) - W
    vals = np.linalg.eigvalsh((L + L.T) / 2.0)
    return float(vals[1])


def spectral_cluster(
    W: np.ndarray,
    n_clusters: int,
    labels: np.ndarray | None = None,
    seed: int = 0,
    n_init: int = 20,
) -> ClusteringResult:
    """Normalized-Laplacian embedding plus seeded k-means.

    W must be symmetric and nonnegative.  Zero-degree points are flagged
    (their rows cannot be normalized), embedded with unit self-degree,
    and assigned after the fact to the cluster of the nearest embedded
    non-isolated point.  error is NaN when labels are not supplied.
    """
    W = np.asarray(W, dtype=np.float64)
    n = W.shape[0]
    if W.shape != (n, n):
        raise ValueError("affinity must be square")
    if n_clusters < 1 or n_clusters > n:
        raise ValueError("cluster count out of range")
    deg = W.sum(axis=1)
    isolated = np.flatnonzero(deg <= 1e-12)
    flags = ("DISCONNECTED_TRIVIALLY",) if isolated.size else ()
    safe = np.where(deg <= 1e-12, 1.0, deg)
    dhalf = 1.0 / np.sqrt(safe)
    lap = np.eye(n) - dhalf[:, None] * W * dhalf[None, :]
    _, vecs = np.linalg.eigh((lap + lap.T) / 2.0)
    emb = vecs[:, :n_clusters]
    norms = np.linalg.norm(emb, axis=1)
    emb = emb / np.where(norms > 1e-12, norms, 1.0)[:, None]
    live = np.setdiff1d(np.arange(n), isolated)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    assignments = np.zeros(n, dtype=np.int64)
    if live.size:
        assignments[live] = _kmeans(
            emb[live], min(n_clusters, live.size), rng, n_init, 300
        )
        for i in isolated:
            d2 = ((emb[live] - emb[i]) ** 2).sum(axis=1)
            assignments[i] = assignments[live[d2.argmin()]]
    err = float("nan")
    groups: np.ndarray
    if labels is not None:
        labels = np.asarray(labels)
        err = clustering_error(assignments, labels)
        groups = labels
    else:
        groups = assignments
    conn = tuple(
        _algebraic_connectivity(W[np.ix_(groups == g, groups == g)])
        for g in np.unique(groups)
    )
    return ClusteringResult(assignments, err, conn, tuple(int(i) for i in isolated), flags)
