"""Unions of subspaces, partially observed data, and the derived views.

A dataset holds unit-norm points drawn from a union of low-dimensional
subspaces together with one binary observation pattern per point.  From the
stored complete matrix the module derives, on demand, the zero-filled view,
the anchor-projected views, and the unobserved remainders used throughout
the geometry and certificate computations.  Views are recomputed per call
rather than cached; each is a single elementwise product.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DegenerateSubspace,
    FullMask,
    MissingBasis,
    PatternLengthMismatch,
    UnequalMaskCount,
)

RANK_TOL = 1e-10  # relative singular-value cutoff shared by all rank decisions


class ViewTag(str, Enum):
    """The six derived matrices of a partially observed dataset."""

    COMPLETE = "complete"
    ZF = "zf"
    PROJECTED = "projected"
    PZF = "pzf"
    UNOBSERVED = "unobserved"
    PROJECTED_UNOBSERVED = "projected_unobserved"


class Variant(str, Enum):
    """Solver input family: which view feeds the self-expressive program."""

    COMPLETE = "complete"
    ZF = "zf"
    PZF = "pzf"


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SubspaceArrangement:
    """A finite collection of linear subspaces of a common ambient space.

    Parameters
    ----------
    bases : tuple of ndarray
        One matrix per subspace, shape (D, d_i), with orthonormal columns.
    """

    bases: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.bases:
            raise ValueError("arrangement needs at least one subspace")
        bases = tuple(_readonly(np.asarray(B, dtype=np.float64)) for B in self.bases)
        D = bases[0].shape[0]
        for B in bases:
            if B.ndim != 2 or B.shape[0] != D:
                raise ValueError("all bases must share the ambient dimension")
            d = B.shape[1]
            if not 0 < d <= D:
                raise ValueError("subspace dimension must lie in [1, D]")
            gram = B.T @ B
            if np.abs(gram - np.eye(d)).max() > 1e-8:
                raise ValueError("basis columns must be orthonormal")
        object.__setattr__(self, "bases", bases)

    @property
    def ambient_dim(self) -> int:
        return self.bases[0].shape[0]

    @property
    def n_subspaces(self) -> int:
        return len(self.bases)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(B.shape[1] for B in self.bases)

    def basis(self, i: int) -> np.ndarray:
        try:
            return self.bases[i]
        except IndexError:
            raise MissingBasis(f"no basis stored for cluster {i}") from None

    def projector(self, i: int) -> np.ndarray:
        B = self.basis(i)
        return B @ B.T


@dataclass(frozen=True)
class MaskedDataset:
    """Unit-norm points with one observation pattern per point.

    Parameters
    ----------
    points : ndarray
        Complete data, shape (D, N), unit-norm columns.
    labels : ndarray
        Cluster index per column, shape (N,).
    patterns : ndarray
        Binary observation patterns, shape (D, N); 1 = observed.  Every
        column must hide the same number m of coordinates, and none may
        hide all of them.
    anchor : int
        Default anchor column for anchor-dependent views.
    """

    points: np.ndarray
    labels: np.ndarray
    patterns: np.ndarray
    anchor: int = 0

    def __post_init__(self):
        X = np.asarray(self.points, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] == 0:
            raise ValueError("points must be a nonempty (D, N) matrix")
        D, N = X.shape
        norms = np.linalg.norm(X, axis=0)
        if np.abs(norms - 1.0).max() > 1e-8:
            raise ValueError("point columns must be unit norm")
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if labels.shape[0] != N:
            raise ValueError("labels must have one entry per point")
        W = np.asarray(self.patterns)
        if W.shape != (D, N):
            raise PatternLengthMismatch(
                f"patterns shaped {W.shape}, expected {(D, N)}"
            )
        if not np.isin(W, (0, 1)).all():
            raise ValueError("patterns must be binary")
        W = W.astype(np.uint8)
        zeros = D - W.sum(axis=0)
        if zeros.min() != zeros.max():
            raise UnequalMaskCount(
                f"masked-coordinate counts range over [{zeros.min()}, {zeros.max()}]"
            )
        if zeros[0] >= D:
            raise FullMask("every coordinate is masked")
        if not 0 <= self.anchor < N:
            raise ValueError("anchor out of range")
        object.__setattr__(self, "points", _readonly(X))
        object.__setattr__(self, "labels", _readonly(labels))
        object.__setattr__(self, "patterns", _readonly(W))

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[0]

    @property
    def n_points(self) -> int:
        return self.points.shape[1]

    @property
    def n_clusters(self) -> int:
        return int(np.unique(self.labels).size)

    @property
    def m(self) -> int:
        """Number of masked coordinates per point (uniform by construction)."""
        return int(self.ambient_dim - int(self.patterns[:, 0].sum()))

    def with_anchor(self, anchor: int) -> "MaskedDataset":
        return MaskedDataset(self.points, self.labels, self.patterns, anchor)

    def view(self, tag: ViewTag, anchor: int | None = None) -> np.ndarray:
        """Return the requested derived matrix, shape (D, N).

        Anchor-dependent views (PROJECTED, PZF, PROJECTED_UNOBSERVED) use
        ``anchor`` when given, else the dataset's stored anchor.
        """
        tag = ViewTag(tag)
        a = self.anchor if anchor is None else anchor
        X = self.points
        if tag is ViewTag.COMPLETE:
            return X.copy()
        zf = self.patterns * X
        if tag is ViewTag.ZF:
            return zf
        if tag is ViewTag.UNOBSERVED:
            return X - zf
        wa = self.patterns[:, a, None]
        if tag is ViewTag.PROJECTED:
            return wa * X
        if tag is ViewTag.PZF:
            return wa * zf
        return wa * (X - zf)  # PROJECTED_UNOBSERVED

    def column(self, tag: ViewTag, j: int, anchor: int | None = None) -> np.ndarray:
        return self.view(tag, anchor)[:, j]


def apply_patterns(
    points: np.ndarray,
    patterns: np.ndarray,
    labels: np.ndarray | None = None,
    anchor: int = 0,
) -> MaskedDataset:
    """Bundle complete points with observation patterns into a dataset.

    Parameters
    ----------
    points : ndarray
        Unit-norm columns, shape (D, N).
    patterns : ndarray
        Binary matrix of the same shape; 1 marks an observed coordinate.
    labels : ndarray, optional
        Cluster index per column; defaults to a single cluster 0.
    anchor : int
        Default anchor column.

    Raises
    ------
    PatternLengthMismatch, UnequalMaskCount, FullMask
        On malformed patterns, per the dataset invariants.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError("points must be a (D, N) matrix")
    if labels is None:
        labels = np.zeros(points.shape[1], dtype=np.int64)
    return MaskedDataset(points, labels, np.asarray(patterns), anchor)


def project_basis(basis: np.ndarray, pattern: np.ndarray) -> np.ndarray:
    """Orthonormal basis of diag(pattern) @ span(basis).

    Raises DegenerateSubspace when the projected subspace is {0}.
    """
    M = np.asarray(pattern, dtype=np.float64)[:, None] * basis
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        raise DegenerateSubspace("subspace vanishes under the pattern")
    rank = int((s > RANK_TOL * s[0]).sum())
    if rank == 0:
        raise DegenerateSubspace("subspace vanishes under the pattern")
    return U[:, :rank]


def project_subspaces(
    arrangement: SubspaceArrangement, pattern: np.ndarray
) -> SubspaceArrangement:
    """Project every subspace onto the observed coordinates of one pattern.

    Each projected basis is re-orthonormalized; its dimension may drop.
    """
    return SubspaceArrangement(
        tuple(project_basis(B, pattern) for B in arrangement.bases)
    )


def estimate_arrangement(dataset: MaskedDataset) -> SubspaceArrangement:
    """Per-cluster orthonormalized span of the complete points.

    Fallback basis source when no ground-truth arrangement is available.
    """
    bases = []
    for lab in np.unique(dataset.labels):
        cols = dataset.points[:, dataset.labels == lab]
        U, s, _ = np.linalg.svd(cols, full_matrices=False)
        rank = int((s > RANK_TOL * s[0]).sum())
        bases.append(U[:, :rank])
    return SubspaceArrangement(tuple(bases))


def design(
    dataset: MaskedDataset, variant: Variant, anchor: int, reduced: bool
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dictionary and target for one anchor's self-expressive program.

    Parameters
    ----------
    variant : Variant
        COMPLETE fits x_j against the other complete columns; ZF fits the
        zero-filled column against the other zero-filled columns; PZF fits
        the zero-filled column against the other columns re-masked by the
        anchor's own pattern.
    reduced : bool
        Restrict the dictionary to same-cluster companions (the reduced
        program behind the geometric quantities) instead of all columns.

    Returns
    -------
    Y : ndarray, shape (D, L)
    y : ndarray, shape (D,)
    idx : ndarray, shape (L,)
        Original column indices of the dictionary columns.
    """
    variant = Variant(variant)
    if variant is Variant.COMPLETE:
        mat = dataset.view(ViewTag.COMPLETE)
        y = mat[:, anchor]
    elif variant is Variant.ZF:
        mat = dataset.view(ViewTag.ZF)
        y = mat[:, anchor]
    else:
        y = dataset.column(ViewTag.ZF, anchor)
        mat = dataset.view(ViewTag.PZF, anchor=anchor)
    keep = np.arange(dataset.n_points) != anchor
    if reduced:
        keep &= dataset.labels == dataset.labels[anchor]
    idx = np.flatnonzero(keep)
    return mat[:, idx], y, idx


def save_dataset(path, dataset: MaskedDataset) -> None:
    """Write a dataset as plain text: header ``D N n``, the point matrix,
    the label row, then the pattern matrix.  Floats are printed with 17
    significant digits so a save/load round trip is bit exact."""
    D, N = dataset.points.shape
    lines = [f"{D} {N} {dataset.n_clusters}"]
    for row in dataset.points:
        lines.append(" ".join("%.17g" % v for v in row))
    lines.append(" ".join(str(int(v)) for v in dataset.labels))
    for row in dataset.patterns:
        lines.append(" ".join(str(int(v)) for v in row))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_dataset(path) -> MaskedDataset:
    """Inverse of :func:`save_dataset`."""
    with open(path, encoding="ascii") as fh:
        tokens = fh.read().split("\n")
    header = tokens[0].split()
    if len(header) != 3:
        raise ValueError("header must be 'D N n'")
    D, N, n = (int(t) for t in header)
    body = [ln.split() for ln in tokens[1 : 2 * D + 2]]
    if len(body) != 2 * D + 1 or any(len(row) != N for row in body):
        raise ValueError("malformed dataset body")
    X = np.array([[float(v) for v in row] for row in body[:D]])
    labels = np.array([int(v) for v in body[D]], dtype=np.int64)
    W = np.array([[int(v) for v in row] for row in body[D + 1 :]], dtype=np.uint8)
    ds = MaskedDataset(X, labels, W)
    if ds.n_clusters != n:
        raise ValueError("header cluster count disagrees with labels")
    return ds
