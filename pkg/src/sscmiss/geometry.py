"""Geometric quantities driving the recovery guarantees.

For an anchor point and a view family this module computes the
same-cluster coherence zeta, the observed-mass eta, the cross-cluster
dual coherence mu (via the reduced program's dual optimum projected onto
the anchor's subspace), the leakage term gamma, and the inradius of the
reduced dictionary's symmetrized hull.  Inradius comes in three flavors:
an exact angular search for 2-dimensional spans, exact polar vertex
enumeration for small problems, and a sampled non-certified upper bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .data import (
    RANK_TOL,
    MaskedDataset,
    SubspaceArrangement,
    Variant,
    ViewTag,
    design,
    estimate_arrangement,
    project_basis,
)
from .errors import (
    DegeneratePoint,
    DimensionTooHigh,
    LonelyAnchor,
    VertexBlowup,
)
from .lasso import DualSolution, LassoSolution, recover_dual, solve_lasso

ZERO_TOL = 1e-12


class InradiusMethod(str, Enum):
    EXACT2D = "exact2d"
    POLYTOPE = "polytope"
    SAMPLED = "sampled"
    AUTO = "auto"


@dataclass(frozen=True)
class InradiusResult:
    """Inradius of the symmetrized hull, relative to the span."""

    value: float
    method: InradiusMethod
    certified: bool


def _span_coordinates(Y: np.ndarray) -> np.ndarray:
    """Columns of Y expressed in an orthonormal basis of their span."""
    U, s, _ = np.linalg.svd(Y, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        raise ValueError("inradius of an all-zero point set is undefined")
    rank = int((s > RANK_TOL * s[0]).sum())
    return U[:, :rank].T @ Y


def _inradius_exact2d(Z: np.ndarray) -> float:
    """Exact min over unit v of ||Z^T v||_inf for a rank-<=2 span.

    Directions in the plane are parameterized by an angle; the objective
    g(t) = max_j |rho_j cos(t - phi_j)| has period pi.  A dense grid
    brackets every local minimum and golden-section refines each bracket.
    """
    k = Z.shape[0]
    if k == 1:
        return float(np.abs(Z[0]).max())
    if k != 2:
        raise DimensionTooHigh(f"exact 2-d search needs span rank <= 2, got {k}")
    rho = np.linalg.norm(Z, axis=0)
    phi = np.arctan2(Z[1], Z[0])

    def g(t):
        return (rho * np.abs(np.cos(t - phi))).max()

    n = 4096
    grid = np.linspace(0.0, np.pi, n, endpoint=False)
    vals = np.abs(np.cos(grid[:, None] - phi[None, :])) * rho
    gv = vals.max(axis=1)
    left = np.roll(gv, 1)
    right = np.roll(gv, -1)
    mins = np.flatnonzero((gv <= left) & (gv <= right))
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    best = gv.min()
    h = np.pi / n
    for i in mins:
        a = grid[i] - h
        b = grid[i] + h
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        fc, fd = g(c), g(d)
        for _ in range(80):
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = g(c)
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = g(d)
        best = min(best, fc, fd)
    return float(best)


def _inradius_polytope(Z: np.ndarray, budget: int) -> float:
    """Exact inradius via the polar polytope's circumradius.

    The polar {u : ||Z^T u||_inf <= 1} is bounded inside the span; its
    circumradius is attained at a vertex where k constraints are active,
    and the inradius is its reciprocal.
    """
    k, L = Z.shape
    n_combos = 1
    for i in range(k):
        n_combos = n_combos * (L - i) // (i + 1)
    total = n_combos * (1 << max(k - 1, 0))
    if total > budget:
        raise VertexBlowup(f"{total} candidate vertices exceed budget {budget}")
    if k == 1:
        return float(np.abs(Z[0]).max())
    signs = np.array(
        [(1,) + s for s in itertools.product((1, -1), repeat=k - 1)], dtype=np.float64
    )
    max_norm2 = 0.0
    cols = Z.T  # one row per point, in span coordinates
    for combo in itertools.combinations(range(L), k):
        A = cols[list(combo)]
        scale = np.prod(np.linalg.norm(A, axis=1))
        if scale <= 0.0 or abs(np.linalg.det(A)) <= 1e-12 * scale:
            continue
        U = np.linalg.solve(A, signs.T).T
        feas = np.abs(U @ Z).max(axis=1) <= 1.0 + 1e-9
        if feas.any():
            n2 = (U[feas] ** 2).sum(axis=1).max()
            max_norm2 = max(max_norm2, float(n2))
    if max_norm2 == 0.0:
        raise ValueError("no feasible polar vertex found; degenerate input")
    return 1.0 / np.sqrt(max_norm2)


def _inradius_sampled(Z: np.ndarray, n_directions: int, seed: int) -> float:
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    k = Z.shape[0]
    G = rng.standard_normal((n_directions, k))
    G /= np.linalg.norm(G, axis=1, keepdims=True)
    return float(np.abs(G @ Z).max(axis=1).min())


def inradius(
    Y: np.ndarray,
    method: InradiusMethod | str = InradiusMethod.AUTO,
    budget: int = 2_000_000,
    n_directions: int | None = None,
    seed: int = 0,
) -> InradiusResult:
    """Inradius of the symmetrized convex hull of the columns of Y.

    Computed relative to span(Y) as min over unit v in the span of
    ||Y^T v||_inf.  EXACT2D (span rank <= 2) and POLYTOPE are certified;
    SAMPLED uses 1e4 * rank Haar directions by default and only upper
    bounds the true value.  AUTO picks the cheapest certified method and
    falls back to SAMPLED past the vertex budget.

    Raises
    ------
    DimensionTooHigh
        EXACT2D requested on a span of rank > 2.
    VertexBlowup
        POLYTOPE requested and the candidate count exceeds ``budget``.
    """
    method = InradiusMethod(method)
    Z = _span_coordinates(np.asarray(Y, dtype=np.float64))
    k = Z.shape[0]
    if method is InradiusMethod.AUTO:
        if k <= 2:
            method = InradiusMethod.EXACT2D
        else:
            try:
                return InradiusResult(
                    _inradius_polytope(Z, budget), InradiusMethod.POLYTOPE, True
                )
            except VertexBlowup:
                method = InradiusMethod.SAMPLED
    if method is InradiusMethod.EXACT2D:
        return InradiusResult(_inradius_exact2d(Z), method, True)
    if method is InradiusMethod.POLYTOPE:
        return InradiusResult(_inradius_polytope(Z, budget), method, True)
    nd = n_directions if n_directions is not None else 10_000 * k
    return InradiusResult(_inradius_sampled(Z, nd, seed), method, False)


def certified_inradius(Y: np.ndarray, budget: int = 2_000_000) -> InradiusResult | None:
    """Best certified inradius, or None when only sampling is feasible."""
    Z = _span_coordinates(np.asarray(Y, dtype=np.float64))
    if Z.shape[0] <= 2:
        return InradiusResult(_inradius_exact2d(Z), InradiusMethod.EXACT2D, True)
    try:
        return InradiusResult(_inradius_polytope(Z, budget), InradiusMethod.POLYTOPE, True)
    except VertexBlowup:
        return None


def compute_zeta(dataset: MaskedDataset, variant: Variant, anchor: int) -> float:
    """Max |<companion, anchor>| over same-cluster companions in the view."""
    Y, y, idx = design(dataset, variant, anchor, reduced=True)
    if idx.size == 0:
        raise LonelyAnchor(f"anchor {anchor} has no same-cluster companions")
    return float(np.abs(Y.T @ y).max())


def compute_eta(dataset: MaskedDataset, variant: Variant, anchor: int) -> float:
    """Norm of the anchor's view column: 1 for COMPLETE, ||zf column|| else."""
    if Variant(variant) is Variant.COMPLETE:
        return float(np.linalg.norm(dataset.points[:, anchor]))
    return float(np.linalg.norm(dataset.column(ViewTag.ZF, anchor)))


def _anchor_basis(
    dataset: MaskedDataset,
    variant: Variant,
    anchor: int,
    arrangement: SubspaceArrangement | None,
) -> np.ndarray:
    """Basis of the anchor's cluster subspace in the relevant geometry.

    COMPLETE and ZF quantities project onto the full subspace; PZF onto
    its image under the anchor's observation pattern.
    """
    if arrangement is None:
        arrangement = estimate_arrangement(dataset)
    B = arrangement.basis(int(dataset.labels[anchor]))
    if Variant(variant) is Variant.PZF:
        return project_basis(B, dataset.patterns[:, anchor])
    return B


@dataclass(frozen=True)
class MuResult:
    """Cross-cluster coherence of the reduced program's dual direction."""

    mu: float
    direction: np.ndarray
    projection_norm: float
    dual: DualSolution
    solution: LassoSolution
    empty_max: bool


def compute_mu(
    dataset: MaskedDataset,
    variant: Variant,
    anchor: int,
    lam: float,
    arrangement: SubspaceArrangement | None = None,
    tol: float = 1e-10,
) -> MuResult:
    """Solve the reduced program and measure other-cluster coherence.

    The dual optimum v* of the same-cluster reduced program is projected
    onto the anchor's (projected, for PZF) subspace and normalized; mu is
    the largest |<point, direction>| over other-cluster view columns.  A
    numerically zero projection yields the zero direction and mu = 0.
    """
    variant = Variant(variant)
    Y, y, idx = design(dataset, variant, anchor, reduced=True)
    if idx.size == 0:
        raise LonelyAnchor(f"anchor {anchor} has no same-cluster companions")
    if np.linalg.norm(y) <= ZERO_TOL:
        raise DegeneratePoint(f"anchor {anchor} has no observed mass")
    sol = solve_lasso(Y, y, lam, tol)
    dual = recover_dual(sol)
    B = _anchor_basis(dataset, variant, anchor, arrangement)
    p = B @ (B.T @ dual.v)
    pn = float(np.linalg.norm(p))
    if pn <= ZERO_TOL:
        direction = np.zeros_like(p)
    else:
        direction = p / pn
    others = dataset.labels != dataset.labels[anchor]
    if not others.any():
        return MuResult(0.0, direction, pn, dual, sol, True)
    if variant is Variant.COMPLETE:
        view = dataset.view(ViewTag.COMPLETE)
    elif variant is Variant.ZF:
        view = dataset.view(ViewTag.ZF)
    else:
        view = dataset.view(ViewTag.PZF, anchor=anchor)
    mu = float(np.abs(view[:, others].T @ direction).max()) if pn > ZERO_TOL else 0.0
    return MuResult(mu, direction, pn, dual, sol, False)


@dataclass(frozen=True)
class GammaResult:
    gamma: float
    empty_max: bool


def compute_gamma(
    dataset: MaskedDataset,
    variant: Variant,
    anchor: int,
    arrangement: SubspaceArrangement | None = None,
) -> GammaResult:
    """Leakage of unobserved same-cluster mass onto other clusters.

    ZF: max |<zf other-cluster column, P_perp unobserved same-cluster
    column>| with P_perp the complement of the anchor's subspace.  PZF:
    the same with anchor-projected views and subspace.  With a single
    cluster the max runs over an empty set: gamma = 0, flagged.
    """
    variant = Variant(variant)
    if variant is Variant.COMPLETE:
        raise ValueError("gamma is defined for the ZF and PZF families only")
    same = dataset.labels == dataset.labels[anchor]
    B = _anchor_basis(dataset, variant, anchor, arrangement)
    if variant is Variant.ZF:
        A = dataset.view(ViewTag.ZF)[:, ~same]
        U = dataset.view(ViewTag.UNOBSERVED)[:, same]
    else:
        A = dataset.view(ViewTag.PZF, anchor=anchor)[:, ~same]
        U = dataset.view(ViewTag.PROJECTED_UNOBSERVED, anchor=anchor)[:, same]
    if A.shape[1] == 0:
        return GammaResult(0.0, True)
    Uperp = U - B @ (B.T @ U)
    return GammaResult(float(np.abs(A.T @ Uperp).max()), False)


@dataclass(frozen=True)
class GeometryReport:
    """All Definition-level quantities for one anchor, view, and lam."""

    variant: Variant
    anchor: int
    lam: float
    zeta: float
    eta: float
    mu: float
    gamma: float
    r: float
    r_method: str
    r_certified: bool
    dual_direction: np.ndarray
    flags: tuple[str, ...]

    CSV_HEADER = "view,zeta,eta,mu,gamma,r,r_method,lam"

    def csv_row(self) -> str:
        fields = [
            self.variant.value,
            "%.17g" % self.zeta,
            "%.17g" % self.eta,
            "%.17g" % self.mu,
            "%.17g" % self.gamma,
            "%.17g" % self.r,
            self.r_method,
            "%.17g" % self.lam,
        ]
        return ",".join(fields)


def geometry_report(
    dataset: MaskedDataset,
    variant: Variant,
    anchor: int,
    lam: float,
    arrangement: SubspaceArrangement | None = None,
    inradius_method: InradiusMethod | str | None = None,
    tol: float = 1e-10,
) -> GeometryReport:
    """Assemble zeta, eta, mu, gamma (and optionally r) for one anchor.

    The inradius of the reduced view dictionary is computed only when a
    method is requested; it is NaN otherwise.  Raises DegeneratePoint for
    anchors whose observed part vanishes and LonelyAnchor for anchors
    without companions.
    """
    variant = Variant(variant)
    eta = compute_eta(dataset, variant, anchor)
    if eta <= ZERO_TOL:
        raise DegeneratePoint(f"anchor {anchor} has no observed mass")
    if arrangement is None:
        arrangement = estimate_arrangement(dataset)
    zeta = compute_zeta(dataset, variant, anchor)
    mu_res = compute_mu(dataset, variant, anchor, lam, arrangement, tol)
    flags = []
    if mu_res.empty_max:
        flags.append("EMPTY_MAX")
    if variant is Variant.COMPLETE:
        gamma = 0.0 if dataset.m == 0 else float("nan")
    else:
        g = compute_gamma(dataset, variant, anchor, arrangement)
        gamma = g.gamma
        if g.empty_max and "EMPTY_MAX" not in flags:
            flags.append("EMPTY_MAX")
    r = float("nan")
    r_method = "none"
    r_certified = False
    if inradius_method is not None:
        Y, _, _ = design(dataset, variant, anchor, reduced=True)
        res = inradius(Y, inradius_method)
        r, r_method, r_certified = res.value, res.method.value, res.certified
    return GeometryReport(
        variant,
        anchor,
        lam,
        zeta,
        eta,
        mu_res.mu,
        gamma,
        r,
        r_method,
        r_certified,
        mu_res.direction,
        tuple(flags),
    )
