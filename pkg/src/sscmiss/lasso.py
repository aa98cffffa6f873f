"""Solver for min ||c||_1 + (lam/2) ||y - Y c||_2^2 and its dual.

The dual program is max <y, v> - ||v||^2 / (2 lam) over ||Y^T v||_inf <= 1;
it is strongly concave, so the dual optimum is unique and recoverable from
any primal optimum as v* = lam * (y - Y c*).  Coordinate descent does the
bulk of the work; an active-set refit polishes the iterate so reported
duality gaps land near machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._cd import cd_run, gap_primal_residual
from .errors import InfeasibleDual

DUAL_FEAS_TOL = 1e-6


@dataclass(frozen=True)
class LassoSolution:
    """Primal solve outcome.

    Attributes
    ----------
    coeffs : ndarray, shape (L,)
    residual : ndarray, shape (D,)
        e* = y - Y c*.
    objective : float
        Primal value at coeffs.
    gap : float
        Duality gap certificate for coeffs (>= -1e-10 up to roundoff).
    lam : float
    sweeps : int
        Coordinate sweeps consumed.
    converged : bool
        Gap fell below the requested tolerance; when False the best
        iterate found is returned anyway.
    dictionary : ndarray, shape (D, L)
    target : ndarray, shape (D,)
    """

    coeffs: np.ndarray
    residual: np.ndarray
    objective: float
    gap: float
    lam: float
    sweeps: int
    converged: bool
    dictionary: np.ndarray
    target: np.ndarray


@dataclass(frozen=True)
class DualSolution:
    """Dual optimum v* = lam * e* with its constraint slack.

    feasibility is ||Y^T v||_inf; objective is <y, v> - ||v||^2/(2 lam).
    """

    v: np.ndarray
    feasibility: float
    objective: float


def duality_gap(Y: np.ndarray, y: np.ndarray, lam: float, c: np.ndarray):
    """(gap, primal, residual) for an arbitrary iterate c."""
    Yt = np.ascontiguousarray(np.asarray(Y, dtype=np.float64).T)
    y = np.asarray(y, dtype=np.float64).copy()
    c = np.asarray(c, dtype=np.float64).copy()
    return gap_primal_residual(Yt, y, c, lam)


def zero_is_optimal(Y: np.ndarray, y: np.ndarray, lam: float) -> bool:
    """c = 0 solves the program iff lam * ||Y^T y||_inf <= 1."""
    if Y.shape[1] == 0:
        return True
    return lam * np.abs(Y.T @ y).max() <= 1.0


def _polish(Yt, y, c, lam):
    """Refit the nonzero coordinates by solving the stationarity system.

    Signs are taken from the iterate; coordinates whose refit flips sign
    are dropped and the system re-solved.  Returns a candidate iterate
    (possibly the input unchanged).
    """
    support = np.flatnonzero(c)
    for _ in range(len(support) + 1):
        if support.size == 0:
            return np.zeros_like(c)
        Ys = Yt[support].T
        sigma = np.sign(c[support])
        gram = Ys.T @ Ys
        rhs = Ys.T @ y - sigma / lam
        try:
            cs = np.linalg.solve(gram, rhs)
        except np.linalg.LinAlgError:
            cs, *_ = np.linalg.lstsq(gram, rhs, rcond=None)
        flipped = (np.sign(cs) != sigma) & (cs != 0.0)
        if not flipped.any():
            out = np.zeros_like(c)
            out[support] = cs
            return out
        support = support[~flipped]
        c = np.zeros_like(c)
        c[support] = cs[~flipped]
    return c


def solve_lasso(
    Y: np.ndarray,
    y: np.ndarray,
    lam: float,
    tol: float = 1e-10,
    max_sweeps: int = 100_000,
) -> LassoSolution:
    """Solve min_c ||c||_1 + (lam/2) ||y - Y c||_2^2 by coordinate descent.

    Parameters
    ----------
    Y : ndarray, shape (D, L)
        Dictionary; zero columns are tolerated and receive coefficient 0.
    y : ndarray, shape (D,)
    lam : float
        Positive trade-off parameter.
    tol : float
        Duality-gap tolerance, relative to max(1, objective).
    max_sweeps : int
        Budget of full coordinate sweeps.  On exhaustion the best iterate
        is returned with ``converged=False`` rather than raising.

    Notes
    -----
    After coordinate descent an active-set refit is attempted and kept if
    it certifies a smaller gap; if the tolerance is still unmet, descent
    restarts once from the refit iterate before giving up.
    """
    Y = np.asarray(Y, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if Y.ndim != 2 or Y.shape[0] != y.shape[0]:
        raise ValueError("dictionary and target dimensions disagree")
    if not lam > 0:
        raise ValueError("lam must be positive")
    D, L = Y.shape
    if L == 0:
        c = np.zeros(0)
        obj = 0.5 * lam * float(y @ y)
        return LassoSolution(c, y.copy(), obj, 0.0, lam, 0, True, Y, y)

    Yt = np.ascontiguousarray(Y.T)
    yk = np.ascontiguousarray(y)
    c = np.zeros(L)
    budget = max_sweeps
    gap, primal, sweeps, _ = cd_run(Yt, yk, c, lam, tol, budget, 4)
    total = sweeps

    def consider(cand, best):
        g, p, _ = gap_primal_residual(Yt, yk, cand, lam)
        return (cand, g, p) if g < best[1] else best

    best = consider(_polish(Yt, yk, c, lam), (c, gap, primal))
    if best[1] > tol * max(1.0, best[2]) and total < max_sweeps:
        # restart once from the polished iterate
        c = best[0].copy()
        gap, primal, sweeps, _ = cd_run(Yt, yk, c, lam, tol, max_sweeps - total, 4)
        total += sweeps
        best = consider(_polish(Yt, yk, c, lam), consider(c, best))
    c, gap, primal = best
    _, _, resid = gap_primal_residual(Yt, yk, c, lam)
    converged = gap <= tol * max(1.0, primal)
    return LassoSolution(
        c, resid, float(primal), float(gap), lam, total, bool(converged), Y, y
    )


def recover_dual(solution: LassoSolution) -> DualSolution:
    """Dual optimum from a primal solution via v = lam * residual.

    Raises InfeasibleDual when ||Y^T v||_inf exceeds 1 by more than 1e-6,
    which indicates the primal iterate is far from optimal.
    """
    v = solution.lam * solution.residual
    if solution.dictionary.shape[1]:
        feas = float(np.abs(solution.dictionary.T @ v).max())
    else:
        feas = 0.0
    if feas > 1.0 + DUAL_FEAS_TOL:
        raise InfeasibleDual(f"||Y^T v||_inf = {feas:.3e} > 1")
    obj = float(solution.target @ v - (v @ v) / (2.0 * solution.lam))
    return DualSolution(v, feas, obj)


@dataclass(frozen=True)
class Lemma1Report:
    """Two-sided bound check on ||v*||_2 for lam > 1/zeta.

    lower = eta / zeta, upper = eta * (2 lam - 1/zeta); slack values are
    nonnegative iff the corresponding bound holds (1e-8 absolute slack).
    """

    applicable: bool
    vnorm: float
    lower: float
    upper: float
    slack_lower: float
    slack_upper: float
    holds: bool


def check_lemma1_bounds(
    dual: DualSolution, zeta: float, eta: float, lam: float
) -> Lemma1Report:
    """Check eta/zeta <= ||v*|| <= eta (2 lam - 1/zeta); needs lam > 1/zeta."""
    vnorm = float(np.linalg.norm(dual.v))
    applicable = zeta > 0 and lam > 1.0 / zeta
    if not applicable:
        return Lemma1Report(False, vnorm, np.nan, np.nan, np.nan, np.nan, False)
    lower = eta / zeta
    upper = eta * (2.0 * lam - 1.0 / zeta)
    sl = vnorm - lower
    su = upper - vnorm
    return Lemma1Report(
        True, vnorm, lower, upper, sl, su, bool(sl >= -1e-8 and su >= -1e-8)
    )
