"""Coordinate-descent kernel for the l1 + squared-residual program.

Compiled with numba; the public wrapper lives in ``lasso``.  The kernel
keeps a running residual, resynchronizes it from scratch at every gap
check to kill float drift, and stops on a duality-gap threshold that is
relative to the current primal objective.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def gap_primal_residual(Yt, y, c, lam):
    """Exact duality gap, primal objective, and residual for iterate c.

    The dual candidate is v = lam * e rescaled into the feasible set
    {v : ||Y^T v||_inf <= 1} when necessary.
    """
    L, D = Yt.shape
    e = y.copy()
    for j in range(L):
        cj = c[j]
        if cj != 0.0:
            for i in range(D):
                e[i] -= Yt[j, i] * cj
    enorm2 = 0.0
    ydote = 0.0
    for i in range(D):
        enorm2 += e[i] * e[i]
        ydote += y[i] * e[i]
    l1 = 0.0
    for j in range(L):
        l1 += abs(c[j])
    primal = l1 + 0.5 * lam * enorm2
    s = 0.0
    for j in range(L):
        t = 0.0
        for i in range(D):
            t += Yt[j, i] * e[i]
        t = abs(t) * lam
        if t > s:
            s = t
    scale = 1.0 if s <= 1.0 else 1.0 / s
    dual = scale * lam * ydote - (scale * scale * lam * enorm2) / 2.0
    return primal - dual, primal, e


@njit(cache=True)
def cd_run(Yt, y, c, lam, tol, max_sweeps, check_every):
    """Sweep coordinates until the relative duality gap drops below tol.

    Parameters are the transposed dictionary (L, D), the target, the
    starting iterate (updated in place), the trade-off lam > 0, the gap
    tolerance relative to max(1, primal), a sweep budget, and the gap
    check cadence.

    Returns (gap, primal, sweeps, fixed_point).
    """
    L, D = Yt.shape
    norms2 = np.empty(L)
    for j in range(L):
        t = 0.0
        for i in range(D):
            t += Yt[j, i] * Yt[j, i]
        norms2[j] = t
    r = y.copy()
    for j in range(L):
        cj = c[j]
        if cj != 0.0:
            for i in range(D):
                r[i] -= Yt[j, i] * cj
    gap, primal, _ = gap_primal_residual(Yt, y, c, lam)
    if gap <= tol * max(1.0, primal):
        return gap, primal, 0, False
    sweeps = 0
    while sweeps < max_sweeps:
        maxd = 0.0
        for j in range(L):
            nj = norms2[j]
            if nj == 0.0:
                continue
            cj = c[j]
            rho = nj * cj
            for i in range(D):
                rho += Yt[j, i] * r[i]
            z = lam * rho
            if z > 1.0:
                new = (z - 1.0) / (lam * nj)
            elif z < -1.0:
                new = (z + 1.0) / (lam * nj)
            else:
                new = 0.0  # ties at |z| == 1 resolve to zero
            d = new - cj
            if d != 0.0:
                for i in range(D):
                    r[i] -= Yt[j, i] * d
                c[j] = new
                ad = abs(d)
                if ad > maxd:
                    maxd = ad
        sweeps += 1
        if maxd == 0.0 or sweeps % check_every == 0 or sweeps == max_sweeps:
            gap, primal, e = gap_primal_residual(Yt, y, c, lam)
            for i in range(D):
                r[i] = e[i]
            if gap <= tol * max(1.0, primal) or maxd == 0.0:
                return gap, primal, sweeps, maxd == 0.0
    return gap, primal, sweeps, False
