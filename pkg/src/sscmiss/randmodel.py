"""Random union-of-subspaces model and concentration validators.

Subspaces are drawn uniformly from the Grassmannian (Gaussian matrix,
thin QR with sign correction), points uniformly from each subspace's
unit sphere, and observation patterns uniformly among coordinate
subsets of a fixed size.  The validators are seeded Monte-Carlo checks
of the three concentration facts the probabilistic certificates rest
on; each reports an empirical failure rate against its theoretical
bound with a 3-sigma binomial allowance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import MaskedDataset, SubspaceArrangement
from .errors import InvalidDensity
from .geometry import InradiusMethod, inradius


@dataclass(frozen=True)
class RandomModelParams:
    """Parameters of the random model.

    n subspaces of dimension d in ambient dimension D, rho*d + 1 points
    per subspace (rho*d must be integral), m masked coordinates per
    point.  epsilon is the slack used by the feasibility functions when
    this model feeds certificate evaluations.
    """

    n: int
    d: int
    D: int
    rho: float
    m: int
    seed: int
    epsilon: float = 0.001

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one subspace")
        if not 1 <= self.d < self.D:
            raise ValueError("need 1 <= d < D")
        rd = self.rho * self.d
        if self.rho <= 0 or abs(rd - round(rd)) > 1e-9:
            raise InvalidDensity(f"rho*d = {rd} is not a positive integer")
        if not 0 <= self.m < self.D - self.d:
            raise ValueError("masked count must satisfy 0 <= m < D - d")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")

    @property
    def points_per_subspace(self) -> int:
        return int(round(self.rho * self.d)) + 1

    @property
    def N(self) -> int:
        return self.n * self.points_per_subspace

    @property
    def omega(self) -> float:
        return self.m / self.D

    @property
    def alpha(self) -> float:
        """sqrt(log(rho) / (16 d)); needs rho >= 1."""
        if self.rho < 1:
            raise ValueError("alpha needs rho >= 1")
        return math.sqrt(math.log(self.rho) / (16.0 * self.d))

    @property
    def beta(self) -> float:
        """sqrt(6 log(N) / D)."""
        return math.sqrt(6.0 * math.log(self.N) / self.D)


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for a (seed, counter...) pair.

    Splitting by spawn key keeps streams stable when other counters
    change, e.g. adding trials at one grid point leaves every other
    cell's draws untouched.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def child_seed(seed: int, *key: int) -> int:
    """Deterministic 64-bit child seed for nested configuration objects."""
    ss = np.random.SeedSequence(seed, spawn_key=key)
    return int(ss.generate_state(1, np.uint64)[0])


def _haar_basis(rng: np.random.Generator, D: int, d: int) -> np.ndarray:
    G = rng.standard_normal((D, d))
    Q, R = np.linalg.qr(G)
    sign = np.sign(np.diag(R))
    sign[sign == 0] = 1.0
    return Q * sign


def _unit_columns(rng: np.random.Generator, shape) -> np.ndarray:
    A = rng.standard_normal(shape)
    return A / np.linalg.norm(A, axis=0, keepdims=True)


def generate(params: RandomModelParams) -> tuple[SubspaceArrangement, MaskedDataset]:
    """Draw an arrangement and a masked dataset from the random model.

    Deterministic in params.seed; bases are drawn first, then points,
    then patterns, each from the same master stream.
    """
    rng = stream(params.seed)
    D, d, n = params.D, params.d, params.n
    pps = params.points_per_subspace
    bases = tuple(_haar_basis(rng, D, d) for _ in range(n))
    cols = []
    for B in bases:
        cols.append(B @ _unit_columns(rng, (d, pps)))
    X = np.concatenate(cols, axis=1)
    labels = np.repeat(np.arange(n), pps)
    W = np.ones((D, params.N), dtype=np.uint8)
    for j in range(params.N):
        if params.m:
            hide = rng.choice(D, size=params.m, replace=False)
            W[hide, j] = 0
    return SubspaceArrangement(bases), MaskedDataset(X, labels, W)


@dataclass(frozen=True)
class ValidationReport:
    """Monte-Carlo check of one concentration bound.

    passed means the empirical failure rate does not exceed the bound by
    more than three binomial standard deviations (computed at the bound,
    capped to [0, 1]).
    """

    name: str
    trials: int
    failures: int
    rate: float
    bound: float
    sigma: float
    passed: bool
    params: dict
    flags: tuple[str, ...]
    extras: dict

    def csv_row(self) -> str:
        params = ";".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return ",".join(
            [
                self.name,
                str(self.trials),
                str(self.failures),
                "%.17g" % self.rate,
                "%.17g" % self.bound,
                "%.17g" % self.sigma,
                "PASS" if self.passed else "FAIL",
                ";".join(self.flags),
                params,
            ]
        )

    CSV_HEADER = "name,trials,failures,rate,bound,sigma,result,flags,params"


def _assemble(name, trials, failures, bound, params, flags=(), extras=None):
    rate = failures / trials
    p = min(bound, 1.0)
    sigma = math.sqrt(p * (1.0 - p) / trials)
    passed = rate <= bound + 3.0 * sigma
    return ValidationReport(
        name,
        trials,
        failures,
        rate,
        bound,
        sigma,
        bool(passed),
        params,
        tuple(flags),
        extras or {},
    )


def validate_inradius_bound(
    d: int, rho: float, trials: int, seed: int = 0
) -> ValidationReport:
    """Check P[r(d rho points on S^{d-1}) <= alpha] <= exp(-sqrt(rho) d).

    Each trial draws rho*d uniform points on the d-sphere and computes
    the exact inradius of their symmetrized hull (angular search for
    d <= 2, polar vertex enumeration above).  Densities below 5 are
    outside the asymptotic regime and flagged, not failed.
    """
    rd = rho * d
    if rho <= 0 or abs(rd - round(rd)) > 1e-9:
        raise InvalidDensity(f"rho*d = {rd} is not a positive integer")
    L = int(round(rd))
    alpha = math.sqrt(math.log(rho) / (16.0 * d)) if rho >= 1 else 0.0
    failures = 0
    for t in range(trials):
        rng = stream(seed, t)
        Y = _unit_columns(rng, (d, L))
        method = InradiusMethod.EXACT2D if d <= 2 else InradiusMethod.POLYTOPE
        r = inradius(Y, method).value
        if r <= alpha:
            failures += 1
    flags = [] if rho >= 5 else ["RHO_BELOW_REGIME"]
    return _assemble(
        "inradius_tail",
        trials,
        failures,
        math.exp(-math.sqrt(rho) * d),
        {"d": d, "rho": rho, "alpha": alpha, "seed": seed},
        flags,
    )


def validate_inner_product_tail(
    D: int, eps: float, trials: int, seed: int = 0
) -> ValidationReport:
    """Check P[|<x, v>| >= eps] <= 2 exp(-D eps^2 / 2) for x uniform on
    the sphere and the fixed unit vector v = e_1."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    failures = 0
    for t in range(trials):
        rng = stream(seed, t)
        x = rng.standard_normal(D)
        if abs(x[0]) >= eps * np.linalg.norm(x):
            failures += 1
    return _assemble(
        "inner_product_tail",
        trials,
        failures,
        2.0 * math.exp(-D * eps * eps / 2.0),
        {"D": D, "eps": eps, "seed": seed},
    )


def validate_projection_norm(
    D: int, d: int, eps: float, trials: int, seed: int = 0
) -> ValidationReport:
    """Check P[ ||P_V x|| outside sqrt(d/D) +- eps ] <= 2 exp(-D eps^2/2)
    for x uniform on the sphere and V the span of the first d axes."""
    if not 1 <= d <= D:
        raise ValueError("need 1 <= d <= D")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    center = math.sqrt(d / D)
    failures = 0
    total = 0.0
    for t in range(trials):
        rng = stream(seed, t)
        x = rng.standard_normal(D)
        x /= np.linalg.norm(x)
        pn = np.linalg.norm(x[:d])
        total += pn
        if abs(pn - center) >= eps:
            failures += 1
    return _assemble(
        "projection_norm_tail",
        trials,
        failures,
        2.0 * math.exp(-D * eps * eps / 2.0),
        {"D": D, "d": d, "eps": eps, "seed": seed},
        extras={"mean_norm": total / trials, "center": center},
    )
