"""Deterministic and probabilistic recovery certificates.

Each deterministic certificate compares the geometric quantities of one
anchor against a sufficient condition and an admissible open interval of
trade-off values; a certificate is issued only when both the gap
condition and interval membership hold.  Margins are reported as
RHS - LHS of the stated inequality, so a positive margin means the gap
condition is satisfied.  The probabilistic certificates evaluate the
random-model feasibility functions whose positivity drives the missing-
rate guarantees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .data import MaskedDataset, SubspaceArrangement, Variant, design
from .geometry import (
    GeometryReport,
    certified_inradius,
    compute_zeta,
    geometry_report,
)

GAMMA_DEGENERATE = "DEGENERATE_GAMMA"
PROBABILISTIC = "PROBABILISTIC"
NO_LAMBDA_FORM = "NO_LAMBDA_FORM"
SAMPLED_R_ONLY = "SAMPLED_R_ONLY"


class Verdict(str, Enum):
    CERTIFIED = "CERTIFIED"
    NOT_CERTIFIED = "NOT_CERTIFIED"
    UNCERTIFIABLE_R = "UNCERTIFIABLE_R"


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of evaluating one guarantee at one trade-off value.

    margin is RHS - LHS of the certificate's gap condition (positive iff
    it holds); lambda_interval is the admissible open interval, None for
    certificates without an explicit interval (their membership is
    vacuously true); inputs records every quantity that entered the
    decision.
    """

    theorem: str
    lam: float
    margin: float
    gap_holds: bool
    lambda_interval: tuple[float, float] | None
    lambda_member: bool
    verdict: Verdict
    flags: tuple[str, ...]
    inputs: dict

    CSV_HEADER = (
        "theorem,lam,margin,gap_holds,interval_lo,interval_hi,"
        "lambda_member,verdict,flags,inputs"
    )

    def csv_row(self) -> str:
        lo, hi = ("", "") if self.lambda_interval is None else (
            "%.17g" % self.lambda_interval[0],
            "%.17g" % self.lambda_interval[1],
        )
        inputs = ";".join(
            f"{k}={'%.17g' % v if isinstance(v, float) else v}"
            for k, v in sorted(self.inputs.items())
        )
        return ",".join(
            [
                self.theorem,
                "%.17g" % self.lam,
                "%.17g" % self.margin,
                str(int(self.gap_holds)),
                lo,
                hi,
                str(int(self.lambda_member)),
                self.verdict.value,
                ";".join(self.flags),
                inputs,
            ]
        )


def _member(lam: float, interval: tuple[float, float] | None) -> bool:
    if interval is None:
        return True
    lo, hi = interval
    return bool(lo < lam < hi)


def _verdict(gap_holds: bool, member: bool, r_certified: bool = True) -> Verdict:
    if not r_certified:
        return Verdict.UNCERTIFIABLE_R
    return Verdict.CERTIFIED if (gap_holds and member) else Verdict.NOT_CERTIFIED


def _positive_root(b: float, c: float) -> float:
    """Positive root of x^2 + b x - c with c > 0, cancellation-safe."""
    disc = math.sqrt(b * b + 4.0 * c)
    if b > 0:
        return 2.0 * c / (b + disc)
    return (disc - b) / 2.0


def _quad_coeffs_pzf(zeta, eta, mu, gamma):
    b = mu / (eta * gamma) - 1.0 / (2.0 * zeta)
    c = (
        1.0 / (2.0 * eta * eta * gamma)
        + 1.0 / (2.0 * zeta * zeta)
        + mu / (2.0 * eta * gamma * zeta)
    )
    return b, c


def _quad_coeffs_zf(zeta, eta, mu, gamma):
    b, c = _quad_coeffs_pzf(zeta, eta, mu, gamma)
    return b + 1.0 / (2.0 * eta * eta), c


def pzf_quadratic(lam, zeta, eta, mu, gamma):
    """LHS of the quadratic whose negativity defines the admissible lam
    range in the projected-zero-filled guarantee; its positive root is
    the interval's upper endpoint."""
    b, c = _quad_coeffs_pzf(zeta, eta, mu, gamma)
    return lam * lam + b * lam - c


def zf_quadratic(lam, zeta, eta, mu, gamma):
    """ZF analog of :func:`pzf_quadratic` (extra 1/(2 eta^2) drag)."""
    b, c = _quad_coeffs_zf(zeta, eta, mu, gamma)
    return lam * lam + b * lam - c


def _lambda_max(zeta, eta, mu, gamma, coeffs) -> tuple[float, bool]:
    if not (zeta > 0 and eta > 0):
        raise ValueError("zeta and eta must be positive")
    if mu < 0 or gamma < 0:
        raise ValueError("mu and gamma must be nonnegative")
    if gamma <= 0.0:
        # leakage-free limit: fall back to the coherence-only endpoint
        if mu > 0.0:
            return 0.5 * (1.0 / zeta + 1.0 / mu), True
        return math.inf, True
    b, c = coeffs(zeta, eta, mu, gamma)
    return _positive_root(b, c), False


def lambda_max_pzf(zeta, eta, mu, gamma) -> tuple[float, bool]:
    """Upper endpoint of the PZF admissible interval; the flag marks the
    gamma = 0 degenerate rule."""
    return _lambda_max(zeta, eta, mu, gamma, _quad_coeffs_pzf)


def lambda_max_zf(zeta, eta, mu, gamma) -> tuple[float, bool]:
    """Upper endpoint of the ZF admissible interval (gamma = 0 flagged)."""
    return _lambda_max(zeta, eta, mu, gamma, _quad_coeffs_zf)


def certify_t1(mu, r, zeta, lam, r_certified: bool = True) -> CertificateReport:
    """Complete-data certificate: mu_lam < r and lam > 1/zeta."""
    margin = r - mu
    interval = (1.0 / zeta if zeta > 0 else math.inf, math.inf)
    member = _member(lam, interval)
    gap = bool(margin > 0)
    flags = () if r_certified else (SAMPLED_R_ONLY,)
    return CertificateReport(
        "T1",
        lam,
        float(margin),
        gap,
        interval,
        member,
        _verdict(gap, member, r_certified),
        flags,
        {"mu": float(mu), "r": float(r), "zeta": float(zeta)},
    )


def certify_t3(report: GeometryReport) -> CertificateReport:
    """PZF certificate: mu*eta < zeta with lam in (1/zeta, lambda_max)."""
    if report.variant is not Variant.PZF:
        raise ValueError("T3 consumes a PZF geometry report")
    zeta, eta, mu, gamma, lam = (
        report.zeta,
        report.eta,
        report.mu,
        report.gamma,
        report.lam,
    )
    margin = zeta - mu * eta
    hi, degenerate = lambda_max_pzf(zeta, eta, mu, gamma)
    interval = (1.0 / zeta if zeta > 0 else math.inf, hi)
    member = _member(lam, interval)
    gap = bool(margin > 0)
    flags = (GAMMA_DEGENERATE,) if degenerate else ()
    return CertificateReport(
        "T3",
        lam,
        float(margin),
        gap,
        interval,
        member,
        _verdict(gap, member),
        flags,
        {
            "zeta": zeta,
            "eta": eta,
            "mu": mu,
            "gamma": gamma,
            "lambda_max": float(hi),
        },
    )


def certify_t5(report: GeometryReport) -> CertificateReport:
    """ZF certificate: mu*eta + gamma < zeta, lam in (1/zeta, lambda_max)."""
    if report.variant is not Variant.ZF:
        raise ValueError("T5 consumes a ZF geometry report")
    zeta, eta, mu, gamma, lam = (
        report.zeta,
        report.eta,
        report.mu,
        report.gamma,
        report.lam,
    )
    margin = zeta - (mu * eta + gamma)
    hi, degenerate = lambda_max_zf(zeta, eta, mu, gamma)
    interval = (1.0 / zeta if zeta > 0 else math.inf, hi)
    member = _member(lam, interval)
    gap = bool(margin > 0)
    flags = (GAMMA_DEGENERATE,) if degenerate else ()
    return CertificateReport(
        "T5",
        lam,
        float(margin),
        gap,
        interval,
        member,
        _verdict(gap, member),
        flags,
        {
            "zeta": zeta,
            "eta": eta,
            "mu": mu,
            "gamma": gamma,
            "lambda_max": float(hi),
        },
    )


def certify_t8(mu, zeta, lam) -> CertificateReport:
    """Coherence-only complete-data certificate: mu_lam < zeta with
    lam in (1/zeta, (1/zeta + 1/mu)/2); strictly wider than T1 whenever
    r < mu_lam < zeta."""
    margin = zeta - mu
    lo = 1.0 / zeta if zeta > 0 else math.inf
    hi = 0.5 * (lo + 1.0 / mu) if mu > 0 else math.inf
    interval = (lo, hi)
    member = _member(lam, interval)
    gap = bool(margin > 0)
    return CertificateReport(
        "T8",
        lam,
        float(margin),
        gap,
        interval,
        member,
        _verdict(gap, member),
        (),
        {"mu": float(mu), "zeta": float(zeta)},
    )


def t7_bounds(r: float, mu_prime: float) -> tuple[float, float, float]:
    """Noise tolerances (exact, simplified, previous) for given r, mu'.

    All three vanish when r <= mu'.  The exact tolerance is the smaller
    root of the quadratic behind the noisy-data gap condition; the
    simplified tolerance (r - mu')/6 implies it, and both dominate the
    previously known r (r - mu') / (2 + 7 r).
    """
    if not (0 <= mu_prime and 0 <= r <= 1):
        raise ValueError("need 0 <= mu' and 0 <= r <= 1")
    if r <= mu_prime:
        return 0.0, 0.0, 0.0
    t = r + mu_prime / 3.0
    exact = t - math.sqrt(t * t - (r * r - mu_prime * mu_prime) / 3.0)
    simplified = (r - mu_prime) / 6.0
    previous = r * (r - mu_prime) / (2.0 + 7.0 * r)
    return exact, simplified, previous


def certify_t7(r, mu_prime, delta, lam=float("nan"), r_certified: bool = True):
    """Noise-robustness certificate: tolerates noise up to the exact
    bound when the clean configuration has mu' < r."""
    exact, simplified, previous = t7_bounds(r, mu_prime)
    margin = exact - delta
    gap = bool(r > mu_prime and margin > 0)
    flags = (NO_LAMBDA_FORM,) if r_certified else (NO_LAMBDA_FORM, SAMPLED_R_ONLY)
    ratio = exact / previous if previous > 0 else math.inf
    return CertificateReport(
        "T7",
        lam,
        float(margin),
        gap,
        None,
        True,
        _verdict(gap, True, r_certified),
        flags,
        {
            "r": float(r),
            "mu_prime": float(mu_prime),
            "delta": float(delta),
            "bound_exact": float(exact),
            "bound_simplified": float(simplified),
            "bound_previous": float(previous),
            "improvement_ratio": float(ratio),
        },
    )


def f_pzf(omega, alpha, beta, eps):
    """PZF feasibility function of the missing fraction omega.

    Positive values certify (with high probability under the random
    model) that the PZF program is subspace preserving at that missing
    rate.  Accepts scalars or arrays for omega.
    """
    omega = np.asarray(omega, dtype=np.float64)
    if (omega < 0).any() or (omega > 1).any():
        raise ValueError("omega must lie in [0, 1]")
    if beta < 0 or eps < 0:
        raise ValueError("beta and eps must be nonnegative")
    val = (
        alpha
        - np.sqrt(2.0 * omega)
        - beta * np.sqrt(1.0 - omega)
        - (1.0 + beta) * math.sqrt(eps + beta / 3.0)
    )
    return float(val) if val.ndim == 0 else val


def f_zf(omega, alpha, beta, eps):
    """ZF feasibility function: the PZF one minus the zero-filling drag."""
    omega = np.asarray(omega, dtype=np.float64)
    s = math.sqrt(eps + beta / 3.0)
    val = (
        f_pzf(omega, alpha, beta, eps)
        - np.sqrt(omega * (1.0 - omega))
        - s * (np.sqrt(omega) + np.sqrt(1.0 - omega) + s)
    )
    return float(val) if np.ndim(val) == 0 else val


def certify_t4(omega, alpha, beta, eps) -> CertificateReport:
    """Probabilistic PZF certificate: f_pzf(omega) > 0."""
    margin = float(f_pzf(omega, alpha, beta, eps))
    gap = bool(margin > 0)
    return CertificateReport(
        "T4",
        float("nan"),
        margin,
        gap,
        None,
        True,
        _verdict(gap, True),
        (PROBABILISTIC,),
        {"omega": float(omega), "alpha": alpha, "beta": beta, "eps": eps},
    )


def certify_t6(omega, alpha, beta, eps) -> CertificateReport:
    """Probabilistic ZF certificate: f_zf(omega) > 0."""
    margin = float(f_zf(omega, alpha, beta, eps))
    gap = bool(margin > 0)
    return CertificateReport(
        "T6",
        float("nan"),
        margin,
        gap,
        None,
        True,
        _verdict(gap, True),
        (PROBABILISTIC,),
        {"omega": float(omega), "alpha": alpha, "beta": beta, "eps": eps},
    )


@dataclass(frozen=True)
class RateBounds:
    """Largest certified missing rates m/D under the random model."""

    pzf: float
    zf: float


def rate_bounds(rho: float, d: int) -> RateBounds:
    """Missing-rate thresholds; their ratio is the constant (1+sqrt2)^2/2."""
    if rho < 1:
        raise ValueError("density must satisfy rho >= 1")
    if d < 1:
        raise ValueError("subspace dimension must be positive")
    base = math.log(rho) / (16.0 * d)
    return RateBounds(pzf=0.5 * base, zf=base / (1.0 + math.sqrt(2.0)) ** 2)


def lambda_grid(zeta: float, n: int = 40, lo: float = 0.5, hi: float = 20.0):
    """Default log-spaced trade-off grid [lo/zeta, hi/zeta]."""
    if not zeta > 0:
        raise ValueError("zeta must be positive")
    return np.geomspace(lo / zeta, hi / zeta, n)


# view-qualified synonyms
certify_t3_pzf = certify_t3
certify_t5_zf = certify_t5
certify_t7_noise = certify_t7


THEOREM_VARIANT = {
    "T1": Variant.COMPLETE,
    "T3": Variant.PZF,
    "T5": Variant.ZF,
    "T7": Variant.COMPLETE,
    "T8": Variant.COMPLETE,
}


def certify_anchor(
    dataset: MaskedDataset,
    theorem: str,
    anchor: int,
    lam: float,
    arrangement: SubspaceArrangement | None = None,
    delta: float = 0.0,
    inradius_budget: int = 2_000_000,
    tol: float = 1e-10,
) -> CertificateReport:
    """Evaluate one data-driven certificate for one anchor at one lam."""
    return certify_anchor_grid(
        dataset, theorem, anchor, [lam], arrangement, delta, inradius_budget, tol
    )[0]


def certify_anchor_grid(
    dataset: MaskedDataset,
    theorem: str,
    anchor: int,
    lams=None,
    arrangement: SubspaceArrangement | None = None,
    delta: float = 0.0,
    inradius_budget: int = 2_000_000,
    tol: float = 1e-10,
) -> list[CertificateReport]:
    """Evaluate a certificate across a lam grid, reusing the inradius.

    theorem is one of T1, T3, T5, T7, T8; lams defaults to the standard
    grid anchored at the view's zeta.  The anchor's cluster inradius
    (needed by T1 and T7) is computed once with a certified method when
    feasible; otherwise reports carry the UNCERTIFIABLE_R verdict.
    """
    theorem = theorem.upper()
    if theorem not in THEOREM_VARIANT:
        raise ValueError(f"unknown data-driven certificate {theorem!r}")
    variant = THEOREM_VARIANT[theorem]
    if lams is None:
        lams = lambda_grid(compute_zeta(dataset, variant, anchor))
    r = float("nan")
    r_certified = False
    if theorem in ("T1", "T7"):
        Y, _, _ = design(dataset, variant, anchor, reduced=True)
        res = certified_inradius(Y, inradius_budget)
        if res is not None:
            r, r_certified = res.value, True
    out = []
    for lam in lams:
        rep = geometry_report(dataset, variant, anchor, float(lam), arrangement, tol=tol)
        if theorem == "T1":
            out.append(certify_t1(rep.mu, r, rep.zeta, rep.lam, r_certified))
        elif theorem == "T3":
            out.append(certify_t3(rep))
        elif theorem == "T5":
            out.append(certify_t5(rep))
        elif theorem == "T7":
            out.append(certify_t7(r, rep.mu, delta, rep.lam, r_certified))
        else:
            out.append(certify_t8(rep.mu, rep.zeta, rep.lam))
    return out
