"""Seeded phase-transition sweeps over the missing fraction.

A sweep crosses a missing-fraction grid with solver variants and
repeated trials under the random model.  Cells are independent: each
derives its own RNG stream from (master seed, grid index, trial), so ZF
and PZF see identical datasets and adding trials at one grid point
never perturbs another.  Completed cells append to a partial log, and
an interrupted sweep resumes from it; the final CSV is written in
canonical order, so resumed and uninterrupted runs produce identical
bytes.  Per-cell failures are recorded in the row, never fatal.
"""

from __future__ import annotations

import hashlib
import multiprocessing
import os
from dataclasses import dataclass
from functools import partial

import numpy as np

from .certificates import certify_t3, certify_t5, f_pzf, f_zf, Verdict
from .data import MaskedDataset, SubspaceArrangement, Variant, design
from .errors import SscmissError
from .geometry import geometry_report
from .lasso import solve_lasso
from .pipeline import (
    LambdaRule,
    build_affinity,
    column_preserves,
    self_express,
    sp_rate,
    spectral_cluster,
)
from .randmodel import RandomModelParams, child_seed, generate

_VARIANT_CODE = {Variant.COMPLETE: 0, Variant.ZF: 1, Variant.PZF: 2}


@dataclass(frozen=True)
class SweepConfig:
    """Grid definition for one sweep; validated on construction."""

    n: int
    d: int
    D: int
    rho: float
    omegas: tuple[float, ...]
    variants: tuple[Variant, ...]
    trials: int
    rule: LambdaRule
    seed: int = 0
    epsilon: float = 0.001
    certificates: bool = True
    name: str = "sweep"

    def __post_init__(self):
        object.__setattr__(self, "omegas", tuple(float(w) for w in self.omegas))
        object.__setattr__(
            self, "variants", tuple(Variant(v) for v in self.variants)
        )
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if not self.omegas:
            raise ValueError("need at least one omega")
        for w in self.omegas:
            if not 0.0 <= w < 1.0:
                raise ValueError("omega must lie in [0, 1)")
            # raises InvalidDensity / ValueError on a bad grid point
            RandomModelParams(
                self.n, self.d, self.D, self.rho, self.mask_count(w), 0, self.epsilon
            )

    def mask_count(self, omega: float) -> int:
        return int(round(omega * self.D))

    def canonical_text(self) -> str:
        rows = [
            ("n", self.n),
            ("d", self.d),
            ("D", self.D),
            ("rho", "%.17g" % self.rho),
            ("omegas", " ".join("%.17g" % w for w in self.omegas)),
            ("variants", " ".join(v.value for v in self.variants)),
            ("trials", self.trials),
            ("rule", f"{self.rule.mode} {'%.17g' % self.rule.value}"),
            ("seed", self.seed),
            ("epsilon", "%.17g" % self.epsilon),
            ("certificates", int(self.certificates)),
            ("name", self.name),
        ]
        return "\n".join(f"{k}={v}" for k, v in rows) + "\n"

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("ascii")).hexdigest()


@dataclass(frozen=True)
class SweepRow:
    """One (omega, variant, trial) cell of a sweep."""

    omega: float
    m: int
    variant: str
    trial: int
    sp_rate: float
    clustering_error: float
    cert_t3_fraction: float
    cert_t5_fraction: float
    cert_violations: int
    f_pzf: float
    f_zf: float
    error: str = ""

    CSV_HEADER = (
        "omega,m,variant,trial,sp_rate,clustering_error,"
        "cert_t3_fraction,cert_t5_fraction,cert_violations,f_pzf,f_zf,error"
    )

    def csv_row(self) -> str:
        return ",".join(
            [
                "%.17g" % self.omega,
                str(self.m),
                self.variant,
                str(self.trial),
                "%.17g" % self.sp_rate,
                "%.17g" % self.clustering_error,
                "%.17g" % self.cert_t3_fraction,
                "%.17g" % self.cert_t5_fraction,
                str(self.cert_violations),
                "%.17g" % self.f_pzf,
                "%.17g" % self.f_zf,
                self.error,
            ]
        )

    @staticmethod
    def from_csv(line: str) -> "SweepRow":
        p = line.rstrip("\n").split(",")
        return SweepRow(
            float(p[0]),
            int(p[1]),
            p[2],
            int(p[3]),
            float(p[4]),
            float(p[5]),
            float(p[6]),
            float(p[7]),
            int(p[8]),
            float(p[9]),
            float(p[10]),
            p[11] if len(p) > 11 else "",
        )


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    csv_path: str
    partial_path: str


def _cell_certificates(dataset, arrangement, variant, expr):
    """Certificate verdicts at each anchor's actually-used lam.

    Returns (fraction certified, count certified but not preserving).
    Anchors whose geometry is degenerate count as not certified.
    """
    certify = certify_t3 if variant is Variant.PZF else certify_t5
    certified = 0
    violations = 0
    N = dataset.n_points
    for j in range(N):
        lam = expr.lambdas[j]
        if not np.isfinite(lam):
            continue
        try:
            rep = geometry_report(dataset, variant, j, float(lam), arrangement)
            verdict = certify(rep).verdict
        except SscmissError:
            continue
        if verdict is Verdict.CERTIFIED:
            certified += 1
            if not expr.sp_flags[j]:
                violations += 1
    return certified / N, violations


def run_cell(config: SweepConfig, cell: tuple[int, int, Variant]) -> SweepRow:
    """Compute one sweep cell; exceptions become an error-tagged row."""
    oi, trial, variant = cell
    omega = config.omegas[oi]
    m = config.mask_count(omega)
    nan = float("nan")
    try:
        params = RandomModelParams(
            config.n,
            config.d,
            config.D,
            config.rho,
            m,
            child_seed(config.seed, oi, trial),
            config.epsilon,
        )
        arrangement, dataset = generate(params)
        expr = self_express(dataset, variant, config.rule)
        W = build_affinity(expr)
        res = spectral_cluster(
            W,
            config.n,
            labels=dataset.labels,
            seed=child_seed(config.seed, oi, trial, _VARIANT_CODE[variant]),
        )
        frac_t3, frac_t5 = nan, nan
        violations = 0
        if config.certificates and variant in (Variant.ZF, Variant.PZF):
            frac, violations = _cell_certificates(dataset, arrangement, variant, expr)
            if variant is Variant.PZF:
                frac_t3 = frac
            else:
                frac_t5 = frac
        w_actual = m / config.D
        return SweepRow(
            w_actual,
            m,
            variant.value,
            trial,
            sp_rate(expr),
            res.error,
            frac_t3,
            frac_t5,
            violations,
            float(f_pzf(w_actual, params.alpha, params.beta, config.epsilon)),
            float(f_zf(w_actual, params.alpha, params.beta, config.epsilon)),
        )
    except Exception as exc:  # per-cell failure: record, keep sweeping
        return SweepRow(
            m / config.D, m, Variant(variant).value, trial,
            nan, nan, nan, nan, 0, nan, nan, type(exc).__name__,
        )


def _cell_key(row: SweepRow) -> tuple[int, str, int]:
    return (row.m, row.variant, row.trial)


def run_sweep(
    config: SweepConfig,
    out_dir: str = ".",
    threads: int = 1,
    resume: bool = True,
) -> SweepResult:
    """Execute (or finish) a sweep and write its canonical CSV.

    The partial log in out_dir is keyed by the config hash; stale logs
    from a different configuration are discarded.  With threads > 1 the
    remaining cells run in a process pool.
    """
    os.makedirs(out_dir, exist_ok=True)
    partial_path = os.path.join(out_dir, f"{config.name}.partial.csv")
    csv_path = os.path.join(out_dir, f"{config.name}.csv")
    marker = f"# config={config.config_hash}"
    done: dict[tuple, SweepRow] = {}
    if resume and os.path.exists(partial_path):
        with open(partial_path, encoding="ascii") as fh:
            lines = fh.read().splitlines()
        if lines and lines[0] == marker:
            for line in lines[1:]:
                if line and not line.startswith("#"):
                    row = SweepRow.from_csv(line)
                    done[_cell_key(row)] = row
    cells = [
        (oi, trial, variant)
        for oi in range(len(config.omegas))
        for variant in config.variants
        for trial in range(config.trials)
    ]
    pending = [
        c
        for c in cells
        if (config.mask_count(config.omegas[c[0]]), c[2].value, c[1]) not in done
    ]
    mode = "a" if done else "w"
    with open(partial_path, mode, encoding="ascii") as log:
        if not done:
            log.write(marker + "\n")
            log.flush()
        if pending:
            if threads > 1:
                with multiprocessing.Pool(threads) as pool:
                    for row in pool.imap_unordered(
                        partial(run_cell, config), pending
                    ):
                        done[_cell_key(row)] = row
                        log.write(row.csv_row() + "\n")
                        log.flush()
            else:
                for cell in pending:
                    row = run_cell(config, cell)
                    done[_cell_key(row)] = row
                    log.write(row.csv_row() + "\n")
                    log.flush()
    order = {v.value: i for i, v in enumerate(config.variants)}
    rows = tuple(
        sorted(
            done.values(),
            key=lambda r: (r.omega, order.get(r.variant, 99), r.trial),
        )
    )
    with open(csv_path, "w", encoding="ascii") as fh:
        fh.write(SweepRow.CSV_HEADER + "\n")
        for row in rows:
            fh.write(row.csv_row() + "\n")
    return SweepResult(rows, csv_path, partial_path)


@dataclass(frozen=True)
class ComparisonRow:
    anchor: int
    lam: float
    theorem: str
    verdict: str
    margin: float
    preserved: bool


@dataclass(frozen=True)
class CertificateComparison:
    """Certificate verdicts against the actual solver outcome.

    confusion[theorem] counts certified/uncertified x preserved/violated
    over all (anchor, lam) pairs; a sound certificate has
    certified_violated == 0.
    """

    rows: tuple[ComparisonRow, ...]
    confusion: dict


def compare_certificates(
    dataset: MaskedDataset,
    arrangement: SubspaceArrangement | None,
    lams,
    theorems: tuple[str, ...] = ("T3", "T5", "T8"),
    anchors=None,
    tol: float = 1e-10,
) -> CertificateComparison:
    """Tabulate certificate verdicts vs empirical subspace preservation.

    For every anchor and lam, each theorem's geometry is evaluated and
    the corresponding full-dictionary program is solved on the theorem's
    own view; the solution's subspace-preserving flag is the ground
    truth the verdict is scored against.
    """
    from .certificates import THEOREM_VARIANT, certify_anchor_grid

    if anchors is None:
        anchors = range(dataset.n_points)
    rows = []
    confusion = {
        t: {
            "certified_preserved": 0,
            "certified_violated": 0,
            "uncertified_preserved": 0,
            "uncertified_violated": 0,
        }
        for t in theorems
    }
    for anchor in anchors:
        sp_cache: dict[tuple[Variant, float], bool] = {}
        for theorem in theorems:
            variant = THEOREM_VARIANT[theorem.upper()]
            reports = certify_anchor_grid(
                dataset, theorem, anchor, lams, arrangement, tol=tol
            )
            for lam, rep in zip(lams, reports):
                key = (variant, float(lam))
                if key not in sp_cache:
                    Y, y, idx = design(dataset, variant, anchor, reduced=False)
                    sol = solve_lasso(Y, y, float(lam), tol)
                    sp_cache[key] = column_preserves(
                        sol.coeffs, dataset.labels[idx], dataset.labels[anchor]
                    )
                preserved = sp_cache[key]
                rows.append(
                    ComparisonRow(
                        anchor,
                        float(lam),
                        rep.theorem,
                        rep.verdict.value,
                        rep.margin,
                        preserved,
                    )
                )
                cert = rep.verdict is Verdict.CERTIFIED
                bucket = (
                    ("certified_" if cert else "uncertified_")
                    + ("preserved" if preserved else "violated")
                )
                confusion[theorem][bucket] += 1
    return CertificateComparison(tuple(rows), confusion)
