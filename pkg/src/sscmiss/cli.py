"""Command-line interface.

Subcommands: generate, cluster, certify, sweep, fig1, validate-lemmas.
Every run writes a run-manifest (package version, sha256 of the
effective configuration, seed) into the output directory.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import os
import sys

import numpy as np

from . import __version__
from .certificates import (
    certify_anchor_grid,
    certify_t4,
    certify_t6,
    CertificateReport,
    lambda_grid,
)
from .data import Variant, load_dataset, save_dataset, estimate_arrangement
from .errors import InvalidDensity
from .pipeline import (
    LambdaRule,
    build_affinity,
    self_express,
    sp_rate,
    spectral_cluster,
)
from .randmodel import (
    RandomModelParams,
    generate,
    validate_inner_product_tail,
    validate_inradius_bound,
    validate_projection_norm,
    ValidationReport,
)
from .figures import emit_fig1
from .sweep import SweepConfig, run_sweep


def write_manifest(out_dir: str, command: str, config_text: str, seed) -> str:
    """Record version, config hash, and seed for one run."""
    os.makedirs(out_dir, exist_ok=True)
    digest = hashlib.sha256(config_text.encode("utf-8")).hexdigest()
    path = os.path.join(out_dir, "run-manifest.txt")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"version={__version__}\n")
        fh.write(f"command={command}\n")
        fh.write(f"config_sha256={digest}\n")
        fh.write(f"seed={seed}\n")
    return path


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--threads", type=int, default=1, help="worker processes")
    parser.add_argument("--out-dir", default=".", help="output directory")


def _cmd_generate(args) -> int:
    params = RandomModelParams(
        args.n, args.d, args.D, args.rho, args.m, args.seed, args.eps
    )
    _, dataset = generate(params)
    out = args.out or os.path.join(args.out_dir, "dataset.txt")
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    save_dataset(out, dataset)
    write_manifest(
        args.out_dir,
        "generate",
        f"n={args.n} d={args.d} D={args.D} rho={args.rho} m={args.m} "
        f"eps={args.eps} seed={args.seed}",
        args.seed,
    )
    print(
        f"wrote {out}: D={dataset.ambient_dim} N={dataset.n_points} "
        f"clusters={dataset.n_clusters} m={dataset.m}"
    )
    return 0


def _rule_from_args(args) -> LambdaRule:
    if args.lam is not None:
        return LambdaRule.fixed(args.lam)
    return LambdaRule.adaptive(args.adaptive_a)


def _cmd_cluster(args) -> int:
    dataset = load_dataset(args.data)
    rule = _rule_from_args(args)
    expr = self_express(dataset, Variant(args.variant), rule, args.tol)
    W = build_affinity(expr)
    res = spectral_cluster(W, dataset.n_clusters, dataset.labels, seed=args.seed)
    out = args.out or os.path.join(args.out_dir, "clusters.csv")
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    with open(out, "w", encoding="ascii") as fh:
        fh.write("point,label,assigned,sp_flag,lambda\n")
        for j in range(dataset.n_points):
            fh.write(
                "%d,%d,%d,%d,%.17g\n"
                % (
                    j,
                    dataset.labels[j],
                    res.assignments[j],
                    int(expr.sp_flags[j]),
                    expr.lambdas[j],
                )
            )
    write_manifest(
        args.out_dir,
        "cluster",
        f"data={os.path.abspath(args.data)} variant={args.variant} "
        f"rule={rule.mode}:{rule.value} tol={args.tol} seed={args.seed}",
        args.seed,
    )
    conn = min(res.connectivity) if res.connectivity else float("nan")
    print(
        f"wrote {out}: sp_rate={sp_rate(expr):.4f} error={res.error:.4f} "
        f"min_connectivity={conn:.4g} flags={','.join(res.flags) or '-'}"
    )
    return 0


def _parse_grid(spec: str, zeta_default):
    if spec is None:
        return None
    lo, hi, n = spec.split(":")
    return np.geomspace(float(lo), float(hi), int(n))


def _cmd_certify(args) -> int:
    theorem = args.theorem.upper()
    out = args.out or os.path.join(args.out_dir, "certificates.csv")
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    rows = []
    if theorem in ("T4", "T6"):
        if args.alpha is None or args.beta is None or args.omega is None:
            raise SystemExit("t4/t6 need --omega, --alpha, and --beta")
        fn = certify_t4 if theorem == "T4" else certify_t6
        rep = fn(args.omega, args.alpha, args.beta, args.eps)
        rows.append(("-", rep))
    else:
        if not args.data:
            raise SystemExit(f"{args.theorem} needs --data")
        dataset = load_dataset(args.data)
        arrangement = estimate_arrangement(dataset)
        anchors = (
            range(dataset.n_points) if args.all_anchors else [args.anchor]
        )
        lams = _parse_grid(args.grid, None)
        if args.lam is not None:
            lams = [args.lam]
        for anchor in anchors:
            reports = certify_anchor_grid(
                dataset,
                theorem,
                anchor,
                lams,
                arrangement,
                delta=args.delta,
            )
            rows.extend((anchor, rep) for rep in reports)
    with open(out, "w", encoding="ascii") as fh:
        fh.write("anchor," + CertificateReport.CSV_HEADER + "\n")
        for anchor, rep in rows:
            fh.write(f"{anchor},{rep.csv_row()}\n")
    write_manifest(
        args.out_dir,
        "certify",
        f"theorem={theorem} data={args.data} anchor={args.anchor} "
        f"all={args.all_anchors} lam={args.lam} grid={args.grid} "
        f"delta={args.delta} omega={args.omega} alpha={args.alpha} "
        f"beta={args.beta} eps={args.eps} seed={args.seed}",
        args.seed,
    )
    certified = sum(1 for _, r in rows if r.verdict.value == "CERTIFIED")
    print(f"wrote {out}: {certified}/{len(rows)} certified")
    return 0


def sweep_config_from_file(path: str, seed_override=None) -> SweepConfig:
    """Parse a sweep profile (ini-style sections of key=value pairs)."""
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keep d and D distinct
    with open(path, encoding="utf-8") as fh:
        cp.read_file(fh)
    model = cp["model"]
    sw = cp["sweep"]
    rule_words = sw.get("lambda", "adaptive 2.0").split()
    if rule_words[0] == "fixed":
        rule = LambdaRule.fixed(float(rule_words[1]))
    elif rule_words[0] == "adaptive":
        rule = LambdaRule.adaptive(float(rule_words[1]) if len(rule_words) > 1 else 2.0)
    else:
        raise ValueError(f"unknown lambda rule {rule_words[0]!r}")
    seed = int(sw.get("seed", "0")) if seed_override is None else seed_override
    return SweepConfig(
        n=int(model["n"]),
        d=int(model["d"]),
        D=int(model["D"]),
        rho=float(model["rho"]),
        omegas=tuple(float(w) for w in sw["omegas"].split()),
        variants=tuple(Variant(v) for v in sw["variants"].split()),
        trials=int(sw["trials"]),
        rule=rule,
        seed=seed,
        epsilon=float(model.get("epsilon", "0.001")),
        certificates=sw.getboolean("certificates", fallback=True),
        name=cp.get("profile", "name", fallback="sweep"),
    )


def _cmd_sweep(args) -> int:
    config = sweep_config_from_file(
        args.config, seed_override=args.seed if args.seed_given else None
    )
    write_manifest(args.out_dir, "sweep", config.canonical_text(), config.seed)
    result = run_sweep(config, args.out_dir, args.threads, resume=args.resume)
    print(f"wrote {result.csv_path} ({len(result.rows)} cells)")
    summary: dict[tuple, list] = {}
    for row in result.rows:
        summary.setdefault((row.omega, row.variant), []).append(row.sp_rate)
    for (omega, variant), rates in sorted(summary.items()):
        print(
            "omega=%.3f variant=%-8s mean_sp_rate=%.4f"
            % (omega, variant, float(np.nanmean(rates)))
        )
    return 0


def _cmd_fig1(args) -> int:
    svg, csv = emit_fig1(
        args.alpha, args.beta, args.eps, args.out_dir, args.grid_points
    )
    write_manifest(
        args.out_dir,
        "fig1",
        f"alpha={args.alpha} beta={args.beta} eps={args.eps} "
        f"grid={args.grid_points}",
        args.seed,
    )
    print(f"wrote {svg} and {csv}")
    return 0


def _cmd_validate(args) -> int:
    reports: list[ValidationReport] = [
        validate_inradius_bound(
            args.inradius_d, args.inradius_rho, args.inradius_trials, args.seed
        ),
        validate_inner_product_tail(args.D, args.eps, args.trials, args.seed),
        validate_projection_norm(
            args.D, args.proj_d, args.proj_eps, args.trials, args.seed
        ),
    ]
    out = args.out or os.path.join(args.out_dir, "validate.csv")
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    with open(out, "w", encoding="ascii") as fh:
        fh.write(ValidationReport.CSV_HEADER + "\n")
        for rep in reports:
            fh.write(rep.csv_row() + "\n")
    write_manifest(
        args.out_dir,
        "validate-lemmas",
        f"inradius=({args.inradius_d},{args.inradius_rho},{args.inradius_trials}) "
        f"inner=({args.D},{args.eps}) proj=({args.D},{args.proj_d},{args.proj_eps}) "
        f"trials={args.trials} seed={args.seed}",
        args.seed,
    )
    ok = True
    for rep in reports:
        status = "PASS" if rep.passed else "FAIL"
        print(
            f"{status} {rep.name}: rate={rep.rate:.3e} bound={rep.bound:.3e} "
            f"({rep.failures}/{rep.trials} failures)"
        )
        ok &= rep.passed
    print(f"wrote {out}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sscmiss",
        description="Subspace clustering with missing entries: data, "
        "certificates, sweeps.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="draw a dataset from the random model")
    _common(p)
    p.add_argument("--n", type=int, required=True, help="number of subspaces")
    p.add_argument("--d", type=int, required=True, help="subspace dimension")
    p.add_argument("--D", type=int, required=True, help="ambient dimension")
    p.add_argument("--rho", type=float, required=True, help="points per dim")
    p.add_argument("--m", type=int, default=0, help="masked coords per point")
    p.add_argument("--eps", type=float, default=0.001)
    p.add_argument("--out", default=None, help="dataset file path")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("cluster", help="self-express and spectrally cluster")
    _common(p)
    p.add_argument("--data", required=True)
    p.add_argument(
        "--variant", choices=[v.value for v in Variant], default="pzf"
    )
    group = p.add_mutually_exclusive_group()
    group.add_argument("--lam", type=float, default=None, help="fixed trade-off")
    group.add_argument(
        "--adaptive-a", type=float, default=2.0, help="adaptive rule factor"
    )
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("certify", help="evaluate recovery certificates")
    _common(p)
    p.add_argument(
        "--theorem",
        required=True,
        choices=["t1", "t3", "t4", "t5", "t6", "t7", "t8"],
    )
    p.add_argument("--data", default=None)
    p.add_argument("--anchor", type=int, default=0)
    p.add_argument("--all-anchors", action="store_true")
    p.add_argument("--lam", type=float, default=None)
    p.add_argument("--grid", default=None, help="lo:hi:n log-spaced lam grid")
    p.add_argument("--delta", type=float, default=0.0, help="noise level (t7)")
    p.add_argument("--omega", type=float, default=None, help="missing fraction (t4/t6)")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--eps", type=float, default=0.001)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("sweep", help="run a phase-transition sweep")
    _common(p)
    p.add_argument("--config", required=True, help="sweep profile file")
    p.add_argument("--resume", dest="resume", action="store_true", default=True)
    p.add_argument("--no-resume", dest="resume", action="store_false")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("fig1", help="emit the feasibility-curve figure")
    _common(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.001)
    p.add_argument("--grid-points", type=int, default=1000)
    p.set_defaults(func=_cmd_fig1)

    p = sub.add_parser("validate-lemmas", help="Monte-Carlo concentration checks")
    _common(p)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--inradius-trials", type=int, default=200)
    p.add_argument("--inradius-d", type=int, default=2)
    p.add_argument("--inradius-rho", type=float, default=50.0)
    p.add_argument("--D", type=int, default=100)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--proj-d", type=int, default=25)
    p.add_argument("--proj-eps", type=float, default=0.2)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    args.seed_given = any(a == "--seed" or a.startswith("--seed=") for a in argv)
    try:
        return args.func(args)
    except (InvalidDensity, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
