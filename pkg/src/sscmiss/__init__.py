"""Sparse subspace clustering with missing entries.

Library layout: ``data`` (arrangements, masked datasets, views),
``randmodel`` (random model and concentration validators), ``lasso``
(the l1 solver and its dual), ``geometry`` (coherences, leakage,
inradius), ``certificates`` (recovery guarantees), ``pipeline``
(self-expression and spectral clustering), ``sweep``/``figures``/``cli``
(experiments and interfaces).
"""

__version__ = "0.1.0"

from .data import (
    MaskedDataset,
    SubspaceArrangement,
    Variant,
    ViewTag,
    apply_patterns,
    estimate_arrangement,
    load_dataset,
    project_subspaces,
    save_dataset,
)
from .lasso import (
    DualSolution,
    LassoSolution,
    check_lemma1_bounds,
    recover_dual,
    solve_lasso,
    zero_is_optimal,
)
from .geometry import (
    GeometryReport,
    InradiusMethod,
    InradiusResult,
    compute_eta,
    compute_gamma,
    compute_mu,
    compute_zeta,
    geometry_report,
    inradius,
)
from .certificates import (
    CertificateReport,
    Verdict,
    certify_anchor,
    certify_anchor_grid,
    certify_t1,
    certify_t3,
    certify_t3_pzf,
    certify_t4,
    certify_t5,
    certify_t5_zf,
    certify_t6,
    certify_t7,
    certify_t7_noise,
    certify_t8,
    f_pzf,
    f_zf,
    lambda_grid,
    lambda_max_pzf,
    lambda_max_zf,
    rate_bounds,
    t7_bounds,
)
from .randmodel import (
    RandomModelParams,
    generate,
    validate_inner_product_tail,
    validate_inradius_bound,
    validate_projection_norm,
)
from .pipeline import (
    ClusteringResult,
    LambdaRule,
    SelfExpression,
    build_affinity,
    clustering_error,
    self_express,
    sp_rate,
    spectral_cluster,
    subspace_preserving_flags,
)
from .sweep import SweepConfig, SweepResult, compare_certificates, run_sweep
from .figures import emit_fig1

__all__ = [name for name in dir() if not name.startswith("_")]
