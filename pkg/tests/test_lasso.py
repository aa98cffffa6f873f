"""Solver exactness, duality, and the zero-solution law."""

import numpy as np
import pytest

from sscmiss.errors import InfeasibleDual
from sscmiss.lasso import (
    LassoSolution,
    check_lemma1_bounds,
    duality_gap,
    recover_dual,
    solve_lasso,
    zero_is_optimal,
)

from oracles import lasso_oracle, unit_sphere


def test_single_atom_soft_threshold():
    # min |c| + (lam/2)(1 - c)^2 has solution c = 1 - 1/lam for lam > 1
    Y = np.array([[1.0], [0.0]])
    y = np.array([1.0, 0.0])
    for lam in (0.5, 1.0, 2.0, 5.0):
        sol = solve_lasso(Y, y, lam)
        expect = max(0.0, 1.0 - 1.0 / lam)
        assert sol.coeffs[0] == pytest.approx(expect, abs=1e-12)
        assert sol.gap <= 1e-10


def test_orthogonal_atoms_closed_form():
    Y = np.eye(3)[:, :2]
    y = np.array([1.0, 0.25, 0.0])
    sol = solve_lasso(Y, y, 2.0)
    # coordinates decouple: soft-threshold each inner product at 1/lam
    assert np.allclose(sol.coeffs, [0.5, 0.0], atol=1e-12)
    assert sol.gap <= 1e-12


def test_zero_solution_law_both_directions():
    rng = np.random.default_rng(10)
    for _ in range(40):
        D = int(rng.integers(2, 7))
        L = int(rng.integers(1, 5))
        Y = unit_sphere(rng, D, L)
        y = unit_sphere(rng, D, 1)[:, 0]
        zeta = np.max(np.abs(Y.T @ y))
        if zeta <= 1e-12:
            continue
        for lam in (0.5 / zeta, 1.0 / zeta, 1.5 / zeta):
            sol = solve_lasso(Y, y, lam)
            if zero_is_optimal(Y, y, lam):
                assert np.all(sol.coeffs == 0.0)
                assert lam * zeta <= 1.0 + 1e-12
            else:
                assert np.any(sol.coeffs != 0.0)
                assert lam * zeta > 1.0


def test_tie_at_threshold_resolves_to_zero():
    Y = np.array([[1.0], [0.0]])
    y = np.array([1.0, 0.0])
    sol = solve_lasso(Y, y, 1.0)
    assert sol.coeffs[0] == 0.0
    assert zero_is_optimal(Y, y, 1.0)


def test_matches_enumeration_oracle():
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 30:
        D = int(rng.integers(2, 8))
        L = int(rng.integers(1, 5))
        Y = unit_sphere(rng, D, L)
        y = unit_sphere(rng, D, 1)[:, 0]
        lam = float(rng.uniform(0.3, 8.0))
        sol = solve_lasso(Y, y, lam)
        ref_c, ref_obj = lasso_oracle(Y, y, lam)
        assert sol.objective <= ref_obj + 1e-8
        assert sol.objective >= ref_obj - 1e-8
        assert np.allclose(sol.coeffs, ref_c, atol=1e-6)
        checked += 1


def test_gap_formula_consistent():
    rng = np.random.default_rng(12)
    Y = unit_sphere(rng, 6, 4)
    y = unit_sphere(rng, 6, 1)[:, 0]
    sol = solve_lasso(Y, y, 3.0)
    gap, primal, _ = duality_gap(Y, y, 3.0, sol.coeffs)
    assert gap == pytest.approx(sol.gap, abs=1e-14)
    assert primal == pytest.approx(sol.objective, abs=1e-12)
    # a deliberately bad point has a large, positive gap
    bad_gap, _, _ = duality_gap(Y, y, 3.0, np.ones(4))
    assert bad_gap > 0.1


def test_empty_dictionary():
    sol = solve_lasso(np.zeros((3, 0)), np.array([1.0, 0.0, 0.0]), 2.0)
    assert sol.coeffs.shape == (0,)
    assert sol.gap == 0.0
    assert sol.objective == pytest.approx(1.0)


def test_recover_dual_feasible_and_aligned():
    rng = np.random.default_rng(13)
    Y = unit_sphere(rng, 5, 3)
    y = unit_sphere(rng, 5, 1)[:, 0]
    lam = 4.0
    sol = solve_lasso(Y, y, lam)
    dual = recover_dual(sol)
    assert dual.feasibility <= 1.0 + 1e-6
    # strong duality: dual objective meets the primal one
    assert dual.objective == pytest.approx(sol.objective, abs=1e-8)
    # active atoms see a unit-magnitude correlation with matching sign
    corr = Y.T @ dual.v
    for i, ci in enumerate(sol.coeffs):
        if abs(ci) > 1e-9:
            assert corr[i] == pytest.approx(np.sign(ci), abs=1e-6)


def test_recover_dual_rejects_unconverged_garbage():
    Y = np.array([[1.0, 0.0], [0.0, 1.0]])
    y = np.array([1.0, 0.0])
    sol = LassoSolution(
        coeffs=np.array([5.0, -5.0]),
        residual=y - Y @ np.array([5.0, -5.0]),
        objective=0.0,
        gap=1.0,
        lam=10.0,
        sweeps=0,
        converged=False,
        dictionary=Y,
        target=y,
    )
    with pytest.raises(InfeasibleDual):
        recover_dual(sol)


def test_dual_norm_bracket_single_atom():
    # dictionary {e1}, target e1, lam 2: v = e1 exactly, so |v| = 1,
    # the lower bound eta/zeta = 1 is met with equality and the upper
    # bound eta(2 lam - 1/zeta) = 3 has slack
    Y = np.array([[1.0], [0.0]])
    y = np.array([1.0, 0.0])
    sol = solve_lasso(Y, y, 2.0)
    dual = recover_dual(sol)
    rep = check_lemma1_bounds(dual, zeta=1.0, eta=1.0, lam=2.0)
    assert rep.applicable
    assert rep.vnorm == pytest.approx(1.0, abs=1e-10)
    assert rep.lower == pytest.approx(1.0)
    assert rep.upper == pytest.approx(3.0)
    assert rep.holds


def test_dual_norm_bracket_random():
    rng = np.random.default_rng(14)
    for _ in range(40):
        D = int(rng.integers(3, 8))
        L = int(rng.integers(2, 6))
        Y = unit_sphere(rng, D, L)
        y = unit_sphere(rng, D, 1)[:, 0]
        zeta = float(np.max(np.abs(Y.T @ y)))
        lam = 2.0 / zeta
        sol = solve_lasso(Y, y, lam)
        dual = recover_dual(sol)
        rep = check_lemma1_bounds(dual, zeta=zeta, eta=1.0, lam=lam)
        assert rep.applicable
        assert rep.holds, (rep.vnorm, rep.lower, rep.upper)


def test_bracket_not_applicable_below_threshold():
    rep_dual = type("V", (), {"v": np.zeros(2)})()
    rep = check_lemma1_bounds(rep_dual, zeta=1.0, eta=1.0, lam=0.5)
    assert not rep.applicable


def test_unconverged_flag_on_tiny_budget():
    rng = np.random.default_rng(15)
    Y = unit_sphere(rng, 20, 15)
    y = unit_sphere(rng, 20, 1)[:, 0]
    sol = solve_lasso(Y, y, 50.0, tol=1e-16, max_sweeps=1)
    assert not sol.converged
    assert sol.sweeps <= 2  # initial run plus one restart sweep at most
