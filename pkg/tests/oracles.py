"""Independent reference implementations used only by the test suite.

Everything here is written as slow, literal code (explicit loops,
exhaustive enumeration, textbook formulas) on purpose: the production
package must agree with these without sharing any code paths.
"""

import itertools
import math

import numpy as np


def lasso_oracle(Y, y, lam):
    """Exact minimizer of ||c||_1 + (lam/2)||y - Yc||^2 for tiny L.

    Enumerates every support/sign pattern, solves the stationarity
    system for each, and evaluates the true objective at every candidate
    (plus c = 0); the optimum's own pattern is among them, so the
    minimum over candidates is the global optimum.
    """
    D, L = Y.shape
    best_c = np.zeros(L)
    best_obj = 0.5 * lam * float(y @ y)
    for signs in itertools.product((-1.0, 0.0, 1.0), repeat=L):
        sigma = np.array(signs)
        S = np.flatnonzero(sigma)
        if S.size == 0:
            continue
        Ys = Y[:, S]
        rhs = Ys.T @ y - sigma[S] / lam
        cS, *_ = np.linalg.lstsq(Ys.T @ Ys, rhs, rcond=None)
        c = np.zeros(L)
        c[S] = cS
        e = y - Y @ c
        obj = np.abs(c).sum() + 0.5 * lam * float(e @ e)
        if obj < best_obj:
            best_obj, best_c = obj, c
    return best_c, best_obj


def views_bruteforce(X, W, anchor):
    """All six views via explicit per-entry loops."""
    D, N = X.shape
    out = {
        k: np.zeros((D, N))
        for k in ("complete", "zf", "projected", "pzf", "unobserved",
                  "projected_unobserved")
    }
    for i in range(D):
        for j in range(N):
            x = X[i, j]
            w_own = W[i, j]
            w_anc = W[i, anchor]
            out["complete"][i, j] = x
            out["zf"][i, j] = w_own * x
            out["projected"][i, j] = w_anc * x
            out["pzf"][i, j] = w_anc * w_own * x
            out["unobserved"][i, j] = x - w_own * x
            out["projected_unobserved"][i, j] = w_anc * (x - w_own * x)
    return out


def gamma_bruteforce(X, W, labels, anchor, basis, family):
    """Triple-loop leakage maximum, one inner product at a time."""
    D, N = X.shape
    lab0 = labels[anchor]
    P = basis @ basis.T
    best = 0.0
    for k in range(N):
        if labels[k] == lab0:
            continue
        if family == "zf":
            a = W[:, k] * X[:, k]
        else:
            a = W[:, anchor] * W[:, k] * X[:, k]
        for j in range(N):
            if labels[j] != lab0:
                continue
            u = X[:, j] - W[:, j] * X[:, j]
            if family == "pzf":
                u = W[:, anchor] * u
            u_perp = u - P @ u
            best = max(best, abs(float(a @ u_perp)))
    return best


def projected_projector_oracle(basis, pattern):
    """Projector onto diag(w) span(basis) via range(M M^T), M = diag(w) B."""
    G = np.diag(pattern.astype(float)) @ (basis @ basis.T) @ np.diag(
        pattern.astype(float)
    )
    U, s, _ = np.linalg.svd(G)
    rank = int((s > 1e-10 * s[0]).sum()) if s.size and s[0] > 0 else 0
    Ur = U[:, :rank]
    return Ur @ Ur.T


def lambda_max_pzf_literal(zeta, eta, mu, gamma):
    """Closed-form upper endpoint, written out term by term."""
    disc = (
        9.0 / (4.0 * zeta**2)
        + mu / (gamma * eta * zeta)
        + 2.0 / (gamma * eta**2)
        + mu**2 / (gamma**2 * eta**2)
    )
    return 0.5 * (1.0 / (2.0 * zeta) - mu / (gamma * eta) + math.sqrt(disc))


def lambda_max_zf_literal(zeta, eta, mu, gamma):
    disc = (
        9.0 / (4.0 * zeta**2)
        + mu / (gamma * eta * zeta)
        + 2.0 / (gamma * eta**2)
        + mu**2 / (gamma**2 * eta**2)
        + 1.0 / (4.0 * eta**4)
        + (1.0 / eta**2) * (mu / (gamma * eta) - 1.0 / (2.0 * zeta))
    )
    return 0.5 * (
        1.0 / (2.0 * zeta)
        - mu / (gamma * eta)
        - 1.0 / (2.0 * eta**2)
        + math.sqrt(disc)
    )


def clustering_error_bruteforce(assignments, labels):
    """Min misclassification over every cluster-label permutation."""
    a_vals = sorted(set(int(v) for v in assignments))
    l_vals = sorted(set(int(v) for v in labels))
    k = max(len(a_vals), len(l_vals))
    a_map = {v: i for i, v in enumerate(a_vals)}
    l_map = {v: i for i, v in enumerate(l_vals)}
    n = len(labels)
    best = n + 1
    for perm in itertools.permutations(range(k)):
        wrong = sum(
            1
            for x, y in zip(assignments, labels)
            if perm[a_map[int(x)]] != l_map[int(y)]
        )
        best = min(best, wrong)
    return best / n


def unit_sphere(rng, D, n):
    A = rng.standard_normal((D, n))
    return A / np.linalg.norm(A, axis=0, keepdims=True)


def random_masked_dataset(rng, n, d, D, per, m):
    """Small union-of-subspaces dataset without the production generator."""
    X = []
    labels = []
    for i in range(n):
        G = rng.standard_normal((D, d))
        Q, _ = np.linalg.qr(G)
        pts = Q @ unit_sphere(rng, d, per)
        X.append(pts)
        labels += [i] * per
    X = np.concatenate(X, axis=1)
    N = X.shape[1]
    W = np.ones((D, N), dtype=np.uint8)
    for j in range(N):
        if m:
            W[rng.choice(D, size=m, replace=False), j] = 0
    return X, np.array(labels), W
