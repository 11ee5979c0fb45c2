"""Cosine-based K-Medoids (PAM) and spectral clustering with k fixed at 2.

Everything here is deterministic given (similarity matrix, config). PAM has
no random state at all: BUILD picks greedy medoids and SWAP applies
best-improvement swaps until a local optimum. Spectral clustering embeds the
points with the top-k eigenvectors of the degree-normalized affinity
operator and finishes with restarted, seeded k-means.

The eigensolver is chosen by problem size: a dense symmetric solve below
``dense_eigh_limit`` rows, otherwise Lanczos iteration with full
reorthogonalization for just the top-k eigenpairs. Only label-permutation
equivalence is guaranteed; downstream logic must not read meaning into
cluster index values.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import DegenerateInput, EigensolverFailure

log = logging.getLogger(__name__)

# Above this N a dense solve costs seconds while Lanczos for 2 eigenpairs
# stays ~100x cheaper; chosen from measurement, see ClusteringConfig.
DENSE_EIGH_LIMIT = 1024


@dataclass(frozen=True)
class ClusteringConfig:
    method: Literal["kmedoids", "spectral"] = "spectral"
    k: int = 2
    seed: int = 0
    max_iter: int = 300
    kmeans_restarts: int = 10
    affinity: Literal["shift", "clamp"] = "shift"
    eigensolver: Literal["auto", "dense", "lanczos"] = "auto"
    dense_eigh_limit: int = DENSE_EIGH_LIMIT
    lanczos_tol: float = 1e-8


@dataclass(frozen=True)
class ClusterAssignment:
    labels: np.ndarray  # (N,) ints in [0, k)
    k: int
    objective: float
    method: str
    medoids: tuple[int, ...] | None = None

    def __post_init__(self):
        present = np.unique(self.labels)
        if len(present) != self.k or present[0] != 0 or present[-1] != self.k - 1:
            raise DegenerateInput(
                f"assignment uses clusters {present.tolist()}, expected all of 0..{self.k - 1}")


def _check_similarity(S: np.ndarray, k: int) -> np.ndarray:
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DegenerateInput(f"similarity matrix must be square, got {S.shape}")
    n = S.shape[0]
    if n < k:
        raise DegenerateInput(f"cannot form {k} clusters from {n} points")
    if k < 2:
        raise DegenerateInput("k must be at least 2")
    return S


def cluster(S: np.ndarray, config: ClusteringConfig) -> ClusterAssignment:
    if config.method == "kmedoids":
        return kmedoids(S, config)
    if config.method == "spectral":
        return spectral(S, config)
    raise DegenerateInput(f"unknown method {config.method!r}")


# ---------------------------------------------------------------------------
# K-Medoids (PAM)
# ---------------------------------------------------------------------------


def _pam_build(D: np.ndarray, k: int) -> list[int]:
    """Greedy BUILD: start from the 1-medoid optimum, then add the point
    that lowers total distance the most (ties to the lowest index)."""
    n = D.shape[0]
    medoids = [int(np.argmin(D.sum(axis=1)))]
    nearest = D[:, medoids[0]].copy()
    while len(medoids) < k:
        # cost after adding candidate c = sum_i min(nearest_i, D[i, c])
        costs = np.minimum(nearest[:, None], D).sum(axis=0)
        costs[medoids] = np.inf
        c = int(np.argmin(costs))
        medoids.append(c)
        nearest = np.minimum(nearest, D[:, c])
    return medoids


def _pam_assign(D: np.ndarray, medoids: list[int]) -> tuple[np.ndarray, float]:
    """Nearest-medoid assignment over ascending medoid indices (tie -> lower
    medoid index); each medoid stays in its own cluster."""
    order = sorted(medoids)
    labels = np.argmin(D[:, order], axis=1)
    for pos, m in enumerate(order):
        labels[m] = pos
    objective = float(D[np.arange(D.shape[0]), np.asarray(order)[labels]].sum())
    return labels.astype(np.int64), objective


def kmedoids(S: np.ndarray, config: ClusteringConfig) -> ClusterAssignment:
    """PAM on cosine distance d = 1 - S: BUILD, then best-improvement SWAP
    passes until no single swap lowers the objective."""
    S = _check_similarity(S, config.k)
    n = S.shape[0]
    k = config.k
    D = 1.0 - S
    np.fill_diagonal(D, 0.0)

    medoids = _pam_build(D, k)
    _, objective = _pam_assign(D, medoids)

    for _ in range(config.max_iter):
        if len(medoids) == n:
            break
        is_medoid = np.zeros(n, dtype=bool)
        is_medoid[medoids] = True
        candidates = np.flatnonzero(~is_medoid)
        best = (objective, None)
        # swap medoid at position p for candidate h; evaluate all h at once
        for p in range(k):
            others = [m for q, m in enumerate(medoids) if q != p]
            nearest_others = D[:, others].min(axis=1) if others else np.full(n, np.inf)
            costs = np.minimum(nearest_others[:, None], D[:, candidates]).sum(axis=0)
            j = int(np.argmin(costs))
            if costs[j] < best[0]:
                best = (float(costs[j]), (p, int(candidates[j])))
        if best[1] is None:
            break
        new_objective, (p, h) = best
        assert new_objective <= objective + 1e-12, "SWAP increased the PAM objective"
        medoids[p] = h
        objective = new_objective

    labels, objective = _pam_assign(D, medoids)
    return ClusterAssignment(labels=labels, k=k, objective=objective,
                             method="kmedoids", medoids=tuple(sorted(medoids)))


# ---------------------------------------------------------------------------
# k-means (internal: final step of spectral clustering)
# ---------------------------------------------------------------------------


def _kmeans_pp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[int(rng.integers(n))]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            # all remaining mass at distance zero (duplicates): lowest index wins
            centers[j] = X[int(np.argmin(d2))]
        else:
            centers[j] = X[int(rng.choice(n, p=d2 / total))]
        d2 = np.minimum(d2, np.sum((X - centers[j]) ** 2, axis=1))
    return centers


def _lloyd(X: np.ndarray, centers: np.ndarray, max_iter: int) -> tuple[np.ndarray, np.ndarray, float]:
    k = centers.shape[0]
    for _ in range(max_iter):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(d2, axis=1)
        new_centers = centers.copy()
        for c in range(k):
            members = labels == c
            if members.any():
                new_centers[c] = X[members].mean(axis=0)
            else:
                # revive an empty cluster at the worst-served point
                worst = int(np.argmax(d2[np.arange(len(X)), labels]))
                new_centers[c] = X[worst]
                labels[worst] = c
        shift = float(np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max())
        centers = new_centers
        if shift < 1e-9:
            break
    d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(len(X)), labels].sum())
    return labels.astype(np.int64), centers, inertia


def kmeans(X: np.ndarray, k: int, seed: int, restarts: int = 10,
           max_iter: int = 300) -> tuple[np.ndarray, float]:
    """Restarted k-means++ / Lloyd; lowest inertia wins, ties to the earlier
    restart. Convergence when the largest centroid shift drops below 1e-9."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < k or k < 1:
        raise DegenerateInput(f"cannot run {k}-means on input of shape {X.shape}")
    best_labels, best_inertia = None, np.inf
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        centers = _kmeans_pp_init(X, k, rng)
        labels, _, inertia = _lloyd(X, centers, max_iter)
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return best_labels, float(best_inertia)


# ---------------------------------------------------------------------------
# eigensolvers
# ---------------------------------------------------------------------------


def lanczos_top_eigenpairs(matvec: Callable[[np.ndarray], np.ndarray], n: int,
                           k: int, seed: int = 0, tol: float = 1e-8,
                           max_matvecs: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Top-k eigenpairs of a symmetric operator by Lanczos iteration.

    Full reorthogonalization keeps the Krylov basis usable at the sizes this
    pipeline meets (a few thousand rows). Convergence is declared when every
    wanted Ritz pair has residual bound |beta_j * s_j| below tol; failing to
    get there within the matvec budget raises EigensolverFailure.

    Returns (eigenvalues descending, eigenvectors as columns).
    """
    if max_matvecs is None:
        max_matvecs = 10 * n
    if k >= n:
        raise DegenerateInput(f"need k < n for Lanczos (k={k}, n={n})")

    rng = np.random.default_rng([seed, 0x1A2C])
    q = rng.standard_normal(n)
    q /= np.linalg.norm(q)
    Q = np.zeros((n, min(n, max_matvecs) + 1))
    Q[:, 0] = q
    alphas: list[float] = []
    betas: list[float] = []
    used = 0

    j = 0
    while used < max_matvecs and j < n:
        u = matvec(Q[:, j])
        used += 1
        alpha = float(Q[:, j] @ u)
        alphas.append(alpha)
        r = u - alpha * Q[:, j]
        if j > 0:
            r -= betas[-1] * Q[:, j - 1]
        # full reorthogonalization against the whole basis
        r -= Q[:, :j + 1] @ (Q[:, :j + 1].T @ r)
        beta = float(np.linalg.norm(r))
        j += 1

        if j >= k and (j % 5 == 0 or beta < 1e-14 or j == n):
            T = np.diag(alphas)
            if betas:
                off = np.asarray(betas)
                T += np.diag(off, 1) + np.diag(off, -1)
            theta, s = np.linalg.eigh(T)
            # residual bound for Ritz pair i is |beta * s[last, i]|
            resid = abs(beta) * np.abs(s[-1, -k:])
            if np.all(resid <= tol) or beta < 1e-14 or j == n:
                vecs = Q[:, :j] @ s[:, -k:]
                vals = theta[-k:]
                order = np.argsort(vals)[::-1]
                return vals[order], vecs[:, order]

        if beta < 1e-14:
            # invariant subspace hit before convergence check above fired
            restart = rng.standard_normal(n)
            restart -= Q[:, :j] @ (Q[:, :j].T @ restart)
            beta = float(np.linalg.norm(restart))
            if beta < 1e-14:
                break
            Q[:, j] = restart / beta
            betas.append(0.0)
            continue

        betas.append(beta)
        Q[:, j] = r / beta

    raise EigensolverFailure(
        f"Lanczos did not converge within {max_matvecs} matvecs (n={n}, k={k})")


def _top_eigenvectors(M: np.ndarray, k: int, config: ClusteringConfig) -> np.ndarray:
    n = M.shape[0]
    solver = config.eigensolver
    if solver == "auto":
        solver = "dense" if n <= config.dense_eigh_limit else "lanczos"
    if solver == "dense":
        _, vecs = np.linalg.eigh(M)
        return vecs[:, ::-1][:, :k]
    _, vecs = lanczos_top_eigenpairs(lambda v: M @ v, n, k, seed=config.seed,
                                     tol=config.lanczos_tol, max_matvecs=10 * n)
    return vecs


# ---------------------------------------------------------------------------
# spectral clustering
# ---------------------------------------------------------------------------


def affinity_from_similarity(S: np.ndarray, mode: str = "shift") -> np.ndarray:
    """Map cosine similarities in [-1, 1] to nonnegative affinities."""
    if mode == "shift":
        return (S + 1.0) / 2.0
    if mode == "clamp":
        return np.maximum(S, 0.0)
    raise DegenerateInput(f"unknown affinity mode {mode!r}")


def spectral(S: np.ndarray, config: ClusteringConfig) -> ClusterAssignment:
    """Normalized spectral clustering on the shifted cosine affinity."""
    S = _check_similarity(S, config.k)
    n = S.shape[0]
    k = config.k

    A = affinity_from_similarity(S, config.affinity)
    deg = A.sum(axis=1)
    with np.errstate(divide="ignore"):
        dinv_sqrt = np.where(deg > 0.0, 1.0 / np.sqrt(deg), 0.0)
    M = dinv_sqrt[:, None] * A * dinv_sqrt[None, :]
    M = (M + M.T) / 2.0  # keep the operator exactly symmetric

    U = _top_eigenvectors(M, k, config)

    norms = np.linalg.norm(U, axis=1)
    nonzero = norms >= 1e-12
    if not nonzero.any():
        raise DegenerateInput("spectral embedding collapsed to zero")
    embedding = U.copy()
    embedding[nonzero] /= norms[nonzero, None]
    embedding[~nonzero] = 0.0

    labels = np.zeros(n, dtype=np.int64)
    sub_labels, inertia = kmeans(embedding[nonzero], k, seed=config.seed,
                                 restarts=config.kmeans_restarts,
                                 max_iter=config.max_iter)
    labels[nonzero] = sub_labels
    # rows with a zero spectral embedding default to cluster 0
    return ClusterAssignment(labels=labels, k=k, objective=float(inertia),
                             method="spectral")
