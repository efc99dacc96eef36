"""Small dense linear algebra: one-sided Jacobi SVD, spectral norms, projections.

Everything here works on plain float64 numpy arrays and is sized for the
matrices this package actually handles (hidden layers of a few dozen units).
All functions are pure; inputs are never mutated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Convergence controls for the one-sided Jacobi sweep.
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100

MAX_DIM = 4096


class SvdConvergenceError(RuntimeError):
    """Raised when the Jacobi sweep does not converge within the sweep cap."""

    def __init__(self, sweeps: int):
        super().__init__(f"SVD did not converge after {sweeps} Jacobi sweeps")
        self.sweeps = sweeps


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD: u @ diag(sigma) @ v.T reconstructs the input.

    u has orthonormal columns (rows x k), sigma is non-negative and
    non-increasing (k,), v has orthonormal columns (cols x k), with
    k = min(rows, cols).
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if max(a.shape) > MAX_DIM:
        raise ValueError(f"matrix dimension {max(a.shape)} exceeds supported {MAX_DIM}")
    if not np.isfinite(a).all():
        raise ValueError("matrix has non-finite entries")
    return a


def _orthonormal_fill(u: np.ndarray, dead: np.ndarray) -> None:
    # Replace columns flagged in `dead` by unit vectors orthogonal to the
    # surviving columns (Gram-Schmidt over the standard basis). Only needed
    # for exactly rank-deficient inputs, where those directions carry
    # sigma = 0 and do not affect the reconstruction.
    m = u.shape[0]
    basis = [u[:, j] for j in range(u.shape[1]) if not dead[j]]
    for j in np.flatnonzero(dead):
        for k in range(m):
            cand = np.zeros(m)
            cand[k] = 1.0
            for b in basis:
                cand -= (b @ cand) * b
            norm = np.linalg.norm(cand)
            if norm > 0.5:
                cand /= norm
                u[:, j] = cand
                basis.append(cand)
                break


def _round_robin_pairs(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    # Tournament schedule: each of the n-1 rounds pairs all columns once,
    # pairs within a round are disjoint (odd n sits one column out per round).
    players = list(range(n)) + ([-1] if n % 2 else [])
    k = len(players)
    rounds = []
    order = players[1:]
    for _ in range(k - 1):
        lineup = [players[0]] + order
        ps, qs = [], []
        for i in range(k // 2):
            a, b = lineup[i], lineup[k - 1 - i]
            if a >= 0 and b >= 0:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.asarray(ps), np.asarray(qs)))
        order = order[-1:] + order[:-1]
    return rounds


def _jacobi_onesided(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One-sided Jacobi on a (m x n, m >= n): returns thin (u, sigma, v).

    Pairs within a tournament round touch disjoint columns, so each round's
    rotations are applied in one vectorized step; the result is identical to
    rotating the pairs sequentially.
    """
    a = a.copy()
    m, n = a.shape
    v = np.eye(n)
    rounds = _round_robin_pairs(n)
    converged = n == 1
    for _ in range(JACOBI_MAX_SWEEPS):
        if converged:
            break
        rotated = False
        for ps, qs in rounds:
            ap = a[:, ps]
            aq = a[:, qs]
            alpha = np.einsum("ij,ij->j", ap, ap)
            beta = np.einsum("ij,ij->j", aq, aq)
            gamma = np.einsum("ij,ij->j", ap, aq)
            need = np.abs(gamma) > JACOBI_TOL * np.sqrt(alpha * beta)
            if not need.any():
                continue
            rotated = True
            gsafe = np.where(need, gamma, 1.0)
            zeta = (beta - alpha) / (2.0 * gsafe)
            t = np.sign(zeta) / (np.abs(zeta) + np.hypot(1.0, zeta))
            t = np.where(np.sign(zeta) == 0.0, 1.0 / (np.abs(zeta) + np.hypot(1.0, zeta)), t)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t
            c = np.where(need, c, 1.0)
            s = np.where(need, s, 0.0)
            a[:, ps] = c * ap - s * aq
            a[:, qs] = s * ap + c * aq
            vp = v[:, ps]
            vq = v[:, qs]
            v[:, ps] = c * vp - s * vq
            v[:, qs] = s * vp + c * vq
        if not rotated:
            converged = True
    if not converged:
        raise SvdConvergenceError(JACOBI_MAX_SWEEPS)

    sigma = np.linalg.norm(a, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    a = a[:, order]
    v = v[:, order]
    dead = sigma == 0.0
    u = np.where(dead, 1.0, sigma)  # avoid 0/0; dead columns rebuilt below
    u = a / u
    if dead.any():
        _orthonormal_fill(u, dead)
    return u, sigma, v


def svd(m) -> SvdResult:
    """Thin singular value decomposition via one-sided Jacobi rotations.

    Accurate at small sizes; singular values are returned sorted in
    non-increasing order. Raises SvdConvergenceError (carrying the sweep
    count) if the rotation sweep does not settle, and ValueError for
    non-finite input or dimensions beyond the supported maximum.
    """
    a = _as_matrix(m)
    if a.shape[0] >= a.shape[1]:
        u, sigma, v = _jacobi_onesided(a)
    else:
        v, sigma, u = _jacobi_onesided(a.T)
    return SvdResult(u=u, sigma=sigma, v=v)


def spectral_norm(m) -> float:
    """Largest singular value (the matrix 2-norm)."""
    return float(svd(m).sigma[0])


def clip_singular_values(m, lam: float) -> np.ndarray:
    """Nearest matrix in Frobenius norm with spectral norm <= lam.

    Computed by clipping the singular values at lam. If the input already
    satisfies the bound it is returned unchanged (as a copy), which makes the
    operation exactly idempotent.
    """
    if not lam > 0:
        raise ValueError(f"lam must be positive, got {lam}")
    a = _as_matrix(m)
    res = svd(a)
    if res.sigma[0] <= lam:
        return a.copy()
    clipped = np.minimum(res.sigma, lam)
    return (res.u * clipped) @ res.v.T


def project_l2_ball(v, radius: float) -> np.ndarray:
    """Orthogonal projection of a vector onto the l2 ball of given radius."""
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    x = np.asarray(v, dtype=np.float64)
    norm = float(np.linalg.norm(x))
    if norm <= radius:
        return x.copy()
    return x * (radius / norm)
