"""Decomposition and projection tests against independent oracles."""

import math

import numpy as np
import pytest

from wogd.linalg import (
    SvdConvergenceError,
    clip_singular_values,
    project_l2_ball,
    spectral_norm,
    svd,
)


def jacobi_eigenvalues(sym: np.ndarray, sweeps: int = 60, tol: float = 1e-14) -> np.ndarray:
    """Independent two-sided Jacobi eigen-solver for symmetric matrices.

    Used as the oracle for singular values: sigma_i(m) = sqrt(eig_i(m^T m)).
    """
    a = sym.copy()
    n = a.shape[0]
    for _ in range(sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) <= tol * math.sqrt(abs(a[p, p] * a[q, q]) + 1e-300):
                    continue
                off += abs(a[p, q])
                theta = 0.5 * math.atan2(2.0 * a[p, q], a[q, q] - a[p, p])
                c, s = math.cos(theta), math.sin(theta)
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
        if off == 0.0:
            break
    return np.sort(np.abs(np.diag(a)))[::-1]


def power_iteration_norm(m: np.ndarray, iters: int = 5000, tol: float = 1e-14) -> float:
    """Independent spectral-norm oracle via power iteration on m^T m."""
    rng = np.random.default_rng(1234)
    v = rng.normal(size=m.shape[1])
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(iters):
        w = m.T @ (m @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        if abs(norm - prev) <= tol * norm:
            break
        prev = norm
    return math.sqrt(norm)


class TestSvd:
    def test_diagonal(self):
        res = svd(np.diag([3.0, 1.0]))
        np.testing.assert_allclose(res.sigma, [3.0, 1.0], atol=1e-14)
        np.testing.assert_allclose(np.abs(res.u), np.eye(2), atol=1e-14)
        np.testing.assert_allclose(np.abs(res.v), np.eye(2), atol=1e-14)

    def test_zero_matrix(self):
        res = svd(np.zeros((2, 3)))
        np.testing.assert_allclose(res.sigma, [0.0, 0.0])
        np.testing.assert_allclose(res.u.T @ res.u, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(res.v.T @ res.v, np.eye(2), atol=1e-12)

    def test_matches_jacobi_eigen_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            m = rng.uniform(-1.0, 1.0, (5, 5))
            expected = np.sqrt(jacobi_eigenvalues(m.T @ m))
            np.testing.assert_allclose(svd(m).sigma, expected, atol=1e-9)

    def test_reconstruction_random_shapes(self):
        # Module invariant: <= 1e-10 relative Frobenius error on 1000 random
        # matrices with dimensions up to 33.
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(1000):
            rows = int(rng.integers(1, 34))
            cols = int(rng.integers(1, 34))
            m = rng.normal(0.0, 1.0, (rows, cols))
            res = svd(m)
            recon = (res.u * res.sigma) @ res.v.T
            worst = max(worst, np.linalg.norm(recon - m) / max(np.linalg.norm(m), 1e-300))
            assert np.all(np.diff(res.sigma) <= 1e-15)
            assert np.all(res.sigma >= 0.0)
        assert worst <= 1e-10

    def test_orthonormal_factors(self):
        rng = np.random.default_rng(3)
        for shape in ((4, 7), (7, 4), (6, 6), (1, 5)):
            m = rng.normal(size=shape)
            res = svd(m)
            k = min(shape)
            np.testing.assert_allclose(res.u.T @ res.u, np.eye(k), atol=1e-12)
            np.testing.assert_allclose(res.v.T @ res.v, np.eye(k), atol=1e-12)

    def test_rank_deficient(self):
        col = np.array([[1.0], [2.0], [2.0]])
        m = col @ np.array([[1.0, -1.0, 0.5]])
        res = svd(m)
        assert res.sigma[0] > 0
        np.testing.assert_allclose(res.sigma[1:], 0.0, atol=1e-12)
        recon = (res.u * res.sigma) @ res.v.T
        np.testing.assert_allclose(recon, m, atol=1e-12)
        np.testing.assert_allclose(res.u.T @ res.u, np.eye(3), atol=1e-10)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            svd(np.array([[1.0, np.nan], [0.0, 1.0]]))

    def test_rejects_oversized(self):
        with pytest.raises(ValueError):
            svd(np.zeros((1, 5000)))

    def test_convergence_error_carries_sweeps(self):
        err = SvdConvergenceError(100)
        assert err.sweeps == 100


class TestSpectralNorm:
    def test_identity(self):
        assert spectral_norm(np.eye(3)) == pytest.approx(1.0, abs=1e-14)

    def test_diagonal(self):
        assert spectral_norm(np.diag([0.5, 0.95])) == pytest.approx(0.95, abs=1e-14)

    def test_matches_power_iteration(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            m = rng.normal(size=(4, 4))
            assert spectral_norm(m) == pytest.approx(power_iteration_norm(m), abs=1e-8)


def grid_nearest_distance(m: np.ndarray, lam: float) -> float:
    """Brute-force nearest-point search over norm-constrained 2x2 matrices.

    Parametrizes the feasible set as R(phi) diag(s1, s2) R(psi) with
    s1 in [0, lam], s2 in [-lam, lam] (the sign absorbs reflections), and
    refines the grid around the best point three times.
    """

    def batch_distance(phis, psis, s1s, s2s):
        best = (np.inf, None)
        for phi in phis:
            cp, sp = math.cos(phi), math.sin(phi)
            left = np.array([[cp, -sp], [sp, cp]])
            for psi in psis:
                cq, sq = math.cos(psi), math.sin(psi)
                right = np.array([[cq, -sq], [sq, cq]])
                for s1 in s1s:
                    for s2 in s2s:
                        x = left @ np.diag([s1, s2]) @ right
                        dist = np.linalg.norm(x - m)
                        if dist < best[0]:
                            best = (dist, (phi, psi, s1, s2))
        return best

    phis = np.linspace(0.0, math.pi, 16, endpoint=False)
    psis = np.linspace(0.0, math.pi, 16, endpoint=False)
    s1s = np.linspace(0.0, lam, 9)
    s2s = np.linspace(-lam, lam, 17)
    dist, (phi, psi, s1, s2) = batch_distance(phis, psis, s1s, s2s)
    dphi = math.pi / 16
    ds = lam / 4
    for _ in range(3):
        phis = np.linspace(phi - dphi, phi + dphi, 9)
        psis = np.linspace(psi - dphi, psi + dphi, 9)
        s1s = np.clip(np.linspace(s1 - ds, s1 + ds, 9), 0.0, lam)
        s2s = np.clip(np.linspace(s2 - ds, s2 + ds, 9), -lam, lam)
        dist, (phi, psi, s1, s2) = batch_distance(phis, psis, s1s, s2s)
        dphi /= 6
        ds /= 6
    return dist


class TestClipSingularValues:
    def test_diagonal_clipping(self):
        out = clip_singular_values(np.diag([2.0, 0.5]), 0.95)
        np.testing.assert_allclose(out, np.diag([0.95, 0.5]), atol=1e-12)

    def test_interior_point_unchanged(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            m = rng.normal(size=(3, 4))
            m *= 0.8 / spectral_norm(m)
            np.testing.assert_allclose(clip_singular_values(m, 1.0), m, atol=1e-10)

    def test_matches_grid_search_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(5):
            m = rng.normal(0.0, 1.0, (2, 2))
            clipped = clip_singular_values(m, 0.9)
            d_clip = np.linalg.norm(clipped - m)
            d_grid = grid_nearest_distance(m, 0.9)
            assert d_grid >= d_clip - 1e-12  # grid point cannot beat the argmin
            assert abs(d_grid - d_clip) <= 1e-3

    def test_idempotent_and_nearest_point(self):
        # Acceptance-grade properties on 1000 random cases.
        rng = np.random.default_rng(23)
        lam = 0.9
        for _ in range(1000):
            rows = int(rng.integers(1, 7))
            cols = int(rng.integers(1, 7))
            m = rng.normal(0.0, 1.0, (rows, cols))
            clipped = clip_singular_values(m, lam)
            assert spectral_norm(clipped) <= lam + 1e-9
            again = clip_singular_values(clipped, lam)
            np.testing.assert_allclose(again, clipped, atol=1e-10)
        # Nearest-point: no random feasible point may be closer.
        for _ in range(20):
            m = rng.normal(0.0, 1.0, (3, 3))
            clipped = clip_singular_values(m, lam)
            d_clip = np.linalg.norm(m - clipped)
            for _ in range(100):
                x = rng.normal(0.0, 1.0, (3, 3))
                norm = spectral_norm(x)
                if norm > lam:
                    x *= (lam * rng.uniform(0.2, 1.0)) / norm
                assert np.linalg.norm(m - x) >= d_clip - 1e-9

    def test_requires_positive_lambda(self):
        with pytest.raises(ValueError):
            clip_singular_values(np.eye(2), 0.0)


class TestProjectL2Ball:
    def test_interior_unchanged(self):
        v = np.array([0.3, 0.4])
        np.testing.assert_allclose(project_l2_ball(v, 1.0), v)

    def test_three_four_five(self):
        np.testing.assert_allclose(project_l2_ball(np.array([3.0, 4.0]), 1.0), [0.6, 0.8])

    def test_nearest_point_vs_grid(self):
        # 2-d polar grid oracle for the nearest feasible point.
        rng = np.random.default_rng(2)
        for _ in range(50):
            v = rng.normal(0.0, 2.0, 2)
            radius = rng.uniform(0.5, 2.0)
            proj = project_l2_ball(v, radius)
            assert np.linalg.norm(proj) <= radius + 1e-12
            angles = np.linspace(0.0, 2.0 * math.pi, 720, endpoint=False)
            radii = np.linspace(0.0, radius, 200)
            pts = radii[:, None, None] * np.stack([np.cos(angles), np.sin(angles)], axis=-1)
            d_grid = np.min(np.linalg.norm(pts - v, axis=-1))
            assert d_grid >= np.linalg.norm(proj - v) - 1e-9
            assert abs(d_grid - np.linalg.norm(proj - v)) <= 2e-2

    def test_ball_cases(self):
        rng = np.random.default_rng(9)
        for _ in range(1000):
            v = rng.normal(0.0, 1.5, int(rng.integers(1, 12)))
            radius = float(rng.uniform(0.2, 2.0))
            proj = project_l2_ball(v, radius)
            assert np.linalg.norm(proj) <= radius + 1e-12
            again = project_l2_ball(proj, radius)
            np.testing.assert_allclose(again, proj, atol=1e-12)
