import numpy as np
import pytest

from plom.appgen import AppAConfig, generate
from plom.errors import (ConstantRow, DimensionMismatch, RankDeficiency,
                         TooFewSamples)
from plom.normalize import pca_reconstruct, pca_reduce, scale_training


def _pca_via_covariance(data):
    """Independent oracle: eigendecomposition of the explicitly assembled
    sample covariance (never used by the library path for N < n)."""
    mean = data.mean(axis=1)
    centered = data - mean[:, None]
    cov = centered @ centered.T / (data.shape[1] - 1)
    w, v = np.linalg.eigh(cov)
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


class TestScaleTraining:
    def test_minmax_affine_identity(self):
        ts = scale_training(np.array([[0.0, 5.0, 10.0]]))
        np.testing.assert_allclose(ts.data, [[0.0, 0.5, 1.0]])
        assert ts.offsets[0] == 0.0 and ts.factors[0] == 10.0

    def test_row_already_in_unit_interval(self):
        row = np.array([[0.0, 0.25, 1.0]])
        ts = scale_training(row)
        np.testing.assert_allclose(ts.data, row)
        assert ts.factors[0] == 1.0

    def test_round_trip(self):
        rng = np.random.default_rng(0)
        data = rng.normal(size=(4, 10)) * 7 + 3
        for method in ("min-max", "standardize"):
            ts = scale_training(data, method=method)
            np.testing.assert_allclose(ts.unscale(ts.data), data, atol=1e-12)

    def test_constant_row_rejected(self):
        with pytest.raises(ConstantRow):
            scale_training(np.array([[1.0, 1.0, 1.0], [0.0, 1.0, 2.0]]))

    def test_too_few_samples(self):
        with pytest.raises(TooFewSamples):
            scale_training(np.array([[0.0, 1.0]]))


class TestPcaReduce:
    def test_exact_rank_three(self):
        # oracle: dense eigendecomposition of the assembled covariance
        rng = np.random.default_rng(1)
        data = rng.normal(size=(8, 3)) @ rng.normal(size=(3, 20))
        model, latent = pca_reduce(data, eps_pca=1e-6)
        assert model.nu == 3
        w_oracle, v_oracle = _pca_via_covariance(data)
        np.testing.assert_allclose(model.eigvals, w_oracle[:3], rtol=1e-10)
        # same span: principal angles ~ 0
        s = np.linalg.svd(model.basis.T @ v_oracle[:, :3], compute_uv=False)
        assert np.abs(s - 1.0).max() < 1e-8

    def test_whitened_input_frobenius_identity(self):
        rng = np.random.default_rng(2)
        nu, n = 5, 40
        raw = rng.normal(size=(nu, n))
        raw -= raw.mean(axis=1, keepdims=True)
        lo = np.linalg.cholesky(raw @ raw.T / (n - 1))
        eta0 = np.linalg.solve(lo, raw)
        model, latent = pca_reduce(eta0, eps_pca=1e-8)
        assert model.nu == nu
        assert np.isclose(np.sum(latent.eta ** 2), nu * (n - 1), rtol=1e-10)

    def test_appendix_a_direct(self):
        eta = generate(AppAConfig(seed=3), 1200)
        model, latent = pca_reduce(eta, eps_pca=1e-3)
        assert model.nu == 60
        assert np.isclose(np.sum(latent.eta ** 2), 60 * 1199, rtol=1e-10)
        mean = latent.eta.mean(axis=1)
        assert np.abs(mean).max() < 1e-10
        cov = latent.eta @ latent.eta.T / 1199
        assert np.abs(cov - np.eye(60)).max() < 1e-8

    def test_latent_invariants_random(self):
        rng = np.random.default_rng(4)
        data = rng.normal(size=(6, 50)) * rng.uniform(0.5, 4, size=(6, 1))
        model, latent = pca_reduce(scale_training(data), eps_pca=1e-10)
        n = 50
        assert np.abs(latent.eta.mean(axis=1)).max() < 1e-10
        cov = latent.eta @ latent.eta.T / (n - 1)
        assert np.abs(cov - np.eye(model.nu)).max() < 1e-8
        assert np.abs(model.basis.T @ model.basis - np.eye(model.nu)).max() < 1e-10
        assert (np.diff(model.eigvals) <= 1e-12).all()

    def test_thin_svd_matches_covariance_path(self):
        rng = np.random.default_rng(5)
        data = rng.normal(size=(30, 12))   # N < n: library must not assemble C
        model, _ = pca_reduce(data, eps_pca=1e-8)
        w_oracle, v_oracle = _pca_via_covariance(data)
        nu = model.nu
        assert nu <= 11
        np.testing.assert_allclose(model.eigvals, w_oracle[:nu], rtol=1e-9)
        s = np.linalg.svd(model.basis.T @ v_oracle[:, :nu], compute_uv=False)
        assert np.abs(s - 1.0).max() < 1e-8

    def test_column_permutation_invariance(self):
        rng = np.random.default_rng(6)
        data = rng.normal(size=(7, 25))
        perm = rng.permutation(25)
        m1, l1 = pca_reduce(data, eps_pca=1e-9)
        m2, l2 = pca_reduce(data[:, perm], eps_pca=1e-9)
        assert m1.nu == m2.nu
        np.testing.assert_allclose(l2.eta, l1.eta[:, perm], atol=1e-9)

    def test_rank_deficiency(self):
        with pytest.raises(RankDeficiency):
            pca_reduce(np.ones((4, 6)), eps_pca=0.5)

    def test_tiny_eps_always_reachable(self):
        # the nu <= N-1 cap keeps the achievable error at machine zero, so
        # any positive tolerance succeeds even for N < n
        rng = np.random.default_rng(7)
        model, _ = pca_reduce(rng.normal(size=(40, 8)), eps_pca=1e-12)
        assert model.err_pca <= 1e-12


class TestPcaReconstruct:
    def test_reconstruction_error_bound(self):
        rng = np.random.default_rng(8)
        data = rng.normal(size=(10, 60)) @ np.diag(2.0 ** -np.arange(60))
        eps = 1e-2
        model, latent = pca_reduce(data, eps_pca=eps)
        recon = pca_reconstruct(model, latent.eta)
        err = np.sum((data - recon) ** 2, axis=0).mean()
        norm = np.sum(data ** 2, axis=0).mean()
        assert err <= eps * norm

    def test_zero_latent_recovers_mean(self):
        rng = np.random.default_rng(9)
        data = rng.normal(size=(5, 20))
        model, _ = pca_reduce(data, eps_pca=1e-9)
        np.testing.assert_allclose(pca_reconstruct(model, np.zeros((model.nu, 1))),
                                   data.mean(axis=1)[:, None], atol=1e-12)

    def test_full_rank_round_trip(self):
        rng = np.random.default_rng(10)
        data = rng.normal(size=(5, 30))
        ts = scale_training(data)
        model, latent = pca_reduce(ts, eps_pca=1e-12)
        np.testing.assert_allclose(pca_reconstruct(model, latent.eta), data,
                                   atol=1e-10)

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(11)
        model, _ = pca_reduce(rng.normal(size=(5, 20)), eps_pca=1e-9)
        with pytest.raises(DimensionMismatch):
            pca_reconstruct(model, np.zeros((model.nu + 1, 3)))
