import numpy as np
import pytest
from scipy.stats import qmc

from plom.density import bandwidths, kde_logpdf, kde_model, kde_score, sample_mixture
from plom.errors import DimensionMismatch


def _normalized(rng, d, n):
    x = rng.normal(size=(d, n))
    x -= x.mean(axis=1, keepdims=True)
    lo = np.linalg.cholesky(x @ x.T / (n - 1))
    return np.linalg.solve(lo, x)


def _single_center_model(c, s=1.0, s_hat=0.8):
    # N = 1 is outside the Silverman formula's domain; build the mixture
    # with explicit bandwidths to exercise the one-term closed forms
    from plom.density import KdeModel
    c = np.asarray(c, dtype=np.float64)
    return KdeModel(centers=c, s=s, s_hat=s_hat, dim=c.shape[0],
                    shrink=s_hat / s,
                    centers_shrunk_t=np.ascontiguousarray(c.T * (s_hat / s)))


class TestBandwidths:
    def test_frozen_values(self):
        # high-precision evaluation of the closed forms (mpmath, 40 digits)
        s, sh = bandwidths(60, 1200)
        assert np.isclose(s, 0.857608072398, atol=1e-10)
        assert np.isclose(sh, 0.651151273769, atol=1e-10)
        s, sh = bandwidths(1, 100)
        assert np.isclose(s, 0.421684606343, atol=1e-10)
        assert np.isclose(sh, 0.390211605748, atol=1e-10)

    def test_modified_below_silverman(self):
        for d, n in [(1, 10), (3, 100), (60, 1200)]:
            s, sh = bandwidths(d, n)
            assert 0 < sh < s < 1 or (s >= 1 and sh < s)

    def test_monotone_in_n(self):
        s_small, _ = bandwidths(5, 100)
        s_large, _ = bandwidths(5, 10_000)
        assert s_large < s_small

    def test_domain(self):
        with pytest.raises(ValueError):
            bandwidths(0, 10)
        with pytest.raises(ValueError):
            bandwidths(3, 1)


class TestLogpdf:
    def test_single_center_at_origin(self):
        model = _single_center_model(np.zeros((1, 1)))
        expect = -0.5 * np.log(2 * np.pi * model.s_hat ** 2)
        assert np.isclose(kde_logpdf(model, np.zeros(1)), expect, atol=1e-12)

    def test_integrates_to_one_quasi_mc(self):
        # quadrature oracle: quasi-random integral over a box holding the mass
        rng = np.random.default_rng(0)
        model = kde_model(_normalized(rng, 2, 40))
        lo, hi = -6.0, 6.0
        sob = qmc.Sobol(d=2, scramble=True, seed=1).random_base2(20)
        pts = (lo + (hi - lo) * sob).T
        vals = np.exp(kde_logpdf(model, pts))
        integral = vals.mean() * (hi - lo) ** 2
        assert abs(integral - 1.0) < 0.01

    def test_mixture_moments_by_direct_sampling(self):
        # the modified bandwidth is built so the mixture keeps mean 0 and
        # second moment identity for normalized centers
        rng = np.random.default_rng(1)
        model = kde_model(_normalized(rng, 2, 200))
        draws = sample_mixture(model, 1_000_000, np.random.default_rng(2))
        assert np.abs(draws.mean(axis=1)).max() < 0.01
        second = draws @ draws.T / draws.shape[1]
        assert np.abs(second - np.eye(2)).max() < 0.01

    def test_no_underflow_far_away(self):
        rng = np.random.default_rng(3)
        model = kde_model(_normalized(rng, 60, 100))
        far = np.zeros(60)
        far[0] = 50.0
        val = kde_logpdf(model, far)
        assert np.isfinite(val)
        vals = kde_logpdf(model, 50.0 * rng.normal(size=(60, 20)))
        assert np.isfinite(vals).all()

    def test_dimension_mismatch(self):
        model = kde_model(np.zeros((2, 5)))
        with pytest.raises(DimensionMismatch):
            kde_logpdf(model, np.zeros(3))


class TestScore:
    def test_single_center_closed_form(self):
        rng = np.random.default_rng(4)
        c = rng.normal(size=(3, 1))
        model = kde_model(c)
        u = rng.normal(size=3)
        expect = (model.shrink * c[:, 0] - u) / model.s_hat ** 2
        np.testing.assert_allclose(kde_score(model, u), expect, atol=1e-12)
        # the argmax of the single-center model sits at the shrunk center
        at_mode = kde_score(model, model.shrink * c[:, 0])
        np.testing.assert_allclose(at_mode, 0.0, atol=1e-12)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(5)
        model = kde_model(_normalized(rng, 5, 60))
        pts = rng.normal(size=(5, 100)) * 1.5
        grad = kde_score(model, pts)
        h = 1e-5
        for k in range(5):
            dp = pts.copy()
            dp[k] += h
            dm = pts.copy()
            dm[k] -= h
            fd = (kde_logpdf(model, dp) - kde_logpdf(model, dm)) / (2 * h)
            denom = np.maximum(np.abs(fd), 1.0)
            assert (np.abs(grad[k] - fd) / denom).max() < 1e-5

    def test_stein_identity(self):
        # E[score] over the mixture itself is zero
        rng = np.random.default_rng(6)
        model = kde_model(_normalized(rng, 2, 50))
        draws = sample_mixture(model, 1_000_000, np.random.default_rng(7))
        mean_score = kde_score(model, draws).mean(axis=1)
        assert np.abs(mean_score).max() < 0.01

    def test_dimension_mismatch(self):
        model = kde_model(np.zeros((2, 5)))
        with pytest.raises(DimensionMismatch):
            kde_score(model, np.zeros((3, 4)))
