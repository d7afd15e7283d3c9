"""Training-set scaling and PCA reduction to the normalized latent variable.

The latent matrix has zero column mean and identity sample covariance
(1/(N-1) estimator), so its squared Frobenius norm is nu*(N-1). When N < n
the covariance matrix is never assembled: eigenpairs come from a thin SVD
of the centered sample matrix.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (ConstantRow, DimensionMismatch, RankDeficiency,
                     ToleranceUnreachable, TooFewSamples)

__all__ = ["TrainingSet", "PcaModel", "LatentSet",
           "scale_training", "pca_reduce", "pca_reconstruct"]

DEFAULT_EPS_PCA = 1e-3


@dataclass
class TrainingSet:
    """Scaled sample matrix (n rows, N realization columns) plus the affine record."""

    data: np.ndarray        # (n, N), scaled
    offsets: np.ndarray     # (n,)
    factors: np.ndarray     # (n,), strictly positive
    method: str = "min-max"
    labels: Optional[list] = None

    @property
    def n(self):
        return self.data.shape[0]

    @property
    def N(self):
        return self.data.shape[1]

    def unscale(self, scaled):
        return scaled * self.factors[:, None] + self.offsets[:, None]


@dataclass
class PcaModel:
    mean: np.ndarray        # (n,), mean of the scaled data
    eigvals: np.ndarray     # (nu,), strictly positive, non-increasing
    basis: np.ndarray       # (n, nu), orthonormal columns
    nu: int
    eps_pca: float
    err_pca: float
    offsets: Optional[np.ndarray] = None   # scaling record for reconstruction
    factors: Optional[np.ndarray] = None


@dataclass
class LatentSet:
    eta: np.ndarray         # (nu, N)
    pca: PcaModel

    @property
    def nu(self):
        return self.eta.shape[0]

    @property
    def N(self):
        return self.eta.shape[1]


def scale_training(data, method="min-max"):
    """Map each feature row affinely into a comparable range.

    min-max: (x - min) / (max - min); standardize: (x - mean) / std.
    The record is kept so learned samples can be mapped back.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise DimensionMismatch("training data must be a 2-D (n, N) matrix")
    n, N = data.shape
    if n < 1:
        raise DimensionMismatch("need at least one feature row")
    if N < 3:
        raise TooFewSamples(f"need N >= 3 realizations, got {N}")
    if method == "min-max":
        offsets = data.min(axis=1)
        factors = data.max(axis=1) - offsets
    elif method == "standardize":
        offsets = data.mean(axis=1)
        factors = data.std(axis=1, ddof=1)
    else:
        raise ValueError(f"unknown scaling method {method!r}")
    bad = np.flatnonzero(factors <= 0)
    if bad.size:
        raise ConstantRow(f"rows {bad.tolist()} have zero spread; drop them and retry")
    scaled = (data - offsets[:, None]) / factors[:, None]
    return TrainingSet(data=scaled, offsets=offsets, factors=factors, method=method)


def _as_matrix(ts):
    if isinstance(ts, TrainingSet):
        return ts.data, ts
    data = np.asarray(ts, dtype=np.float64)
    if data.ndim != 2:
        raise DimensionMismatch("expected a (n, N) matrix or TrainingSet")
    if data.shape[1] < 3:
        raise TooFewSamples(f"need N >= 3 realizations, got {data.shape[1]}")
    return data, None


def _fix_signs(basis):
    # deterministic orientation: largest-magnitude entry of each column positive
    picks = np.abs(basis).argmax(axis=0)
    flips = np.sign(basis[picks, np.arange(basis.shape[1])])
    flips[flips == 0] = 1.0
    return basis * flips[None, :]


def pca_reduce(ts, eps_pca=DEFAULT_EPS_PCA):
    """PCA of the (scaled) training set down to the smallest nu meeting eps_pca.

    Returns (PcaModel, LatentSet) with eta = mu^(-1/2) Phi^T (x - mean),
    which has zero mean, identity sample covariance, and
    ||eta||_F^2 = nu*(N-1).
    """
    if not 0.0 < eps_pca < 1.0:
        raise ValueError("eps_pca must lie in (0, 1)")
    data, source = _as_matrix(ts)
    n, N = data.shape
    mean = data.mean(axis=1)
    centered = data - mean[:, None]
    # thin SVD of the centered samples; the covariance is never assembled
    u, sv, _ = np.linalg.svd(centered, full_matrices=False)
    cutoff = sv[0] * max(n, N) * np.finfo(np.float64).eps if sv.size else 0.0
    rank = int((sv > cutoff).sum())
    if rank < 1:
        raise RankDeficiency("centered training matrix has no positive singular value")
    nu_max = min(rank, N - 1)
    mu_all = sv * sv / (N - 1.0)
    total = mu_all.sum()
    err = 1.0 - np.cumsum(mu_all[:nu_max]) / total
    meets = np.flatnonzero(err <= eps_pca)
    if meets.size == 0:
        raise ToleranceUnreachable(
            f"err_pca({nu_max}) = {err[-1]:.3e} > eps_pca = {eps_pca:.3e}",
            achievable=float(err[-1]))
    nu = int(meets[0]) + 1
    basis = _fix_signs(u[:, :nu])
    eigvals = mu_all[:nu]
    eta = (basis.T @ centered) / np.sqrt(eigvals)[:, None]
    model = PcaModel(mean=mean, eigvals=eigvals, basis=basis, nu=nu,
                     eps_pca=eps_pca, err_pca=float(err[nu - 1]),
                     offsets=None if source is None else source.offsets,
                     factors=None if source is None else source.factors)
    return model, LatentSet(eta=eta, pca=model)


def pca_reconstruct(model, eta_samples):
    """Map latent samples back: x = mean + Phi mu^(1/2) eta, then unscale.

    Unscaling uses the affine record stored on the model when the PCA came
    from a TrainingSet; otherwise the scaled-space reconstruction is
    returned as-is.
    """
    eta_samples = np.atleast_2d(np.asarray(eta_samples, dtype=np.float64))
    if eta_samples.shape[0] != model.nu:
        raise DimensionMismatch(
            f"eta has {eta_samples.shape[0]} rows, model nu is {model.nu}")
    x = model.mean[:, None] + model.basis @ (np.sqrt(model.eigvals)[:, None] * eta_samples)
    if model.factors is not None:
        x = x * model.factors[:, None] + model.offsets[:, None]
    return x
