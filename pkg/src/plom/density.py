"""Gaussian kernel-density model of the normalized latent variable.

The model is an equal-weight mixture over the training columns with a
Silverman bandwidth and a shrink factor on the centers chosen so that the
mixture keeps zero mean and identity second moment when the training set is
normalized. Everything is evaluated in the log domain: with d = 60 the
kernel normalization constant underflows linear arithmetic.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DimensionMismatch

__all__ = ["KdeModel", "bandwidths", "kde_model", "kde_logpdf", "kde_score", "sample_mixture"]


def bandwidths(d, N):
    """Silverman bandwidth s and modified bandwidth s_hat for dimension d, N samples.

    s = (N(d+2)/4)^(-1/(d+4)),  s_hat = s (s^2 + (N-1)/N)^(-1/2).
    """
    if d < 1 or N < 2:
        raise ValueError("bandwidths requires d >= 1 and N >= 2")
    s = (N * (d + 2.0) / 4.0) ** (-1.0 / (d + 4.0))
    s_hat = s / np.sqrt(s * s + (N - 1.0) / N)
    return s, s_hat


@dataclass(frozen=True)
class KdeModel:
    """Immutable mixture model over the training columns of one (sub)vector."""

    centers: np.ndarray         # (d, N), training columns
    s: float
    s_hat: float
    dim: int
    shrink: float               # s_hat / s, applied to the centers
    centers_shrunk_t: np.ndarray = field(repr=False, default=None)  # (N, d) cache


def kde_model(centers):
    """Build the mixture model for a (d, N) matrix of training columns."""
    centers = np.asarray(centers, dtype=np.float64)
    if centers.ndim != 2:
        raise DimensionMismatch("centers must be a (d, N) matrix")
    d, n = centers.shape
    s, s_hat = bandwidths(d, n)
    shrunk_t = np.ascontiguousarray(centers.T * (s_hat / s))
    return KdeModel(centers=centers, s=s, s_hat=s_hat, dim=d,
                    shrink=s_hat / s, centers_shrunk_t=shrunk_t)


def _as_points_t(model, points):
    points = np.asarray(points, dtype=np.float64)
    squeeze = points.ndim == 1
    if squeeze:
        points = points[:, None]
    if points.shape[0] != model.dim:
        raise DimensionMismatch(
            f"points have {points.shape[0]} rows, model dimension is {model.dim}")
    return np.ascontiguousarray(points.T), squeeze


def kde_logpdf(model, point):
    """Log density at one point (length-d vector) or at each column of a (d, L) matrix."""
    pts_t, squeeze = _as_points_t(model, point)
    out = _kernels.mixture_logpdf(pts_t, model.centers_shrunk_t, model.s_hat)
    return float(out[0]) if squeeze else out


def kde_score(model, points):
    """Gradient of the log density, column per evaluation point, shape (d, L)."""
    pts_t, squeeze = _as_points_t(model, points)
    out = _kernels.mixture_score(pts_t, model.centers_shrunk_t, model.s_hat)
    return out[0] if squeeze else out.T


def sample_mixture(model, n, rng):
    """Draw n independent realizations directly from the mixture, shape (d, n)."""
    idx = rng.integers(0, model.centers.shape[1], size=n)
    out = model.shrink * model.centers[:, idx]
    out += model.s_hat * rng.standard_normal((model.dim, n))
    return out
