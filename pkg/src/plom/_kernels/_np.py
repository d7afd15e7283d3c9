"""Numpy implementation of the mixture-evaluation kernels.

Mirrors the compiled extension exactly; used as the fallback backend and as
the reference in backend-agreement tests.

Conventions: points are (L, d) rows, centers are (N, d) rows with the
bandwidth shrink factor already applied by the caller.
"""

import numpy as np


def _sqdist(pts, ctr):
    # ||p||^2 + ||c||^2 - 2 p.c with clamping at 0 against negative round-off
    sq = pts @ ctr.T
    sq *= -2.0
    sq += (pts * pts).sum(axis=1)[:, None]
    sq += (ctr * ctr).sum(axis=1)[None, :]
    np.maximum(sq, 0.0, out=sq)
    return sq


def mixture_logpdf(pts, ctr, s_hat):
    """Log density of the equal-weight Gaussian mixture at each point.

    Returns log((1/N) sum_j (2 pi s_hat^2)^(-d/2) exp(-||c_j - p||^2 / (2 s_hat^2)))
    evaluated with log-sum-exp so that distant points underflow gracefully.
    """
    n, d = ctr.shape
    z = _sqdist(pts, ctr)
    z *= -0.5 / (s_hat * s_hat)
    m = z.max(axis=1)
    np.exp(z - m[:, None], out=z)
    out = np.log(z.sum(axis=1))
    out += m
    out -= np.log(n) + 0.5 * d * np.log(2.0 * np.pi * s_hat * s_hat)
    return out


def mixture_score(pts, ctr, s_hat):
    """Gradient of the mixture log density at each point, (L, d)."""
    z = _sqdist(pts, ctr)
    z *= -0.5 / (s_hat * s_hat)
    z -= z.max(axis=1)[:, None]
    np.exp(z, out=z)
    z /= z.sum(axis=1)[:, None]
    out = z @ ctr
    out -= pts
    out /= s_hat * s_hat
    return out


def pair_joint_logmean(ej, ek):
    """Row-wise log of mean_m(ej[l, m] * ek[l, m]) with float64 accumulation.

    ej, ek are float32 per-component kernel matrices; the product equals the
    2-D joint Gaussian kernel, so each row mean is the (unnormalized) joint
    KDE value at training point l.
    """
    s = (ej * ek).sum(axis=1, dtype=np.float64)
    return np.log(s / ej.shape[1])
