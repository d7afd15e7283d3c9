"""Optimal partition of the latent vector into independent groups.

Pairwise mutual information is estimated from leave-one-out entropies under
the same kernel-density family the sampler uses (1-D and 2-D bandwidth
rules); leaving the self term out removes the resubstitution bias, so
independent pairs estimate to ~0 and clamp there. A permutation null
(column-shuffled component pairs) calibrates the estimator noise floor.
Components are grouped as the connected components of the graph whose edges
are above-noise MI values exceeding a level i_ref; the retained level is
the smallest one that separates anything at all while the dependence
discarded across groups stays below a tolerance, which leans toward fewer,
larger groups (independence is the strong claim).
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from scipy.special import ndtri

from . import _kernels
from ._rng import substream
from .density import bandwidths
from .errors import DimensionMismatch, PartitionMismatch

__all__ = ["MutualInfoMatrix", "Partition", "pairwise_mi", "tau_curve",
           "select_partition", "split", "assemble", "identity_partition"]

TAU_TOL = 0.05
N_LEVELS = 60
LEVEL_FLOOR = 1e-4
NULL_REPLICAS = 6       # shuffled pairings per component for the noise floor
NULL_SAFETY = 3.0       # the null max is scaled by this much
FLOOR_COEF = 24.0       # absolute floor FLOOR_COEF / N: finite-sample MI scale
                        # of independent pairs at the ~nu^2 comparison tail
_NULL_SEED = 0xA11CE    # internal, fixed: the null is a calibration, not a draw

# rows where the leave-one-out sum loses this fraction of the full sum are
# recomputed exactly in the log domain (float32 cancellation guard)
_LOO_REL = 1e-3

# above this many bytes the per-component kernel matrices are not cached and
# joint entropies fall back to direct per-pair evaluation
_CACHE_BUDGET = 2 << 30


@dataclass
class MutualInfoMatrix:
    """Symmetric pairwise MI estimates (nats), zero diagonal, clamped at 0."""

    mi: np.ndarray
    N: int
    bandwidth_1d: Tuple[float, float]   # (s, s_hat) used for the marginals
    bandwidth_2d: Tuple[float, float]   # (s, s_hat) used for the joints
    noise_level: float = 0.0            # permutation-null floor

    @property
    def nu(self):
        return self.mi.shape[0]


@dataclass
class Partition:
    """Ordered disjoint groups covering {0..nu-1}, with the selection trace."""

    groups: List[List[int]]
    i_ref_opt: Optional[float] = None
    tau_curve: List[Tuple[float, float]] = field(default_factory=list)

    def __post_init__(self):
        self.groups = [sorted(int(i) for i in g) for g in self.groups]
        flat = sorted(i for g in self.groups for i in g)
        if flat != list(range(len(flat))):
            raise PartitionMismatch("groups must cover {0..nu-1} exactly once")

    @property
    def nu(self):
        return sum(len(g) for g in self.groups)

    @property
    def n_groups(self):
        return len(self.groups)

    @property
    def sizes(self):
        return [len(g) for g in self.groups]


def identity_partition(nu):
    return Partition(groups=[list(range(nu))])


# -- leave-one-out entropies --------------------------------------------------

def _normal_scores(eta):
    """Per-component rank -> Gaussian quantile transform.

    Mutual information is invariant under strictly monotone maps of each
    component, and the transform bounds every marginal to light Gaussian
    tails, which keeps the kernel entropy estimates stable for the
    heavy-tailed components the generator produces (degree-30 monomials
    reach +-10).
    """
    ranks = eta.argsort(axis=1, kind="stable").argsort(axis=1, kind="stable")
    return ndtri((ranks + 0.5) / eta.shape[1])

def _log_excl(excl, bad, sq_rows):
    """Log of the leave-one-out kernel sums; cancellation-suspect rows are
    recomputed exactly in the log domain from their squared-distance rows."""
    out = np.empty_like(excl)
    good = ~bad
    out[good] = np.log(excl[good])
    rows = np.flatnonzero(bad)
    if rows.size:
        z = sq_rows(rows)
        z[np.arange(rows.size), rows] = -np.inf
        m = z.max(axis=1)
        out[rows] = m + np.log(np.exp(z - m[:, None]).sum(axis=1))
    return out


def _loo_entropy_1d(x, s, s_hat):
    n = x.size
    a = s_hat / s
    inv2 = 0.5 / (s_hat * s_hat)
    pts = np.ascontiguousarray(x[:, None])
    ctr = np.ascontiguousarray(a * x[:, None])
    lp = _kernels.mixture_logpdf(pts, ctr, s_hat)        # log((1/n) sum_m k) + C
    c = -0.5 * np.log(2.0 * np.pi * s_hat * s_hat)
    total = n * np.exp(lp - c)
    diag = np.exp(-(((a - 1.0) * x) ** 2) * inv2)
    excl = total - diag
    bad = excl <= total * _LOO_REL

    def sq_rows(rows):
        return -((a * x[None, :] - x[rows, None]) ** 2) * inv2

    log_excl = _log_excl(excl, bad, sq_rows)
    return -(log_excl - np.log(n - 1.0) + c).mean()


def _pair_joint_entropy(xj, xk, ej, ek, dj, dk, s_hat_2d, shrink_2d):
    n = xj.size
    a = shrink_2d
    inv2 = 0.5 / (s_hat_2d * s_hat_2d)
    total = n * np.exp(_kernels.pair_joint_logmean(ej, ek))
    excl = total - dj * dk
    bad = excl <= total * _LOO_REL

    def sq_rows(rows):
        return -((a * xj[None, :] - xj[rows, None]) ** 2
                 + (a * xk[None, :] - xk[rows, None]) ** 2) * inv2

    log_excl = _log_excl(excl, bad, sq_rows)
    c = -np.log(2.0 * np.pi * s_hat_2d * s_hat_2d)
    return -(log_excl - np.log(n - 1.0) + c).mean()


def _joint_entropy_direct(xj, xk, s, s_hat):
    # uncached path: build the two kernel factor matrices for this pair only
    a = s_hat / s
    inv2 = 0.5 / (s_hat * s_hat)
    mats = []
    for row in (xj, xk):
        diff = a * row[None, :] - row[:, None]
        np.square(diff, out=diff)
        diff *= -inv2
        mats.append(np.exp(diff).astype(np.float32))
    dj = np.exp(-(((a - 1.0) * xj) ** 2) * inv2)
    dk = np.exp(-(((a - 1.0) * xk) ** 2) * inv2)
    return _pair_joint_entropy(xj, xk, mats[0], mats[1], dj, dk, s_hat, a)


def _component_kernels(eta, s, s_hat):
    # E_j[l, m] = exp(-(shrink*eta_jm - eta_jl)^2 / (2 s_hat^2)) as float32;
    # the elementwise product of two of these is the 2-D joint kernel
    a = s_hat / s
    inv2 = 0.5 / (s_hat * s_hat)
    mats = []
    diags = []
    for row in eta:
        diff = a * row[None, :] - row[:, None]
        np.square(diff, out=diff)
        diff *= -inv2
        mats.append(np.exp(diff).astype(np.float32))
        diags.append(np.exp(-(((a - 1.0) * row) ** 2) * inv2))
    return mats, diags


def pairwise_mi(eta):
    """Estimate MI for every component pair of a (nu, N) latent matrix.

    Also calibrates the estimator noise floor from column-shuffled pairs
    (dependence destroyed, marginals kept); the floor is stored on the
    result and used by select_partition to discard below-noise edges.
    """
    eta = np.asarray(eta, dtype=np.float64)
    nu, n = eta.shape
    if nu < 2:
        raise DimensionMismatch("pairwise MI needs at least two components")
    eta = _normal_scores(eta)
    s1, sh1 = bandwidths(1, n)
    s2, sh2 = bandwidths(2, n)
    shrink2 = sh2 / s2
    h1 = np.array([_loo_entropy_1d(row, s1, sh1) for row in eta])
    mi = np.zeros((nu, nu))
    cached = nu * n * n * 4 <= _CACHE_BUDGET
    if cached:
        kmats, diags = _component_kernels(eta, s2, sh2)

    def joint(j, k, perm=None):
        xk = eta[k] if perm is None else eta[k][perm]
        if not cached:
            return _joint_entropy_direct(eta[j], xk, s2, sh2)
        if perm is None:
            ek, dk = kmats[k], diags[k]
        else:
            ek = np.ascontiguousarray(kmats[k][np.ix_(perm, perm)])
            dk = diags[k][perm]
        return _pair_joint_entropy(eta[j], xk, kmats[j], ek, diags[j], dk,
                                   sh2, shrink2)

    for j in range(nu):
        for k in range(j + 1, nu):
            val = h1[j] + h1[k] - joint(j, k)
            mi[j, k] = mi[k, j] = max(val, 0.0)

    null_max = 0.0
    for r in range(1, NULL_REPLICAS + 1):
        perm = substream(_NULL_SEED, "mi-null", r).permutation(n)
        for j in range(nu):
            k = (j + r) % nu
            if k == j:
                continue
            val = h1[j] + h1[k] - joint(j, k, perm=perm)
            null_max = max(null_max, val)
    noise = max(NULL_SAFETY * null_max, FLOOR_COEF / n)
    return MutualInfoMatrix(mi=mi, N=n, bandwidth_1d=(s1, sh1),
                            bandwidth_2d=(s2, sh2), noise_level=float(noise))


# -- grouping ------------------------------------------------------------------

def _components(adj):
    # connected components by union-find, reported sorted by smallest member
    n = adj.shape[0]
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for j, k in zip(*np.nonzero(np.triu(adj, k=1))):
        rj, rk = find(int(j)), find(int(k))
        if rj != rk:
            parent[max(rj, rk)] = min(rj, rk)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [groups[r] for r in sorted(groups)]


def _tau_of_level(mi, level, total):
    groups = _components(mi > level)
    within = 0.0
    for g in groups:
        if len(g) > 1:
            idx = np.ix_(g, g)
            within += mi[idx].sum() / 2.0
    return (total - within) / total, groups


def tau_curve(mi, levels):
    """Fraction of pairwise dependence discarded across groups at each level.

    Non-decreasing in the level. When the total pairwise MI is zero (all
    components independent at estimator resolution) the curve is
    identically zero.
    """
    mat = mi.mi if isinstance(mi, MutualInfoMatrix) else np.asarray(mi, dtype=np.float64)
    levels = list(levels)
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("levels must be strictly increasing")
    total = np.triu(mat, k=1).sum()
    if total <= 0.0:
        return [(float(lv), 0.0) for lv in levels]
    return [(float(lv), float(_tau_of_level(mat, lv, total)[0])) for lv in levels]


def select_partition(eta, tau_tol=TAU_TOL, mi=None):
    """Partition the components by thresholding above-noise pairwise MI.

    MI entries at or below the calibrated noise floor are discarded, then
    the level grid is scanned upward for the smallest level that separates
    anything at all while tau stays within tau_tol. If no level yields an
    acceptable split the result is the single all-components group; if no
    dependence survives the noise floor every component is its own group.
    """
    eta = np.asarray(eta, dtype=np.float64)
    if mi is None:
        mi = pairwise_mi(eta)
    floor = max(LEVEL_FLOOR, mi.noise_level)
    mat = np.where(mi.mi > floor, mi.mi, 0.0)
    nu = mat.shape[0]
    pos = mat[np.triu_indices(nu, k=1)]
    pos = pos[pos > 0]
    if pos.size == 0:
        # nothing above the noise floor: independent at estimator resolution
        return Partition(groups=[[i] for i in range(nu)],
                         i_ref_opt=float(floor), tau_curve=[])
    hi = float(pos.max())
    levels = [floor] if hi <= floor else list(np.geomspace(floor, hi, N_LEVELS))
    total = np.triu(mat, k=1).sum()
    curve = []
    chosen = None
    chosen_groups = None
    for lv in levels:
        t, groups = _tau_of_level(mat, lv, total)
        curve.append((float(lv), float(t)))
        if chosen is None and len(groups) > 1 and t <= tau_tol:
            chosen, chosen_groups = float(lv), groups
    if chosen is None:
        return Partition(groups=[list(range(nu))], i_ref_opt=None,
                         tau_curve=curve)
    return Partition(groups=chosen_groups, i_ref_opt=chosen, tau_curve=curve)


def split(eta, p):
    """Extract the per-group row blocks [eta^i] from a (nu, N) matrix."""
    eta = np.asarray(eta)
    if eta.shape[0] != p.nu:
        raise DimensionMismatch(f"matrix has {eta.shape[0]} rows, partition covers {p.nu}")
    return [eta[g, :] for g in p.groups]


def assemble(mats, p):
    """Inverse of split: interleave group rows back into component order."""
    if len(mats) != p.n_groups:
        raise PartitionMismatch(f"expected {p.n_groups} matrices, got {len(mats)}")
    ncols = mats[0].shape[1]
    out = np.empty((p.nu, ncols), dtype=np.result_type(*(m.dtype for m in mats)))
    for g, m in zip(p.groups, mats):
        if m.shape != (len(g), ncols):
            raise DimensionMismatch(
                f"group block has shape {m.shape}, expected {(len(g), ncols)}")
        out[g, :] = m
    return out
