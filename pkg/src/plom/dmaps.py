"""Diffusion-map transition eigenproblem and reduced-order basis selection.

The Markov transition matrix is b^-1 K for a Gaussian kernel K on the
training columns. Eigenpairs are computed from the symmetrized problem
b^-1/2 K b^-1/2 and carry the <b psi, psi> = delta normalization. The basis
scale is selected by scanning the kernel width for the smallest value whose
spectrum shows a flat plateau after the constant eigenvector followed by a
tenfold drop.
"""

import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

from .errors import EigSolverFailure, NoValidEpsilon, NonFiniteKernel

__all__ = ["DiffusionBasis", "transition_eigs", "jump", "select_basis", "identity_basis"]

JUMP_TARGET = 0.1       # required eigenvalue drop ratio lambda_{m+1}/lambda_2
PLATEAU_RATIO = 5.0     # plateau flatness: lambda_2 / lambda_m must stay below
                        # this; healthy plateaus measure 1.05-2.4, while the
                        # spurious small-eps jump dips show 10-50
LAMBDA2_GAP = 0.01      # lambda_2 must sit below 1 - LAMBDA2_GAP
GRID_RATIO = 1.1
GRID_LO = 0.1           # grid spans [GRID_LO, GRID_HI] * median squared distance
GRID_HI = 1000.0        # generous: skewed distance distributions put the
                        # crossing far above the median scale
COARSE_RATIO = 2.0      # octave pre-scan brackets the first valid region
REFINE_REL = 1e-3       # bisection width for ~3 significant figures


@dataclass
class DiffusionBasis:
    """Reduced-order basis [g_m] = first m transition eigenvectors (kappa = 0)."""

    eps_dm: float
    eigvals: np.ndarray            # (N,), descending, lambda_1 = 1
    g: np.ndarray                  # (N, m)
    m: int
    b_diag: np.ndarray             # (N,) kernel row sums
    identity: bool = False
    jump_value: Optional[float] = None
    jump_curve: List[Tuple[float, float]] = field(default_factory=list)

    @property
    def N(self):
        return self.g.shape[0]

    def reduction(self):
        """Projection [a] = g (g^T g)^-1 mapping N-space onto the basis, or None
        for the identity basis (where it would be the identity)."""
        if self.identity:
            return None
        return self.g @ np.linalg.inv(self.g.T @ self.g)


def identity_basis(N):
    """m = N basis with [g] = identity: the unreduced generator."""
    return DiffusionBasis(eps_dm=np.inf, eigvals=np.ones(N), g=np.eye(N),
                          m=N, b_diag=np.ones(N), identity=True)


def _pairwise_sq(eta):
    eta = np.asarray(eta, dtype=np.float64)
    g = eta.T @ eta
    nn = np.diag(g)
    sq = nn[:, None] + nn[None, :] - 2.0 * g
    np.maximum(sq, 0.0, out=sq)
    np.fill_diagonal(sq, 0.0)
    return sq


def _symmetrized(sq, eps_dm):
    kern = np.exp(-sq / (4.0 * eps_dm))
    if not np.isfinite(kern).all():
        raise NonFiniteKernel("kernel matrix has non-finite entries")
    b = kern.sum(axis=1)
    binv = 1.0 / np.sqrt(b)
    sym = kern * binv[:, None] * binv[None, :]
    sym = 0.5 * (sym + sym.T)
    return sym, b, binv


def _top_eigvals(sq, eps_dm, k):
    sym, _, _ = _symmetrized(sq, eps_dm)
    n = sym.shape[0]
    try:
        w = scipy.linalg.eigh(sym, eigvals_only=True, subset_by_index=[n - k, n - 1])
    except np.linalg.LinAlgError as exc:
        raise EigSolverFailure(str(exc)) from exc
    return w[::-1]


def _fix_signs(vecs):
    picks = np.abs(vecs).argmax(axis=0)
    flips = np.sign(vecs[picks, np.arange(vecs.shape[1])])
    flips[flips == 0] = 1.0
    return vecs * flips[None, :]


def transition_eigs(eta, eps_dm, m_request):
    """Solve the transition eigenproblem and keep the first m_request vectors.

    Eigenvalues are sorted descending with lambda_1 = 1; the eigenvectors
    satisfy <b psi^a, psi^b> = delta_ab through the symmetrized solve.
    """
    if eps_dm <= 0:
        raise ValueError("eps_dm must be positive")
    eta = np.asarray(eta, dtype=np.float64)
    n = eta.shape[1]
    if not 3 <= m_request <= n:
        raise ValueError(f"m_request must lie in [3, N={n}]")
    sq = _pairwise_sq(eta)
    sym, b, binv = _symmetrized(sq, eps_dm)
    try:
        eigvals = scipy.linalg.eigh(sym, eigvals_only=True)[::-1]
        _, vecs = scipy.linalg.eigh(sym, subset_by_index=[n - m_request, n - 1])
    except np.linalg.LinAlgError as exc:
        raise EigSolverFailure(str(exc)) from exc
    psi = _fix_signs(binv[:, None] * vecs[:, ::-1])
    return DiffusionBasis(eps_dm=float(eps_dm), eigvals=eigvals, g=psi,
                          m=m_request, b_diag=b)


def _jump_from_sq(sq, eps_dm, m_o):
    w = _top_eigvals(sq, eps_dm, m_o + 1)
    return w[m_o] / w[1]


def jump(eta, eps_dm, m_o):
    """Eigenvalue ratio lambda_{m_o+1} / lambda_2 of the transition matrix."""
    eta = np.asarray(eta, dtype=np.float64)
    if m_o + 1 > eta.shape[1]:
        raise ValueError("m_o + 1 must not exceed N")
    return float(_jump_from_sq(_pairwise_sq(eta), eps_dm, m_o))


def _criteria(sq, eps_dm, m_o, jump_target):
    # jump <= target is the tenfold amplitude drop measured from the plateau
    # level lambda_2; the remaining checks reject the eigenvalues-near-1
    # regime and demand that the plateau stays within one decade
    w = _top_eigvals(sq, eps_dm, m_o + 1)
    lam2, lam_m, lam_m1 = w[1], w[m_o - 1], w[m_o]
    jmp = lam_m1 / lam2
    ok = (jmp <= jump_target
          and lam2 < 1.0 - LAMBDA2_GAP
          and lam2 / lam_m < PLATEAU_RATIO)
    return ok, float(jmp), float(lam2)


def select_basis(eta, jump_target=JUMP_TARGET, eps_dm=None):
    """Pick (eps_o, m_o) and return the reduced basis.

    For a one-dimensional latent variable the reduced basis has no value and
    the identity basis is returned. Otherwise m_o = nu + 1 and eps_o is the
    smallest kernel width on a geometric grid (refined by bisection) whose
    spectrum satisfies the jump and plateau criteria. ``eps_dm`` overrides
    the search.
    """
    eta = np.atleast_2d(np.asarray(eta, dtype=np.float64))
    nu, n = eta.shape
    if nu == 1:
        return identity_basis(n)
    m_o = nu + 1
    if m_o + 1 > n:
        raise NoValidEpsilon(
            f"need N >= nu + 2 to evaluate the jump (nu={nu}, N={n})")
    sq = _pairwise_sq(eta)
    if eps_dm is not None:
        basis = transition_eigs(eta, eps_dm, m_o)
        basis.jump_value = float(basis.eigvals[m_o] / basis.eigvals[1])
        return basis

    med = np.median(np.sqrt(sq[np.triu_indices(n, k=1)]))
    lo, hi = GRID_LO * med * med, GRID_HI * med * med
    curve = []
    lam2_prev = None

    def check(eps):
        nonlocal lam2_prev
        ok, jmp, lam2 = _criteria(sq, eps, m_o, jump_target)
        curve.append((eps, jmp))
        if lam2_prev is not None and lam2 > lam2_prev[1] * (1.0 + 1e-8) \
                and eps > lam2_prev[0]:
            warnings.warn(
                f"lambda_2 increased from {lam2_prev[1]:.6g} to {lam2:.6g} while "
                f"raising eps_dm to {eps:.6g}: numerically unstable regime")
        lam2_prev = (eps, lam2)
        return ok

    # octave pre-scan to bracket the first acceptable region
    coarse_hit = None
    prev_coarse = None
    eps = lo
    while eps <= hi * (1.0 + 1e-12):
        if check(eps):
            coarse_hit = eps
            break
        prev_coarse = eps
        eps *= COARSE_RATIO
    if coarse_hit is None:
        raise NoValidEpsilon(
            "no kernel width on the search grid satisfies the jump/plateau "
            "criteria; inspect the jump curve", jump_curve=sorted(curve))
    found = coarse_hit
    prev = prev_coarse
    if prev_coarse is not None:
        # fine scan inside the bracketing octave for the smallest valid width
        eps = prev_coarse * GRID_RATIO
        while eps < coarse_hit:
            if check(eps):
                found = eps
                break
            prev = eps
            eps *= GRID_RATIO
    if prev is not None:
        lo_e, hi_e = prev, found
        while hi_e / lo_e - 1.0 > REFINE_REL:
            mid = np.sqrt(lo_e * hi_e)
            if check(mid):
                hi_e = mid
            else:
                lo_e = mid
        found = hi_e
    basis = transition_eigs(eta, found, m_o)
    basis.jump_value = float(basis.eigvals[m_o] / basis.eigvals[1])
    basis.jump_curve = sorted(curve)
    return basis
