"""Concentration diagnostics comparing sampling modes.

The concentration distance is the expected squared Frobenius distance of the
sampled matrices to the training matrix, normalized by the training norm:
values near 2 mean the generator forgot the training geometry, values well
below 1 mean the concentration of the measure was preserved. Per-group
distances combine into the global one by the dimension-weighted sum, and
Markov-type bounds turn the distances into probability statements.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import EmptySampleList, InvalidEpsilon, PartitionMismatch

__all__ = ["ConcentrationReport", "d2_no_group", "d2_with_group",
           "markov_bounds", "gain_check", "moment_report"]


@dataclass
class ConcentrationReport:
    mode: str
    d2: float
    per_group_d2: Optional[List[float]] = None
    r_geomean: Optional[float] = None
    bounds: List[Tuple[float, float, float]] = field(default_factory=list)
    # (eps, raw bound, bound clamped at 1 for display)
    gain: Optional[bool] = None

    def as_dict(self):
        return {
            "mode": self.mode,
            "d2": self.d2,
            "per_group_d2": self.per_group_d2,
            "r_geomean": self.r_geomean,
            "bounds": [{"eps": e, "bound": b, "display": c} for e, b, c in self.bounds],
            "gain": self.gain,
        }


def _check_mats(sample_mats, eta_d):
    if len(sample_mats) == 0:
        raise EmptySampleList("need at least one sample matrix")
    for m in sample_mats:
        if m.shape != eta_d.shape:
            raise PartitionMismatch(
                f"sample matrix shape {m.shape} != training shape {eta_d.shape}")


def d2_no_group(sample_mats, eta_d):
    """Mean of ||sample - eta_d||_F^2 / ||eta_d||_F^2 over the retained matrices."""
    eta_d = np.asarray(eta_d, dtype=np.float64)
    _check_mats(sample_mats, eta_d)
    denom = float(np.sum(eta_d * eta_d))
    dists = np.array([np.sum((m - eta_d) ** 2) for m in sample_mats])
    return float(dists.mean() / denom)


def d2_with_group(per_group):
    """Per-group distances and the dimension-weighted global distance.

    per_group: sequence of (sample_mats_i, eta_d_i) or
    (sample_mats_i, eta_d_i, nu_i). Returns (d2_wg, [d2_i]); the global
    value is sum_i (nu_i / nu) d2_i, which coincides with the direct
    all-rows evaluation when each group block is exactly normalized.
    """
    per_d2 = []
    nus = []
    num_direct = 0.0
    den_direct = 0.0
    for entry in per_group:
        mats, eta_i = entry[0], np.asarray(entry[1], dtype=np.float64)
        nu_i = entry[2] if len(entry) > 2 else eta_i.shape[0]
        if nu_i != eta_i.shape[0]:
            raise PartitionMismatch(f"nu_i={nu_i} but group block has {eta_i.shape[0]} rows")
        per_d2.append(d2_no_group(mats, eta_i))
        nus.append(nu_i)
        denom = float(np.sum(eta_i * eta_i))
        num_direct += per_d2[-1] * denom
        den_direct += denom
    nu = sum(nus)
    d2_wg = float(sum(n_i * d for n_i, d in zip(nus, per_d2)) / nu)
    d2_direct = float(num_direct / den_direct)
    return d2_wg, per_d2, d2_direct


def markov_bounds(d2_values, eps_list):
    """Probability bounds on the relative squared distance exceeding eps.

    A scalar d2 gives bound d2/eps; a sequence of per-group values gives
    (r/eps)^n_p with r their geometric mean. Returns (eps, raw, clamped)
    triples; raw values above 1 are vacuous and clamped for display.
    """
    eps_list = list(eps_list)
    for e in eps_list:
        if not 0.0 < e < 1.0:
            raise InvalidEpsilon(f"eps must lie in (0, 1), got {e}")
    if np.isscalar(d2_values):
        if d2_values < 0:
            raise ValueError("d2 must be >= 0")
        raw = [float(d2_values) / e for e in eps_list]
    else:
        vals = np.asarray(d2_values, dtype=np.float64)
        if (vals < 0).any():
            raise ValueError("d2 values must be >= 0")
        n_p = len(vals)
        r = float(np.exp(np.mean(np.log(vals)))) if (vals > 0).all() else 0.0
        raw = [(r / e) ** n_p for e in eps_list]
    return [(float(e), float(b), float(min(b, 1.0))) for e, b in zip(eps_list, raw)]


def geometric_mean(d2_values):
    vals = np.asarray(d2_values, dtype=np.float64)
    return float(np.exp(np.mean(np.log(vals)))) if (vals > 0).all() else 0.0


def gain_check(d2_wg, d2_ng):
    """True when the partitioned run is strictly more concentrated."""
    return bool(np.isfinite(d2_wg) and np.isfinite(d2_ng) and d2_wg < d2_ng)


def moment_report(learned):
    """Per-component sample mean and standard deviation of a (d, N_ar) matrix."""
    learned = np.asarray(learned, dtype=np.float64)
    if learned.shape[1] < 2:
        raise EmptySampleList("need at least two realizations")
    return learned.mean(axis=1), learned.std(axis=1, ddof=1)
