"""Probabilistic learning on manifolds with an independent-group partition.

Pipeline: scale and PCA-normalize a small training set, detect a partition
into statistically independent groups, build a reduced-order diffusion-map
basis per group, sample large learned sets with a dissipative Hamiltonian
ISDE (optionally under second-moment constraints), and quantify how well the
concentration of the underlying probability measure is preserved.
"""

from . import appgen, density, dmaps, metrics, normalize, partition, sampler
from ._kernels import backend_name

__version__ = "0.1.0"

__all__ = ["appgen", "density", "dmaps", "metrics", "normalize", "partition",
           "sampler", "backend_name", "__version__"]
