"""Hot evaluation kernels with a compiled fast path.

The Cython extension is preferred when importable; otherwise the numpy
implementation is used. Both expose the same three functions:

- ``mixture_logpdf(points, centers, s_hat)``
- ``mixture_score(points, centers, s_hat)``
- ``pair_joint_logmean(ej, ek)``

``points``/``centers`` are C-contiguous row-per-sample float64 arrays with
any bandwidth shrink already applied by the caller.
"""

from . import _np

try:
    from . import _cy as _impl
    _BACKEND = "cython"
except ImportError:
    _impl = _np
    _BACKEND = "numpy"

mixture_logpdf = _impl.mixture_logpdf
mixture_score = _impl.mixture_score
pair_joint_logmean = _impl.pair_joint_logmean


def backend_name():
    """Name of the backend selected at import ("cython" or "numpy")."""
    return _BACKEND


def get_backend(name):
    """Explicit backend module, for benchmarks and agreement tests."""
    if name == "numpy":
        return _np
    if name == "cython":
        if _BACKEND != "cython":
            raise ImportError("compiled kernels are not available")
        return _impl
    raise ValueError(f"unknown backend {name!r}")
