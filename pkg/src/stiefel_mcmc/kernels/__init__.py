"""Hot sampling kernels with a compiled core and a pure NumPy fallback.

The Cython extension ``_speedups`` is preferred when importable; set
``STIEFEL_MCMC_BACKEND=pure`` (or ``compiled``) to force a choice. The
active backend's name is exposed as ``BACKEND`` and recorded in CLI run
manifests, because the two backends consume the random stream in
different orders: seeded results are reproducible within a backend, not
across backends.
"""
import os

from .. import errors

_requested = os.environ.get("STIEFEL_MCMC_BACKEND", "auto").lower()

if _requested not in ("auto", "compiled", "pure"):
    raise errors.InputError(
        f"STIEFEL_MCMC_BACKEND must be 'auto', 'compiled' or 'pure', got {_requested!r}")

if _requested == "pure":
    from . import _pure as _impl
else:
    try:
        from . import _speedups as _impl
    except ImportError:
        if _requested == "compiled":
            raise errors.InputError(
                "STIEFEL_MCMC_BACKEND=compiled but the extension is not built")
        from . import _pure as _impl

BACKEND = _impl.BACKEND_NAME

mf_vector = _impl.mf_vector
bingham_spectral = _impl.bingham_spectral
sample_sphere = _impl.sample_sphere
truncnorm_left = _impl.truncnorm_left
zfill_probit = _impl.zfill_probit

__all__ = [
    "BACKEND",
    "mf_vector",
    "bingham_spectral",
    "sample_sphere",
    "truncnorm_left",
    "zfill_probit",
]
