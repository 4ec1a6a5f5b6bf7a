"""Backend selection for the hot loops.

The compiled extension ``jacobispec._kernels`` is used when it imports;
otherwise (or with ``JACOBISPEC_PURE_PYTHON=1``) the numpy fallback in
``jacobispec._kernels_py`` takes over.  Both expose the same functions.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("JACOBISPEC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "compiled"

sturm_counts = _impl.sturm_counts
bisect_eigenvalues = _impl.bisect_eigenvalues
transfer_real = _impl.transfer_real
transfer_complex = _impl.transfer_complex
log_abs_endpoint = _impl.log_abs_endpoint
riccati_backward = _impl.riccati_backward
riccati_forward = _impl.riccati_forward

__all__ = [
    "BACKEND",
    "sturm_counts",
    "bisect_eigenvalues",
    "transfer_real",
    "transfer_complex",
    "log_abs_endpoint",
    "riccati_backward",
    "riccati_forward",
]
