"""Kernel backend selection.

The hot kernels (loss, gradient, chain stepping) exist twice: a Cython
extension (lmcnet._kernels) and a pure-numpy fallback
(lmcnet._kernels_py) with identical signatures. The compiled version is
used when importable; set LMCNET_FORCE_PYTHON=1 to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("LMCNET_FORCE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

loss_value = _impl.loss_value
gradient = _impl.gradient
chain_run = _impl.chain_run

python_impl = _kernels_py
compiled_impl = _impl if BACKEND == "cython" else None
