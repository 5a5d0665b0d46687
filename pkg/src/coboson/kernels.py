"""Backend selection for the compiled kernels.

Importing this module picks the Cython extension when it is installed and
falls back to the NumPy implementation otherwise.  ``COBOSON_FORCE_PYTHON=1``
forces the fallback (used by the benchmark and the test matrix).
"""

import os

from . import _pykernels

if os.environ.get("COBOSON_FORCE_PYTHON") == "1":
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND_NAME

esp_log_table = _impl.esp_log_table
rk4_evolve = _impl.rk4_evolve


def available_backends():
    """Names of the kernel implementations importable in this install."""
    names = ["python"]
    try:
        from . import _ckernels  # noqa: F401
    except ImportError:
        pass
    else:
        names.append("compiled")
    return names
