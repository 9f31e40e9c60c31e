"""Backend dispatch for the hot kernels.

The compiled extension is optional: when ``crossec._kernel`` (Cython) is
importable and ``CROSSEC_PURE`` is not set, it is used; otherwise the
pure-Python twin takes over.  Both expose the same two entry points and
are held to bit-identical results by the parity tests.
"""

from __future__ import annotations

import os

from . import _kernel_py

if os.environ.get("CROSSEC_PURE"):
    _impl = _kernel_py
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernel_py

BACKEND = _impl.BACKEND
shuffle_image = _impl.shuffle_image
close_forced = _impl.close_forced


def backends():
    """All importable backends, for parity tests and the benchmark."""
    out = {"python": _kernel_py}
    try:
        from . import _kernel  # type: ignore[attr-defined]

        out["cython"] = _kernel
    except ImportError:
        pass
    return out
