"""Selects the solver kernel backend at import time.

The compiled extension (mta._kernels) is preferred; the pure-numpy module is
the fallback. Set MTA_BACKEND=numpy or MTA_BACKEND=native to force one.
"""

from __future__ import annotations

import os

from . import _kernels_py


def _load(name: str | None):
    if name not in (None, "native", "numpy"):
        raise ValueError(f"MTA_BACKEND must be 'native' or 'numpy', got {name!r}")
    if name == "numpy":
        return _kernels_py
    try:
        from . import _kernels  # type: ignore[attr-defined]
        return _kernels
    except ImportError:
        if name == "native":
            raise ImportError(
                "MTA_BACKEND=native but the compiled mta._kernels module "
                "is not available; reinstall with a C toolchain present"
            ) from None
        return _kernels_py


_impl = _load(os.environ.get("MTA_BACKEND"))

NAME: str = _impl.NAME
gaussian_weights = _impl.gaussian_weights
y_step = _impl.y_step
m_step = _impl.m_step


def available_backends() -> dict[str, object]:
    """All importable kernel modules keyed by name (for parity tests/benchmarks)."""
    found = {_kernels_py.NAME: _kernels_py}
    try:
        from . import _kernels  # type: ignore[attr-defined]
        found[_kernels.NAME] = _kernels
    except ImportError:
        pass
    return found
