"""Kernel backend selection.

The compiled extension is preferred when it imports cleanly; otherwise the
pure-Python fallback takes over with identical semantics.  Setting the
environment variable ``MOTRACK_PURE_PYTHON=1`` forces the fallback, and
:func:`use_backend` switches at runtime (used by the benchmark and the
backend-parity tests).
"""

from __future__ import annotations

import os

from . import _pyfallback

_impl = _pyfallback
if not os.environ.get("MOTRACK_PURE_PYTHON"):
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        pass


def backend_name() -> str:
    """Name of the active backend: ``"native"`` or ``"python"``."""
    return _impl.NAME


def available_backends() -> list[str]:
    names = ["python"]
    try:
        from . import _native  # noqa: F401
        names.insert(0, "native")
    except ImportError:
        pass
    return names


def use_backend(name: str) -> None:
    """Switch the active backend ("native" or "python")."""
    global _impl
    if name == "python":
        _impl = _pyfallback
    elif name == "native":
        from . import _native
        _impl = _native
    else:
        raise ValueError(f"unknown backend {name!r}")


def solve_lap(cost):
    return _impl.solve_lap(cost)


def pairwise_iou(a, b):
    return _impl.pairwise_iou(a, b)


def mahalanobis_batch(chol, means, points):
    return _impl.mahalanobis_batch(chol, means, points)
