"""Relaxation kernel backend selection.

Prefers the compiled Cython kernel and falls back to the numpy twin when
the extension is missing.  Set PUMPCELL_BACKEND=python or =compiled to
force a choice at import time; set_backend() switches at runtime (used by
the benchmark and the backend-equivalence tests).
"""

import os

from . import _sor_py

BACKEND = "python"
_impl = _sor_py

_requested = os.environ.get("PUMPCELL_BACKEND", "").strip().lower()
if _requested not in ("", "python", "compiled"):
    raise RuntimeError(f"PUMPCELL_BACKEND must be 'python' or 'compiled', "
                       f"got {_requested!r}")
if _requested in ("", "compiled"):
    try:
        from . import _sor as _sor_compiled
        _impl = _sor_compiled
        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        _sor_compiled = None
else:
    try:
        from . import _sor as _sor_compiled
    except ImportError:
        _sor_compiled = None


def available_backends():
    names = ["python"]
    if _sor_compiled is not None:
        names.insert(0, "compiled")
    return names


def set_backend(name):
    """Switch the active kernel backend; returns the previous name."""
    global _impl, BACKEND
    previous = BACKEND
    if name == "python":
        _impl = _sor_py
    elif name == "compiled":
        if _sor_compiled is None:
            raise RuntimeError("compiled kernel is not available")
        _impl = _sor_compiled
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name
    return previous


def helmholtz_sor_solve(*args, **kwargs):
    return _impl.helmholtz_sor_solve(*args, **kwargs)
