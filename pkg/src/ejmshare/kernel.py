"""Kernel dispatch: the compiled extension when built, numpy otherwise."""
from __future__ import annotations

from . import _kernel_py

try:
    from . import _kernel as _compiled
except ImportError:  # extension not built
    _compiled = None

HAVE_COMPILED = _compiled is not None
BACKENDS = ("compiled", "python")

_active = "compiled" if HAVE_COMPILED else "python"


def get_backend() -> str:
    return _active


def set_backend(name: str) -> str:
    """Select the kernel backend; returns the previous one."""
    global _active
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}")
    if name == "compiled" and not HAVE_COMPILED:
        raise RuntimeError("compiled kernel is not available; build the extension first")
    prev, _active = _active, name
    return prev


def sequential_tensor(*args, backend: str | None = None):
    name = backend or _active
    if name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernel is not available")
        return _compiled.sequential_tensor(*args)
    return _kernel_py.sequential_tensor(*args)
