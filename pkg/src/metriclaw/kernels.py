"""Kernel backend selection.

The compiled extension is preferred when built; the NumPy fallback is used
otherwise.  Set ``METRICLAW_BACKEND=python`` to force the fallback (or
``compiled`` to fail loudly when the extension is missing).  Both backends
return bit-identical results, so the choice only affects speed.
"""
from __future__ import annotations

import os

from . import _core_py

_FORCED = os.environ.get("METRICLAW_BACKEND", "").strip().lower()


def load_backend(name: str):
    """Return the kernel module for ``name`` ("compiled" or "python")."""
    if name == "python":
        return _core_py
    if name == "compiled":
        from . import _core

        return _core
    raise ValueError(f"unknown backend {name!r}")


def _select():
    if _FORCED in ("python", "pure", "py"):
        return _core_py
    try:
        from . import _core

        return _core
    except ImportError:
        if _FORCED in ("compiled", "c"):
            raise ImportError(
                "METRICLAW_BACKEND=compiled but the extension is not built; "
                "run: python setup.py build_ext --inplace"
            )
        return _core_py


_impl = _select()

triangle_mask = _impl.triangle_mask
har_chain = _impl.har_chain
axiom_values = _impl.axiom_values
phi_half_values = _impl.phi_half_values


def backend_name() -> str:
    """Name of the active backend: "compiled" or "python"."""
    return _impl.BACKEND
