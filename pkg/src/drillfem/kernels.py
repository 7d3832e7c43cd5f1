"""Selects the compiled element kernels, falling back to pure Python.

Set ``DRILLFEM_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_compiled = None

if os.environ.get("DRILLFEM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled

        BACKEND = "cython"
    except ImportError:  # extension not built
        _compiled = None


def element_blocks(grads, qvals, weights, lam, mu, backend: str | None = None):
    """Element matrices for every cell; see ``_kernels_py.element_blocks``."""
    backend = backend or BACKEND
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled.element_blocks(
            np.ascontiguousarray(grads, dtype=float),
            np.ascontiguousarray(qvals, dtype=float),
            np.ascontiguousarray(weights, dtype=float),
            float(lam),
            float(mu),
        )
    return _kernels_py.element_blocks(grads, qvals, weights, lam, mu)


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _compiled is not None else [])
