"""Product/decomposition kernels: compiled core with a NumPy fallback.

The compiled extension is optional; when it is missing (pure-Python install)
the reference implementation is used.  `BACKEND` names the active one.
"""

from __future__ import annotations

import numpy as np

from . import reference

try:
    from . import _fast
except ImportError:  # extension not built
    _fast = None

BACKEND = "compiled" if _fast is not None else "reference"


def available_backends() -> dict:
    """Name -> kernel function, for benchmarks and cross-checks."""
    out = {"reference": reference.product_terms}
    if _fast is not None:
        out["compiled"] = _fast.product_terms
    return out


def product_terms(xs: np.ndarray, scale: float, depth: int):
    """Batched product and decomposition terms; see reference.product_terms."""
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    if xs.ndim != 4 or xs.shape[2] != xs.shape[3]:
        raise ValueError(f"expected (T, n, d, d) input, got shape {xs.shape}")
    if not 0 <= depth <= xs.shape[1]:
        raise ValueError(f"depth {depth} outside [0, {xs.shape[1]}]")
    if _fast is not None:
        return _fast.product_terms(xs, float(scale), int(depth))
    return reference.product_terms(xs, float(scale), int(depth))
