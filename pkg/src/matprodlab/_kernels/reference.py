"""NumPy reference implementation of the product/decomposition kernel."""

from __future__ import annotations

import numpy as np


def product_terms(xs: np.ndarray, scale: float, depth: int):
    """Batched normalized product and its leading decomposition terms.

    xs has shape (T, n, d, d); factor m contributes (I + scale * xs[:, m]).
    Returns (zn, terms) with zn of shape (T, d, d) equal to the product with
    the highest factor index leftmost, and terms of shape (T, depth, d, d)
    where terms[:, k-1] = scale^k * sum over j1<...<jk of X_{jk} @ ... @ X_{j1}.

    The recurrence S_k <- S_k + (scale * X_m) @ S_{k-1} (with S_0 = I) visits
    k in descending order so that every read sees the previous step's value.
    """
    T, n, d, _ = xs.shape
    zn = np.broadcast_to(np.eye(d), (T, d, d)).copy()
    terms = np.zeros((T, depth, d, d))
    for m in range(n):
        x = xs[:, m] * scale
        top = min(m + 1, depth)
        for k in range(top, 1, -1):
            terms[:, k - 1] += x @ terms[:, k - 2]
        if depth >= 1:
            terms[:, 0] += x
        zn += x @ zn
    return zn, terms
