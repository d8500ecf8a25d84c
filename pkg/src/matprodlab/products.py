"""The normalized product, its binomial-like decomposition, and expectations.

For factors (I + X_j / n), j = 1..n (higher index applied on the left), the
product expands into I plus degree-k terms

    term_k = n^{-k} * sum over j1<...<jk of X_{jk} @ ... @ X_{j1},

a non-commutative analogue of elementary symmetric polynomials.  Naive
enumeration is exponential in k; the kernel computes all terms up to a
truncation depth K in O(n K) matrix multiplies via the recurrence
S_k <- S_k + (X_m / n) @ S_{k-1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from ._kernels import product_terms
from .linalg import as_matrix, mat_pow


def _stack(xs) -> np.ndarray:
    if len(xs) == 0:
        raise ValueError("need at least one factor")
    mats = [as_matrix(x, square=True) for x in xs]
    d = mats[0].shape[0]
    for m in mats:
        if m.shape[0] != d:
            raise ValueError(f"dimension mismatch: {m.shape[0]} vs {d}")
    return np.stack(mats)[None, :, :, :]


def z_product(xs, n: int | None = None) -> np.ndarray:
    """(I + X_n/n)(I + X_{n-1}/n)...(I + X_1/n); xs[0] is X_1."""
    if n is None:
        n = len(xs)
    if n != len(xs):
        raise ValueError(f"expected {n} factors, got {len(xs)}")
    stacked = _stack(xs)
    zn, _ = product_terms(stacked, 1.0 / n, 0)
    return zn[0]


def elementary_terms(xs, depth: int) -> list[np.ndarray]:
    """Decomposition terms for k = 1..depth; depth may not exceed len(xs)."""
    n = len(xs)
    if not 1 <= depth <= n:
        raise ValueError(f"truncation depth {depth} outside [1, {n}]")
    stacked = _stack(xs)
    _, terms = product_terms(stacked, 1.0 / n, depth)
    return [terms[0, k] for k in range(depth)]


@dataclass
class ProductDecomposition:
    n: int
    d: int
    z_n: np.ndarray
    terms: list[np.ndarray]
    depth: int


def decompose(xs, depth: int | None = None) -> ProductDecomposition:
    """Product and terms in one pass; depth defaults to the full expansion."""
    n = len(xs)
    if depth is None:
        depth = n
    if not 1 <= depth <= n:
        raise ValueError(f"truncation depth {depth} outside [1, {n}]")
    stacked = _stack(xs)
    zn, terms = product_terms(stacked, 1.0 / n, depth)
    return ProductDecomposition(
        n=n,
        d=stacked.shape[2],
        z_n=zn[0],
        terms=[terms[0, k] for k in range(depth)],
        depth=depth,
    )


def expected_znk(x_mean, n: int, k: int) -> np.ndarray:
    """E[term_k] = (1/n)^k C(n,k) X^k for i.i.d. factors with mean X."""
    x_mean = as_matrix(x_mean, square=True)
    if not 1 <= k <= n:
        raise ValueError(f"term index {k} outside [1, {n}]")
    # exact big-int ratio: correctly rounded even where n^k overflows a double
    return (comb(n, k) / n**k) * mat_pow(x_mean, k)


def expected_zn(x_mean, n: int) -> np.ndarray:
    """E[Z_n] = (I + X/n)^n for i.i.d. factors with mean X."""
    x_mean = as_matrix(x_mean, square=True)
    if n < 1:
        raise ValueError("n must be positive")
    eye = np.eye(x_mean.shape[0])
    return mat_pow(eye + x_mean / n, n)
