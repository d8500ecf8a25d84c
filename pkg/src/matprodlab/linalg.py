"""Dense real matrix arithmetic: product, power, spectral norm, exponential.

Matrices are plain float64 ndarrays.  Every public operation validates that
its inputs are finite 2-D arrays and produces finite output.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "as_matrix",
    "mat_mul",
    "mat_pow",
    "spectral_norm",
    "expm",
]

POWER_TOL = 1e-12
POWER_MAXITER = 10_000


def as_matrix(a, square: bool = False) -> np.ndarray:
    """Validate and coerce to a finite float64 2-D array."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix entries must be finite")
    return m


def mat_mul(a, b) -> np.ndarray:
    """Matrix product a @ b."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} x {b.shape}")
    return a @ b


def mat_pow(x, m: int) -> np.ndarray:
    """x**m for a nonnegative integer m, by repeated squaring; x**0 = I."""
    x = as_matrix(x, square=True)
    if m != int(m) or m < 0:
        raise ValueError(f"exponent must be a nonnegative integer, got {m!r}")
    m = int(m)
    result = np.eye(x.shape[0])
    base = x.copy()
    while m:
        if m & 1:
            result = result @ base
        m >>= 1
        if m:
            base = base @ base
    return result


def spectral_norm(a) -> float:
    """Largest singular value.

    Power iteration on the Gram matrix (the smaller of A^T A and A A^T),
    accepted only when both the Rayleigh quotient has stabilized and the
    eigen-residual is tiny.  If the iteration stalls at the cap, falls back
    to a full symmetric eigendecomposition.
    """
    a = as_matrix(a)
    if a.shape[1] <= a.shape[0]:
        b = a.T @ a
    else:
        b = a @ a.T
    if not np.abs(b).max() > 0.0:
        return 0.0
    v = np.abs(b).sum(axis=1)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        v = np.ones(b.shape[0])
        nv = np.linalg.norm(v)
    v /= nv
    lam_prev = np.inf
    for _ in range(POWER_MAXITER):
        w = b @ v
        lam = float(v @ w)
        scale = max(1.0, lam)
        if (
            abs(lam - lam_prev) <= POWER_TOL * scale
            and np.linalg.norm(w - lam * v) <= 1e-13 * scale
        ):
            return float(np.sqrt(max(lam, 0.0)))
        lam_prev = lam
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
    # stalled: top eigenvalues too close for power iteration
    lam = float(np.linalg.eigvalsh(b)[-1])
    return float(np.sqrt(max(lam, 0.0)))


def _taylor_degree(t: float) -> int:
    # smallest degree whose series remainder at norm t is below 1e-15
    term = 1.0
    for m in range(1, 40):
        term *= t / m
        if t < m + 1:
            remainder = term * (t / (m + 1)) / (1.0 - t / (m + 2))
            if remainder < 1e-15:
                return m
    return 40


def expm(x) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a truncated series."""
    x = as_matrix(x, square=True)
    d = x.shape[0]
    eye = np.eye(d)
    norm1 = float(np.abs(x).sum(axis=0).max())
    if norm1 == 0.0:
        return eye.copy()
    theta = 0.5
    squarings = max(0, int(np.ceil(np.log2(norm1 / theta))))
    xs = x / (2.0**squarings)
    degree = _taylor_degree(norm1 / (2.0**squarings))
    # Horner: p = I + xs (I + xs/2 (I + xs/3 (...)))
    p = eye.copy()
    for j in range(degree, 0, -1):
        p = eye + (xs @ p) / j
    for _ in range(squarings):
        p = p @ p
    if not np.isfinite(p).all():
        raise FloatingPointError("matrix exponential overflowed")
    return p
