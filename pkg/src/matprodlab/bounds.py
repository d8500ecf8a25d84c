"""Closed-form concentration bound evaluators and admissibility conditions.

Plain deterministic functions of (L, n, d, delta, k).  All logarithms are
natural.  The power-of-zero convention at k = 1 is 0^0 = 1, which collapses
the degree factors and the remainder term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

E2 = math.e**2


class RestrictionError(ValueError):
    """Admissibility violated; `reason` names the failing inequality."""

    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


def _validate_core(L: float, n: int, d: int) -> None:
    if not L > 0:
        raise ValueError("norm bound L must be positive")
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive integers")


def admissible_depth(n: int) -> int:
    """Number of per-term thresholds the aggregate bound sums: ceil(log n)."""
    return max(1, math.ceil(math.log(n)))


def restriction_sides(L: float, n: int, d: int, delta: float):
    """(lhs, mid, rhs) of the admissibility chain lhs <= mid <= rhs."""
    _validate_core(L, n, d)
    if not 0 < delta <= 0.5:
        raise ValueError(f"delta must lie in (0, 1/2], got {delta}")
    lhs = float(max(3, math.ceil(L * E2)))
    mid = math.log(n) + 1.0
    rhs = (16.0 * n / (math.log(d / delta) + math.log(n * math.e))) ** (1.0 / 3.0)
    return lhs, mid, rhs


def restriction_reason(L: float, n: int, d: int, delta: float) -> str | None:
    """None when admissible, else which inequality failed."""
    lhs, mid, rhs = restriction_sides(L, n, d, delta)
    if not lhs <= mid:
        return "left inequality"
    if not mid <= rhs:
        return "right inequality"
    return None


def restriction_ok(L: float, n: int, d: int, delta: float) -> bool:
    """Both inequalities of the admissibility chain, non-strict."""
    return restriction_reason(L, n, d, delta) is None


def k_condition(k: int, n: int, d: int, delta: float) -> bool:
    """Per-term admissibility: k <= (16n / (log(d/delta) + log(ne)))^(1/3)."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if not delta > 0:
        raise ValueError("delta must be positive")
    _validate_core(1.0, n, d)
    rhs = (16.0 * n / (math.log(d / delta) + math.log(n * math.e))) ** (1.0 / 3.0)
    return k <= rhs


def gamma_k(L: float, n: int, k: int, d: int, delta: float) -> float:
    """Deviation threshold for the k-th decomposition term.

    2 (eL/(k-1))^(k-1) [ (2L/sqrt(n)) sqrt(log(2d (ne/(k-1))^(k-1) / delta))
                         + L(k-1)/n ]
    """
    _validate_core(L, n, d)
    if k < 1:
        raise ValueError("k must be a positive integer")
    if not delta > 0:
        raise ValueError("delta must be positive")
    if k == 1:
        return 4.0 * L / math.sqrt(n) * math.sqrt(math.log(2.0 * d / delta))
    j = k - 1
    degree_factor = (math.e * L / j) ** j
    log_inner = math.log(2.0 * d / delta) + j * math.log(n * math.e / j)
    return 2.0 * degree_factor * (
        2.0 * L / math.sqrt(n) * math.sqrt(log_inner) + L * j / n
    )


def beta_k(L: float, n: int, k: int, d: int, delta: float) -> float:
    """Bernstein part of the k-th threshold (no remainder term).

    (4/sqrt(n)) (e/(k-1))^(k-1) L^k sqrt(log(2d) + (k-1) log(ne/(k-1))
                                         - log(delta))
    """
    _validate_core(L, n, d)
    if k < 1:
        raise ValueError("k must be a positive integer")
    if not delta > 0:
        raise ValueError("delta must be positive")
    if k == 1:
        return 4.0 * L / math.sqrt(n) * math.sqrt(math.log(2.0 * d / delta))
    j = k - 1
    log_inner = math.log(2.0 * d) + j * math.log(n * math.e / j) - math.log(delta)
    return 4.0 / math.sqrt(n) * (math.e / j) ** j * L**k * math.sqrt(log_inner)


def d_k_remainder(L: float, n: int, k: int) -> float:
    """Deterministic leftover when n is not a multiple of k:
    2 (L(k-1)/n) (eL/(k-1))^(k-1); zero at k = 1."""
    _validate_core(L, n, 1)
    if k < 1:
        raise ValueError("k must be a positive integer")
    if k == 1:
        return 0.0
    j = k - 1
    return 2.0 * (L * j / n) * (math.e * L / j) ** j


def lemma_exp_bound(sigma: float, n: int) -> float:
    """Deterministic gap ||(I + X/n)^n - e^X|| <= sigma^2 e^sigma / (2n)."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if n < 1:
        raise ValueError("n must be positive")
    return sigma**2 * math.exp(sigma) / (2.0 * n)


def lemma_tail_bound(L: float, n: int) -> float:
    """Deterministic bound on the summed deviations of terms k >= ceil(log n):
    2 L e^2 / (n (e - 1))."""
    _validate_core(L, n, 1)
    return 2.0 * L * E2 / (n * (math.e - 1.0))


def theorem_bound(L: float, n: int, d: int, delta: float) -> float:
    """High-probability bound on ||Z_n - e^X|| (confidence 1 - 2 delta).

    (2 L e^L log(n)/sqrt(n)) (2 sqrt(log(2d/delta) + log(n)^2)
                              + log(n)/sqrt(n)) + L^2 e^L / (2n)
    """
    reason = restriction_reason(L, n, d, delta)
    if reason is not None:
        raise RestrictionError(
            reason, f"admissibility fails ({reason}) at L={L}, n={n}, d={d}, delta={delta}"
        )
    ln = math.log(n)
    lead = 2.0 * L * math.exp(L) * ln / math.sqrt(n)
    inner = 2.0 * math.sqrt(math.log(2.0 * d / delta) + ln**2) + ln / math.sqrt(n)
    return lead * inner + L**2 * math.exp(L) / (2.0 * n)


def expectation_bound(L: float, n: int, d: int) -> float:
    """Bound on E||Z_n - e^X||, at the confidence level delta = L^2/(8n).

    Same leading term as theorem_bound at that delta; trailing term doubles
    to L^2 e^L / n.
    """
    _validate_core(L, n, d)
    delta = L**2 / (8.0 * n)
    if not 0 < delta <= 0.5:
        raise RestrictionError(
            "delta", f"delta = L^2/(8n) = {delta} outside (0, 1/2]"
        )
    reason = restriction_reason(L, n, d, delta)
    if reason is not None:
        raise RestrictionError(
            reason,
            f"admissibility fails ({reason}) at L={L}, n={n}, d={d}, delta=L^2/(8n)={delta}",
        )
    ln = math.log(n)
    lead = 2.0 * L * math.exp(L) * ln / math.sqrt(n)
    inner = 2.0 * math.sqrt(math.log(2.0 * d / delta) + ln**2) + ln / math.sqrt(n)
    return lead * inner + L**2 * math.exp(L) / n


def bernstein_tail(v: float, L: float, t: float, d1: int, d2: int) -> float:
    """Matrix Bernstein tail evaluator: (d1 + d2) exp(-(t^2/2)/(v + Lt/3)).

    A bound, not a probability; may exceed 1.
    """
    if v < 0 or t < 0:
        raise ValueError("variance statistic and threshold must be nonnegative")
    if not L > 0:
        raise ValueError("norm bound L must be positive")
    if d1 < 1 or d2 < 1:
        raise ValueError("dimensions must be positive")
    if t == 0.0:
        return float(d1 + d2)
    return (d1 + d2) * math.exp(-(t**2 / 2.0) / (v + L * t / 3.0))


@dataclass
class BoundReport:
    L: float
    n: int
    d: int
    delta: float
    restriction_ok: bool
    restriction_reason: str | None
    gamma: list = field(default_factory=list)
    theorem_bound: float | None = None
    lemma_exp_bound: float = 0.0
    lemma_tail_bound: float = 0.0
    expectation_bound: float | None = None


def build_report(L: float, n: int, d: int, delta: float) -> BoundReport:
    """Evaluate every bound at (L, n, d, delta); inadmissible ones are None.

    The exponential-gap entry uses sigma = L, the worst mean consistent with
    the uniform bound.  Thresholds gamma are reported for k = 1..ceil(log n).
    """
    reason = restriction_reason(L, n, d, delta)
    report = BoundReport(
        L=L,
        n=n,
        d=d,
        delta=delta,
        restriction_ok=reason is None,
        restriction_reason=reason,
        gamma=[gamma_k(L, n, k, d, delta) for k in range(1, admissible_depth(n) + 1)],
        lemma_exp_bound=lemma_exp_bound(L, n),
        lemma_tail_bound=lemma_tail_bound(L, n),
    )
    if reason is None:
        report.theorem_bound = theorem_bound(L, n, d, delta)
    try:
        report.expectation_bound = expectation_bound(L, n, d)
    except RestrictionError:
        report.expectation_bound = None
    return report
