"""Seeded experiments measuring product errors against the closed-form bounds.

Each trial of size n is computed from an RNG substream keyed by
(master_seed, n, trial_index), so records are byte-identical regardless of
batching, thread count, or execution order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ._kernels import product_terms
from ._rng import derive_seed
from .bounds import gamma_k, k_condition, lemma_tail_bound
from .ensembles import (
    EnsembleSpec,
    SampleStream,
    draw,
    ensemble_bound,
    ensemble_mean,
    substream,
    two_point,
)
from .linalg import as_matrix, expm, mat_pow, spectral_norm
from .products import expected_zn, expected_znk

# cap on doubles held per draw batch (~128 MB)
_CHUNK_BUDGET = 2**24


class NumericError(RuntimeError):
    """A non-finite value appeared in experiment output."""


def default_depth(n: int) -> int:
    """Terms recorded per trial: min(n, ceil(log n) + 2).

    Terms beyond ceil(log n) are controlled deterministically, so recording
    a couple past that is enough for every tail comparison.
    """
    return min(n, math.ceil(math.log(n)) + 2)


@dataclass
class ExperimentConfig:
    ensemble: EnsembleSpec
    n_grid: list[int]
    trials: int
    delta: float
    depth: int | None = None
    master_seed: int = 0

    def validate(self) -> None:
        if not self.n_grid:
            raise ValueError("n_grid must be nonempty")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError("n_grid must be strictly increasing")
        if any(n < 1 for n in self.n_grid):
            raise ValueError("grid sizes must be positive")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if not 0.0 < self.delta <= 0.5:
            raise ValueError(f"delta must lie in (0, 1/2], got {self.delta}")
        if self.depth is not None and self.depth < 1:
            raise ValueError("truncation depth must be positive")

    def depth_for(self, n: int) -> int:
        if self.depth is None:
            return default_depth(n)
        return min(n, self.depth)


@dataclass
class TrialRecord:
    n: int
    trial_index: int
    err_total: float
    err_mean_part: float
    err_exp_part: float
    term_errs: list[float] = field(default_factory=list)


@dataclass
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    per_n_median: list


def _draw_trials(spec: EnsembleSpec, master_seed: int, n: int, lo: int, hi: int):
    """Stack of draws for trials lo..hi-1 at size n: shape (hi-lo, n, d, d)."""
    out = np.empty((hi - lo, n, spec.d, spec.d))
    for t in range(lo, hi):
        stream = SampleStream(replace(spec, seed=derive_seed(master_seed, n, t)))
        out[t - lo] = draw(stream, n)
    return out


def run_error_trials(config: ExperimentConfig, threads: int = 1) -> list[TrialRecord]:
    """Per-trial error norms over the full (n, trial) grid."""
    config.validate()
    spec = config.ensemble
    x_mean = ensemble_mean(spec)
    e_x = expm(x_mean)
    records: list[TrialRecord] = []
    for n in config.n_grid:
        depth = config.depth_for(n)
        ez = expected_zn(x_mean, n)
        err_exp = spectral_norm(ez - e_x)
        expected_terms = [expected_znk(x_mean, n, k) for k in range(1, depth + 1)]
        chunk = max(1, _CHUNK_BUDGET // (n * spec.d * spec.d))
        spans = [
            (lo, min(lo + chunk, config.trials))
            for lo in range(0, config.trials, chunk)
        ]

        def run_span(span, n=n, depth=depth, ez=ez, err_exp=err_exp, expected_terms=expected_terms):
            lo, hi = span
            xs = _draw_trials(spec, config.master_seed, n, lo, hi)
            zn, terms = product_terms(xs, 1.0 / n, depth)
            if not (np.isfinite(zn).all() and np.isfinite(terms).all()):
                raise NumericError(f"non-finite product output at n={n}")
            out = []
            for i, t in enumerate(range(lo, hi)):
                out.append(
                    TrialRecord(
                        n=n,
                        trial_index=t,
                        err_total=spectral_norm(zn[i] - e_x),
                        err_mean_part=spectral_norm(zn[i] - ez),
                        err_exp_part=err_exp,
                        term_errs=[
                            spectral_norm(terms[i, k] - expected_terms[k])
                            for k in range(depth)
                        ],
                    )
                )
            return out

        if threads > 1 and len(spans) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                for chunk_records in pool.map(run_span, spans):
                    records.extend(chunk_records)
        else:
            for span in spans:
                records.extend(run_span(span))
    return records


def tail_frequency(
    config: ExperimentConfig, k: int, records: list[TrialRecord] | None = None
) -> list:
    """Per n: fraction of trials whose k-th term deviation exceeds gamma_k."""
    config.validate()
    spec = config.ensemble
    L = ensemble_bound(spec)
    for n in config.n_grid:
        if not k_condition(k, n, spec.d, config.delta):
            raise ValueError(f"term condition fails for k={k} at n={n}")
        if k > config.depth_for(n):
            raise ValueError(f"k={k} exceeds recorded depth at n={n}")
    if records is None:
        records = run_error_trials(config)
    out = []
    for n in config.n_grid:
        threshold = gamma_k(L, n, k, spec.d, config.delta)
        errs = [r.term_errs[k - 1] for r in records if r.n == n]
        out.append((n, sum(e > threshold for e in errs) / len(errs)))
    return out


def deterministic_tail_check(xs, L: float, x_mean) -> bool:
    """True iff the full tail sum of centered term deviations, for terms
    k >= ceil(log n), is within the deterministic bound 2Le^2/(n(e-1)).

    Requires ceil(log n) >= max(3, ceil(L e^2)).
    """
    n = len(xs)
    k0 = math.ceil(math.log(n))
    if k0 < max(3, math.ceil(L * math.e**2)):
        raise ValueError(
            f"tail lemma precondition fails: ceil(log {n}) = {k0} too small for L={L}"
        )
    x_mean = as_matrix(x_mean, square=True)
    stacked = np.stack([as_matrix(x, square=True) for x in xs])[None]
    _, terms = product_terms(stacked, 1.0 / n, n)
    tail = 0.0
    for k in range(k0, n + 1):
        tail += spectral_norm(terms[0, k - 1] - expected_znk(x_mean, n, k))
    return tail <= lemma_tail_bound(L, n)


def exp_approx_check(x, n_grid) -> list:
    """Per n: the gap ||(I + x/n)^n - e^x||."""
    x = as_matrix(x, square=True)
    e_x = expm(x)
    eye = np.eye(x.shape[0])
    out = []
    for n in n_grid:
        gap = spectral_norm(mat_pow(eye + x / n, n) - e_x)
        out.append((n, gap))
    return out


def rate_fit(records: list[TrialRecord]) -> RateFit:
    """Least-squares slope of log(median total error) against log(n)."""
    by_n: dict[int, list[float]] = {}
    for r in records:
        by_n.setdefault(r.n, []).append(r.err_total)
    if len(by_n) < 3:
        raise ValueError("need at least 3 distinct grid sizes for a rate fit")
    if any(len(v) < 30 for v in by_n.values()):
        raise ValueError("need at least 30 trials per grid size for a rate fit")
    ns = sorted(by_n)
    medians = [float(np.median(by_n[n])) for n in ns]
    if any(m <= 0 for m in medians):
        raise ValueError("medians must be positive to fit a log-log rate")
    lx = np.log(ns)
    ly = np.log(medians)
    slope, intercept = np.polyfit(lx, ly, 1)
    fitted = slope * lx + intercept
    ss_res = float(np.sum((ly - fitted) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RateFit(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r_squared,
        per_n_median=list(zip(ns, medians)),
    )


def scalar_floor_check(n_grid, trials: int, seed: int) -> list:
    """Median of sqrt(n) |Z_n - 1| for the scalar mean-zero sign ensemble.

    An empirical floor: values staying away from 0 show the 1/sqrt(n) error
    scale cannot be beaten under a bare variance assumption.
    """
    spec = two_point(np.array([[1.0]]), np.array([[-1.0]]), seed=seed)
    out = []
    for n in n_grid:
        gaps = np.empty(trials)
        for t in range(trials):
            eps = draw(substream(spec, n, t), n)[:, 0, 0]
            z = np.prod(1.0 + eps / n)
            gaps[t] = math.sqrt(n) * abs(z - 1.0)
        out.append((n, float(np.median(gaps))))
    return out


def wilson_halfwidth(count: int, trials: int, z: float = 1.96) -> float:
    """Half-width of the Wilson score interval for a binomial frequency."""
    if trials < 1:
        raise ValueError("trials must be positive")
    phat = count / trials
    denom = 1.0 + z**2 / trials
    halfwidth = (
        z * math.sqrt(phat * (1.0 - phat) / trials + z**2 / (4.0 * trials**2)) / denom
    )
    return halfwidth


def exceedance_ok(count: int, trials: int, bound: float, z: float = 1.96) -> bool:
    """Accept an empirical exceedance frequency against a probability bound."""
    return count / trials <= bound + wilson_halfwidth(count, trials, z)
