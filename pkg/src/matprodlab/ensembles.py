"""Bounded i.i.d. random-matrix sources with known mean and norm bound.

Four kinds cover the cases the experiments need: finite support (exhaustive
oracles), mean-zero and mean-nonzero perturbations, the rank-one projector
case, and plain bounded scalars.

Kind parameters:
  two_point          {a, b}: draw is a or b with probability 1/2 each
  sign_perturbation  {x0, b}: draw is x0 + s*b with s = +-1 equiprobable
  rank_one_sphere    {r}: draw is r^2 * v v^T with v uniform on the unit sphere
  scalar_uniform     {a, b}: 1x1 draw uniform on [a, b]
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from . import _rng
from .linalg import as_matrix, spectral_norm

KINDS = ("two_point", "sign_perturbation", "rank_one_sphere", "scalar_uniform")

ENUMERATION_CAP = 2**20


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    d: int
    params: dict
    seed: int


def two_point(a, b, seed: int = 0) -> EnsembleSpec:
    a = as_matrix(a, square=True)
    b = as_matrix(b, square=True)
    if a.shape != b.shape:
        raise ValueError(f"outcome shape mismatch: {a.shape} vs {b.shape}")
    return EnsembleSpec("two_point", a.shape[0], {"a": a, "b": b}, seed)


def sign_perturbation(x0, b, seed: int = 0) -> EnsembleSpec:
    x0 = as_matrix(x0, square=True)
    b = as_matrix(b, square=True)
    if x0.shape != b.shape:
        raise ValueError(f"shape mismatch: {x0.shape} vs {b.shape}")
    return EnsembleSpec("sign_perturbation", x0.shape[0], {"x0": x0, "b": b}, seed)


def rank_one_sphere(d: int, r: float, seed: int = 0) -> EnsembleSpec:
    if d < 1:
        raise ValueError("dimension must be positive")
    if not r > 0:
        raise ValueError("radius must be positive")
    return EnsembleSpec("rank_one_sphere", int(d), {"r": float(r)}, seed)


def scalar_uniform(a: float, b: float, seed: int = 0) -> EnsembleSpec:
    if not a < b:
        raise ValueError("need a < b")
    return EnsembleSpec("scalar_uniform", 1, {"a": float(a), "b": float(b)}, seed)


def ensemble_mean(spec: EnsembleSpec) -> np.ndarray:
    """Closed-form common expectation of a draw."""
    p = spec.params
    if spec.kind == "two_point":
        return 0.5 * (p["a"] + p["b"])
    if spec.kind == "sign_perturbation":
        return p["x0"].copy()
    if spec.kind == "rank_one_sphere":
        # E[v v^T] = I/d for v uniform on the unit sphere
        return (p["r"] ** 2 / spec.d) * np.eye(spec.d)
    if spec.kind == "scalar_uniform":
        return np.array([[0.5 * (p["a"] + p["b"])]])
    raise ValueError(f"unknown ensemble kind {spec.kind!r}")


def ensemble_bound(spec: EnsembleSpec) -> float:
    """A valid uniform bound on the spectral norm of every draw.

    Valid, not necessarily minimal; bound evaluators take the bound as an
    explicit argument so callers may sharpen it.
    """
    p = spec.params
    if spec.kind == "two_point":
        return max(spectral_norm(p["a"]), spectral_norm(p["b"]))
    if spec.kind == "sign_perturbation":
        return spectral_norm(p["x0"]) + spectral_norm(p["b"])
    if spec.kind == "rank_one_sphere":
        return p["r"] ** 2
    if spec.kind == "scalar_uniform":
        return max(abs(p["a"]), abs(p["b"]))
    raise ValueError(f"unknown ensemble kind {spec.kind!r}")


def _uniform_width(spec: EnsembleSpec) -> int:
    # fixed per-index uniform budget; keeps (seed, index) -> draw stable
    if spec.kind == "rank_one_sphere":
        return _rng.uniforms_per_normal_draw(spec.d)
    return 1


@dataclass
class SampleStream:
    """Cursor into the ensemble's draw sequence; draw k is fixed by (seed, k)."""

    spec: EnsembleSpec
    counter: int = 0

    def clone(self) -> "SampleStream":
        return SampleStream(self.spec, self.counter)


def draw(stream: SampleStream, count: int) -> np.ndarray:
    """Next `count` draws as a (count, d, d) array; advances the stream."""
    if count < 1:
        raise ValueError("count must be positive")
    spec = stream.spec
    start = stream.counter
    stream.counter += count
    d = spec.d
    p = spec.params
    if spec.kind == "rank_one_sphere":
        g = _rng.normal_block(spec.seed, start, count, d)
        norms = np.linalg.norm(g, axis=1, keepdims=True)
        degenerate = norms[:, 0] == 0.0
        if degenerate.any():
            g[degenerate] = 0.0
            g[degenerate, 0] = 1.0
            norms = np.linalg.norm(g, axis=1, keepdims=True)
        v = g / norms
        return p["r"] ** 2 * np.einsum("ti,tj->tij", v, v)
    u = _rng.uniform_block(spec.seed, start, count, 1)[:, 0]
    if spec.kind == "two_point":
        pick_a = u < 0.5
        return np.where(pick_a[:, None, None], p["a"], p["b"])
    if spec.kind == "sign_perturbation":
        sign = np.where(u < 0.5, 1.0, -1.0)
        return p["x0"] + sign[:, None, None] * p["b"]
    if spec.kind == "scalar_uniform":
        return (p["a"] + (p["b"] - p["a"]) * u).reshape(count, 1, 1)
    raise ValueError(f"unknown ensemble kind {spec.kind!r}")


def substream(spec: EnsembleSpec, *tags: int) -> SampleStream:
    """Independent stream for (spec.seed, tags); used for per-trial substreams."""
    return SampleStream(replace(spec, seed=_rng.derive_seed(spec.seed, *tags)))


def enumerate_outcomes(spec: EnsembleSpec, n: int):
    """All length-n outcome sequences of a finite-support ensemble.

    Returns [(probability, [X_1, ..., X_n]), ...] with probabilities summing
    to 1 exactly.  Only two_point has finite support.
    """
    if spec.kind != "two_point":
        raise ValueError(f"ensemble kind {spec.kind!r} has infinite support")
    if n < 1:
        raise ValueError("sequence length must be positive")
    if 2**n > ENUMERATION_CAP:
        raise ValueError(f"enumeration of 2^{n} sequences exceeds the cap")
    support = (spec.params["a"], spec.params["b"])
    prob = 0.5**n
    return [(prob, list(seq)) for seq in itertools.product(support, repeat=n)]
