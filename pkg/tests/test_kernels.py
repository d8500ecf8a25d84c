import numpy as np
import pytest

from matprodlab._kernels import BACKEND, available_backends, product_terms


def direct_product(xs, scale):
    """Fold the factors explicitly; oracle for the zn output."""
    T, n, d, _ = xs.shape
    out = np.empty((T, d, d))
    for t in range(T):
        z = np.eye(d)
        for m in range(n):
            z = (np.eye(d) + scale * xs[t, m]) @ z
        out[t] = z
    return out


def test_backend_selected():
    assert BACKEND in ("compiled", "reference")
    assert "reference" in available_backends()


def test_zn_matches_direct_fold(rng):
    xs = rng.normal(size=(4, 15, 3, 3))
    zn, _ = product_terms(xs, 1.0 / 15, 0)
    want = direct_product(xs, 1.0 / 15)
    assert np.abs(zn - want).max() <= 1e-12


def test_full_depth_terms_rebuild_product(rng):
    xs = rng.normal(size=(3, 12, 3, 3))
    zn, terms = product_terms(xs, 1.0 / 12, 12)
    rebuilt = np.eye(3) + terms.sum(axis=1)
    assert np.abs(zn - rebuilt).max() <= 1e-10


def test_depth_zero_returns_empty_terms(rng):
    xs = rng.normal(size=(2, 5, 2, 2))
    _, terms = product_terms(xs, 0.2, 0)
    assert terms.shape == (2, 0, 2, 2)


def test_depth_out_of_range_raises(rng):
    xs = rng.normal(size=(1, 4, 2, 2))
    with pytest.raises(ValueError):
        product_terms(xs, 0.25, 5)


def test_bad_shape_raises(rng):
    with pytest.raises(ValueError):
        product_terms(rng.normal(size=(4, 2, 3)), 0.5, 1)


@pytest.mark.skipif(
    "compiled" not in available_backends(), reason="compiled kernel not built"
)
def test_backends_agree(rng):
    backs = available_backends()
    xs = np.ascontiguousarray(rng.normal(size=(5, 30, 4, 4)))
    zn_ref, terms_ref = backs["reference"](xs, 1.0 / 30, 6)
    zn_fast, terms_fast = backs["compiled"](xs, 1.0 / 30, 6)
    assert np.abs(zn_ref - zn_fast).max() <= 1e-13
    assert np.abs(terms_ref - terms_fast).max() <= 1e-13
