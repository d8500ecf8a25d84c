import numpy as np

from matprodlab._rng import derive_seed, normal_block, splitmix64, uniform_block


def test_uniforms_strictly_inside_unit_interval():
    u = uniform_block(7, 0, 1000, 3)
    assert u.shape == (1000, 3)
    assert (u > 0).all() and (u < 1).all()


def test_batch_boundaries_do_not_matter():
    whole = uniform_block(42, 0, 20, 5)
    head = uniform_block(42, 0, 7, 5)
    tail = uniform_block(42, 7, 13, 5)
    assert np.array_equal(whole, np.vstack([head, tail]))


def test_seeds_give_unrelated_streams():
    a = uniform_block(1, 0, 100, 2)
    b = uniform_block(2, 0, 100, 2)
    assert not np.array_equal(a, b)


def test_normal_block_batch_independent():
    whole = normal_block(9, 0, 12, 3)
    parts = np.vstack([normal_block(9, 0, 5, 3), normal_block(9, 5, 7, 3)])
    assert np.array_equal(whole, parts)


def test_normal_block_moments():
    z = normal_block(123, 0, 200_000, 2).ravel()
    assert abs(z.mean()) < 0.01
    assert abs(z.std() - 1.0) < 0.01


def test_splitmix_is_deterministic_uint64():
    assert splitmix64(0) == splitmix64(0)
    assert 0 <= splitmix64(12345) < 2**64


def test_derive_seed_order_sensitive():
    assert derive_seed(5, 1, 2) != derive_seed(5, 2, 1)
    assert derive_seed(5, 1, 2) == derive_seed(5, 1, 2)
