import itertools

import numpy as np
import pytest

from .algebra import (
    bilinear,
    commutator_value,
    determinant_mod,
    embed_scale,
    is_unit,
    lower_part,
    matmul_mod,
    new_commutator_matrix,
    random_commutator_matrix,
    tensor_double,
    zero_matrix,
)
from .model import MatrixError


def test_accepts_worked_example(mu1):
    assert mu1.n == 4
    assert mu1.d == 2
    assert mu1.labels == ("a", "b", "c", "d")
    assert mu1(0, 3) == 1 and mu1(1, 2) == 1


def test_accepts_zero_matrix():
    mu = zero_matrix(3, 5)
    assert mu.is_zero()
    assert mu.labels == ("x1", "x2", "x3")


@pytest.mark.parametrize("raw, d, message", [
    ([[0, 1], [1, 0]], 3, r"\(0, 1\) and \(1, 0\)"),
    ([[1, 0], [0, 0]], 2, "diagonal"),
    ([[0, 1, 2], [1, 0, 0]], 2, "not square"),
    ([], 2, "not square"),
])
def test_rejects_invalid_matrices(raw, d, message):
    with pytest.raises(MatrixError, match=message):
        new_commutator_matrix(raw, d)


def test_rejects_bad_modulus_and_labels():
    with pytest.raises(MatrixError, match="at least 2"):
        new_commutator_matrix([[0]], 1)
    with pytest.raises(MatrixError, match="phase letter"):
        new_commutator_matrix([[0, 1], [1, 0]], 2, ["a", "J1"])
    with pytest.raises(MatrixError, match="not unique"):
        new_commutator_matrix([[0, 1], [1, 0]], 2, ["a", "a"])
    with pytest.raises(MatrixError, match="expected 2 labels"):
        new_commutator_matrix([[0, 1], [1, 0]], 2, ["a"])


def test_entries_are_read_only(mu1):
    with pytest.raises(ValueError):
        mu1.entries[0, 1] = 1


def test_lower_part(mu1):
    lower = lower_part(mu1)
    expected = np.zeros((4, 4), dtype=np.int64)
    expected[2, 1] = 1
    expected[3, 0] = 1
    assert np.array_equal(lower, expected)

    assert not lower_part(zero_matrix(3, 4)).any()

    mu = new_commutator_matrix([[0, 1], [3, 0]], 4)
    assert lower_part(mu).tolist() == [[0, 0], [3, 0]]


@pytest.mark.parametrize("d", [2, 3, 4, 6])
def test_matrix_is_lower_minus_transpose(d, rng):
    for _ in range(10):
        mu = random_commutator_matrix(5, d, rng)
        lower = lower_part(mu)
        assert np.array_equal((lower - lower.T) % d, mu.entries)


def test_bilinear(mu1, rng):
    e = np.eye(4, dtype=np.int64)
    assert bilinear(lower_part(mu1), e[3], e[0], 2) == 1
    assert bilinear(lower_part(mu1), [0, 0, 0, 0], e[2], 2) == 0

    m = rng.integers(0, 5, size=(3, 3))
    for _ in range(20):
        k = rng.integers(0, 5, size=3)
        l = rng.integers(0, 5, size=3)
        oracle = sum(int(k[i]) * int(m[i, j]) * int(l[j]) for i in range(3) for j in range(3)) % 5
        assert bilinear(m, k, l, 5) == oracle


def test_bilinear_dimension_mismatch():
    with pytest.raises(MatrixError, match="dimension mismatch"):
        bilinear(np.zeros((2, 2)), [1, 0, 0], [1, 0], 3)


def test_bilinear_is_additive_in_each_argument(rng):
    d = 6
    m = rng.integers(0, d, size=(4, 4))
    for _ in range(20):
        k, k2, l = (rng.integers(0, d, size=4) for _ in range(3))
        assert bilinear(m, k + k2, l, d) == (bilinear(m, k, l, d) + bilinear(m, k2, l, d)) % d
        assert bilinear(m, l, k + k2, d) == (bilinear(m, l, k, d) + bilinear(m, l, k2, d)) % d


def test_commutator_value(mu1, mu2):
    e = np.eye(4, dtype=np.int64)
    assert commutator_value(mu1, e[0], e[3]) == 1
    assert commutator_value(mu2, e[1], e[2]) == 1
    assert commutator_value(mu1, e[0], e[1]) == 0


@pytest.mark.parametrize("d", [2, 3])
def test_commutator_value_is_skew(d, rng):
    mu = random_commutator_matrix(3, d, rng)
    vectors = list(itertools.product(range(d), repeat=3))
    for k in vectors:
        assert commutator_value(mu, k, k) == 0
        for l in vectors:
            assert commutator_value(mu, k, l) == (-commutator_value(mu, l, k)) % d


def test_tensor_double(pm_base):
    doubled = tensor_double(pm_base)
    assert doubled.labels == ("x1", "y1", "x2", "y2")
    expected = np.zeros((4, 4), dtype=np.int64)
    expected[0, 1] = expected[1, 0] = 1
    expected[2, 3] = expected[3, 2] = 1
    assert np.array_equal(doubled.entries, expected)

    assert tensor_double(zero_matrix(2, 3)).is_zero()


def test_embed_scale(mu1, mu2):
    scaled = embed_scale(mu1, 2)
    assert scaled.d == 4
    assert set(np.unique(scaled.entries)) <= {0, 2}
    assert np.array_equal(scaled.entries, mu1.entries * 2)

    assert embed_scale(mu2, 1) == mu2

    with pytest.raises(MatrixError, match="at least 1"):
        embed_scale(mu1, 0)
    with pytest.raises(MatrixError, match="Z_2"):
        embed_scale(zero_matrix(2, 3), 2)


def test_modular_matrix_helpers():
    assert matmul_mod([[1, 2], [3, 4]], [[1, 0], [1, 1]], 5).tolist() == [[3, 2], [2, 4]]
    assert determinant_mod([[2, 1], [1, 1]], 6) == 1
    assert determinant_mod([[2, 0], [0, 3]], 12) == 6
    assert is_unit(5, 12)
    assert not is_unit(6, 12)
