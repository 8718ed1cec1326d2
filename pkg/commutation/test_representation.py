import numpy as np
import pytest

from .algebra import random_commutator_matrix, tensor_double, zero_matrix
from .contextuality import peres_mermin_square
from .group import GroupContext, enumerate_group, multiply
from .model import CapExceededError, CommutationError, ContextMismatchError, ParseError
from .representation import (
    basis_labels,
    clock_operator,
    compose_weyl,
    dense_to_json,
    format_weyl,
    identity_operator,
    is_generalized_permutation,
    parse_pauli_string,
    represent,
    roots_of_unity,
    scalar_operator,
    shift_operator,
    to_dense,
    verify_representation,
    weyl_equal,
)


def test_scalars_and_generators(mu1):
    context = GroupContext(mu1)
    assert weyl_equal(represent(context.scalar(1)), scalar_operator(1, 4, 2))
    a = represent(context.generator(0))
    assert a.shift == (1, 0, 0, 0)
    assert a.clock == (0, 0, 0, 0)
    # d carries the lower row of mu as its clock part
    d = represent(context.generator(3))
    assert d.shift == (0, 0, 0, 1)
    assert d.clock == (1, 0, 0, 0)


def test_clock_after_shift_picks_up_a_root():
    z, x = clock_operator(0, 1, 3), shift_operator(0, 1, 3)
    zx = compose_weyl(z, x)
    xz = compose_weyl(x, z)
    assert zx.phase == (xz.phase + 1) % 3
    assert (zx.shift, zx.clock) == (xz.shift, xz.clock)


def test_identity_composition(rng):
    mu = random_commutator_matrix(3, 4, rng)
    identity = identity_operator(3, 4)
    for g in enumerate_group(GroupContext(mu))[:20]:
        p = represent(g)
        assert weyl_equal(compose_weyl(identity, p), p)
        assert weyl_equal(compose_weyl(p, identity), p)


def test_homomorphism_by_hand(mu2):
    context = GroupContext(mu2)
    g, h = context.element(1, [1, 1, 0, 0]), context.element(0, [0, 1, 1, 1])
    assert weyl_equal(compose_weyl(represent(g), represent(h)), represent(multiply(g, h)))


@pytest.mark.parametrize("d, n", [(d, n) for d in (2, 3, 4) for n in (1, 2, 3)])
def test_small_groups_are_checked_densely_in_full(d, n):
    mu = random_commutator_matrix(n, d, np.random.default_rng(10 * d + n))
    report = verify_representation(mu)
    assert report.ok, report.failures
    size = d ** (n + 1)
    assert report.pairs_checked == size ** 2
    assert report.dense_pairs_checked == size ** 2


@pytest.mark.parametrize("mu", [
    zero_matrix(1, 4),
    random_commutator_matrix(2, 6, np.random.default_rng(3)),
])
def test_verify_representation_exhaustively(mu):
    report = verify_representation(mu)
    assert report.ok, report.failures
    assert report.pairs_checked == (mu.d ** (mu.n + 1)) ** 2
    assert report.dense_pairs_checked == (mu.d ** (mu.n + 1)) ** 2


def test_verify_peres_mermin(pm_matrix, rng):
    report = verify_representation(pm_matrix, rng=rng)
    assert report.ok
    assert report.to_json()["ok"] is True


def test_sampled_mode(rng):
    mu = random_commutator_matrix(3, 5, rng)
    report = verify_representation(mu, mode="sampled", samples=300, rng=rng)
    assert report.ok
    assert report.pairs_checked == 300
    assert report.dense_pairs_checked == 32
    with pytest.raises(CommutationError, match="unknown mode"):
        verify_representation(mu, mode="random")


# ===== DENSE MATRICES =====

def test_roots_of_unity_are_exact_where_they_can_be():
    assert roots_of_unity(2).tolist() == [1, -1]
    assert roots_of_unity(4).tolist() == [1, 1j, -1, -1j]
    assert np.allclose(roots_of_unity(3) ** 3, 1)


def test_basis_labels_first_component_is_most_significant():
    assert basis_labels(2, 2).tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
    assert basis_labels(1, 3).tolist() == [[0], [1], [2]]


def test_dense_pauli_matrices():
    x = to_dense(shift_operator(0, 1, 2))
    z = to_dense(clock_operator(0, 1, 2))
    assert x.tolist() == [[0, 1], [1, 0]]
    assert z.tolist() == [[1, 0], [0, -1]]
    assert np.array_equal(z @ x, -(x @ z))
    assert np.array_equal(to_dense(identity_operator(2, 3)), np.eye(9))


def test_dense_matches_composition(rng):
    mu = random_commutator_matrix(2, 3, rng)
    elements = enumerate_group(GroupContext(mu))
    for _ in range(20):
        g, h = (elements[i] for i in rng.integers(0, len(elements), size=2))
        p, q = represent(g), represent(h)
        assert np.allclose(to_dense(p) @ to_dense(q), to_dense(compose_weyl(p, q)))
        assert is_generalized_permutation(to_dense(p), 3)


def test_peres_mermin_dense_products():
    square = peres_mermin_square()
    eye = np.eye(16)

    def product(cells):
        out = eye
        for g in cells:
            out = out @ to_dense(represent(g))
        return out

    for r in range(3):
        assert np.allclose(product(square.entries[r]), eye)
    signs = [1, 1, -1]
    for c in range(3):
        column = [square.entries[r][c] for r in range(3)]
        assert np.allclose(product(column), signs[c] * eye)


def test_dense_cap():
    p = identity_operator(3, 3)
    with pytest.raises(CapExceededError) as excinfo:
        to_dense(p, cap=8)
    assert excinfo.value.detail == {"dimension": 27, "cap": 8}


def test_dense_to_json():
    z = to_dense(clock_operator(0, 1, 2))
    assert dense_to_json(z) == [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]


def test_is_generalized_permutation():
    assert is_generalized_permutation(np.eye(2), 2)
    assert not is_generalized_permutation(np.array([[1, 1], [0, 1]]), 2)
    assert not is_generalized_permutation(np.diag([1, 1j]), 2)
    assert is_generalized_permutation(np.diag([1, 1j]), 4)


# ===== PAULI STRINGS =====

def test_format_and_parse_pauli_strings():
    p = parse_pauli_string("w^1 X1 Z1^2 X2", 2, 3)
    assert (p.phase, p.shift, p.clock) == (1, (1, 1), (2, 0))
    assert format_weyl(p) == "w^1 X1 Z1^2 X2"
    assert format_weyl(identity_operator(2, 3)) == "I"
    assert format_weyl(parse_pauli_string("I", 1, 2)) == "I"


def test_parse_composes_left_to_right():
    assert format_weyl(parse_pauli_string("Z1 X1", 1, 3)) == "w^1 X1 Z1"
    assert format_weyl(parse_pauli_string("X1 Z1", 1, 3)) == "X1 Z1"
    assert parse_pauli_string("X1^3", 1, 3).shift == (0,)


@pytest.mark.parametrize("text", ["X3", "Y1", "X", "Z0"])
def test_parse_pauli_errors(text):
    with pytest.raises(ParseError):
        parse_pauli_string(text, 2, 3)


def test_representation_json(pm_base):
    mu = tensor_double(pm_base)
    p = represent(GroupContext(mu).element(1, [0, 1, 0, 0]))
    assert p.to_json() == {"pauli": "w^1 Z1 X2", "phase": 1, "shift": [0, 1, 0, 0], "clock": [1, 0, 0, 0]}


def test_operators_on_different_spaces_do_not_mix():
    with pytest.raises(ContextMismatchError):
        compose_weyl(identity_operator(1, 2), identity_operator(2, 2))
    with pytest.raises(ContextMismatchError):
        weyl_equal(identity_operator(1, 2), identity_operator(1, 3))
