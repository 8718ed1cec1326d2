"""
Exact arithmetic utilities for the commutation toolkit
Handles Z_d scalars and vectors, commutator matrices, bilinear forms
and the doubling / scaling constructions used by the worked examples
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass

import numpy as np
import sympy

from .model import MatrixError

logger = logging.getLogger(__name__)

LABEL_PATTERN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

# "J" followed by digits spells a phase letter in the word grammar
RESERVED_LABEL = re.compile(r"J(\d|$)")


def check_modulus(d) -> int:
    """Validate a modulus d >= 2 and return it as an int."""
    try:
        d = int(d)
    except (TypeError, ValueError):
        raise MatrixError(f"modulus must be an integer, got {d!r}")
    if d < 2:
        raise MatrixError(f"modulus must be at least 2, got {d}")
    return d


def modp(a, d: int) -> np.ndarray:
    """Reduce an integer array into [0, d)."""
    return np.asarray(np.asarray(a, dtype=np.int64) % d, dtype=np.int64)


def matmul_mod(a, b, d: int) -> np.ndarray:
    return modp(np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64), d)


def determinant_mod(matrix, d: int) -> int:
    """Exact determinant of an integer matrix, reduced mod d."""
    rows = np.asarray(matrix, dtype=np.int64).tolist()
    if not rows:
        return 1 % d
    return int(sympy.Matrix(rows).det()) % d


def is_unit(value: int, d: int) -> bool:
    return math.gcd(int(value) % d, d) == 1


def default_labels(n: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n))


def _check_labels(labels, n: int) -> tuple[str, ...]:
    if labels is None:
        return default_labels(n)
    labels = tuple(str(label) for label in labels)
    if len(labels) != n:
        raise MatrixError(f"expected {n} labels, got {len(labels)}")
    for label in labels:
        if not LABEL_PATTERN.fullmatch(label):
            raise MatrixError(f"label {label!r} is not an identifier")
        if RESERVED_LABEL.match(label):
            raise MatrixError(f"label {label!r} collides with the phase letter J<k>")
    if len(set(labels)) != n:
        raise MatrixError(f"labels are not unique: {list(labels)}")
    return labels


@dataclass(frozen=True, eq=False)
class CommutatorMatrix:
    """
    Skew-symmetric, zero-diagonal matrix over Z_d.

    entries[i][j] is mu(x_i, x_j): the phase paid for swapping x_i past x_j.
    The generator order is the row order and is never re-sorted.
    """

    entries: np.ndarray
    d: int
    labels: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.labels)

    def __call__(self, i: int, j: int) -> int:
        return int(self.entries[i, j])

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise MatrixError(f"unknown generator label {label!r}")

    def is_zero(self) -> bool:
        return not self.entries.any()

    def to_list(self) -> list[list[int]]:
        return self.entries.tolist()

    def __eq__(self, other):
        if not isinstance(other, CommutatorMatrix):
            return NotImplemented
        return (
            self.d == other.d
            and self.labels == other.labels
            and np.array_equal(self.entries, other.entries)
        )

    def __hash__(self):
        return hash((self.d, self.labels, self.entries.tobytes()))

    def __repr__(self):
        return f"CommutatorMatrix(d={self.d}, labels={list(self.labels)}, entries={self.to_list()})"


def new_commutator_matrix(raw, d, labels=None) -> CommutatorMatrix:
    """
    Validate and build a commutator matrix.

    Args:
        raw: square integer array (any integers, reduced mod d)
        d: modulus, at least 2
        labels: generator names; defaults to x1..xn

    Returns:
        CommutatorMatrix with entries in [0, d)

    Raises:
        MatrixError naming the offending index pair
    """
    d = check_modulus(d)
    try:
        array = np.array(raw, dtype=np.int64)
    except (TypeError, ValueError, OverflowError) as e:
        raise MatrixError(f"matrix entries must be integers: {e}")
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise MatrixError(f"matrix is not square: shape {array.shape}")
    n = array.shape[0]
    if n == 0:
        raise MatrixError("matrix needs at least one generator")
    labels = _check_labels(labels, n)
    array = modp(array, d)

    for i in range(n):
        if array[i, i]:
            raise MatrixError(
                f"nonzero diagonal entry at ({i}, {i}) [{labels[i]}]",
                detail={"row": i, "col": i, "value": int(array[i, i])},
            )
    bad = np.argwhere((array + array.T) % d)
    if bad.size:
        i, j = (int(x) for x in bad[0])
        raise MatrixError(
            f"entries ({i}, {j}) and ({j}, {i}) [{labels[i]}, {labels[j]}] "
            f"are not negatives of each other mod {d}",
            detail={"row": i, "col": j},
        )

    array.setflags(write=False)
    return CommutatorMatrix(array, d, labels)


def zero_matrix(n: int, d: int, labels=None) -> CommutatorMatrix:
    return new_commutator_matrix(np.zeros((n, n), dtype=np.int64), d, labels)


def random_commutator_matrix(n: int, d: int, rng: np.random.Generator, labels=None) -> CommutatorMatrix:
    upper = np.triu(rng.integers(0, d, size=(n, n)), 1)
    return new_commutator_matrix(upper - upper.T, d, labels)


def lower_part(mu: CommutatorMatrix) -> np.ndarray:
    """Strictly lower triangle of mu, so that mu = lower - lower^T mod d."""
    lower = np.tril(mu.entries, -1).astype(np.int64)
    lower.setflags(write=False)
    return lower


def bilinear(matrix, k, l, d: int) -> int:
    """Evaluate k^T M l mod d."""
    matrix = np.asarray(matrix, dtype=np.int64)
    k = np.asarray(k, dtype=np.int64)
    l = np.asarray(l, dtype=np.int64)
    if matrix.ndim != 2 or k.shape != (matrix.shape[0],) or l.shape != (matrix.shape[1],):
        raise MatrixError(
            f"dimension mismatch: matrix {matrix.shape}, vectors {k.shape} and {l.shape}"
        )
    return int(k @ matrix @ l) % d


def commutator_value(mu: CommutatorMatrix, k, l) -> int:
    """mu(k, l), which equals lower(k, l) - lower(l, k)."""
    return bilinear(mu.entries, k, l, mu.d)


def tensor_double(mu: CommutatorMatrix) -> CommutatorMatrix:
    """
    Two commuting copies of the generators.

    Copy c of generator x is labelled f"{x}{c}"; all of copy 1 comes first.
    """
    n = mu.n
    raw = np.zeros((2 * n, 2 * n), dtype=np.int64)
    raw[:n, :n] = mu.entries
    raw[n:, n:] = mu.entries
    labels = [f"{label}1" for label in mu.labels] + [f"{label}2" for label in mu.labels]
    return new_commutator_matrix(raw, mu.d, labels)


def embed_scale(mu: CommutatorMatrix, k: int) -> CommutatorMatrix:
    """Push a Z_2 matrix into Z_2k along 1 -> k."""
    if mu.d != 2:
        raise MatrixError(f"embed_scale needs a matrix over Z_2, got Z_{mu.d}")
    if int(k) < 1:
        raise MatrixError(f"scale factor must be at least 1, got {k}")
    k = int(k)
    return new_commutator_matrix(mu.entries * k, 2 * k, mu.labels)
