"""
Normal form utilities for the commutation toolkit
Handles cogredient base changes, the tridiagonal standard form, the
Darboux block form and the relative-parity contextuality decision
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from .algebra import CommutatorMatrix, determinant_mod, is_unit, matmul_mod, new_commutator_matrix
from .contextuality import (
    Contextual,
    Leaf,
    NonContextual,
    Pair,
    certify,
    power_bracketing,
    right_nested,
)
from .model import CertificateError, MatrixError, NotDarbouxError

logger = logging.getLogger(__name__)


def _basis_labels(n: int) -> tuple[str, ...]:
    return tuple(f"u{i + 1}" for i in range(n))


@dataclass(frozen=True)
class CogredientResult:
    """result = U^T mu U mod d for the invertible base change U."""

    basis: np.ndarray
    result: CommutatorMatrix

    def to_json(self):
        return {"result": self.result.to_list(), "basis": self.basis.tolist()}


class _Reducer:
    """Applies simultaneous row/column operations to a copy of mu and tracks U."""

    def __init__(self, mu: CommutatorMatrix):
        self.d = mu.d
        self.n = mu.n
        self.m = np.array(mu.entries, dtype=np.int64)
        self.basis = np.eye(mu.n, dtype=np.int64)
        self.steps = 0

    def swap(self, i: int, j: int):
        if i == j:
            return
        self.m[[i, j], :] = self.m[[j, i], :]
        self.m[:, [i, j]] = self.m[:, [j, i]]
        self.basis[:, [i, j]] = self.basis[:, [j, i]]
        self.steps += 1

    def add(self, i: int, j: int, alpha: int):
        """Row i += alpha row j and column i += alpha column j."""
        alpha %= self.d
        if not alpha or i == j:
            return
        self.m[i, :] = (self.m[i, :] + alpha * self.m[j, :]) % self.d
        self.m[:, i] = (self.m[:, i] + alpha * self.m[:, j]) % self.d
        self.basis[:, i] = (self.basis[:, i] + alpha * self.basis[:, j]) % self.d
        self.steps += 1

    def standardize_row(self, row: int, low: int = 0):
        """Euclid along one row until only the subdiagonal entry is left."""
        m = self.m
        while True:
            columns = [c for c in range(low, row) if m[row, c]]
            if len(columns) <= 1:
                break
            pivot = min(columns, key=lambda c: (m[row, c], c))
            for c in columns:
                if c != pivot:
                    self.add(c, pivot, -(int(m[row, c]) // int(m[row, pivot])))
        if columns and columns[0] != row - 1:
            self.swap(columns[0], row - 1)

    def standardize(self, low: int = 0):
        for row in range(self.n - 1, low, -1):
            self.standardize_row(row, low)

    def _bring_pivot(self, p: int) -> bool:
        m = self.m
        best = None
        for i in range(p, self.n):
            for j in range(i + 1, self.n):
                if m[i, j] and (best is None or m[i, j] < m[best]):
                    best = (i, j)
        if best is None:
            return False
        i, j = best
        self.swap(p, i)
        self.swap(p + 1, j)
        return True

    def clear_pair(self, p: int) -> bool:
        """
        Makes (p, p+1) a block of its own. The pivot a = m[p, p+1] strictly
        drops every time a remainder replaces it, so the loop ends.
        Returns False when everything from p on is already zero.
        """
        m = self.m
        if not m[p, p + 1] and not self._bring_pivot(p):
            return False
        while True:
            a = int(m[p, p + 1])
            for k in range(p + 2, self.n):
                self.add(k, p + 1, -(int(m[p, k]) // a))
                self.add(k, p, int(m[p + 1, k]) // a)
            row_p = [k for k in range(p + 2, self.n) if m[p, k]]
            row_q = [k for k in range(p + 2, self.n) if m[p + 1, k]]
            if row_p:
                k = min(row_p, key=lambda c: (m[p, c], c))
                self.swap(k, p + 1)
                assert m[p, p + 1] < a, "pivot failed to descend"
            elif row_q:
                self.add(p, p + 1, 1)
            else:
                return True

    def finish(self) -> CogredientResult:
        result = new_commutator_matrix(self.m, self.d, _basis_labels(self.n))
        return CogredientResult(self.basis.copy(), result)


def is_cogredient(mu: CommutatorMatrix, cogredient: CogredientResult) -> bool:
    """U^T mu U equals the result and det U is a unit mod d."""
    d = mu.d
    u = cogredient.basis
    product = matmul_mod(matmul_mod(u.T, mu.entries, d), u, d)
    return (
        cogredient.result.d == d
        and np.array_equal(product, cogredient.result.entries)
        and is_unit(determinant_mod(u, d), d)
    )


def _check_index(mu: CommutatorMatrix, *indices):
    for i in indices:
        if not 0 <= i < mu.n:
            raise MatrixError(f"index {i} is outside 0..{mu.n - 1}")


def swap_cogredient(mu: CommutatorMatrix, i: int, j: int) -> CogredientResult:
    _check_index(mu, i, j)
    if i == j:
        logger.warning("⚠ swap of generator %d with itself has no effect", i)
    reducer = _Reducer(mu)
    reducer.swap(i, j)
    return reducer.finish()


def add_cogredient(mu: CommutatorMatrix, i: int, j: int, alpha: int) -> CogredientResult:
    """Replaces generator i by x_i x_j^alpha."""
    _check_index(mu, i, j)
    if i == j:
        raise MatrixError("add_cogredient needs two distinct generators")
    reducer = _Reducer(mu)
    reducer.add(i, j, alpha)
    return reducer.finish()


def standard_form(mu: CommutatorMatrix) -> CogredientResult:
    """Cogredient tridiagonal matrix: row r keeps only its entry at r-1."""
    reducer = _Reducer(mu)
    reducer.standardize()
    logger.info("✓ Standard form after %d operations", reducer.steps)
    return reducer.finish()


def darboux_form(mu: CommutatorMatrix) -> CogredientResult:
    """Cogredient matrix whose only entries sit in 2x2 diagonal blocks."""
    reducer = _Reducer(mu)
    reducer.standardize()
    for p in range(0, mu.n - 1, 2):
        if not reducer.clear_pair(p):
            break
        reducer.standardize(p + 2)
    logger.info("✓ Darboux form after %d operations", reducer.steps)
    return reducer.finish()


def _offending_entry(mu: CommutatorMatrix):
    for i in range(mu.n):
        for j in range(i + 1, mu.n):
            if mu(i, j) and not (i % 2 == 0 and j == i + 1):
                return i, j
    return None


def is_darboux(mu: CommutatorMatrix) -> bool:
    return _offending_entry(mu) is None


def blocks(mu: CommutatorMatrix) -> list[int]:
    """lambda_t = mu(u_2t, u_2t+1) for each diagonal block."""
    return [mu(p, p + 1) for p in range(0, mu.n - 1, 2)]


# ===== RELATIVE PARITY =====

class Parity(str, Enum):
    ODD_RELATIVE = "odd_relative"
    EVEN_RELATIVE = "even_relative"


@dataclass(frozen=True)
class RelativeParity:
    valuation_of_entry: int
    valuation_of_n: int
    verdict: Parity


def two_adic_valuation(value: int) -> int:
    value = abs(int(value))
    if not value:
        raise MatrixError("the 2-adic valuation of 0 is undefined")
    return (value & -value).bit_length() - 1


def relative_parity(entry: int, d: int) -> RelativeParity:
    """Compares v2(entry) with v2(d / 2); odd relative iff the first is not larger."""
    if d % 2:
        raise MatrixError(f"relative parity needs an even modulus, got {d}")
    entry %= d
    if not entry:
        raise MatrixError("relative parity of a zero entry")
    l = two_adic_valuation(entry)
    m = two_adic_valuation(d // 2)
    return RelativeParity(l, m, Parity.ODD_RELATIVE if l <= m else Parity.EVEN_RELATIVE)


def _powers(index: int, count: int) -> list:
    return [Leaf(index)] * count


def _darboux_witness(mu: CommutatorMatrix, first: int, second: int):
    """
    Contextual word over the blocks (a, b) = (u_first, u_first+1) and
    (c, d) = (u_second, u_second+1), both odd relative to n = d/2.
    """
    n = mu.d // 2
    m = two_adic_valuation(n)
    odd_part = n >> m
    a, b, c, d = first, first + 1, second, second + 1
    ka = odd_part << (m - two_adic_valuation(mu(a, b)))
    kc = odd_part << (m - two_adic_valuation(mu(c, d)))

    head1 = Pair(right_nested(_powers(a, ka) + _powers(c, kc)), Pair(Leaf(b), Leaf(d)))
    head2 = Pair(right_nested(_powers(a, ka) + [Leaf(d)]), right_nested([Leaf(b)] + _powers(c, kc)))
    head = Pair(head1, head2)

    tail = [
        power_bracketing(Leaf(index), count)
        for index, count in ((a, 2 * n - 2 * ka), (b, 2 * n - 2), (c, 2 * n - 2 * kc), (d, 2 * n - 2))
        if count
    ]
    bracketing = Pair(head, right_nested(tail)) if tail else head
    return certify(bracketing, mu)


def decide_darboux(mu: CommutatorMatrix) -> Union[Contextual, NonContextual]:
    """
    Contextual iff at least two blocks are odd relative to d/2; the
    witness is built from the first two such blocks.
    """
    offending = _offending_entry(mu)
    if offending is not None:
        i, j = offending
        raise NotDarbouxError(
            f"entry ({mu.labels[i]}, {mu.labels[j]}) = {mu(i, j)} lies outside the 2x2 diagonal blocks",
            detail={"row": i, "column": j, "value": mu(i, j)},
        )
    if mu.d % 2:
        return NonContextual()
    odd = [
        p for p, entry in zip(range(0, mu.n - 1, 2), blocks(mu))
        if entry and relative_parity(entry, mu.d).verdict is Parity.ODD_RELATIVE
    ]
    logger.info("🔍 %d block(s) odd relative to %d", len(odd), mu.d // 2)
    if len(odd) < 2:
        return NonContextual()
    witness = _darboux_witness(mu, odd[0], odd[1])
    if witness.phase != mu.d // 2:
        raise CertificateError(f"block witness has phase {witness.phase}, expected {mu.d // 2}")
    return Contextual(witness)
