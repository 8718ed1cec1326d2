"""
Group arithmetic utilities for the commutation toolkit
Handles the linear-algebraic group H(mu) on Z_d x Z_d^n, its isomorphism
with rewrite normal forms, enumeration and centres
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import settings
from .algebra import CommutatorMatrix, lower_part
from .model import CapExceededError, ContextMismatchError, MatrixError
from .rewrite import Generator, NormalForm, Phase, Word

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GroupContext:
    """The group H(mu); elements point back at one shared context."""

    mu: CommutatorMatrix
    lower: np.ndarray = field(init=False, repr=False)
    _rows: tuple = field(init=False, repr=False)

    def __post_init__(self):
        lower = lower_part(self.mu)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "_rows", tuple(tuple(int(v) for v in row) for row in lower))

    @property
    def d(self) -> int:
        return self.mu.d

    @property
    def n(self) -> int:
        return self.mu.n

    @property
    def size(self) -> int:
        return self.d ** (self.n + 1)

    def lower_form(self, k, l) -> int:
        """lower(k, l) on plain integer sequences, without numpy overhead."""
        total = 0
        rows = self._rows
        for i, ki in enumerate(k):
            if ki:
                row = rows[i]
                for j in range(i):
                    if l[j]:
                        total += ki * row[j] * l[j]
        return total % self.d

    def form(self, k, l) -> int:
        """mu(k, l) = lower(k, l) - lower(l, k)."""
        return (self.lower_form(k, l) - self.lower_form(l, k)) % self.d

    def element(self, phase: int, vector: Iterable[int]) -> "GroupElement":
        vector = tuple(int(v) % self.d for v in vector)
        if len(vector) != self.n:
            raise MatrixError(f"vector has length {len(vector)}, expected {self.n}")
        return GroupElement(int(phase) % self.d, vector, self)

    def identity(self) -> "GroupElement":
        return GroupElement(0, (0,) * self.n, self)

    def scalar(self, k: int) -> "GroupElement":
        return GroupElement(int(k) % self.d, (0,) * self.n, self)

    def generator(self, i: int) -> "GroupElement":
        vector = [0] * self.n
        vector[i] = 1
        return GroupElement(0, tuple(vector), self)

    def __eq__(self, other):
        return isinstance(other, GroupContext) and self.mu == other.mu

    def __hash__(self):
        return hash(self.mu)


@dataclass(frozen=True)
class GroupElement:
    phase: int
    vector: tuple[int, ...]
    context: GroupContext = field(compare=False, repr=False)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    @property
    def is_scalar(self) -> bool:
        return not any(self.vector)

    def to_json(self):
        return {"k": self.phase, "vec": list(self.vector)}


def _same_context(g: GroupElement, h: GroupElement):
    if g.context is not h.context and g.context != h.context:
        raise ContextMismatchError("elements belong to different commutation groups")


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    """(k, k') . (l, l') = (k + l + lower(k', l'), k' + l')"""
    _same_context(g, h)
    ctx = g.context
    d = ctx.d
    phase = (g.phase + h.phase + ctx.lower_form(g.vector, h.vector)) % d
    vector = tuple((a + b) % d for a, b in zip(g.vector, h.vector))
    return GroupElement(phase, vector, ctx)


def inverse(g: GroupElement) -> GroupElement:
    ctx = g.context
    d = ctx.d
    negated = tuple((-v) % d for v in g.vector)
    return GroupElement((-g.phase - ctx.lower_form(g.vector, negated)) % d, negated, ctx)


def power(g: GroupElement, m: int) -> GroupElement:
    if m < 0:
        return power(inverse(g), -m)
    result = g.context.identity()
    for _ in range(m):
        result = multiply(result, g)
    return result


def commutator(g: GroupElement, h: GroupElement) -> GroupElement:
    """g h g^-1 h^-1, always the scalar (mu(k', l'), 0)."""
    _same_context(g, h)
    return g.context.scalar(g.context.form(g.vector, h.vector))


def commutes(g: GroupElement, h: GroupElement) -> bool:
    _same_context(g, h)
    return g.context.form(g.vector, h.vector) == 0


def order(g: GroupElement) -> int:
    """Least m >= 1 with g^m = 1, found by repeated multiplication."""
    ctx = g.context
    identity = ctx.identity()
    current = g
    for m in range(1, ctx.d * ctx.d + 1):
        if current == identity:
            return m
        current = multiply(current, g)
    raise AssertionError(f"order of {g} exceeds d^2")


def from_normal_form(nf: NormalForm, context: GroupContext) -> GroupElement:
    return context.element(nf.phase, nf.exponents)


def to_normal_form(g: GroupElement) -> NormalForm:
    return NormalForm(g.phase, g.vector)


def evaluate(word: Word, context: GroupContext) -> GroupElement:
    """Folds a word letter by letter through multiply."""
    result = context.identity()
    for letter in word:
        if isinstance(letter, Phase):
            result = multiply(result, context.scalar(letter.value))
        elif isinstance(letter, Generator):
            result = multiply(result, context.generator(letter.index))
    return result


def check_cap(context: GroupContext, cap=None):
    cap = settings.ENUMERATION_CAP if cap is None else cap
    if context.size > cap:
        raise CapExceededError(
            f"d^(n+1) = {context.size} exceeds the enumeration cap {cap}",
            detail={"size": context.size, "cap": cap},
        )


def enumerate_group(context: GroupContext, cap=None) -> list[GroupElement]:
    """All d^(n+1) elements, phase first, in lexicographic order."""
    check_cap(context, cap)
    d, n = context.d, context.n
    return [
        GroupElement(values[0], tuple(values[1:]), context)
        for values in itertools.product(range(d), repeat=n + 1)
    ]


def commutation_table(elements: list[GroupElement], cap=None) -> np.ndarray:
    """Boolean matrix: entry (i, j) says whether elements i and j commute."""
    cap = settings.TABLE_CAP if cap is None else cap
    if len(elements) ** 2 > cap:
        raise CapExceededError(
            f"a commutation table over {len(elements)} elements exceeds the table cap {cap}",
            detail={"size": len(elements), "cap": cap},
        )
    if not elements:
        return np.zeros((0, 0), dtype=bool)
    ctx = elements[0].context
    vectors = np.array([g.vector for g in elements], dtype=np.int64)
    return (vectors @ ctx.mu.entries @ vectors.T) % ctx.d == 0


def _spanning_vectors(vectors: Iterable[tuple], d: int, n: int) -> list[tuple]:
    """A subset of vectors with the same Z_d-span, at most n*log2(d) long."""
    span = {(0,) * n}
    chosen = []
    for v in vectors:
        if v in span:
            continue
        chosen.append(v)
        span = {
            tuple((s_i + k * v_i) % d for s_i, v_i in zip(s, v))
            for s in span
            for k in range(d)
        }
    return chosen


def centre(elements: list[GroupElement]) -> list[GroupElement]:
    """
    Elements of the set that commute with every other member.

    Commuting is bilinear in the vectors, so it suffices to test against a
    spanning subset; over the full group this is the kernel of mu.
    """
    if not elements:
        return []
    ctx = elements[0].context
    basis = _spanning_vectors(dict.fromkeys(g.vector for g in elements), ctx.d, ctx.n)
    if not basis:
        return list(elements)
    twisted = np.array(basis, dtype=np.int64) @ ctx.mu.entries
    vectors = np.array([g.vector for g in elements], dtype=np.int64)
    commuting = ((vectors @ twisted.T) % ctx.d == 0).all(axis=1)
    return [g for g, ok in zip(elements, commuting) if ok]
