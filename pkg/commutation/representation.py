"""
Representation utilities for the commutation toolkit
Handles the map from H(mu) to clock/shift (Weyl) operators, their
Pauli-string text form and dense complex matrices
"""

from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import settings
from .algebra import CommutatorMatrix
from .group import GroupContext, GroupElement, enumerate_group, multiply
from .model import CapExceededError, CommutationError, ContextMismatchError, ParseError

logger = logging.getLogger(__name__)

PAULI_TOKEN = re.compile(r"(w|[XZ](\d+)|I)(?:\^(\d+))?")


@dataclass(frozen=True)
class WeylOperator:
    """
    w^phase X^shift Z^clock acting as |l> -> w^(phase + clock.l) |l + shift>.
    All exponents are integers mod d.
    """

    phase: int
    shift: tuple[int, ...]
    clock: tuple[int, ...]
    d: int

    @property
    def n(self) -> int:
        return len(self.shift)

    def key(self) -> tuple:
        return (self.phase, self.shift, self.clock)

    def to_json(self):
        return {"pauli": format_weyl(self), "phase": self.phase,
                "shift": list(self.shift), "clock": list(self.clock)}


def _weyl(phase, shift, clock, d) -> WeylOperator:
    return WeylOperator(int(phase) % d, tuple(int(v) % d for v in shift),
                        tuple(int(v) % d for v in clock), d)


def identity_operator(n: int, d: int) -> WeylOperator:
    return _weyl(0, [0] * n, [0] * n, d)


def scalar_operator(k: int, n: int, d: int) -> WeylOperator:
    return _weyl(k, [0] * n, [0] * n, d)


def shift_operator(i: int, n: int, d: int) -> WeylOperator:
    """X_i: |l> -> |l + e_i>."""
    shift = [0] * n
    shift[i] = 1
    return _weyl(0, shift, [0] * n, d)


def clock_operator(i: int, n: int, d: int) -> WeylOperator:
    """Z_i: |l> -> w^(l_i) |l>."""
    clock = [0] * n
    clock[i] = 1
    return _weyl(0, [0] * n, clock, d)


def _check_pair(p: WeylOperator, q: WeylOperator):
    if p.d != q.d or p.n != q.n:
        raise ContextMismatchError(
            f"operators on different spaces: (n={p.n}, d={p.d}) and (n={q.n}, d={q.d})"
        )


def compose_weyl(p: WeylOperator, q: WeylOperator) -> WeylOperator:
    """p after q."""
    _check_pair(p, q)
    d = p.d
    cross = sum(b * a for b, a in zip(p.clock, q.shift))
    return _weyl(
        p.phase + q.phase + cross,
        [a + b for a, b in zip(p.shift, q.shift)],
        [a + b for a, b in zip(p.clock, q.clock)],
        d,
    )


def weyl_equal(p: WeylOperator, q: WeylOperator) -> bool:
    _check_pair(p, q)
    return p.key() == q.key()


def represent(g: GroupElement) -> WeylOperator:
    """rho(k, v) = w^k X^v Z^(v^T lower)."""
    context = g.context
    clock = np.array(g.vector, dtype=np.int64) @ context.lower
    return _weyl(g.phase, g.vector, clock, context.d)


# ===== PAULI STRINGS =====

def format_weyl(p: WeylOperator) -> str:
    """
    Text form w^p X1^a1 Z1^b1 X2^a2 ... with trivial factors left out.
    The identity is written I.
    """
    parts = [f"w^{p.phase}"] if p.phase else []
    for i, (a, b) in enumerate(zip(p.shift, p.clock), start=1):
        if a:
            parts.append(f"X{i}" if a == 1 else f"X{i}^{a}")
        if b:
            parts.append(f"Z{i}" if b == 1 else f"Z{i}^{b}")
    return " ".join(parts) or "I"


def parse_pauli_string(text: str, n: int, d: int) -> WeylOperator:
    """Reads a product of w, X_i, Z_i and I factors, composing left to right."""
    result = identity_operator(n, d)
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = PAULI_TOKEN.match(text, pos)
        if not match:
            raise ParseError(f"unexpected {text[pos]!r} at position {pos} of Pauli string")
        head, index, exponent = match.group(1), match.group(2), match.group(3)
        power = int(exponent) if exponent else 1
        if head == "w":
            factor = scalar_operator(power, n, d)
        elif head == "I":
            factor = identity_operator(n, d)
        else:
            i = int(index) - 1
            if not 0 <= i < n:
                raise ParseError(f"qudit index {index} is outside 1..{n}")
            exponents = [0] * n
            exponents[i] = power
            if head[0] == "X":
                factor = _weyl(0, exponents, [0] * n, d)
            else:
                factor = _weyl(0, [0] * n, exponents, d)
        result = compose_weyl(result, factor)
        pos = match.end()
    return result


# ===== DENSE MATRICES =====

def roots_of_unity(d: int) -> np.ndarray:
    """w^k for k in Z_d, with components that should be 0 or +-1 snapped exactly."""
    roots = np.exp(2j * np.pi * np.arange(d) / d)
    real, imag = roots.real.copy(), roots.imag.copy()
    for part in (real, imag):
        for target in (0.0, 1.0, -1.0):
            part[np.abs(part - target) < 1e-12] = target
    return real + 1j * imag


def basis_labels(n: int, d: int) -> np.ndarray:
    """All of Z_d^n in lexicographic order, the first component most significant."""
    return np.array(list(itertools.product(range(d), repeat=n)), dtype=np.int64).reshape(-1, n)


def _check_dense_cap(n: int, d: int, cap=None):
    cap = settings.DENSE_CAP if cap is None else cap
    if d ** n > cap:
        raise CapExceededError(
            f"dense dimension d^n = {d ** n} exceeds the cap {cap}",
            detail={"dimension": d ** n, "cap": cap},
        )


def to_dense(p: WeylOperator, cap=None) -> np.ndarray:
    """d^n x d^n unitary; column l holds w^(phase + clock.l) in row l + shift."""
    n, d = p.n, p.d
    _check_dense_cap(n, d, cap)
    labels = basis_labels(n, d)
    weights = d ** np.arange(n - 1, -1, -1, dtype=np.int64)
    source = labels @ weights
    target = ((labels + np.array(p.shift, dtype=np.int64)) % d) @ weights
    phases = (p.phase + labels @ np.array(p.clock, dtype=np.int64)) % d
    matrix = np.zeros((d ** n, d ** n), dtype=complex)
    matrix[target, source] = roots_of_unity(d)[phases]
    return matrix


def dense_to_json(matrix: np.ndarray):
    return [[[float(z.real), float(z.imag)] for z in row] for row in matrix]


def is_generalized_permutation(matrix: np.ndarray, d: int, tolerance=None) -> bool:
    """One nonzero per row and column, each a d-th root of unity."""
    tolerance = settings.DENSE_TOLERANCE if tolerance is None else tolerance
    nonzero = np.abs(matrix) > tolerance
    if not (nonzero.sum(axis=0) == 1).all() or not (nonzero.sum(axis=1) == 1).all():
        return False
    values = matrix[nonzero]
    return bool(np.all(np.abs(values ** d - 1) < tolerance * d))


# ===== VERIFICATION =====

@dataclass
class RepresentationReport:
    mode: str
    pairs_checked: int = 0
    dense_pairs_checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self):
        return {"mode": self.mode, "ok": self.ok, "pairs_checked": self.pairs_checked,
                "dense_pairs_checked": self.dense_pairs_checked, "failures": self.failures}


def _record(report: RepresentationReport, message: str, limit: int = 20):
    if len(report.failures) < limit:
        report.failures.append(message)
    logger.warning("⚠ %s", message)


def verify_representation(mu: CommutatorMatrix, mode: str = "exhaustive",
                          samples: int = 200, dense_samples: int = 32,
                          rng: Optional[np.random.Generator] = None, cap=None) -> RepresentationReport:
    """
    Checks that rho is an injective homomorphism preserving scalars.

    exhaustive compares rho(g) rho(h) with rho(gh) for every pair; sampled
    draws random pairs. When d^n is within the dense cap the dense images
    must be distinct and multiply like the group: every image and pair for
    exhaustive runs on groups within DENSE_EXHAUSTIVE_CAP, random subsets
    otherwise.
    """
    if mode not in ("exhaustive", "sampled"):
        raise CommutationError(f"unknown mode {mode!r}")
    rng = rng if rng is not None else np.random.default_rng(0)
    context = GroupContext(mu)
    elements = enumerate_group(context, cap)
    images = [represent(g) for g in elements]
    report = RepresentationReport(mode)

    for k in range(context.d):
        if not weyl_equal(represent(context.scalar(k)), scalar_operator(k, context.n, context.d)):
            _record(report, f"scalar {k} is not sent to w^{k}")

    if len({p.key() for p in images}) != len(images):
        _record(report, "two distinct elements share an image")

    if mode == "exhaustive":
        pairs = itertools.product(range(len(elements)), repeat=2)
    else:
        pairs = ((int(i), int(j)) for i, j in rng.integers(0, len(elements), size=(samples, 2)))
    for i, j in pairs:
        report.pairs_checked += 1
        expected = represent(multiply(elements[i], elements[j]))
        if not weyl_equal(compose_weyl(images[i], images[j]), expected):
            _record(report, f"rho(g) rho(h) != rho(gh) for g={elements[i].to_json()}, h={elements[j].to_json()}")

    if context.d ** context.n <= settings.DENSE_CAP:
        tolerance = settings.DENSE_TOLERANCE
        if mode == "exhaustive" and len(elements) <= settings.DENSE_EXHAUSTIVE_CAP:
            chosen = range(len(elements))
            dense_pairs = itertools.product(range(len(elements)), repeat=2)
        else:
            chosen = rng.choice(len(elements), size=min(dense_samples, len(elements)), replace=False)
            dense_pairs = ((int(i), int(j)) for i, j in rng.integers(0, len(elements), size=(dense_samples, 2)))
        matrices: dict[int, np.ndarray] = {}

        def dense_of(i: int) -> np.ndarray:
            if i not in matrices:
                matrices[i] = to_dense(images[i])
            return matrices[i]

        distinct = {np.round(dense_of(int(i)), 9).tobytes() for i in chosen}
        if len(distinct) != len(chosen):
            _record(report, "two distinct elements share a dense image")
        position = {g: i for i, g in enumerate(elements)}
        for i, j in dense_pairs:
            report.dense_pairs_checked += 1
            product = dense_of(i) @ dense_of(j)
            expected = dense_of(position[multiply(elements[i], elements[j])])
            if np.abs(product - expected).max() > tolerance:
                _record(report, f"dense product disagrees for g={elements[i].to_json()}, h={elements[j].to_json()}")
    logger.info("✓ Checked %d symbolic and %d dense pairs", report.pairs_checked, report.dense_pairs_checked)
    return report
