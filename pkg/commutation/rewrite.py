"""
Word rewriting utilities for the commutation toolkit
Handles the word grammar, the oriented rewrite system, normal forms,
the termination measure and evaluated inversion sums
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterator, Optional, Union

from . import settings
from .algebra import CommutatorMatrix, bilinear, lower_part
from .history import log_event
from .model import ParseError

logger = logging.getLogger(__name__)

PHASE_TOKEN = re.compile(r"J(\d+)")
EXPONENT_TOKEN = re.compile(r"\^(\d+)")
IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True, slots=True)
class Generator:
    index: int


@dataclass(frozen=True, slots=True)
class Phase:
    value: int


Letter = Union[Generator, Phase]
Word = tuple  # tuple[Letter, ...]


class RewriteRule(str, Enum):
    SWAP = "xy->J yx"
    DROP_PHASE = "J0->1"
    MERGE_PHASES = "JJ->J"
    LIFT_PHASE = "xJ->Jx"
    CANCEL_POWER = "x^d->1"


@dataclass(frozen=True)
class NormalForm:
    """J_k x1^k1 ... xn^kn, stored as (k, (k1, ..., kn))."""

    phase: int
    exponents: tuple[int, ...]

    def to_word(self) -> Word:
        letters = [Phase(self.phase)] if self.phase else []
        for index, count in enumerate(self.exponents):
            letters.extend([Generator(index)] * count)
        return tuple(letters)

    def is_identity(self) -> bool:
        return not self.phase and not any(self.exponents)

    def to_json(self):
        return {"phase": self.phase, "exponents": list(self.exponents)}


@dataclass(frozen=True, order=True)
class InversionMeasure:
    x_inversions: int
    j_inversions: int
    length: int


@lru_cache(maxsize=64)
def _lower_rows(mu: CommutatorMatrix) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(v) for v in row) for row in lower_part(mu))


# ===== GRAMMAR =====

def read_generator(text: str, pos: int, mu: CommutatorMatrix) -> tuple[int, int, int]:
    """
    Reads one generator item (label or label^k) starting at pos.
    Labels are matched longest first so "ab" reads as a, b.

    Returns:
        (generator index, exponent, position after the item)
    """
    best = None
    for index, label in enumerate(mu.labels):
        if text.startswith(label, pos) and (best is None or len(label) > len(mu.labels[best])):
            best = index
    if best is None:
        ident = IDENTIFIER.match(text, pos)
        token = ident.group(0) if ident else text[pos:pos + 1]
        raise ParseError(f"unknown label {token!r} at position {pos}")
    pos += len(mu.labels[best])
    exponent = 1
    if text.startswith("^", pos):
        match = EXPONENT_TOKEN.match(text, pos)
        if not match:
            raise ParseError(f"malformed exponent at position {pos}")
        digits = match.group(1).lstrip("0") or "0"
        if len(digits) > len(str(settings.MAX_EXPONENT)) or int(digits) > settings.MAX_EXPONENT:
            raise ParseError(f"exponent {digits} at position {pos} exceeds {settings.MAX_EXPONENT}")
        exponent = int(digits)
        pos = match.end()
    return best, exponent, pos


def parse_word(text: str, mu: CommutatorMatrix) -> Word:
    """Parses "J1 a b^2" style text into a word over mu's generators."""
    letters = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = PHASE_TOKEN.match(text, pos)
        if match:
            letters.append(Phase(int(match.group(1)) % mu.d))
            pos = match.end()
            continue
        index, exponent, pos = read_generator(text, pos, mu)
        letters.extend([Generator(index)] * exponent)
    return tuple(letters)


def format_word(word: Word, mu: CommutatorMatrix) -> str:
    """Inverse of parse_word; runs of one generator collapse into powers."""
    parts = []
    i = 0
    while i < len(word):
        letter = word[i]
        if isinstance(letter, Phase):
            parts.append(f"J{letter.value}")
            i += 1
            continue
        j = i
        while j < len(word) and word[j] == letter:
            j += 1
        label = mu.labels[letter.index]
        parts.append(label if j - i == 1 else f"{label}^{j - i}")
        i = j
    return " ".join(parts)


def format_normal_form(nf: NormalForm, mu: CommutatorMatrix) -> str:
    return format_word(nf.to_word(), mu) or "1"


# ===== REWRITE SYSTEM =====

def _redexes(word: Word, mu: CommutatorMatrix) -> Iterator[tuple[int, int, Word, RewriteRule]]:
    # leftmost first; at one position the shorter (innermost) redex first
    d = mu.d
    lower = _lower_rows(mu)
    size = len(word)
    for i, letter in enumerate(word):
        nxt = word[i + 1] if i + 1 < size else None
        if isinstance(letter, Phase):
            if letter.value % d == 0:
                yield i, i + 1, (), RewriteRule.DROP_PHASE
            if isinstance(nxt, Phase):
                yield i, i + 2, (Phase((letter.value + nxt.value) % d),), RewriteRule.MERGE_PHASES
            continue
        if isinstance(nxt, Phase):
            yield i, i + 2, (nxt, letter), RewriteRule.LIFT_PHASE
        elif isinstance(nxt, Generator) and letter.index > nxt.index:
            cost = lower[letter.index][nxt.index]
            yield i, i + 2, (Phase(cost), nxt, letter), RewriteRule.SWAP
        if i + d <= size and all(word[i + t] == letter for t in range(1, d)):
            yield i, i + d, (), RewriteRule.CANCEL_POWER


def rewrite_steps(word: Word, mu: CommutatorMatrix) -> list[tuple[Word, RewriteRule]]:
    """Every single-step rewrite of word, one per redex."""
    return [
        (word[:start] + replacement + word[end:], rule)
        for start, end, replacement, rule in _redexes(word, mu)
    ]


def apply_step(word: Word, mu: CommutatorMatrix) -> Optional[tuple[Word, RewriteRule]]:
    """Rewrites the leftmost-innermost redex, or returns None on a normal word."""
    for start, end, replacement, rule in _redexes(word, mu):
        return word[:start] + replacement + word[end:], rule
    return None


def reduce_word(word: Word, mu: CommutatorMatrix, trace: Optional[list] = None) -> Word:
    """Runs apply_step to its fixpoint, logging each step into trace when given."""
    while True:
        step = apply_step(word, mu)
        if step is None:
            return word
        after, rule = step
        if trace is not None:
            log_event(trace, rule.value, format_word(word, mu), format_word(after, mu))
        word = after


def decode_normal_word(word: Word, mu: CommutatorMatrix) -> NormalForm:
    """Reads (k, k-vector) off a word that is already normal."""
    phase = 0
    exponents = [0] * mu.n
    for letter in word:
        if isinstance(letter, Phase):
            phase += letter.value
        else:
            exponents[letter.index] += 1
    return NormalForm(phase % mu.d, tuple(e % mu.d for e in exponents))


def normalize(word: Word, mu: CommutatorMatrix) -> NormalForm:
    """
    Normal form of a word.

    Insertion strategy of the rewrite system: each generator is swapped
    left into an already sorted prefix and the phases it produces are
    lifted straight to the front, so the cost is O(len * n).
    """
    d = mu.d
    n = mu.n
    lower = _lower_rows(mu)
    phase = 0
    counts = [0] * n
    for letter in word:
        if isinstance(letter, Phase):
            phase += letter.value
            continue
        i = letter.index
        for j in range(i + 1, n):
            if counts[j]:
                phase += counts[j] * lower[j][i]
        counts[i] = (counts[i] + 1) % d
    return NormalForm(phase % d, tuple(counts))


def words_equal(u: Word, v: Word, mu: CommutatorMatrix) -> bool:
    return normalize(u, mu) == normalize(v, mu)


def is_normal(word: Word, mu: CommutatorMatrix) -> bool:
    return apply_step(word, mu) is None


def inversion_measure(word: Word) -> InversionMeasure:
    """(X-inversions, J-inversions, length); strictly drops with every rewrite."""
    seen: dict[int, int] = {}
    generators_seen = 0
    x_inversions = 0
    j_inversions = 0
    for letter in word:
        if isinstance(letter, Phase):
            j_inversions += generators_seen
            continue
        x_inversions += sum(c for index, c in seen.items() if index > letter.index)
        seen[letter.index] = seen.get(letter.index, 0) + 1
        generators_seen += 1
    return InversionMeasure(x_inversions, j_inversions, len(word))


# ===== INVERSION SUMS =====

def is_generator_word(word: Word) -> bool:
    return all(isinstance(letter, Generator) for letter in word)


def _require_generators(word: Word):
    if not is_generator_word(word):
        raise ParseError("inversion sums need a word without phase letters")


def multiplicities(word: Word, n: int) -> list[int]:
    """Raw occurrence count of each generator."""
    counts = [0] * n
    for letter in word:
        if isinstance(letter, Generator):
            counts[letter.index] += 1
    return counts


def generator_vector(word: Word, mu: CommutatorMatrix) -> tuple[int, ...]:
    return tuple(c % mu.d for c in multiplicities(word, mu.n))


def reverse_word(word: Word) -> Word:
    return tuple(reversed(word))


def inversion_sum(word: Word, mu: CommutatorMatrix) -> int:
    """Sum of mu(x, y) over every occurrence of x before y with x > y."""
    _require_generators(word)
    lower = _lower_rows(mu)
    later = [0] * mu.n
    total = 0
    for letter in reversed(word):
        x = letter.index
        row = lower[x]
        total += sum(row[y] * later[y] for y in range(x) if later[y])
        later[x] += 1
    return total % mu.d


def inversion_sum_between(s: Word, t: Word, mu: CommutatorMatrix) -> int:
    """Inversions with the larger generator in s and the smaller in t."""
    _require_generators(s)
    _require_generators(t)
    return bilinear(lower_part(mu), multiplicities(s, mu.n), multiplicities(t, mu.n), mu.d)


def formal_commutator(s: Word, t: Word, mu: CommutatorMatrix) -> int:
    return (inversion_sum_between(s, t, mu) - inversion_sum_between(t, s, mu)) % mu.d
