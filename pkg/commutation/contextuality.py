"""
Contextuality utilities for the commutation toolkit
Handles bracketed words, the compatible monoids C(mu) and C'(mu),
value assignments, the compatibility graph, the Z_2 classification,
padding and empirical models over maximal cliques
"""

from __future__ import annotations

import itertools
import json
import logging
import os
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterator, Optional, Union

import networkx as nx
import numpy as np

from .algebra import CommutatorMatrix, tensor_double
from .group import (
    GroupContext,
    GroupElement,
    check_cap,
    commutation_table,
    evaluate,
    multiply,
    order,
    to_normal_form,
)
from .json_utils import matrix_from_json
from .model import (
    CertificateError,
    CommutationError,
    ConsistencyError,
    MatrixError,
    ParseError,
)
from .rewrite import (
    Generator,
    Word,
    format_normal_form,
    format_word,
    multiplicities,
    normalize,
    parse_word,
    read_generator,
)

logger = logging.getLogger(__name__)


def load_fixtures():
    """Load the built-in worked examples from JSON file."""
    fixtures_file = os.path.join(os.path.dirname(__file__), 'fixtures.json')
    with open(fixtures_file, 'r', encoding='utf-8') as f:
        return json.load(f)


def fixture_matrix(name: str) -> CommutatorMatrix:
    return matrix_from_json(load_fixtures()["matrices"][name])


def _context(mu) -> GroupContext:
    return mu if isinstance(mu, GroupContext) else GroupContext(mu)


# ===== BRACKETINGS =====

@dataclass(frozen=True)
class Leaf:
    index: int


@dataclass(frozen=True)
class Pair:
    left: "Bracketing"
    right: "Bracketing"


Bracketing = Union[Leaf, Pair]


def right_nested(items: list) -> Bracketing:
    """(b1 (b2 (... bm))) for m >= 1 items."""
    if not items:
        raise ParseError("cannot bracket an empty sequence")
    result = items[-1]
    for item in reversed(items[:-1]):
        result = Pair(item, result)
    return result


def power_bracketing(bracketing: Bracketing, m: int) -> Bracketing:
    return right_nested([bracketing] * m)


def flatten(bracketing: Bracketing) -> Word:
    """The word a bracketing brackets, read left to right."""
    letters = []
    stack = [bracketing]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            letters.append(Generator(node.index))
        else:
            stack.append(node.right)
            stack.append(node.left)
    return tuple(letters)


def pair_nodes(bracketing: Bracketing) -> Iterator[Pair]:
    stack = [bracketing]
    while stack:
        node = stack.pop()
        if isinstance(node, Pair):
            yield node
            stack.append(node.right)
            stack.append(node.left)


def _group_closed(groups: list, pos: int) -> Bracketing:
    items = groups.pop()
    if not items:
        raise ParseError(f"empty bracket group before position {pos}")
    return right_nested(items)


def parse_bracketing(text: str, mu: CommutatorMatrix) -> Bracketing:
    """
    Parses bracketing text such as "((ab)(dc))((ca)(bd))".

    A group of one item is that item, two items make a pair and longer
    groups nest to the right. x^k stands for k right-nested copies of x.
    """
    # one item list per open group; closers[i] ends groups[i]
    groups: list[list] = [[]]
    closers: list[Optional[str]] = [None]
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            if closers[-1]:
                raise ParseError(f"missing {closers[-1]!r} at end of bracketing")
            break
        ch = text[pos]
        if ch in ")]":
            if ch != closers[-1]:
                raise ParseError(f"unexpected {ch!r} at position {pos}")
            pos += 1
            closers.pop()
            inner = _group_closed(groups, pos)
            groups[-1].append(inner)
            continue
        if ch in "([":
            groups.append([])
            closers.append(")" if ch == "(" else "]")
            pos += 1
            continue
        index, exponent, pos = read_generator(text, pos, mu)
        if exponent == 0:
            raise ParseError(f"zero exponent at position {pos}")
        groups[-1].append(power_bracketing(Leaf(index), exponent))
    return _group_closed(groups, pos)


def format_bracketing(bracketing: Bracketing, mu: CommutatorMatrix) -> str:
    parts = []
    stack = [bracketing]
    while stack:
        node = stack.pop()
        if isinstance(node, str):
            parts.append(node)
        elif isinstance(node, Leaf):
            parts.append(mu.labels[node.index])
        else:
            stack.extend((")", node.right, " ", node.left, "("))
    return "".join(parts)


def _first_failed_pair(bracketing: Bracketing, context: GroupContext):
    # post-order walk returning (vector, first non-commuting pair)
    d, n = context.d, context.n
    vectors = []
    stack = [(bracketing, False)]
    while stack:
        node, expanded = stack.pop()
        if isinstance(node, Leaf):
            vector = [0] * n
            vector[node.index] = 1
            vectors.append(vector)
        elif not expanded:
            stack.append((node, True))
            stack.append((node.right, False))
            stack.append((node.left, False))
        else:
            right = vectors.pop()
            left = vectors.pop()
            if context.form(left, right):
                return None, node
            vectors.append([(a + b) % d for a, b in zip(left, right)])
    return vectors[0], None


def check_witness(bracketing: Bracketing, mu) -> bool:
    """True iff the two halves of every pair node commute."""
    _, failure = _first_failed_pair(bracketing, _context(mu))
    return failure is None


# ===== CONTEXTUAL WORDS =====

@dataclass(frozen=True)
class WordCheck:
    """Outcome of verify_contextual_word: a phase, or the reason there is none."""

    phase: Optional[int]
    reason: Optional[str] = None

    def __bool__(self):
        return self.phase is not None

    def to_json(self):
        if self.phase is not None:
            return {"contextual": True, "phase": self.phase}
        return {"contextual": False, "reason": self.reason}


@dataclass(frozen=True)
class ContextualWord:
    word: Word
    bracketing: Bracketing
    phase: int

    def __len__(self):
        return len(self.word)

    def to_json(self, mu: CommutatorMatrix):
        return {
            "word": format_word(self.word, mu),
            "bracketing": format_bracketing(self.bracketing, mu),
            "phase": self.phase,
        }


def verify_contextual_word(word: Optional[Word], bracketing: Bracketing, mu) -> WordCheck:
    """
    Checks the three conditions on a bracketed word, in order:
    multiplicities divisible by d, commuting halves, nonzero global phase.
    """
    context = _context(mu)
    flat = flatten(bracketing)
    if word is None:
        word = flat
    elif tuple(word) != flat:
        raise ParseError("bracketing does not flatten to the given word")

    labels = context.mu.labels
    for index, count in enumerate(multiplicities(word, context.n)):
        if count % context.d:
            return WordCheck(None, f"multiplicity of {labels[index]} is {count}, not a multiple of {context.d}")

    _, failure = _first_failed_pair(bracketing, context)
    if failure is not None:
        return WordCheck(None, f"halves of {format_bracketing(failure, context.mu)} do not commute")

    nf = normalize(word, context.mu)
    if nf.phase == 0:
        return WordCheck(None, "global phase is 0")
    return WordCheck(nf.phase)


def certify(bracketing: Bracketing, mu) -> ContextualWord:
    """Verifies a bracketing the toolkit built itself and wraps it."""
    check = verify_contextual_word(None, bracketing, mu)
    if not check:
        raise CertificateError(f"constructed word is not contextual: {check.reason}")
    return ContextualWord(flatten(bracketing), bracketing, check.phase)


# ===== COMPATIBLE MONOIDS =====

class Seed(str, Enum):
    WITH_SCALARS = "with_scalars"
    GENERATORS_ONLY = "generators_only"


@dataclass(frozen=True)
class Provenance:
    """The element equals J_phase times the product bracketed by bracketing."""

    phase: int
    bracketing: Optional[Bracketing]
    length: int


@dataclass
class CompatibleMonoid:
    context: GroupContext
    with_scalars: bool
    witnesses: dict = field(default_factory=dict)

    @property
    def elements(self) -> list[GroupElement]:
        return list(self.witnesses)

    def vectors(self) -> list[tuple[int, ...]]:
        return list(dict.fromkeys(g.vector for g in self.witnesses))

    def witness(self, g: GroupElement) -> Provenance:
        return self.witnesses[g]

    def __contains__(self, g):
        return g in self.witnesses

    def __len__(self):
        return len(self.witnesses)

    def __iter__(self):
        return iter(self.witnesses)


def _close(context: GroupContext, max_len: Optional[int] = None, stop_on_phase: bool = False):
    """
    Closes the generators under products of commuting elements.

    Elements are discovered in order of witness length: level L combines
    every commuting pair whose lengths add up to L, so each element keeps
    its shortest provenance. Runs stop once L passes twice the longest
    level found, or max_len when that comes first.
    """
    d, n = context.d, context.n
    entries = context.mu.entries
    identity = context.identity()
    found = {identity: Provenance(0, None, 0)}
    levels: dict[int, list[GroupElement]] = {1: []}
    for i in range(n):
        g = context.generator(i)
        found[g] = Provenance(0, Leaf(i), 1)
        levels[1].append(g)
    level_vectors = {1: np.array([g.vector for g in levels[1]], dtype=np.int64)}
    longest = 1

    length = 2
    while length <= (2 * longest if max_len is None else min(max_len, 2 * longest)):
        fresh = []
        for l1 in range(1, length // 2 + 1):
            l2 = length - l1
            left, right = levels.get(l1), levels.get(l2)
            if not left or not right:
                continue
            right_vectors = level_vectors[l2]
            for ia, a in enumerate(left):
                twisted = entries @ np.array(a.vector, dtype=np.int64)
                mask = (right_vectors @ twisted) % d == 0
                start = ia if l1 == l2 else 0
                for ib in np.nonzero(mask)[0]:
                    if ib < start:
                        continue
                    b = right[ib]
                    product = multiply(a, b)
                    if product in found:
                        continue
                    found[product] = Provenance(0, Pair(found[a].bracketing, found[b].bracketing), length)
                    fresh.append(product)
                    if stop_on_phase and product.is_scalar and product.phase:
                        return found, product
        if fresh:
            levels[length] = fresh
            level_vectors[length] = np.array([g.vector for g in fresh], dtype=np.int64)
            longest = length
        length += 1
    return found, None


def _add_scalars(prime: CompatibleMonoid) -> CompatibleMonoid:
    context = prime.context
    d = context.d
    witnesses = {}
    for g, prov in prime.witnesses.items():
        for k in range(d):
            h = GroupElement((g.phase + k) % d, g.vector, context)
            if h not in witnesses:
                witnesses[h] = Provenance((prov.phase + k) % d, prov.bracketing, prov.length)
    return CompatibleMonoid(context, True, witnesses)


def compatible_submonoid(mu, seed=Seed.WITH_SCALARS, cap=None) -> CompatibleMonoid:
    """
    C(mu) (with_scalars) or C'(mu) (generators_only), each element
    carrying the first provenance bracketing that reached it.
    """
    context = _context(mu)
    check_cap(context, cap)
    found, _ = _close(context)
    prime = CompatibleMonoid(context, False, found)
    logger.info("✓ Closed %d elements of C'(mu) over Z_%d", len(prime), context.d)
    if Seed(seed) is Seed.GENERATORS_ONLY:
        return prime
    return _add_scalars(prime)


def search_contextual_word(mu, max_len: int) -> Optional[ContextualWord]:
    """
    Breadth-first search by witness length for a contextual word of
    length at most max_len. None means the bound was exhausted, which
    proves nothing about longer words.
    """
    if max_len < 1:
        raise CommutationError(f"max_len must be at least 1, got {max_len}")
    context = _context(mu)
    found, hit = _close(context, max_len=max_len, stop_on_phase=True)
    if hit is None:
        logger.info("🔍 No contextual word up to length %d (%d elements seen)", max_len, len(found))
        return None
    return certify(found[hit].bracketing, context)


# ===== VALUE ASSIGNMENTS =====

@dataclass(frozen=True)
class CanonicalScalar:
    """s(v): the unique phase of the C'(mu) element with vector v."""

    context: GroupContext
    offsets: dict

    def __call__(self, vector) -> int:
        return self.offsets[tuple(vector)]


@dataclass(frozen=True)
class ValueAssignment:
    """
    Left splitting l(k, v) = k - s(v) on C(mu).

    offsets maps each vector of the domain to s(v); every left splitting
    has this shape because scalars are central.
    """

    context: GroupContext
    offsets: dict

    def __call__(self, g: GroupElement) -> int:
        try:
            return (g.phase - self.offsets[g.vector]) % self.context.d
        except KeyError:
            raise ConsistencyError(f"element {g.to_json()} lies outside the assignment's domain")

    def domain(self) -> Iterator[GroupElement]:
        for vector in self.offsets:
            for k in range(self.context.d):
                yield GroupElement(k, vector, self.context)

    def to_json(self):
        return [dict(g.to_json(), value=self(g)) for g in self.domain()]


def _conflict_word(g: GroupElement, h: GroupElement, prime: CompatibleMonoid) -> ContextualWord:
    # g and h share a vector; g . h^(o(h)-1) = g h^-1 is a nonzero scalar
    g_bracketing = prime.witness(g).bracketing
    h_bracketing = prime.witness(h).bracketing
    if h_bracketing is None:
        return certify(g_bracketing, prime.context)
    tail = power_bracketing(h_bracketing, order(h) - 1)
    return certify(Pair(g_bracketing, tail), prime.context)


def _canonical(prime: CompatibleMonoid) -> Union[CanonicalScalar, ContextualWord]:
    first: dict = {}
    for g in prime.witnesses:
        h = first.get(g.vector)
        if h is None:
            first[g.vector] = g
            continue
        logger.info("⚠ Scalar conflict on vector %s: phases %d and %d", list(g.vector), h.phase, g.phase)
        return _conflict_word(g, h, prime)
    return CanonicalScalar(prime.context, {v: g.phase for v, g in first.items()})


def canonical_scalar_assignment(mu, cap=None) -> Union[CanonicalScalar, ContextualWord]:
    prime = compatible_submonoid(mu, Seed.GENERATORS_ONLY, cap)
    return _canonical(prime)


def _encoder(context: GroupContext) -> np.ndarray:
    return context.d ** np.arange(context.n, dtype=np.int64)


def validate_assignment(assignment: ValueAssignment, monoid: CompatibleMonoid, limit: int = 5) -> list[str]:
    """
    Exhaustive check over the monoid: scalars map to themselves and every
    commuting pair is sent to the sum of its values. Returns the first
    few failures, empty when the assignment is a left splitting.
    """
    context = monoid.context
    d = context.d
    elements = monoid.elements
    failures = []
    for g in elements:
        if g.vector not in assignment.offsets:
            failures.append(f"element {g.to_json()} is outside the domain")
        elif g.is_scalar and assignment(g) != g.phase:
            failures.append(f"scalar {g.phase} is sent to {assignment(g)}")
        if len(failures) >= limit:
            return failures
    if failures:
        return failures

    encode = _encoder(context)
    table = np.full(d ** context.n, -1, dtype=np.int64)
    for vector, offset in assignment.offsets.items():
        table[int(np.dot(vector, encode))] = offset

    phases = np.array([g.phase for g in elements], dtype=np.int64)
    vectors = np.array([g.vector for g in elements], dtype=np.int64)
    values = np.array([assignment(g) for g in elements], dtype=np.int64)
    entries = context.mu.entries
    lower = context.lower
    for i, g in enumerate(elements):
        v = vectors[i]
        mask = (vectors @ (entries.T @ v)) % d == 0
        others = vectors[mask]
        sums = (others + v) % d
        offsets = table[sums @ encode]
        outside = np.nonzero(offsets < 0)[0]
        if outside.size:
            j = np.nonzero(mask)[0][outside[0]]
            failures.append(f"product of {g.to_json()} and {elements[j].to_json()} leaves the domain")
            break
        product_phase = (phases[i] + phases[mask] + (others @ (lower.T @ v))) % d
        got = (product_phase - offsets) % d
        expected = (values[i] + values[mask]) % d
        bad = np.nonzero(got != expected)[0]
        if bad.size:
            j = np.nonzero(mask)[0][bad[0]]
            failures.append(f"value of {g.to_json()} times {elements[j].to_json()} is not additive")
            if len(failures) >= limit:
                break
    return failures


def value_assignment(mu, cap=None) -> Union[ValueAssignment, ContextualWord]:
    """l(k, v) = k - s(v) on C(mu), or the contextual word that blocks it."""
    prime = compatible_submonoid(mu, Seed.GENERATORS_ONLY, cap)
    canonical = _canonical(prime)
    if isinstance(canonical, ContextualWord):
        return canonical
    assignment = ValueAssignment(prime.context, dict(canonical.offsets))
    failures = validate_assignment(assignment, _add_scalars(prime))
    if failures:
        raise CertificateError(f"value assignment failed validation: {failures[0]}", detail=failures)
    return assignment


def _splittings(context: GroupContext, vectors: list) -> Iterator[dict]:
    """
    Every s on the given vectors with s(0) = 0 and
    s(v + w) = s(v) + s(w) + lower(v, w) for commuting v, w whose sum is
    also listed. Backtracking in the order given.
    """
    d = context.d
    zero = (0,) * context.n
    listed = set(vectors)
    rest = [v for v in vectors if v != zero]
    assigned = {zero: 0} if zero in listed else {}

    def consistent(v):
        for w in list(assigned):
            if context.form(v, w):
                continue
            u = tuple((a + b) % d for a, b in zip(v, w))
            if u in assigned and assigned[u] != (assigned[v] + assigned[w] + context.lower_form(v, w)) % d:
                return False
            x = tuple((a - b) % d for a, b in zip(v, w))
            if x in assigned and not context.form(w, x):
                if assigned[v] != (assigned[w] + assigned[x] + context.lower_form(w, x)) % d:
                    return False
        return True

    def extend(position):
        if position == len(rest):
            yield dict(assigned)
            return
        v = rest[position]
        for value in range(d):
            assigned[v] = value
            if consistent(v):
                yield from extend(position + 1)
            del assigned[v]

    yield from extend(0)


def find_left_splitting(monoid: CompatibleMonoid) -> Optional[ValueAssignment]:
    """Exhaustive search for any scalar-splitting homomorphism on the monoid."""
    for offsets in _splittings(monoid.context, monoid.vectors()):
        return ValueAssignment(monoid.context, offsets)
    return None


# ===== COMPATIBILITY GRAPH =====

class PatternGraph(str, Enum):
    FORK = "fork"      # a-b, a-c
    PATH = "path"      # a-b, a-c, c-d
    SQUARE = "square"  # a-b, a-c, b-d, c-d


# worked example whose generators realise each shape
PATTERN_TEMPLATES = {
    PatternGraph.SQUARE: "mu1",
    PatternGraph.PATH: "mu2",
    PatternGraph.FORK: "mu3",
}


@dataclass(frozen=True)
class Pattern:
    kind: PatternGraph
    vertices: tuple  # (a, b, c, d)


@dataclass
class CompatibilityGraph:
    monoid: CompatibleMonoid
    graph: nx.Graph
    vertices: list
    central: list


def _graph_of(monoid: CompatibleMonoid) -> CompatibilityGraph:
    elements = monoid.elements
    table = commutation_table(elements)
    is_central = table.all(axis=1) if len(elements) else np.zeros(0, dtype=bool)
    keep = [i for i in range(len(elements)) if not is_central[i]]
    graph = nx.Graph()
    graph.add_nodes_from(elements[i] for i in keep)
    for x, i in enumerate(keep):
        for j in keep[x + 1:]:
            if table[i, j]:
                graph.add_edge(elements[i], elements[j])
    central = [elements[i] for i in range(len(elements)) if is_central[i]]
    return CompatibilityGraph(monoid, graph, [elements[i] for i in keep], central)


def compatibility_graph(mu, cap=None) -> CompatibilityGraph:
    """Non-central elements of C(mu), joined when they commute."""
    monoid = mu if isinstance(mu, CompatibleMonoid) else compatible_submonoid(mu, Seed.WITH_SCALARS, cap)
    return _graph_of(monoid)


def is_cluster_graph(graph: CompatibilityGraph) -> bool:
    """Every connected component is complete."""
    for component in nx.connected_components(graph.graph):
        size = len(component)
        if graph.graph.subgraph(component).number_of_edges() != size * (size - 1) // 2:
            return False
    return True


def find_pattern(graph: CompatibilityGraph) -> Optional[Pattern]:
    """
    Looks for a-b, a-c with b, c apart and some d apart from a, scanning
    vertices in discovery order so generators are tried first.
    """
    g = graph.graph
    position = {v: i for i, v in enumerate(graph.vertices)}
    for a in graph.vertices:
        apart = [v for v in graph.vertices if v != a and not g.has_edge(a, v)]
        if not apart:
            continue
        neighbours = sorted(g[a], key=position.__getitem__)
        for ib, b in enumerate(neighbours):
            for c in neighbours[ib + 1:]:
                if g.has_edge(b, c):
                    continue
                d = apart[0]
                bd, cd = g.has_edge(b, d), g.has_edge(c, d)
                if bd and cd:
                    return Pattern(PatternGraph.SQUARE, (a, b, c, d))
                if cd:
                    return Pattern(PatternGraph.PATH, (a, b, c, d))
                if bd:
                    return Pattern(PatternGraph.PATH, (a, c, b, d))
                return Pattern(PatternGraph.FORK, (a, b, c, d))
    return None


def to_dot(graph: CompatibilityGraph) -> str:
    mu = graph.monoid.context.mu
    names = {v: format_normal_form(to_normal_form(v), mu) for v in graph.vertices}
    lines = ["graph compatibility {"]
    for v in graph.vertices:
        lines.append(f'  "{names[v]}";')
    position = {v: i for i, v in enumerate(graph.vertices)}
    edges = sorted((tuple(sorted((position[u], position[v]))) for u, v in graph.graph.edges()))
    for i, j in edges:
        lines.append(f'  "{names[graph.vertices[i]]}" -- "{names[graph.vertices[j]]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ===== Z_2 CLASSIFICATION =====

@dataclass(frozen=True)
class Contextual:
    witness: ContextualWord
    pattern: Optional[Pattern] = None

    def to_json(self, mu: CommutatorMatrix):
        out = {"verdict": "contextual"}
        if self.pattern is not None:
            out["pattern"] = self.pattern.kind.value
        out["witness"] = self.witness.to_json(mu)
        return out


@dataclass(frozen=True)
class NonContextual:
    assignment: Optional[ValueAssignment] = None

    def to_json(self, mu: CommutatorMatrix):
        out = {"verdict": "non-contextual"}
        if self.assignment is not None:
            out["assignment"] = self.assignment.to_json()
        return out


@lru_cache(maxsize=None)
def template_bracketing(kind: PatternGraph) -> Bracketing:
    name = PATTERN_TEMPLATES[kind]
    return parse_bracketing(load_fixtures()["words"][name]["bracketing"], fixture_matrix(name))


def _substitute(template: Bracketing, replacements: list) -> Bracketing:
    built = []
    stack = [(template, False)]
    while stack:
        node, expanded = stack.pop()
        if isinstance(node, Leaf):
            built.append(replacements[node.index])
        elif not expanded:
            stack.extend(((node, True), (node.right, False), (node.left, False)))
        else:
            right = built.pop()
            built[-1] = Pair(built[-1], right)
    return built[0]


def classify_z2(mu: CommutatorMatrix, cap=None) -> Union[Contextual, NonContextual]:
    """
    Decides contextuality over Z_2 with a certificate either way.
    A cluster compatibility graph yields a value assignment; otherwise a
    pattern quadruple is substituted into the matching template word.
    """
    if mu.d != 2:
        raise MatrixError(f"classify_z2 needs a matrix over Z_2, got Z_{mu.d}")
    graph = compatibility_graph(mu, cap)
    if is_cluster_graph(graph):
        result = value_assignment(mu, cap)
        if isinstance(result, ContextualWord):
            return Contextual(result)
        return NonContextual(result)

    pattern = find_pattern(graph)
    monoid = graph.monoid
    brackets = [monoid.witness(v).bracketing for v in pattern.vertices]
    logger.info("🔍 Found %s pattern", pattern.kind.value)

    # an element squaring to a nonzero phase is already a witness
    for bracketing in brackets:
        square = Pair(bracketing, bracketing)
        if normalize(flatten(square), mu).phase:
            return Contextual(certify(square, mu), pattern)

    substituted = _substitute(template_bracketing(pattern.kind), brackets)
    return Contextual(certify(substituted, mu), pattern)


# ===== PADDING AND SPLITTING =====

def pad_word(word: Word, bracketing: Bracketing, mu: CommutatorMatrix):
    """
    Appends power blocks so every multiplicity becomes a multiple of d.
    Blocks are right-nested and the result is (bracketing, blocks).
    """
    if mu.d % 2:
        raise MatrixError(f"padding targets an even modulus, got Z_{mu.d}")
    if tuple(word) != flatten(bracketing):
        raise ParseError("bracketing does not flatten to the given word")
    counts = multiplicities(word, mu.n)
    odd = [mu.labels[i] for i, c in enumerate(counts) if c % 2]
    if odd:
        raise CommutationError(f"odd multiplicity for {', '.join(odd)}")
    blocks = [
        power_bracketing(Leaf(i), (-c) % mu.d)
        for i, c in enumerate(counts)
        if (-c) % mu.d
    ]
    if not blocks:
        return tuple(word), bracketing
    padded = Pair(bracketing, right_nested(blocks))
    return flatten(padded), padded


def verify_splitting_example() -> int:
    """Phase of the built-in five-generator Z_4 word under its matrix."""
    mu = fixture_matrix("splitting")
    bracketing = parse_bracketing(load_fixtures()["words"]["splitting"]["bracketing"], mu)
    check = verify_contextual_word(None, bracketing, mu)
    if not check:
        raise CertificateError(f"splitting example failed: {check.reason}")
    return check.phase


# ===== EMPIRICAL MODELS =====

Section = tuple  # sorted ((vector, s(vector)), ...)


@dataclass
class EmpiricalModel:
    """One set of local splittings per maximal clique of C(mu)."""

    monoid: CompatibleMonoid
    cliques: list
    sections: list

    def clique_vectors(self, i: int) -> set:
        return {g.vector for g in self.cliques[i]}


def maximal_cliques(monoid: CompatibleMonoid) -> list:
    """Maximal sets of pairwise commuting elements, in a stable order."""
    elements = monoid.elements
    table = commutation_table(elements)
    graph = nx.Graph()
    graph.add_nodes_from(elements)
    for i, j in zip(*np.nonzero(np.triu(table, 1))):
        graph.add_edge(elements[i], elements[j])
    position = {g: i for i, g in enumerate(elements)}
    cliques = [frozenset(c) for c in nx.find_cliques(graph)]
    cliques.sort(key=lambda c: sorted(position[g] for g in c))
    return cliques


def local_splittings(clique, context: GroupContext) -> list:
    """All homomorphisms on the clique that fix scalars, as sections."""
    vectors = sorted({g.vector for g in clique})
    return [tuple(sorted(s.items())) for s in _splittings(context, vectors)]


def restrict(section: Section, vectors: set) -> Section:
    return tuple(item for item in section if item[0] in vectors)


def check_local_consistency(model: EmpiricalModel):
    for i, sections in enumerate(model.sections):
        if not sections:
            raise ConsistencyError(f"clique {i} has no sections", detail={"clique": i})
    for i, j in itertools.combinations(range(len(model.cliques)), 2):
        overlap = model.clique_vectors(i) & model.clique_vectors(j)
        left = {restrict(s, overlap) for s in model.sections[i]}
        right = {restrict(s, overlap) for s in model.sections[j]}
        if left != right:
            raise ConsistencyError(
                f"cliques {i} and {j} disagree on their overlap",
                detail={"cliques": [i, j]},
            )


def consistent_model(monoid: CompatibleMonoid) -> Optional[EmpiricalModel]:
    """
    Largest locally consistent model inside "every local splitting":
    sections whose overlap restriction has no partner are pruned until
    nothing changes. None if some clique runs out of sections.
    """
    cliques = maximal_cliques(monoid)
    vectors = [{g.vector for g in c} for c in cliques]
    sections = [set(local_splittings(c, monoid.context)) for c in cliques]
    changed = True
    while changed:
        changed = False
        for i, j in itertools.permutations(range(len(cliques)), 2):
            overlap = vectors[i] & vectors[j]
            allowed = {restrict(s, overlap) for s in sections[j]}
            kept = {s for s in sections[i] if restrict(s, overlap) in allowed}
            if kept != sections[i]:
                sections[i] = kept
                changed = True
    if any(not s for s in sections):
        return None
    return EmpiricalModel(monoid, cliques, sections)


def _glue_cluster(model: EmpiricalModel, centre_vectors: set) -> dict:
    # cliques pairwise meet exactly in the centre
    base = sorted(model.sections[0])[0]
    shared = restrict(base, centre_vectors)
    offsets = dict(base)
    for i in range(1, len(model.cliques)):
        match = next((s for s in sorted(model.sections[i]) if restrict(s, centre_vectors) == shared), None)
        if match is None:
            raise ConsistencyError(f"clique {i} has no section agreeing on the centre", detail={"clique": i})
        offsets.update(match)
    return offsets


def _glue_search(model: EmpiricalModel) -> Optional[dict]:
    ordered = [sorted(s) for s in model.sections]

    def extend(i, offsets):
        if i == len(ordered):
            return offsets
        for section in ordered[i]:
            if all(offsets.get(v, s) == s for v, s in section):
                merged = dict(offsets)
                merged.update(section)
                result = extend(i + 1, merged)
                if result is not None:
                    return result
        return None

    return extend(0, {})


def glue_global_section(model: EmpiricalModel) -> Optional[ValueAssignment]:
    """
    A global value assignment restricting into every clique's sections,
    or None when the model is contextual.
    """
    check_local_consistency(model)
    graph = _graph_of(model.monoid)
    if is_cluster_graph(graph):
        offsets = _glue_cluster(model, {g.vector for g in graph.central})
    else:
        offsets = _glue_search(model)
    if offsets is None:
        return None
    assignment = ValueAssignment(model.monoid.context, offsets)
    for i, sections in enumerate(model.sections):
        if restrict(tuple(sorted(offsets.items())), model.clique_vectors(i)) not in sections:
            raise CertificateError(f"glued section does not restrict into clique {i}")
    return assignment


# ===== PERES-MERMIN SQUARE =====

@dataclass(frozen=True)
class PeresMerminSquare:
    mu: CommutatorMatrix
    entries: tuple          # 3x3 GroupElements
    row_phases: tuple
    column_phases: tuple


def peres_mermin_square() -> PeresMerminSquare:
    """Evaluates the built-in magic square inside two copies of Z_2 x Z_2."""
    mu = tensor_double(fixture_matrix("peres_mermin_base"))
    context = GroupContext(mu)
    grid = load_fixtures()["peres_mermin_square"]
    entries = tuple(tuple(evaluate(parse_word(text, mu), context) for text in row) for row in grid)

    def product_phase(cells):
        result = context.identity()
        for g in cells:
            result = multiply(result, g)
        if not result.is_scalar:
            raise CertificateError("a row or column of the square does not multiply to a scalar")
        return result.phase

    rows = tuple(product_phase(row) for row in entries)
    columns = tuple(product_phase([entries[r][c] for r in range(3)]) for c in range(3))
    return PeresMerminSquare(mu, entries, rows, columns)
