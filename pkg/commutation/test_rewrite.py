import itertools
import time

import numpy as np
import pytest

from .algebra import commutator_value, new_commutator_matrix, random_commutator_matrix
from .group import GroupContext, evaluate, from_normal_form
from .history import format_trace
from . import settings
from .model import ParseError
from .rewrite import (
    Generator,
    NormalForm,
    Phase,
    RewriteRule,
    decode_normal_word,
    format_normal_form,
    format_word,
    formal_commutator,
    generator_vector,
    inversion_measure,
    inversion_sum,
    inversion_sum_between,
    is_normal,
    multiplicities,
    normalize,
    parse_word,
    reduce_word,
    reverse_word,
    rewrite_steps,
    words_equal,
)


@pytest.fixture
def xy3():
    # mu(x, y) = 1, mu(y, x) = 2 over Z_3
    return new_commutator_matrix([[0, 1], [2, 0]], 3, ["x", "y"])


def test_parse_and_format(mu1):
    word = parse_word("J1 a b^2", mu1)
    assert word == (Phase(1), Generator(0), Generator(1), Generator(1))
    assert format_word(word, mu1) == "J1 a b^2"
    assert len(parse_word("abdccabd", mu1)) == 8
    assert parse_word("", mu1) == ()


def test_parse_errors(mu1):
    with pytest.raises(ParseError, match="unknown label 'e'"):
        parse_word("a e", mu1)
    with pytest.raises(ParseError, match="malformed exponent"):
        parse_word("a^", mu1)


def test_exponent_cap(mu1, monkeypatch):
    with pytest.raises(ParseError, match="exceeds"):
        parse_word("a^1000000000", mu1)
    with pytest.raises(ParseError, match="exceeds"):
        parse_word("a^" + "9" * 5000, mu1)
    monkeypatch.setattr(settings, "MAX_EXPONENT", 4)
    assert len(parse_word("a^4", mu1)) == 4
    assert len(parse_word("a^004", mu1)) == 4
    with pytest.raises(ParseError, match="exceeds 4"):
        parse_word("b^5", mu1)


def test_longest_label_wins():
    mu = new_commutator_matrix([[0, 1], [1, 0]], 2, ["x", "x1"])
    assert parse_word("x1x", mu) == (Generator(1), Generator(0))


def test_normalize_basic(mu1, xy3):
    nf = normalize((), mu1)
    assert nf == NormalForm(0, (0, 0, 0, 0))
    assert format_normal_form(nf, mu1) == "1"

    # y x -> J_mu(y,x) x y
    assert normalize(parse_word("y x", xy3), xy3) == NormalForm(2, (1, 1))
    assert normalize(parse_word("x^3", xy3), xy3).is_identity()
    assert normalize(parse_word("J2 J2", xy3), xy3) == NormalForm(1, (0, 0))
    assert normalize(parse_word("x J1", xy3), xy3) == NormalForm(1, (1, 0))


def test_single_rules(xy3):
    tags = {rule for _, rule in rewrite_steps(parse_word("y x", xy3), xy3)}
    assert tags == {RewriteRule.SWAP}
    tags = {rule for _, rule in rewrite_steps((Phase(0), Phase(1)), xy3)}
    assert tags == {RewriteRule.DROP_PHASE, RewriteRule.MERGE_PHASES}
    tags = {rule for _, rule in rewrite_steps(parse_word("x x x J1", xy3), xy3)}
    assert tags == {RewriteRule.CANCEL_POWER, RewriteRule.LIFT_PHASE}
    assert is_normal(parse_word("J1 x y^2", xy3), xy3)
    assert not is_normal(parse_word("y x", xy3), xy3)


def _terminals(word, mu, memo):
    if word in memo:
        return memo[word]
    steps = rewrite_steps(word, mu)
    if not steps:
        result = frozenset([word])
    else:
        result = frozenset().union(*(_terminals(after, mu, memo) for after, _ in steps))
    memo[word] = result
    return result


@pytest.mark.parametrize("d", [2, 3])
def test_every_strategy_reaches_the_same_normal_form(d, rng):
    mu = random_commutator_matrix(3, d, rng)
    if mu.is_zero():
        mu = new_commutator_matrix([[0, 1, 0], [d - 1, 0, 1], [0, d - 1, 0]], d)
    context = GroupContext(mu)
    # every phase letter, J0 included, to hit the drop and merge overlaps
    alphabet = [Generator(0), Generator(1), Generator(2)] + [Phase(k) for k in range(d)]
    memo = {}
    for length in range(6):
        for word in itertools.product(alphabet, repeat=length):
            nf = normalize(word, mu)
            assert _terminals(word, mu, memo) == {nf.to_word()}
            assert reduce_word(word, mu) == nf.to_word()
            assert from_normal_form(nf, context) == evaluate(word, context)


def test_measure_drops_with_every_rewrite(rng):
    mu = random_commutator_matrix(4, 3, rng)
    letters = [Generator(i) for i in range(4)] + [Phase(1), Phase(2), Phase(0)]
    for _ in range(200):
        word = tuple(letters[i] for i in rng.integers(0, len(letters), size=8))
        before = inversion_measure(word)
        for after, _ in rewrite_steps(word, mu):
            assert inversion_measure(after) < before


def test_decode_normal_word(xy3):
    word = parse_word("J2 x y^2", xy3)
    assert decode_normal_word(word, xy3) == NormalForm(2, (1, 2))


def test_words_equal(xy3):
    assert words_equal(parse_word("y x", xy3), parse_word("J2 x y", xy3), xy3)
    assert not words_equal(parse_word("y x", xy3), parse_word("x y", xy3), xy3)


def test_reduce_word_records_a_trace(xy3):
    trace = []
    word = parse_word("y x y", xy3)
    result = reduce_word(word, xy3, trace=trace)
    assert result == normalize(word, xy3).to_word()
    assert [e.step for e in trace] == list(range(1, len(trace) + 1))
    assert trace[0].before == "y x y"
    assert trace[-1].after == format_word(result, xy3)
    assert {e.rule for e in trace} <= {rule.value for rule in RewriteRule}
    assert len(format_trace(trace).splitlines()) == len(trace)


def test_inversion_sum_is_the_normal_form_phase(rng):
    for d in (2, 3, 4):
        mu = random_commutator_matrix(4, d, rng)
        for _ in range(30):
            word = tuple(Generator(int(i)) for i in rng.integers(0, 4, size=10))
            assert inversion_sum(word, mu) == normalize(word, mu).phase


def test_inversion_sum_of_concatenation(rng):
    mu = random_commutator_matrix(4, 6, rng)
    for _ in range(30):
        s = tuple(Generator(int(i)) for i in rng.integers(0, 4, size=7))
        t = tuple(Generator(int(i)) for i in rng.integers(0, 4, size=5))
        total = (inversion_sum(s, mu) + inversion_sum(t, mu) + inversion_sum_between(s, t, mu)) % 6
        assert inversion_sum(s + t, mu) == total


def test_formal_commutator_is_mu_of_the_multiplicities(rng):
    mu = random_commutator_matrix(3, 5, rng)
    for _ in range(30):
        s = tuple(Generator(int(i)) for i in rng.integers(0, 3, size=6))
        t = tuple(Generator(int(i)) for i in rng.integers(0, 3, size=4))
        expected = commutator_value(mu, multiplicities(s, 3), multiplicities(t, 3))
        assert formal_commutator(s, t, mu) == expected


def test_reversal_negates_pairs_between_distinct_generators(rng):
    # every inversion pair of w is a non-inversion of its reverse
    mu = random_commutator_matrix(3, 4, rng)
    for _ in range(30):
        w = tuple(Generator(int(i)) for i in rng.integers(0, 3, size=8))
        counts = np.array(multiplicities(w, 3))
        lower = (mu.entries * np.tri(3, k=-1, dtype=np.int64)).astype(np.int64)
        all_pairs = int(counts @ lower @ counts) % 4
        assert (inversion_sum(w, mu) + inversion_sum(reverse_word(w), mu)) % 4 == all_pairs


def test_inversion_measure_counts_phase_inversions():
    mu = new_commutator_matrix([[0, 1], [1, 0]], 2, ["x1", "x2"])
    measure = inversion_measure(parse_word("x1 J1 x2", mu))
    assert measure.j_inversions == 1
    assert measure.x_inversions == 0
    assert inversion_measure(parse_word("x2 x1", mu)).x_inversions == 1


def test_normal_form_product_is_associative(rng):
    # theta(theta(uv) w) = theta(uvw) = theta(u theta(vw))
    for d in (2, 3, 4, 6):
        mu = random_commutator_matrix(4, d, rng)
        letters = [Generator(i) for i in range(4)] + [Phase(k) for k in range(d)]
        for _ in range(50):
            u, v, w = (tuple(letters[i] for i in rng.integers(0, len(letters), size=size)) for size in (5, 4, 6))
            whole = normalize(u + v + w, mu)
            assert normalize(normalize(u + v, mu).to_word() + w, mu) == whole
            assert normalize(u + normalize(v + w, mu).to_word(), mu) == whole


def test_inversions_between_survive_reversal(rng):
    mu = random_commutator_matrix(4, 6, rng)
    for _ in range(100):
        s = tuple(Generator(int(i)) for i in rng.integers(0, 4, size=int(rng.integers(0, 9))))
        t = tuple(Generator(int(i)) for i in rng.integers(0, 4, size=int(rng.integers(0, 9))))
        assert inversion_sum_between(s, t, mu) == inversion_sum_between(reverse_word(s), reverse_word(t), mu)


def test_inversion_sums_reject_phases(mu1):
    with pytest.raises(ParseError):
        inversion_sum((Phase(1), Generator(0)), mu1)


def test_generator_vector(mu1):
    assert generator_vector(parse_word("a a b c^3", mu1), mu1) == (0, 1, 1, 0)


def test_normalize_handles_long_words(rng):
    mu = random_commutator_matrix(8, 7, rng)
    word = tuple(Generator(int(i)) for i in rng.integers(0, 8, size=100_000))
    start = time.perf_counter()
    nf = normalize(word, mu)
    assert time.perf_counter() - start < 5
    assert nf.exponents == tuple(c % 7 for c in multiplicities(word, 8))
