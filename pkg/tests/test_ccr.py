import random

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from gffkit.ccr import (
    AlgebraElement,
    CommutatorTable,
    Generator,
    adjoint,
    borchers_identity_check,
    canonical_order,
    expectation,
    multiply,
    random_sandwiches,
    state_commutator,
    verify_ccr_descends,
)
from gffkit.errors import CommutatorTableError, OrderError
from gffkit.statelab import QuasiFree, Trivial, Vacuum, counterexample_states

F, H = Generator(1), Generator(0)
GENS = [Generator(i) for i in range(4)]
E_SYM = CommutatorTable.symbolic(GENS)


def naive_normal_form(a: AlgebraElement, E) -> dict:
    """Leftmost-inversion bubble sort on a plain dict; shares no code with the engine."""
    todo = dict(a.items())
    done: dict = {}
    while todo:
        word, c = todo.popitem()
        for p in range(len(word) - 1):
            if word[p] > word[p + 1]:
                g, h = word[p], word[p + 1]
                swapped = word[:p] + (h, g) + word[p + 2:]
                todo[swapped] = sympy.expand(todo.get(swapped, 0) + c)
                short = word[:p] + word[p + 2:]
                todo[short] = sympy.expand(todo.get(short, 0) + c * sympy.I * E(g, h))
                break
        else:
            done[word] = sympy.expand(done.get(word, 0) + c)
    return {w: c for w, c in done.items() if c != 0}


def _elements(max_len):
    ws = st.lists(st.sampled_from(GENS), min_size=0, max_size=max_len).map(tuple)
    return st.lists(st.tuples(ws, st.integers(-3, 3)), min_size=1, max_size=3).map(
        lambda ts: AlgebraElement([(w, sympy.Integer(c)) for w, c in ts])
    )


elements = _elements(8)
short_elements = _elements(5)


# ---------------------------------------------------------------- algebra


def test_unit_and_bilinearity():
    w = AlgebraElement.word(F, H, coeff=3)
    assert multiply(AlgebraElement.unit(), w) == w
    assert multiply(w, AlgebraElement.unit()) == w
    s = AlgebraElement.field(F) + AlgebraElement.field(H)
    sq = s * s
    assert len(sq) == 4 and set(sq.terms.values()) == {1}


def test_zero_coefficients_are_not_stored():
    a = AlgebraElement.word(F, H) - AlgebraElement.word(F, H)
    assert len(a) == 0 and a == 0


@given(elements, elements)
def test_product_word_count_bound(a, b):
    assert len(a * b) <= len(a) * len(b)


def test_adjoint_examples():
    c = 2 + 3j
    a = AlgebraElement.word(F, H, coeff=c)
    assert adjoint(a) == AlgebraElement.word(H.star(), F.star(), coeff=c.conjugate())
    assert adjoint(AlgebraElement.unit()) == AlgebraElement.unit()


@given(elements)
def test_adjoint_involution(a):
    assert adjoint(adjoint(a)) == a


@given(elements, elements, elements)
def test_associativity(a, b, c):
    assert (a * b) * c == a * (b * c)


def test_json_round_trip():
    a = AlgebraElement.word(F, H.star(), coeff=1.5 - 2j) + AlgebraElement.unit(4)
    assert AlgebraElement.from_json(a.to_json()) == a


# ---------------------------------------------------------------- rewriting


def test_single_swap_gives_commutator_term():
    E = CommutatorTable.symbolic([F, H])
    got = canonical_order(AlgebraElement.word(F, H), E)
    want = AlgebraElement.word(H, F) + AlgebraElement.unit(sympy.I * E(F, H))
    assert got == want


def test_sorted_word_is_unchanged():
    w = AlgebraElement.word(0, 1, 1, 3)
    assert canonical_order(w, E_SYM) == w


def test_square_then_h():
    E = CommutatorTable.symbolic([F, H])
    got = canonical_order(AlgebraElement.word(F, F, H), E)
    want = AlgebraElement.word(H, F, F) + AlgebraElement.word(F, coeff=2 * sympy.I * E(F, H))
    assert got == want


@pytest.mark.parametrize("n", [1, 2, 3, 5, 10])
def test_borchers_identity_symbolic(n):
    assert borchers_identity_check(n, CommutatorTable.symbolic([F, H]))


def test_borchers_identity_detects_wrong_coefficient():
    E = CommutatorTable.symbolic([F, H])
    Fe, He = AlgebraElement.field(F), AlgebraElement.field(H)
    wrong = He * Fe ** 3 + (2 * sympy.I * E(F, H)) * Fe ** 2
    assert canonical_order(Fe ** 3 * He, E) != canonical_order(wrong, E)


def test_unknown_generator_raises():
    with pytest.raises(CommutatorTableError):
        canonical_order(AlgebraElement.word(7, 2), E_SYM)


def test_commutator_table_must_be_antisymmetric():
    with pytest.raises(ValueError):
        CommutatorTable({(0, 1): 1, (1, 0): 1})
    with pytest.raises(ValueError):
        CommutatorTable({(0, 0): 1})


@given(elements)
def test_agrees_with_naive_bubble_sort(a):
    assert canonical_order(a, E_SYM).terms == naive_normal_form(a, E_SYM)


@given(elements)
def test_idempotent(a):
    once = canonical_order(a, E_SYM)
    assert canonical_order(once, E_SYM) == once


@given(short_elements, short_elements)
def test_congruence(a, b):
    lhs = canonical_order(a * b, E_SYM)
    rhs = canonical_order(canonical_order(a, E_SYM) * canonical_order(b, E_SYM), E_SYM)
    assert lhs == rhs


# ---------------------------------------------------------------- states


@pytest.fixture(scope="module")
def vacuum():
    return QuasiFree(Vacuum(1.0))


def test_expectation_of_unit(vacuum, packets):
    assert expectation(AlgebraElement.unit(), vacuum, packets) == 1


def test_expectation_order_cap(packets):
    with pytest.raises(OrderError):
        expectation(AlgebraElement.word(*[0] * 14), QuasiFree(Vacuum(1.0)), packets)


def test_commutator_expectation(vacuum, packets):
    E = state_commutator(vacuum, packets)
    fh = expectation(AlgebraElement.word(F, H), vacuum, packets)
    hf = expectation(AlgebraElement.word(H, F), vacuum, packets)
    assert abs(fh - hf - 1j * E(F, H)) < 1e-12 * abs(fh)


def test_gram_positivity(vacuum, complex_packets):
    rng = random.Random(2)
    gens = [Generator(i) for i in range(len(complex_packets))]
    for _ in range(5):
        a = AlgebraElement([((rng.choice(gens), rng.choice(gens)), complex(rng.gauss(0, 1), rng.gauss(0, 1)))
                            for _ in range(3)]) + AlgebraElement.field(rng.choice(gens), 0.5)
        v = expectation(adjoint(a) * a, vacuum, complex_packets)
        assert v.real >= -1e-12 * abs(v) and abs(v.imag) <= 1e-9 * abs(v)


def test_adjoint_compatibility(vacuum, complex_packets):
    a = AlgebraElement.word(0, Generator(1, True), 2, coeff=0.3 + 1j) + AlgebraElement.word(2, 0)
    got = expectation(adjoint(a), vacuum, complex_packets)
    want = np.conj(expectation(a, vacuum, complex_packets))
    assert abs(got - want) < 1e-10 * abs(want)


def test_state_kills_the_ideal(vacuum, packets):
    E = state_commutator(vacuum, packets)
    gens = [Generator(i) for i in range(4)]
    table = CommutatorTable({(g, h): E(g, h) for g in gens for h in gens if g < h})
    rng = random.Random(3)
    for _ in range(6):
        a = AlgebraElement.word(*[rng.choice(gens) for _ in range(rng.randint(2, 5))], coeff=1.0)
        x, y = expectation(a, vacuum, packets), expectation(canonical_order(a, table), vacuum, packets)
        assert abs(x - y) < 1e-10 * max(abs(x), 1e-300)


def test_ccr_descends_on_vacuum(vacuum, packets):
    sample = random_sandwiches([Generator(i) for i in range(4)], 50, seed=1)
    rep = verify_ccr_descends(vacuum, sample, 1e-8, packets)
    assert rep.passed and rep.max_residual < 1e-8


def test_ccr_descends_on_trivial_state_with_zero_commutator(packets):
    sample = random_sandwiches([Generator(i) for i in range(4)], 20, seed=2)
    rep = verify_ccr_descends(Trivial(), sample, 1e-12, packets, E=lambda g, h: 0)
    assert rep.max_residual == 0.0


def test_ccr_fails_for_the_mixture(packets):
    _, _, w3 = counterexample_states()
    sample = random_sandwiches([Generator(i) for i in range(4)], 30, seed=3)
    rep = verify_ccr_descends(w3, sample, 1e-6, packets)
    assert not rep.passed and rep.max_residual > 0.05
