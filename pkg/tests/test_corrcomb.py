import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st
from sympy.polys.domains import QQ_I
from sympy.utilities.iterables import multiset_partitions

from gffkit.corrcomb import (
    CorrelatorTable,
    Partition,
    antisymmetric_two_point,
    bell_number,
    cumulant_table,
    cumulants_from_moments,
    enumerate_partitions,
    iter_pair_partitions,
    iter_restricted_growth_strings,
    is_generalised_free,
    moment_table,
    moments_from_cumulants,
    scalar_cumulants,
    swap_difference,
    truncated_is_symmetric,
)
from gffkit.errors import MissingEntryError, NormalisationError, OrderError, PartitionCapError

ONE = QQ_I(1, 0)


def bell_triangle(n_max):
    row, out = [1], [1]
    for _ in range(n_max):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
        out.append(row[0])
    return out


def rq(rng, spread=9):
    return QQ_I(Fraction(rng.randint(-spread, spread), rng.randint(1, 5)),
                Fraction(rng.randint(-spread, spread), rng.randint(1, 5)))


def table_from(alphabet, order, fn, one=ONE):
    t = CorrelatorTable.from_function(alphabet, order, fn, include_zero=False)
    t.values[()] = one
    return t


# ---------------------------------------------------------------- partitions


def test_partition_counts_match_bell_triangle():
    tri = bell_triangle(12)
    assert [bell_number(n) for n in range(13)] == tri
    assert tri[:9] == [1, 1, 2, 5, 15, 52, 203, 877, 4140]
    for n in range(9):
        assert len(enumerate_partitions(n)) == tri[n]


@pytest.mark.parametrize("n", range(1, 8))
def test_partitions_agree_with_sympy_enumeration(n):
    ours = {frozenset(frozenset(b) for b in p.blocks) for p in enumerate_partitions(n)}
    ref = {frozenset(frozenset(b) for b in p) for p in multiset_partitions(list(range(1, n + 1)))}
    assert ours == ref


def test_partition_edge_cases():
    (empty,) = enumerate_partitions(0)
    assert empty.blocks == ()
    (single,) = enumerate_partitions(1)
    assert single.blocks == ((1,),)
    assert len(enumerate_partitions(4)) == 15


def test_partition_blocks_are_increasing_and_cover():
    for p in enumerate_partitions(6):
        assert sorted(i for b in p.blocks for i in b) == list(range(1, 7))
        assert all(list(b) == sorted(b) for b in p.blocks)


def test_restricted_growth_strings_are_lexicographic():
    rgs = list(iter_restricted_growth_strings(5))
    assert rgs == sorted(rgs)
    assert len(rgs) == 52
    assert [p.blocks for p in enumerate_partitions(5)] == [Partition.from_rgs(r).blocks for r in rgs]


def test_partition_cap():
    with pytest.raises(PartitionCapError) as exc:
        enumerate_partitions(13)
    assert "27644437" in str(exc.value)
    with pytest.raises(PartitionCapError):
        enumerate_partitions(6, cap=5)
    assert len(enumerate_partitions(6, cap=None)) == 203


@pytest.mark.parametrize("n", range(0, 9))
def test_pair_partitions_count_double_factorial(n):
    count = sum(1 for _ in iter_pair_partitions(n))
    expect = 0 if n % 2 else math.prod(range(n - 1, 0, -2))
    assert count == expect


# ---------------------------------------------------------------- transform


def test_only_pair_cumulants_examples():
    kappa = {("f",): 0, ("f", "f"): 1, ("f", "f", "f"): 0, ("f", "f", "f", "f"): 0}
    assert moments_from_cumulants(kappa, 3, ("f",) * 3) == 0
    assert moments_from_cumulants(kappa, 4, ("f",) * 4) == 3


def test_product_state_examples():
    mu = Fraction(3, 7)
    kappa = {("f",) * k: (mu if k == 1 else 0) for k in range(1, 4)}
    assert moments_from_cumulants(kappa, 3, ("f",) * 3) == mu ** 3
    moments = {("f",) * k: mu ** k for k in range(0, 4)}
    assert cumulants_from_moments(moments, 1, ("f",)) == mu
    assert cumulants_from_moments(moments, 2, ("f",) * 2) == 0
    assert cumulants_from_moments(moments, 3, ("f",) * 3) == 0


def test_quasi_free_fourth_cumulant_vanishes():
    moments = {(): 1, ("f",): 0, ("f",) * 2: 1, ("f",) * 3: 0, ("f",) * 4: 3}
    assert cumulants_from_moments(moments, 4, ("f",) * 4) == 0
    assert cumulants_from_moments(moments, 1, ("f",)) == 0


def test_transform_errors():
    with pytest.raises(NormalisationError):
        cumulants_from_moments({(): 2, ("f",): 1}, 1, ("f",))
    with pytest.raises(MissingEntryError):
        moments_from_cumulants({("f",): 1}, 2, ("f", "f"))
    with pytest.raises(OrderError):
        moments_from_cumulants({}, 2, ("f",))


def test_block_arguments_keep_written_order():
    # non-symmetric two-point cumulant: the only pairing of (a, b) is kappa(a, b)
    kappa = {("a",): 0, ("b",): 0, ("a", "b"): 5, ("b", "a"): 7}
    assert moments_from_cumulants(kappa, 2, ("a", "b")) == 5
    assert moments_from_cumulants(kappa, 2, ("b", "a")) == 7


def brute_force_pairings(args, two):
    """Isserlis sum by explicit recursion over the leftmost argument."""
    if not args:
        return 1
    total = 0
    for j in range(1, len(args)):
        rest = args[1:j] + args[j + 1:]
        total += two[(args[0], args[j])] * brute_force_pairings(rest, two)
    return total


def test_pair_cumulants_reproduce_brute_force_isserlis():
    rng = random.Random(4)
    alpha = ("a", "b", "c")
    two = {(x, y): rq(rng) for x in alpha for y in alpha}
    kappa = table_from(alpha, 6, lambda t: two[t] if len(t) == 2 else QQ_I(0, 0))
    for n in range(1, 7):
        for t in itertools.islice(itertools.product(alpha, repeat=n), 60):
            got = moments_from_cumulants(kappa, n, t, one=ONE)
            want = brute_force_pairings(t, two) if n % 2 == 0 else QQ_I(0, 0)
            assert got == want


@pytest.mark.parametrize("name, moments, cumulants", [
    ("standard normal", [1, 0, 1, 0, 3, 0, 15, 0, 105], [None, 0, 1, 0, 0, 0, 0, 0, 0]),
    ("exponential", [math.factorial(n) for n in range(9)], [None] + [math.factorial(n - 1) for n in range(1, 9)]),
    ("poisson(1)", [bell_number(n) for n in range(9)], [None] + [1] * 8),
])
def test_scalar_cumulants_of_classical_laws(name, moments, cumulants):
    assert scalar_cumulants(moments) == cumulants
    # and the multivariate transform agrees on the one-letter alphabet
    tab = {("x",) * n: m for n, m in enumerate(moments)}
    cache = {}
    assert [cumulants_from_moments(tab, n, ("x",) * n, cache) for n in range(1, 9)] == cumulants[1:]


def test_exact_round_trip_on_full_table():
    rng = random.Random(0)
    kappa = table_from((0, 1), 5, lambda t: rq(rng))
    del kappa.values[()]
    moments = moment_table(kappa, one=ONE)
    assert cumulant_table(moments).values == kappa.values
    assert moment_table(cumulant_table(moments), one=ONE).values == moments.values


@given(st.lists(st.tuples(st.integers(-20, 20), st.integers(1, 9)), min_size=5, max_size=5),
       st.lists(st.sampled_from("ab"), min_size=1, max_size=5))
def test_round_trip_property(nums, args):
    vals = iter([Fraction(p, q) for p, q in nums] * 40)
    kappa = {}
    for k in range(1, len(args) + 1):
        for pos in itertools.combinations(range(len(args)), k):
            key = tuple(args[p] for p in pos)
            if key not in kappa:
                kappa[key] = next(vals)
    moments = {(): 1}
    for key in kappa:
        moments[key] = moments_from_cumulants(kappa, len(key), key)
    assert cumulants_from_moments(moments, len(args), tuple(args)) == kappa[tuple(args)]


def test_independent_blocks_have_vanishing_mixed_cumulants():
    rng = random.Random(7)
    alpha = ("a", "b", "c", "d")
    ka = {t: Fraction(rng.randint(-5, 5), rng.randint(1, 4))
          for n in range(1, 5) for t in itertools.product("ab", repeat=n)}
    kb = {t: Fraction(rng.randint(-5, 5), rng.randint(1, 4))
          for n in range(1, 5) for t in itertools.product("cd", repeat=n)}
    kappa = {**ka, **kb}
    for n in range(1, 5):
        for t in itertools.product(alpha, repeat=n):
            kappa.setdefault(t, Fraction(0))
    moments = {(): 1}
    for n in range(1, 5):
        for t in itertools.product(alpha, repeat=n):
            moments[t] = moments_from_cumulants(kappa, n, t)
    # moments of interleaved words factorise
    assert moments[("a", "c", "b", "d")] == moments[("a", "b")] * moments[("c", "d")]
    cache = {}
    for t in itertools.product(alpha, repeat=4):
        if set(t) & set("ab") and set(t) & set("cd"):
            assert cumulants_from_moments(moments, 4, t, cache) == 0


def test_table_json_round_trip_exact():
    rng = random.Random(1)
    t = table_from(("f", "g"), 3, lambda a: rq(rng))
    back = CorrelatorTable.from_json(t.to_json(), exact=True)
    assert back.values == t.values
    assert back.alphabet == ("f", "g")


# ---------------------------------------------------------------- swap identities


class PairingState:
    """Exact quasi-free state over a non-symmetric two-point table."""

    def __init__(self, two, extra=None):
        self.two = two
        self.extra = extra or {}

    def npoint(self, args):
        args = tuple(args)
        return brute_force_pairings(args, self.two) + self.extra.get(args, 0)


def test_swap_difference_quasi_free_exact():
    rng = random.Random(5)
    two = {(x, y): rq(rng) for x in "abc" for y in "abc"}
    state = PairingState(two)
    for args in itertools.product("abc", repeat=4):
        for i in range(1, 4):
            lhs, rhs = swap_difference(state, 4, i, args)
            assert lhs == rhs


def test_swap_difference_slot_convention():
    # label i sits at written position n - i
    two = {(x, y): (1 if (x, y) == ("b", "a") else 0) for x in "abcd" for y in "abcd"}
    state = PairingState(two)
    args = ("d", "c", "b", "a")  # x4, x3, x2, x1
    lhs, rhs = swap_difference(state, 4, 1, args)
    assert rhs == 2 * antisymmetric_two_point(state, "b", "a") * state.npoint(("d", "c"))


def test_swap_of_equal_arguments_vanishes():
    state = PairingState({(x, y): Fraction(1 + ord(x), ord(y)) for x in "ab" for y in "ab"})
    lhs, rhs = swap_difference(state, 4, 2, ("a", "b", "b", "a"))
    assert lhs == 0 and rhs == 0


def test_swap_difference_needs_two_arguments():
    with pytest.raises(OrderError):
        swap_difference(PairingState({}), 1, 1, ("a",))
    with pytest.raises(OrderError):
        swap_difference(PairingState({}), 3, 3, ("a", "a", "a"))


def _table_state(rng, symmetric_higher: bool, order=5):
    """Random exact moments whose order-2 cumulant is arbitrary and whose
    higher cumulants are symmetric (or not)."""
    alpha = ("a", "b")
    sym = {}

    def kappa(t):
        if len(t) == 2:
            return rq(rng)
        key = tuple(sorted(t)) if symmetric_higher else t
        if key not in sym:
            sym[key] = rq(rng)
        return sym[key]

    k = table_from(alpha, order, kappa)
    del k.values[()]
    return moment_table(k, one=ONE)


@pytest.mark.parametrize("seed", range(4))
def test_symmetric_truncations_iff_swap_identities(seed):
    rng = random.Random(seed)
    good = _table_state(rng, True)
    bad = _table_state(rng, False)
    for n in range(3, 6):
        assert truncated_is_symmetric(good, n)
        assert not truncated_is_symmetric(bad, n)
    assert is_generalised_free(good, 5, 0.0, ("a", "b"), limit=None).verdict == "PASS"
    rep = is_generalised_free(bad, 5, 1e-12, ("a", "b"), limit=None)
    assert rep.verdict == "FAIL"
    assert rep.failing_orders()[0] == 3


def test_gff_report_fields():
    rep = is_generalised_free(PairingState({(x, y): 1 for x in "ab" for y in "ab"}), 4, 1e-9, ("a", "b"))
    d = rep.as_dict()
    assert d["verdict"] == "PASS" and set(d["worst_residual"]) == {"3", "4"}
    assert rep.checked == 8 * 2 + 16 * 3


def test_from_rgs_rejects_invalid_strings():
    with pytest.raises(ValueError):
        Partition.from_rgs((1, 0))
    with pytest.raises(ValueError):
        Partition.from_rgs((0, 2))
    with pytest.raises(ValueError):
        Partition(3, ((1, 2),))
