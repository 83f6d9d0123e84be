"""Ordered set partitions and the moment/truncated-moment transform.

Argument convention
-------------------
An n-point value is written ``w_n(x_n, ..., x_1)``: the leftmost argument
carries label n and the rightmost carries label 1.  All functions here take
argument tuples in that *written* order, so ``args[0]`` is ``x_n`` and
``args[-1]`` is ``x_1``.  Label ``i`` therefore sits at position ``n - i``.

Partitions are enumerated over labels ``1..n``.  In the expansion

    w_n(x_n, ..., x_1) = sum_P prod_{r in P} wT_|r|(x_r(|r|), ..., x_r(1))

each block contributes its arguments in descending label order, which in
written order is simply the restriction of ``args`` to the block, keeping
the left-to-right order.  This matters for tables that are not symmetric.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Hashable, Iterator, Mapping, Protocol, Sequence

from gffkit.errors import MissingEntryError, NormalisationError, OrderError, PartitionCapError

DEFAULT_PARTITION_CAP = 12


def bell_number(n: int) -> int:
    """Bell number via the Bell triangle."""
    if n < 0:
        raise ValueError("n must be non-negative")
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def iter_restricted_growth_strings(n: int) -> Iterator[tuple[int, ...]]:
    """Yield restricted growth strings of length n in lexicographic order.

    ``a[0] == 0`` and ``a[i] <= 1 + max(a[:i])``; element i (0-based)
    belongs to block ``a[i]``.
    """
    if n == 0:
        yield ()
        return
    a = [0] * n
    prefix_max = [0] * n
    while True:
        yield tuple(a)
        i = n - 1
        while i > 0 and a[i] == prefix_max[i - 1] + 1:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        prefix_max[i] = max(prefix_max[i - 1], a[i])
        top = prefix_max[i]
        for j in range(i + 1, n):
            a[j] = 0
            prefix_max[j] = top


@dataclass(frozen=True)
class Partition:
    """Set partition of ``{1..n}`` with blocks sorted by their smallest element."""

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen = []
        for block in self.blocks:
            if not block or any(b >= c for b, c in zip(block, block[1:])):
                raise ValueError(f"block {block} is empty or not strictly increasing")
            seen.extend(block)
        if sorted(seen) != list(range(1, self.n + 1)):
            raise ValueError(f"blocks {self.blocks} do not partition 1..{self.n}")
        if list(self.blocks) != sorted(self.blocks, key=lambda b: b[0]):
            raise ValueError("blocks must be ordered by their smallest element")

    @classmethod
    def from_rgs(cls, rgs: Sequence[int]) -> "Partition":
        top = -1
        for b in rgs:
            if not 0 <= b <= top + 1:
                raise ValueError(f"{tuple(rgs)} is not a restricted growth string")
            top = max(top, b)
        return cls(len(rgs), _rgs_blocks(rgs))

    @classmethod
    def _trusted(cls, n: int, blocks) -> "Partition":
        # skips validation; only for blocks produced by _rgs_blocks
        p = object.__new__(cls)
        object.__setattr__(p, "n", n)
        object.__setattr__(p, "blocks", blocks)
        return p

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def written_positions(self) -> tuple[tuple[int, ...], ...]:
        """Blocks as ascending positions into a written-order argument tuple."""
        return tuple(tuple(sorted(self.n - lab for lab in block)) for block in self.blocks)

    def is_pair_partition(self) -> bool:
        return all(len(b) == 2 for b in self.blocks)


def _rgs_blocks(rgs: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    blocks: list[list[int]] = []
    for label, b in enumerate(rgs, start=1):
        if b == len(blocks):
            blocks.append([label])
        else:
            blocks[b].append(label)
    return tuple(map(tuple, blocks))


def _check_cap(n: int, cap: int | None) -> None:
    if n < 0:
        raise ValueError("n must be non-negative")
    if cap is not None and n > cap:
        raise PartitionCapError(n, cap, bell_number(n))


def iter_partitions(n: int, cap: int | None = DEFAULT_PARTITION_CAP) -> Iterator[Partition]:
    _check_cap(n, cap)
    for rgs in iter_restricted_growth_strings(n):
        yield Partition._trusted(n, _rgs_blocks(rgs))


def enumerate_partitions(n: int, cap: int | None = DEFAULT_PARTITION_CAP) -> list[Partition]:
    """All partitions of ``{1..n}``, ordered by restricted growth string.

    ``n = 0`` gives the single empty partition (the convention ``w_0 = 1``).
    """
    return list(iter_partitions(n, cap))


@lru_cache(maxsize=None)
def _partition_positions(n: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    return tuple(p.written_positions() for p in iter_partitions(n, cap=None))


def iter_pair_partitions(n: int) -> Iterator[tuple[tuple[int, int], ...]]:
    """Perfect matchings of positions ``0..n-1`` as ``(left, right)`` pairs.

    Each pair is ordered ``left < right`` in written position, i.e. the
    left element carries the larger label.  Odd n yields nothing.
    """
    if n % 2:
        return

    def rec(rest):
        if not rest:
            yield ()
            return
        first = rest[0]
        for k in range(1, len(rest)):
            remaining = rest[1:k] + rest[k + 1:]
            for tail in rec(remaining):
                yield ((first, rest[k]),) + tail

    yield from rec(tuple(range(n)))


# --------------------------------------------------------------------------
# correlator tables


class NPointFunctional(Protocol):
    def npoint(self, args: Sequence[Any]) -> Any: ...


@dataclass
class CorrelatorTable:
    """Dense map from written-order argument tuples to values.

    ``values[()]`` is the order-0 entry.  Values may be any ring elements
    supporting ``+``, ``-`` and ``*`` (complex, Fraction, sympy Gaussian
    rationals, ...); the transforms below never divide.
    """

    alphabet: tuple[Hashable, ...]
    values: dict[tuple, Any] = field(default_factory=dict)
    max_order: int = 0
    symmetric: dict[int, bool] = field(default_factory=dict)

    def __getitem__(self, args) -> Any:
        try:
            return self.values[tuple(args)]
        except KeyError:
            raise MissingEntryError(f"no entry for arguments {tuple(args)!r}") from None

    def __setitem__(self, args, value) -> None:
        args = tuple(args)
        self.values[args] = value
        self.max_order = max(self.max_order, len(args))

    def __contains__(self, args) -> bool:
        return tuple(args) in self.values

    def npoint(self, args: Sequence[Any]) -> Any:
        return self[args]

    def tuples(self, order: int) -> Iterator[tuple]:
        return itertools.product(self.alphabet, repeat=order)

    def is_complete(self) -> bool:
        return all(t in self.values for n in range(self.max_order + 1) for t in self.tuples(n))

    @classmethod
    def from_function(cls, alphabet, max_order, fn: Callable[[tuple], Any], include_zero=True):
        table = cls(tuple(alphabet), max_order=max_order)
        for n in range(0 if include_zero else 1, max_order + 1):
            for t in table.tuples(n):
                table.values[t] = fn(t)
        return table

    def to_json(self) -> str:
        entries = []
        for args in sorted(self.values, key=lambda a: (len(a), [self.alphabet.index(x) for x in a])):
            re, im = _split_complex(self.values[args])
            entries.append({"args": list(args), "re": re, "im": im})
        return json.dumps({"order": self.max_order, "entries": entries}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str, alphabet=None, exact=False) -> "CorrelatorTable":
        doc = json.loads(text)
        table = cls(tuple(alphabet) if alphabet is not None else (), max_order=doc["order"])
        seen = []
        for e in doc["entries"]:
            args = tuple(e["args"])
            for a in args:
                if a not in seen:
                    seen.append(a)
            table.values[args] = _join_complex(e["re"], e["im"], exact)
        if alphabet is None:
            table.alphabet = tuple(seen)
        return table


def _split_complex(v):
    if isinstance(v, Fraction):
        return {"num": v.numerator, "den": v.denominator}, {"num": 0, "den": 1}
    if hasattr(v, "x") and hasattr(v, "y"):  # sympy GaussianRational
        re, im = Fraction(int(v.x.numerator), int(v.x.denominator)), Fraction(
            int(v.y.numerator), int(v.y.denominator)
        )
        return {"num": re.numerator, "den": re.denominator}, {"num": im.numerator, "den": im.denominator}
    c = complex(v)
    return c.real, c.imag


def _join_complex(re, im, exact):
    if isinstance(re, dict):
        fr = Fraction(re["num"], re["den"])
        fi = Fraction(im["num"], im["den"])
        if exact:
            from sympy.polys.domains import QQ_I

            return QQ_I(fr, fi)
        return complex(fr, fi)
    return complex(re, im)


# --------------------------------------------------------------------------
# the transform


def _product(values):
    it = iter(values)
    acc = next(it)
    for v in it:
        acc = acc * v
    return acc


def moments_from_cumulants(cumulants, n: int, args: Sequence[Any], one=1):
    """Full n-point value from truncated values, summing over all partitions.

    ``cumulants`` is anything indexable by written-order argument tuples
    (a :class:`CorrelatorTable`, a dict, ...).  ``one`` is returned at n = 0.
    """
    args = tuple(args)
    if len(args) != n:
        raise OrderError(f"expected {n} arguments, got {len(args)}")
    if n == 0:
        return one
    total = None
    for blocks in _partition_positions(n):
        term = _product(_lookup(cumulants, tuple(args[p] for p in block)) for block in blocks)
        total = term if total is None else total + term
    return total


def _lookup(table, key):
    try:
        return table[key]
    except MissingEntryError:
        raise
    except KeyError:
        raise MissingEntryError(f"no entry for arguments {key!r}") from None


def cumulants_from_moments(moments, n: int, args: Sequence[Any], cache: dict | None = None):
    """Truncated n-point value, solving the partition expansion order by order.

    Splitting off the block that contains the leftmost argument gives

        w(a) = sum_{S containing position 0} wT(a_S) * w(a_rest)

    so ``wT(a) = w(a) - sum_{S != all} wT(a_S) w(a_rest)``.  Truncated
    values of sub-tuples are memoised in ``cache`` (keyed by argument tuple).
    """
    args = tuple(args)
    if len(args) != n:
        raise OrderError(f"expected {n} arguments, got {len(args)}")
    if n == 0:
        raise OrderError("truncated functionals start at order 1")
    norm = _lookup(moments, ())
    if not _equals_one(norm):
        raise NormalisationError(f"omega_0 = {norm!r}, expected 1")
    if cache is None:
        cache = {}
    return _cumulant(moments, args, cache)


def _equals_one(v) -> bool:
    if hasattr(v, "x") and hasattr(v, "y"):  # sympy GaussianRational
        return v.x == 1 and v.y == 0
    return v == 1


def _cumulant(moments, args, cache):
    hit = cache.get(args)
    if hit is not None:
        return hit
    m = len(args)
    value = _lookup(moments, args)
    if m > 1:
        rest_positions = range(1, m)
        for size in range(0, m - 1):
            for others in itertools.combinations(rest_positions, size):
                inside = (0,) + others
                chosen = set(inside)
                sub = tuple(args[p] for p in inside)
                rest = tuple(args[p] for p in range(m) if p not in chosen)
                value = value - _cumulant(moments, sub, cache) * _lookup(moments, rest)
    cache[args] = value
    return value


def cumulant_table(moments: CorrelatorTable, max_order: int | None = None) -> CorrelatorTable:
    """Truncated table for every tuple over the alphabet up to ``max_order``."""
    max_order = moments.max_order if max_order is None else max_order
    out = CorrelatorTable(moments.alphabet, max_order=max_order)
    cache: dict = {}
    for n in range(1, max_order + 1):
        for t in moments.tuples(n):
            out.values[t] = cumulants_from_moments(moments, n, t, cache)
    return out


def moment_table(cumulants: CorrelatorTable, max_order: int | None = None, one=1) -> CorrelatorTable:
    max_order = cumulants.max_order if max_order is None else max_order
    out = CorrelatorTable(cumulants.alphabet, max_order=max_order)
    out.values[()] = one
    for n in range(1, max_order + 1):
        for t in cumulants.tuples(n):
            out.values[t] = moments_from_cumulants(cumulants, n, t, one)
    return out


def scalar_cumulants(moments: Sequence[Any]) -> list:
    """Cumulants of a single-variable moment sequence ``m_0 = 1, m_1, ...``.

    Specialisation of the transform to a one-letter alphabet, via
    ``k_n = m_n - sum_{j=1}^{n-1} C(n-1, j-1) k_j m_{n-j}``.
    """
    from math import comb

    if moments[0] != 1:
        raise NormalisationError(f"m_0 = {moments[0]!r}, expected 1")
    k = [None]
    for n in range(1, len(moments)):
        v = moments[n]
        for j in range(1, n):
            v = v - comb(n - 1, j - 1) * k[j] * moments[n - j]
        k.append(v)
    return k


# --------------------------------------------------------------------------
# generalised-free-field swap identities


def antisymmetric_two_point(state: NPointFunctional, a, b):
    """``w_2-(a, b) = (w_2(a, b) - w_2(b, a)) / 2``."""
    return (state.npoint((a, b)) - state.npoint((b, a))) / 2


def swap_difference(state: NPointFunctional, n: int, i: int, test_fns: Sequence[Any]):
    """Both sides of the adjacent-swap identity at labels ``i, i+1``.

    Returns ``(lhs, rhs)`` with ``lhs = w_n(args) - w_n(args with x_i, x_{i+1}
    exchanged)`` and ``rhs = 2 w_2-(x_{i+1}, x_i) w_{n-2}(remaining args)``.
    A generalised free field state has ``lhs == rhs``.
    """
    args = tuple(test_fns)
    if n < 2:
        raise OrderError("swap identities need n >= 2")
    if len(args) != n:
        raise OrderError(f"expected {n} test functions, got {len(args)}")
    if not 1 <= i < n:
        raise OrderError(f"slot index i={i} outside 1..{n - 1}")
    p = n - i - 1  # position of x_{i+1}; x_i sits at p + 1
    swapped = args[:p] + (args[p + 1], args[p]) + args[p + 2:]
    lhs = state.npoint(args) - state.npoint(swapped)
    rest = args[:p] + args[p + 2:]
    rhs = 2 * antisymmetric_two_point(state, args[p], args[p + 1]) * state.npoint(rest)
    return lhs, rhs


@dataclass
class SwapResidual:
    order: int
    slot: int
    args: tuple
    lhs: complex
    rhs: complex
    residual: float


@dataclass
class GFFReport:
    verdict: str
    tol: float
    worst_residual: dict[int, float]
    worst_case: dict[int, SwapResidual]
    checked: int

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def failing_orders(self) -> list[int]:
        return [n for n, r in self.worst_residual.items() if not r <= self.tol]

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "tol": self.tol,
            "checked": self.checked,
            "worst_residual": {str(n): r for n, r in self.worst_residual.items()},
            "failing_orders": self.failing_orders(),
        }


def _magnitude(v) -> float:
    if hasattr(v, "x") and hasattr(v, "y"):  # sympy GaussianRational
        return math.hypot(float(Fraction(int(v.x.numerator), int(v.x.denominator))),
                          float(Fraction(int(v.y.numerator), int(v.y.denominator))))
    return float(abs(v))


def relative_swap_residual(state, n, i, args, lhs=None, rhs=None) -> float:
    """``|lhs - rhs|`` relative to the magnitudes entering the identity."""
    if lhs is None:
        lhs, rhs = swap_difference(state, n, i, args)
    p = n - i - 1
    swapped = args[:p] + (args[p + 1], args[p]) + args[p + 2:]
    diff = _magnitude(lhs - rhs)
    if diff == 0:
        return 0.0
    scale = max(_magnitude(lhs), _magnitude(rhs), _magnitude(state.npoint(args)), _magnitude(state.npoint(swapped)))
    return diff / scale


def sample_tuples(test_fns: Sequence[Any], n: int, limit: int | None, rng: random.Random):
    """All n-tuples over ``test_fns`` if at most ``limit`` of them, else a seeded sample."""
    k = len(test_fns)
    total = k ** n
    if limit is None or total <= limit:
        return [tuple(t) for t in itertools.product(test_fns, repeat=n)]
    return [tuple(rng.choice(test_fns) for _ in range(n)) for _ in range(limit)]


def is_generalised_free(
    state: NPointFunctional,
    n_max: int,
    tol: float,
    test_fns: Sequence[Any],
    limit: int | None = 200,
    seed: int = 0,
    tuples: Mapping[int, Sequence[tuple]] | None = None,
) -> GFFReport:
    """Check every adjacent-swap identity for orders ``3..n_max``.

    Argument tuples are drawn from ``test_fns`` (all of them when there are
    at most ``limit`` per order) unless given explicitly in ``tuples``.
    """
    rng = random.Random(seed)
    worst: dict[int, float] = {}
    worst_case: dict[int, SwapResidual] = {}
    checked = 0
    for n in range(3, n_max + 1):
        cases = tuples[n] if tuples is not None and n in tuples else sample_tuples(test_fns, n, limit, rng)
        worst[n] = 0.0
        for args in cases:
            args = tuple(args)
            for i in range(1, n):
                lhs, rhs = swap_difference(state, n, i, args)
                r = relative_swap_residual(state, n, i, args, lhs, rhs)
                checked += 1
                if r > worst[n] or n not in worst_case:
                    worst[n] = max(worst[n], r)
                    worst_case[n] = SwapResidual(n, i, args, lhs, rhs, r)
    verdict = "PASS" if all(r <= tol for r in worst.values()) else "FAIL"
    return GFFReport(verdict, tol, worst, worst_case, checked)


def truncated_is_symmetric(moments: CorrelatorTable, n: int, equal=None) -> bool:
    """Whether every order-n truncated value is invariant under argument permutations."""
    equal = equal or (lambda a, b: a == b)
    cache: dict = {}
    for t in moments.tuples(n):
        base = cumulants_from_moments(moments, n, t, cache)
        for perm in set(itertools.permutations(t)):
            if not equal(base, cumulants_from_moments(moments, n, perm, cache)):
                return False
    return True
