"""Membership in the graph-immersion cones on flat 1+1 Minkowski space.

A configuration ``(x_n, k_n; ...; x_1, k_1)`` is instantiated by a graph
immersion when there are future causal covectors ``xi_ij`` on edges
``i < j`` with

    k_i = sum_{j > i} xi_ij - sum_{j < i} xi_ji .

Covariantly constant covectors are constant in flat space, and parallel
edges add up, so without loss of generality the graph is complete over the
admissible pairs and each edge carries ``xi_ij = a_ij l+ + b_ij l-`` with
``a_ij, b_ij >= 0``.  The ``smooth`` variant admits every pair; ``causal``
and ``lightlike`` admit causally related pairs only (in flat 1+1 space a
piecewise light-like curve joins exactly the causally related points, so
the two coincide).  In null coordinates the system splits into two
independent flow problems, each solved exactly by the simplex in
:mod:`gffkit.microlocal.lp`.

Slots are stored in label order: ``slots[0]`` is ``(x_1, k_1)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from gffkit.errors import QueryError
from gffkit.microlocal.geometry import (
    ZERO,
    Covector1p1,
    Point1p1,
    as_rational,
    causally_related,
    rational_to_json,
)
from gffkit.microlocal.lp import find_nonnegative_solution

VARIANTS = ("smooth", "causal", "lightlike")


def _check_variant(variant: str) -> str:
    if variant not in VARIANTS:
        raise QueryError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    return variant


@dataclass(frozen=True)
class WFQuery:
    slots: tuple[tuple[Point1p1, Covector1p1], ...]
    variant: str = "smooth"

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple((p, k) for p, k in self.slots))
        _check_variant(self.variant)
        if not self.slots:
            raise QueryError("a query needs at least one slot")
        if all(k.is_zero() for _, k in self.slots):
            raise QueryError("query lies on the zero section")

    @classmethod
    def from_written(cls, written: Sequence[tuple[Point1p1, Covector1p1]], variant="smooth"):
        """Build from slots listed as ``(x_n, k_n), ..., (x_1, k_1)``."""
        return cls(tuple(reversed(tuple(written))), variant)

    @property
    def n(self) -> int:
        return len(self.slots)

    @property
    def points(self) -> tuple[Point1p1, ...]:
        return tuple(p for p, _ in self.slots)

    @property
    def covectors(self) -> tuple[Covector1p1, ...]:
        return tuple(k for _, k in self.slots)

    def negated(self) -> "WFQuery":
        return WFQuery(tuple((p, -k) for p, k in self.slots), self.variant)

    def reversed(self) -> "WFQuery":
        return WFQuery(tuple(reversed(self.slots)), self.variant)

    def with_variant(self, variant: str) -> "WFQuery":
        return WFQuery(self.slots, variant)

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "slots": [
                {"label": i + 1, "point": p.to_json(), "covector": k.to_json()}
                for i, (p, k) in enumerate(self.slots)
            ],
        }

    @classmethod
    def from_json(cls, d: dict) -> "WFQuery":
        try:
            slots = sorted(d["slots"], key=lambda s: s.get("label", 0))
            return cls(
                tuple((Point1p1.from_json(s["point"]), Covector1p1.from_json(s["covector"])) for s in slots),
                d.get("variant", "smooth"),
            )
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, QueryError):
                raise
            raise QueryError(f"malformed query: {exc}") from exc


@dataclass(frozen=True)
class ImmersionWitness:
    """Null-basis edge coefficients ``{(i, j): (a_ij, b_ij)}`` for labels ``i < j``."""

    n: int
    edges: dict = field(default_factory=dict)

    def covectors(self) -> tuple[Covector1p1, ...]:
        ks = [ZERO] * self.n
        for (i, j), (a, b) in self.edges.items():
            xi = Covector1p1.from_null(a, b)
            ks[i - 1] = ks[i - 1] + xi
            ks[j - 1] = ks[j - 1] - xi
        return tuple(ks)

    def is_valid_for(self, query: WFQuery) -> bool:
        if query.n != self.n:
            return False
        for (i, j), (a, b) in self.edges.items():
            if not (1 <= i < j <= self.n) or a < 0 or b < 0:
                return False
            if query.variant != "smooth" and (a or b) and not causally_related(
                query.points[i - 1], query.points[j - 1]
            ):
                return False
        return self.covectors() == query.covectors

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "edges": [
                {"i": i, "j": j, "a": rational_to_json(a), "b": rational_to_json(b)}
                for (i, j), (a, b) in sorted(self.edges.items())
            ],
        }

    @classmethod
    def from_json(cls, d: dict) -> "ImmersionWitness":
        return cls(
            int(d["n"]),
            {(e["i"], e["j"]): (as_rational(e["a"]), as_rational(e["b"])) for e in d["edges"]},
        )


def admissible_pairs(points: Sequence[Point1p1], variant: str) -> list[tuple[int, int]]:
    n = len(points)
    pairs = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if variant == "smooth" or causally_related(points[i - 1], points[j - 1]):
                pairs.append((i, j))
    return pairs


def _flow(n: int, pairs, supply) -> list[Fraction] | None:
    # row i: sum_{j>i} f_ij - sum_{j<i} f_ji = supply_i
    A = [[0] * len(pairs) for _ in range(n)]
    for e, (i, j) in enumerate(pairs):
        A[i - 1][e] = 1
        A[j - 1][e] = -1
    return find_nonnegative_solution(A, list(supply))


def gamma_member(q: WFQuery) -> ImmersionWitness | None:
    """Exact witness of membership in the cone of ``q.variant``, or ``None``."""
    pairs = admissible_pairs(q.points, q.variant)
    nulls = [k.null for k in q.covectors]
    a = _flow(q.n, pairs, [v[0] for v in nulls])
    if a is None:
        return None
    b = _flow(q.n, pairs, [v[1] for v in nulls])
    if b is None:
        return None
    edges = {pair: (a[e], b[e]) for e, pair in enumerate(pairs) if a[e] or b[e]}
    witness = ImmersionWitness(q.n, edges)
    assert witness.is_valid_for(q)
    return witness


def gamma2_closed_form(q: WFQuery) -> bool:
    """``k_1`` future and nonzero, ``k_2 = -k_1`` (plus causal relation if required)."""
    if q.n != 2:
        raise QueryError("closed form only for n = 2")
    (x1, k1), (x2, k2) = q.slots
    if q.variant != "smooth" and not causally_related(x1, x2):
        return False
    return k1.is_future() and not k1.is_zero() and k2 == -k1


# --------------------------------------------------------------------------
# random generation and the cone property suite


def random_rational(rng: random.Random, bound: int = 4, den: int = 4) -> Fraction:
    return Fraction(rng.randint(-bound * den, bound * den), rng.randint(1, den))


def random_point(rng: random.Random) -> Point1p1:
    return Point1p1(random_rational(rng, 3), random_rational(rng, 3))


def random_points(rng: random.Random, n: int, variant: str) -> list[Point1p1]:
    """Random base points; causal variants get a mix of timelike and spacelike pairs."""
    if variant == "smooth" or rng.random() < 0.3:
        return [random_point(rng) for _ in range(n)]
    pts = []
    for _ in range(n):
        t = random_rational(rng, 6)
        x = random_rational(rng, 1)
        pts.append(Point1p1(t, x))
    return pts


def random_future(rng: random.Random, allow_zero=False) -> Covector1p1:
    while True:
        a = Fraction(rng.randint(0, 12), rng.randint(1, 4))
        b = Fraction(rng.randint(0, 12), rng.randint(1, 4))
        if rng.random() < 0.15:
            a = Fraction(0)
        elif rng.random() < 0.15:
            b = Fraction(0)
        k = Covector1p1.from_null(a, b)
        if allow_zero or not k.is_zero():
            return k


def random_member(rng: random.Random, n: int, variant: str = "smooth",
                  points: Sequence[Point1p1] | None = None, max_tries: int = 200) -> WFQuery | None:
    """A random cone member built from a random witness (``None`` if none can be built)."""
    for _ in range(max_tries):
        pts = list(points) if points is not None else random_points(rng, n, variant)
        pairs = admissible_pairs(pts, variant)
        if not pairs:
            if points is not None:
                return None
            continue
        edges = {}
        for pair in pairs:
            if rng.random() < 0.6:
                xi = random_future(rng)
                edges[pair] = xi.null
        w = ImmersionWitness(n, edges)
        ks = w.covectors()
        if all(k.is_zero() for k in ks):
            continue
        return WFQuery(tuple(zip(pts, ks)), variant)
    return None


def random_query(rng: random.Random, n: int, variant: str = "smooth") -> WFQuery:
    pts = random_points(rng, n, variant)
    while True:
        ks = [Covector1p1(random_rational(rng), random_rational(rng)) for _ in range(n)]
        if not all(k.is_zero() for k in ks):
            return WFQuery(tuple(zip(pts, ks)), variant)


def interleave(factors: Sequence[Sequence], positions: Sequence[Sequence[int]], n: int) -> list:
    """Place the items of each factor at the given label positions (1-based, increasing)."""
    out = [None] * n
    for items, pos in zip(factors, positions):
        if list(pos) != sorted(pos):
            raise ValueError("interleaving must preserve the order within each factor")
        for item, p in zip(items, pos):
            out[p - 1] = item
    if any(o is None for o in out):
        raise ValueError("positions do not cover all labels")
    return out


def _random_composition(rng: random.Random, n: int) -> list[int]:
    # a single block is allowed so that n = 2 has a non-trivial factor
    m = rng.randint(1, min(3, n))
    cuts = sorted(rng.sample(range(1, n), m - 1))
    bounds = [0] + cuts + [n]
    return [bounds[i + 1] - bounds[i] for i in range(m)]


@dataclass
class PropertyItem:
    name: str
    samples: int = 0
    passed: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.samples > 0 and self.passed == self.samples

    def record(self, good: bool, detail=None):
        self.samples += 1
        if good:
            self.passed += 1
        elif len(self.failures) < 5:
            self.failures.append(detail)


def cone_properties_suite(n: int, samples: int, seed: int = 0, variant: str = "smooth") -> dict[str, PropertyItem]:
    """Randomised checks of convexity, pointedness, tensor closure and reversal."""
    if not 2 <= n <= 6:
        raise QueryError("the property suite supports 2 <= n <= 6")
    _check_variant(variant)
    rng = random.Random(seed)
    items = {k: PropertyItem(k) for k in ("convex_cone", "pointed", "tensor_permutation", "reversal")}

    while items["convex_cone"].samples < samples:
        q1 = random_member(rng, n, variant)
        q2 = random_member(rng, n, variant, points=q1.points) if q1 else None
        if q2 is None:
            continue
        c1, c2 = Fraction(rng.randint(1, 9), rng.randint(1, 5)), Fraction(rng.randint(1, 9), rng.randint(1, 5))
        ks = [a.scale(c1) + b.scale(c2) for a, b in zip(q1.covectors, q2.covectors)]
        combo = WFQuery(tuple(zip(q1.points, ks)), variant)
        items["convex_cone"].record(gamma_member(combo) is not None, combo.to_json())

    for _ in range(samples):
        q = random_member(rng, n, variant)
        ok = gamma_member(q) is not None and gamma_member(q.negated()) is None
        items["pointed"].record(ok, q.to_json())

    while items["tensor_permutation"].samples < samples:
        sizes = _random_composition(rng, n)
        factors = []
        for size in sizes:
            if size >= 2 and rng.random() < 0.75:
                member = random_member(rng, size, variant)
                factors.append(list(member.slots) if member else None)
            else:  # zero-section factor
                factors.append([(random_point(rng), ZERO) for _ in range(size)])
        if any(f is None for f in factors) or all(k.is_zero() for f in factors for _, k in f):
            continue
        labels = list(range(1, n + 1))
        rng.shuffle(labels)
        positions, start = [], 0
        for size in sizes:
            positions.append(sorted(labels[start:start + size]))
            start += size
        q = WFQuery(tuple(interleave(factors, positions, n)), variant)
        items["tensor_permutation"].record(gamma_member(q) is not None, q.to_json())

    for _ in range(samples):
        q = random_member(rng, n, variant)
        rev = q.reversed()
        ok = gamma_member(rev.negated()) is not None and gamma_member(rev) is None
        items["reversal"].record(ok, q.to_json())
    return items
