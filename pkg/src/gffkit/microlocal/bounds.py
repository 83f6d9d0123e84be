"""Symbolic wavefront-set estimates as finite unions of product forms.

A :class:`ProductForm` on ``n`` labelled slots constrains each covector
independently to one of

    ``zero``  ``{0}``
    ``future`` the closed future cone
    ``past``   the closed past cone
    ``full``   the whole cotangent fibre

and additionally carries *links*.  A link ``(plus, minus)`` ties two slots
together as ``k_plus = xi``, ``k_minus = -xi`` with ``xi`` in the closed
future cone, i.e. a copy of the two-point cone; with ``causal=True`` the
base points must also be causally related whenever ``xi != 0``.  Base
points are otherwise unconstrained.  The zero section is never part of a
bound, so a form whose slots are all ``zero`` is empty.

Every kind and every link contains the zero covector, which is what makes
products with smooth (zero-wavefront) factors representable without extra
bookkeeping.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from gffkit.errors import PreconditionError, UnsupportedBoundError
from gffkit.microlocal.gamma import (
    ImmersionWitness,
    WFQuery,
    gamma_member,
    random_future,
    random_point,
    random_rational,
)
from gffkit.microlocal.geometry import ZERO, Covector1p1, Point1p1, causally_related

KINDS = ("zero", "future", "past", "full")

_MEET = {
    ("full", "full"): "full",
    ("full", "future"): "future",
    ("full", "past"): "past",
    ("future", "future"): "future",
    ("past", "past"): "past",
    ("future", "past"): "zero",
}


def meet_kind(a: str, b: str) -> str:
    if a == "zero" or b == "zero":
        return "zero"
    return _MEET.get((a, b)) or _MEET[(b, a)]


def kind_leq(a: str, b: str) -> bool:
    """Set inclusion between simple slot kinds."""
    return meet_kind(a, b) == a


def kind_contains(kind: str, k: Covector1p1) -> bool:
    if kind == "full":
        return True
    if kind == "zero":
        return k.is_zero()
    if kind == "future":
        return k.is_future()
    return k.is_past()


_NEG_KIND = {"zero": "zero", "future": "past", "past": "future", "full": "full"}


@dataclass(frozen=True, order=True)
class Link:
    plus: int
    minus: int
    causal: bool = False

    def __post_init__(self):
        if self.plus == self.minus:
            raise ValueError("a link needs two distinct slots")

    @property
    def slots(self) -> tuple[int, int]:
        return (self.plus, self.minus)


@dataclass(frozen=True)
class ProductForm:
    kinds: tuple[str, ...]
    links: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        kinds = tuple(self.kinds)
        for kd in kinds:
            if kd not in KINDS:
                raise ValueError(f"unknown slot kind {kd!r}")
        links = frozenset(self.links)
        for link in links:
            for s in link.slots:
                if not 1 <= s <= len(kinds):
                    raise ValueError(f"link slot {s} outside 1..{len(kinds)}")
        object.__setattr__(self, "kinds", kinds)
        object.__setattr__(self, "links", links)

    @property
    def n(self) -> int:
        return len(self.kinds)

    def linked_slots(self) -> set[int]:
        return {s for link in self.links for s in link.slots}

    def is_empty(self) -> bool:
        return not self.links and all(kd == "zero" for kd in self.kinds)

    def projection(self, s: int) -> str:
        """The set of covectors slot ``s`` can take, as a simple kind."""
        for link in self.links:
            if link.plus == s:
                return meet_kind(self.kinds[s - 1], "future")
            if link.minus == s:
                return meet_kind(self.kinds[s - 1], "past")
        return self.kinds[s - 1]

    def contains(self, q: WFQuery) -> bool:
        if q.n != self.n:
            return False
        for s, (_, k) in enumerate(q.slots, start=1):
            if not kind_contains(self.kinds[s - 1], k):
                return False
        for link in self.links:
            (xp, kp), (xm, km) = q.slots[link.plus - 1], q.slots[link.minus - 1]
            if not kp.is_future() or km != -kp:
                return False
            if link.causal and not kp.is_zero() and not causally_related(xp, xm):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "kinds": list(self.kinds),
            "links": [{"plus": l.plus, "minus": l.minus, "causal": l.causal} for l in sorted(self.links)],
        }

    @classmethod
    def from_json(cls, d: dict) -> "ProductForm":
        return normalise_form(
            d["kinds"], [Link(int(l["plus"]), int(l["minus"]), bool(l.get("causal", False))) for l in d.get("links", [])]
        )


def normalise_form(kinds: Sequence[str], links: Iterable[Link]) -> ProductForm:
    """Canonical form: collapse links that are forced to zero, merge duplicates.

    Raises :class:`UnsupportedBoundError` if two links share a slot in the
    same role with different partners (a three-slot constraint).
    """
    kinds = list(kinds)
    merged: dict[tuple[int, int], bool] = {}
    for link in links:
        merged[link.slots] = merged.get(link.slots, False) or link.causal

    changed = True
    while changed:
        changed = False
        for (p, m) in list(merged):
            if kinds[p - 1] in ("past", "zero") or kinds[m - 1] in ("future", "zero"):
                del merged[(p, m)]
                kinds[p - 1] = kinds[m - 1] = "zero"
                changed = True
        roles: dict[int, list[tuple[str, tuple[int, int]]]] = {}
        for pair in merged:
            roles.setdefault(pair[0], []).append(("plus", pair))
            roles.setdefault(pair[1], []).append(("minus", pair))
        for s, rs in roles.items():
            if len(rs) < 2:
                continue
            if len({r for r, _ in rs}) > 1:
                # the slot is both in V+ and V-, so every link through it vanishes
                for _, pair in rs:
                    if pair in merged:
                        del merged[pair]
                        kinds[pair[0] - 1] = kinds[pair[1] - 1] = "zero"
                changed = True
                break
            raise UnsupportedBoundError(
                f"slot {s} is the {rs[0][0]} end of several links; not a product form"
            )

    for (p, m) in merged:  # the link already implies these constraints
        kinds[p - 1] = "full"
        kinds[m - 1] = "full"
    return ProductForm(tuple(kinds), frozenset(Link(p, m, c) for (p, m), c in merged.items()))


def meet_forms(f: ProductForm, g: ProductForm) -> ProductForm:
    if f.n != g.n:
        raise ValueError("forms over different numbers of slots")
    kinds = [meet_kind(a, b) for a, b in zip(f.kinds, g.kinds)]
    # link slots were normalised to "full"; restore the link-implied cones first
    for form in (f, g):
        for link in form.links:
            kinds[link.plus - 1] = meet_kind(kinds[link.plus - 1], "future")
            kinds[link.minus - 1] = meet_kind(kinds[link.minus - 1], "past")
    return normalise_form(kinds, list(f.links) + list(g.links))


def form_includes(big: ProductForm, small: ProductForm) -> bool:
    """Exact inclusion ``small ⊆ big`` of two product forms."""
    if small.is_empty():
        return True
    big_linked = big.linked_slots()
    for s in range(1, small.n + 1):
        if s not in big_linked and not kind_leq(small.projection(s), big.kinds[s - 1]):
            return False
    for link in big.links:
        if small.projection(link.plus) == "zero" and small.projection(link.minus) == "zero":
            continue
        match = [l for l in small.links if l.slots == link.slots]
        if not match or (link.causal and not match[0].causal):
            return False
    return True


def _permute_form(f: ProductForm, perm: Sequence[int]) -> ProductForm:
    # new slot i carries old slot perm[i-1]
    where = {old: new for new, old in enumerate(perm, start=1)}
    kinds = tuple(f.kinds[old - 1] for old in perm)
    links = [Link(where[l.plus], where[l.minus], l.causal) for l in f.links]
    return normalise_form(kinds, links)


def _negate_form(f: ProductForm) -> ProductForm:
    return normalise_form(
        [_NEG_KIND[kd] for kd in f.kinds], [Link(l.minus, l.plus, l.causal) for l in f.links]
    )


class PolyhedralBound:
    """Finite union of product forms on ``n`` slots (labels ``1..n``)."""

    def __init__(self, n: int, forms: Iterable[ProductForm] = ()):
        self.n = n
        uniq = []
        for f in forms:
            if f.n != n:
                raise ValueError(f"form over {f.n} slots in a bound over {n}")
            if not f.is_empty() and f not in uniq:
                uniq.append(f)
        self.forms = tuple(sorted(uniq, key=lambda f: (f.kinds, sorted(f.links))))

    # constructors --------------------------------------------------------
    @classmethod
    def empty(cls, n: int) -> "PolyhedralBound":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "PolyhedralBound":
        return cls(n, [ProductForm(("full",) * n)])

    @classmethod
    def from_kinds(cls, *kinds: str) -> "PolyhedralBound":
        return cls(len(kinds), [ProductForm(tuple(kinds))])

    @classmethod
    def gamma2(cls, causal: bool = False) -> "PolyhedralBound":
        """The two-point cone: ``k_1`` future, ``k_2 = -k_1``."""
        return cls(2, [normalise_form(("full", "full"), [Link(1, 2, causal)])])

    # set algebra ---------------------------------------------------------
    def is_empty(self) -> bool:
        return not self.forms

    def union(self, other: "PolyhedralBound") -> "PolyhedralBound":
        self._same_n(other)
        return PolyhedralBound(self.n, self.forms + other.forms)

    __or__ = union

    def meet(self, other: "PolyhedralBound") -> "PolyhedralBound":
        self._same_n(other)
        return PolyhedralBound(self.n, [meet_forms(f, g) for f in self.forms for g in other.forms])

    __and__ = meet

    def includes(self, other: "PolyhedralBound") -> bool:
        """``other ⊆ self``, decided form by form (each form of ``other``
        inside a single form of ``self``)."""
        self._same_n(other)
        return all(any(form_includes(big, small) for big in self.forms) for small in other.forms)

    def equivalent(self, other: "PolyhedralBound") -> bool:
        return self.includes(other) and other.includes(self)

    def contains(self, q: WFQuery) -> bool:
        if all(k.is_zero() for k in q.covectors):
            return False
        return any(f.contains(q) for f in self.forms)

    def _same_n(self, other):
        if self.n != other.n:
            raise ValueError(f"bounds over {self.n} and {other.n} slots")

    # slot operations -----------------------------------------------------
    def permute(self, perm: Sequence[int]) -> "PolyhedralBound":
        """New slot ``i`` carries old slot ``perm[i-1]``."""
        if sorted(perm) != list(range(1, self.n + 1)):
            raise ValueError(f"{perm} is not a permutation of 1..{self.n}")
        return PolyhedralBound(self.n, [_permute_form(f, perm) for f in self.forms])

    def negate(self) -> "PolyhedralBound":
        return PolyhedralBound(self.n, [_negate_form(f) for f in self.forms])

    def reverse(self) -> "PolyhedralBound":
        return self.permute(list(range(self.n, 0, -1)))

    def swap(self) -> "PolyhedralBound":
        if self.n != 2:
            raise ValueError("swap is defined for two-slot bounds")
        return self.reverse()

    # sampling ------------------------------------------------------------
    def sample(self, rng: random.Random, variant: str = "smooth", max_tries: int = 100):
        """Random member ``(query, form)``; ``None`` for the empty bound."""
        if self.is_empty():
            return None
        for _ in range(max_tries):
            form = rng.choice(self.forms)
            q = sample_form(form, rng, variant)
            if q is not None:
                return q, form
        return None

    # serialisation -------------------------------------------------------
    def to_json(self) -> dict:
        return {"n": self.n, "forms": [f.to_json() for f in self.forms]}

    @classmethod
    def from_json(cls, d: dict) -> "PolyhedralBound":
        return cls(int(d["n"]), [ProductForm.from_json(f) for f in d["forms"]])

    def __eq__(self, other):
        return isinstance(other, PolyhedralBound) and self.n == other.n and self.forms == other.forms

    def __hash__(self):
        return hash((self.n, self.forms))

    def __repr__(self):
        return f"PolyhedralBound(n={self.n}, forms={len(self.forms)})"


def _random_kind_covector(rng: random.Random, kind: str) -> Covector1p1:
    if kind == "zero":
        return ZERO
    if kind == "future":
        return random_future(rng, allow_zero=rng.random() < 0.2)
    if kind == "past":
        return -random_future(rng, allow_zero=rng.random() < 0.2)
    return Covector1p1(random_rational(rng), random_rational(rng))


def _causal_partner(rng: random.Random, p: Point1p1) -> Point1p1:
    dt = random_rational(rng, 3)
    dx = Fraction(rng.randint(-8, 8), 8) * abs(dt)
    return Point1p1(p.t + dt, p.x + dx)


def sample_form(form: ProductForm, rng: random.Random, variant: str = "smooth") -> WFQuery | None:
    """Random non-zero-section member of a single form (``None`` if unlucky or empty)."""
    if form.is_empty():
        return None
    n = form.n
    points = [random_point(rng) for _ in range(n)]
    ks = [_random_kind_covector(rng, kd) for kd in form.kinds]
    for link in sorted(form.links):
        xi = random_future(rng, allow_zero=rng.random() < 0.1)
        ks[link.plus - 1] = xi
        ks[link.minus - 1] = -xi
        if link.causal:
            points[link.minus - 1] = _causal_partner(rng, points[link.plus - 1])
    if all(k.is_zero() for k in ks):
        return None
    q = WFQuery(tuple(zip(points, ks)), variant)
    assert form.contains(q)
    return q


def link_witness(form: ProductForm, q: WFQuery) -> ImmersionWitness | None:
    """Disconnected union of two-point graphs: one edge per link, ``xi = k_plus``.

    Only links with ``plus < minus`` orient as graph edges; ``None`` otherwise
    or if ``q`` has non-zero covectors outside the links.
    """
    linked = form.linked_slots()
    for s, k in enumerate(q.covectors, start=1):
        if s not in linked and not k.is_zero():
            return None
    edges = {}
    for link in form.links:
        if link.plus > link.minus:
            return None
        k = q.covectors[link.plus - 1]
        if not k.is_zero():
            edges[(link.plus, link.minus)] = k.null
    w = ImmersionWitness(q.n, edges)
    return w if w.is_valid_for(q) else None


# --------------------------------------------------------------------------
# deductions


def _filter_kinds(n: int) -> list[str]:
    kinds = ["full"] * n
    kinds[0] = "future"
    kinds[-1] = meet_kind(kinds[-1], "past")
    return kinds


def positivity_filter(b: PolyhedralBound, n: int | None = None) -> PolyhedralBound:
    """Intersect slot 1 with the closed future cone and slot ``n`` with the closed past cone."""
    n = b.n if n is None else n
    if n != b.n:
        raise ValueError(f"bound has {b.n} slots, filter asked for {n}")
    return b.meet(PolyhedralBound.from_kinds(*_filter_kinds(n)))


@dataclass
class SmoothnessCertificate:
    """For every slot, one permutation forcing it future and one forcing it past."""

    n: int
    future_perm: dict[int, tuple[int, ...]]
    past_perm: dict[int, tuple[int, ...]]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "slots": [
                {"slot": s, "future_perm": list(self.future_perm[s]), "past_perm": list(self.past_perm[s])}
                for s in range(1, self.n + 1)
            ],
        }


def derive_truncated_bound(n: int) -> tuple[PolyhedralBound, SmoothnessCertificate]:
    """Wavefront bound of a symmetric truncated ``n``-point function with positivity.

    The filtered full bound is intersected with all of its slot
    permutations.  The result is the empty bound for every ``n != 2``.
    """
    if n == 2:
        raise PreconditionError("not applicable for n = 2: the truncated two-point function need not be symmetric")
    if n < 1:
        raise PreconditionError("n must be >= 1")
    base = positivity_filter(PolyhedralBound.full(n), n)
    kinds = _filter_kinds(n)
    bound = base
    future_perm: dict[int, tuple[int, ...]] = {}
    past_perm: dict[int, tuple[int, ...]] = {}
    for perm in itertools.permutations(range(1, n + 1)):
        bound = bound.meet(base.permute(perm))
        for s in range(1, n + 1):
            moved = kinds[perm[s - 1] - 1]
            if kind_leq(moved, "future"):
                future_perm.setdefault(s, perm)
            if kind_leq(moved, "past"):
                past_perm.setdefault(s, perm)
    return bound, SmoothnessCertificate(n, future_perm, past_perm)


def verify_certificate(cert: SmoothnessCertificate) -> bool:
    """Re-check a certificate from scratch: under the listed permutations every
    slot is forced into both closed cones, whose intersection is ``{0}``."""
    n = cert.n
    kinds = _filter_kinds(n)
    forced = []
    for s in range(1, n + 1):
        fp, pp = cert.future_perm.get(s), cert.past_perm.get(s)
        if fp is None or pp is None:
            return False
        if sorted(fp) != list(range(1, n + 1)) or sorted(pp) != list(range(1, n + 1)):
            return False
        if not (kind_leq(kinds[fp[s - 1] - 1], "future") and kind_leq(kinds[pp[s - 1] - 1], "past")):
            return False
        forced.append(meet_kind("future", "past"))
    return all(k == "zero" for k in forced)


def _matchings(labels: Sequence[int]):
    """Maximal matchings of ``labels`` (one singleton when the count is odd)."""
    labels = list(labels)
    if len(labels) <= 1:
        yield []
        return
    first, rest = labels[0], labels[1:]
    if len(labels) % 2 == 1:
        for m in _matchings(rest):
            yield m  # ``first`` stays single
    for idx, other in enumerate(rest):
        remaining = rest[:idx] + rest[idx + 1:]
        if len(remaining) % 2 == 1 and len(labels) % 2 == 0:
            continue
        for m in _matchings(remaining):
            yield [(first, other)] + m


def maximal_matchings(n: int) -> list[list[tuple[int, int]]]:
    out = []
    for m in _matchings(range(1, n + 1)):
        if len(m) == n // 2 and m not in out:
            out.append(m)
    return out


def check_inside_gamma2(wf2: PolyhedralBound, samples: int = 50, seed: int = 0, variant: str = "smooth") -> list:
    """Structural inclusion in the two-point cone plus sampled membership checks.

    Returns a list of violations (empty when the precondition holds).
    """
    if wf2.n != 2:
        return ["bound is not a two-slot bound"]
    problems = []
    cone = PolyhedralBound.gamma2(causal=variant != "smooth")
    if not cone.includes(wf2):
        problems.append("bound is not structurally contained in the two-point cone")
    rng = random.Random(seed)
    for _ in range(samples if not wf2.is_empty() else 0):
        got = wf2.sample(rng, variant)
        if got is None:
            continue
        q, _ = got
        if gamma_member(q) is None:
            problems.append({"outside": q.to_json()})
            if len(problems) > 5:
                break
    return problems


def assemble_musc_bound(wf2: PolyhedralBound, n: int, variant: str = "smooth",
                        samples: int = 50, seed: int = 0) -> PolyhedralBound:
    """Bound for the ``n``-point function when only the truncated two-point part is singular.

    Union over maximal matchings ``{(i, j)}`` (``i < j``) of the products of
    ``wf2`` placed on each pair (its slot 1 on ``i``, slot 2 on ``j``) and
    zero on any unmatched slot.
    """
    problems = check_inside_gamma2(wf2, samples, seed, variant)
    if problems:
        raise PreconditionError(f"two-point bound is not inside the cone: {problems[:3]}")
    if n == 2:
        return PolyhedralBound(2, wf2.forms)
    forms = []
    for matching in maximal_matchings(n):
        for choice in itertools.product(wf2.forms, repeat=len(matching)):
            kinds = ["zero"] * n
            links = []
            for (i, j), f in zip(matching, choice):
                kinds[i - 1], kinds[j - 1] = f.kinds
                for l in f.links:
                    where = {1: i, 2: j}
                    links.append(Link(where[l.plus], where[l.minus], l.causal))
            forms.append(normalise_form(kinds, links))
    return PolyhedralBound(n, forms)


def contract_bound(b: PolyhedralBound, keep: tuple[int, int]) -> PolyhedralBound:
    """Two-slot bound of configurations that, padded with zero covectors
    elsewhere, lie in ``b``.  ``keep = (i, i + 1)``: label ``i`` becomes
    slot 1 and ``i + 1`` slot 2."""
    i, j = keep
    if not (1 <= i and j == i + 1 and j <= b.n):
        raise PreconditionError(f"kept slots must be adjacent labels inside 1..{b.n}, got {keep}")
    pad = ["zero"] * b.n
    pad[i - 1] = pad[j - 1] = "full"
    padded = b.meet(PolyhedralBound.from_kinds(*pad))
    forms = []
    for f in padded.forms:
        where = {i: 1, j: 2}
        links = [Link(where[l.plus], where[l.minus], l.causal) for l in f.links]
        forms.append(normalise_form((f.kinds[i - 1], f.kinds[j - 1]), links))
    return PolyhedralBound(2, forms)


@dataclass
class HadamardReport:
    wf2: PolyhedralBound
    wf2_plus: PolyhedralBound
    wf2_minus: PolyhedralBound
    checks: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "checks": dict(self.checks),
            "wf2": self.wf2.to_json(),
            "wf2_minus": self.wf2_minus.to_json(),
        }


def hadamard2_relations(wf2: PolyhedralBound, wf_difference: PolyhedralBound | None = None,
                        variant: str = "smooth", samples: int = 100, seed: int = 0) -> HadamardReport:
    """Bounds for the (anti)symmetric parts of a two-point function with ``WF ⊆ wf2``.

    Positivity makes the two-point wavefront set invariant under
    ``swap∘negate``, so ``wf2`` is first closed under it.  The swapped
    function has the swapped bound, and the antisymmetric part has the union.
    ``wf_difference`` bounds the difference of two such two-point
    functions; it defaults to ``wf2``.
    """
    problems = check_inside_gamma2(wf2, samples // 2, seed, variant)
    if problems:
        raise PreconditionError(f"two-point bound is not inside the cone: {problems[:3]}")
    sym = wf2 | wf2.swap().negate()
    minus = sym | sym.swap()
    plus = minus
    cone = PolyhedralBound.gamma2(causal=variant != "smooth")
    both = cone | cone.negate()

    rng = random.Random(seed)
    reflection_ok = True
    for _ in range(samples if not minus.is_empty() else 0):
        got = minus.sample(rng, variant)
        if got is None:
            continue
        q, _ = got
        if not (minus.contains(q.reversed()) and minus.contains(q.negated())):
            reflection_ok = False
            break

    w = wf2 if wf_difference is None else wf_difference
    w_tilde = w.swap()
    w_minus = w | w_tilde
    checks = {
        "swap_and_negation_symmetric": minus.equivalent(minus.swap()) and minus.equivalent(minus.negate()),
        "sampled_reflections_are_members": reflection_ok,
        "inside_cone_union": both.includes(minus),
        "intersection_with_cone_recovers_wf2": (minus & cone).equivalent(sym),
        "difference_parts_disjoint": (w & w_tilde).is_empty(),
        "difference_antisymmetric_part_empty_iff_difference_empty": w_minus.is_empty() == w.is_empty(),
    }
    return HadamardReport(sym, plus, minus, checks)
