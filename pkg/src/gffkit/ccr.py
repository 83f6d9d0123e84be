"""Free *-algebra of field words with scalar commutators.

A word ``(g1, g2, ..., gk)`` stands for the product ``Phi(g1) Phi(g2) ... Phi(gk)``;
the empty word is the unit.  Coefficients are taken from whatever ring the
caller uses: Python numbers for numerics, sympy expressions when commutator
values are kept as indeterminates.  Zero coefficients are pruned only when
they are exactly zero.
"""

from __future__ import annotations

import heapq
import json
import random
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

from gffkit.errors import CommutatorTableError, OrderError


@dataclass(frozen=True, order=True)
class Generator:
    """Smeared field symbol ``Phi(f_id)``; ``conj`` marks the label ``conj(f_id)``."""

    id: int
    conj: bool = False

    def star(self) -> "Generator":
        return Generator(self.id, not self.conj)

    def __repr__(self):
        return f"Phi({'~' if self.conj else ''}f{self.id})"


Word = tuple  # tuple[Generator, ...]


def _is_sympy(c) -> bool:
    return type(c).__module__.startswith("sympy")


def _normalise(c):
    if _is_sympy(c):
        return c.expand()
    return c


def _is_zero(c) -> bool:
    return c == 0


def _conj(c):
    return c.conjugate()


def _times_i(c):
    if _is_sympy(c):
        import sympy

        return sympy.I * c
    return 1j * c


class AlgebraElement:
    """Finite linear combination of words; treat instances as immutable."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Word, Any] | Iterable[tuple[Word, Any]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Word, Any] = {}
        for word, c in items:
            word = tuple(word)
            acc[word] = acc[word] + c if word in acc else c
        self._terms = {}
        for word in sorted(acc):
            c = _normalise(acc[word])
            if not _is_zero(c):
                self._terms[word] = c

    @classmethod
    def unit(cls, coeff=1) -> "AlgebraElement":
        return cls({(): coeff})

    @classmethod
    def field(cls, g: Generator | int, coeff=1) -> "AlgebraElement":
        if isinstance(g, int):
            g = Generator(g)
        return cls({(g,): coeff})

    @classmethod
    def word(cls, *gens: Generator | int, coeff=1) -> "AlgebraElement":
        return cls({tuple(Generator(g) if isinstance(g, int) else g for g in gens): coeff})

    @property
    def terms(self) -> dict[Word, Any]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def max_length(self) -> int:
        return max((len(w) for w in self._terms), default=0)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            if other == 0:
                return not self._terms
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __add__(self, other):
        other = _coerce(other)
        return AlgebraElement(list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            return AlgebraElement({w: c * other for w, c in self._terms.items()})
        return multiply(self, other)

    def __rmul__(self, scalar):
        return AlgebraElement({w: scalar * c for w, c in self._terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not defined")
        out = AlgebraElement.unit()
        for _ in range(k):
            out = out * self
        return out

    def star(self) -> "AlgebraElement":
        return adjoint(self)

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for w, c in self._terms.items():
            parts.append(f"({c})*" + ("I" if not w else "".join(map(repr, w))))
        return " + ".join(parts)

    def to_json(self) -> str:
        out = []
        for w, c in self._terms.items():
            z = complex(c)
            out.append(
                {
                    "coeff": {"re": z.real, "im": z.imag},
                    "word": [{"id": g.id, "conj": g.conj} for g in w],
                }
            )
        return json.dumps(out, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "AlgebraElement":
        terms = []
        for item in json.loads(text):
            c = complex(item["coeff"]["re"], item["coeff"]["im"])
            terms.append((tuple(Generator(g["id"], bool(g["conj"])) for g in item["word"]), c))
        return cls(terms)


def _coerce(x) -> AlgebraElement:
    if isinstance(x, AlgebraElement):
        return x
    return AlgebraElement.unit(x)


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Bilinear concatenation of words."""
    return AlgebraElement(
        [(wa + wb, ca * cb) for wa, ca in a.items() for wb, cb in b.items()]
    )


def adjoint(a: AlgebraElement) -> AlgebraElement:
    """Reverse each word, flip conjugation labels, conjugate coefficients."""
    return AlgebraElement(
        [(tuple(g.star() for g in reversed(w)), _conj(c)) for w, c in a.items()]
    )


class CommutatorTable:
    """Antisymmetric table ``E(g, h)`` for the relation ``[Phi(g), Phi(h)] = i E(g, h)``."""

    def __init__(self, values: Mapping[tuple, Any]):
        self._values: dict[tuple[Generator, Generator], Any] = {}
        for (g, h), v in values.items():
            g = Generator(g) if isinstance(g, int) else g
            h = Generator(h) if isinstance(h, int) else h
            if g == h:
                if v != 0:
                    raise ValueError(f"E({g}, {g}) must vanish, got {v}")
                continue
            if (h, g) in self._values:
                if _normalise(self._values[(h, g)] + v) != 0:
                    raise ValueError(f"E({g}, {h}) and E({h}, {g}) are not antisymmetric")
                continue
            self._values[(g, h)] = v

    @classmethod
    def symbolic(cls, generators: Sequence[Generator | int], prefix: str = "E") -> "CommutatorTable":
        """Table of independent sympy indeterminates ``E_a_b`` for ``a < b``."""
        import sympy

        gens = sorted(Generator(g) if isinstance(g, int) else g for g in generators)
        values = {}
        for i, g in enumerate(gens):
            for h in gens[i + 1:]:
                name = f"{prefix}_{'c' if g.conj else ''}{g.id}_{'c' if h.conj else ''}{h.id}"
                values[(g, h)] = sympy.Symbol(name)
        return cls(values)

    def generators(self) -> set[Generator]:
        return {g for pair in self._values for g in pair}

    def __call__(self, g: Generator, h: Generator):
        if g == h:
            return 0
        if (g, h) in self._values:
            return self._values[(g, h)]
        if (h, g) in self._values:
            return -self._values[(h, g)]
        raise CommutatorTableError(f"no commutator value for ({g}, {h})")


def _rightmost_inversion(word: Word) -> int:
    for p in range(len(word) - 2, -1, -1):
        if word[p] > word[p + 1]:
            return p
    return -1


def _inversions(word: Word) -> int:
    return sum(1 for p in range(len(word)) for q in range(p + 1, len(word)) if word[p] > word[q])


def canonical_order(a: AlgebraElement, E: CommutatorTable) -> AlgebraElement:
    """Normal form with every word sorted non-decreasingly by generator.

    Rewrites ``... g h ... -> ... h g ... + i E(g, h) (... ...)`` at the
    rightmost inversion until no inversions remain.  A swap removes one
    inversion and a contraction removes two letters, so processing words in
    decreasing ``(length, inversions)`` order collects every contribution to
    a word before that word is rewritten; equal words are merged on the way.
    """
    pending: dict[Word, Any] = {}
    heap: list = []

    def push(word, c):
        if word in pending:
            pending[word] = pending[word] + c
        else:
            pending[word] = c
            heapq.heappush(heap, (-len(word), -_inversions(word), word))

    for word, c in a.items():
        push(word, c)
    done: dict[Word, Any] = {}
    while heap:
        _, _, word = heapq.heappop(heap)
        c = _normalise(pending.pop(word))
        if _is_zero(c):
            continue
        p = _rightmost_inversion(word)
        if p < 0:
            done[word] = c
            continue
        g, h = word[p], word[p + 1]
        push(word[:p] + (h, g) + word[p + 2:], c)
        side = E(g, h)
        if not _is_zero(side):
            push(word[:p] + word[p + 2:], c * _times_i(side))
    return AlgebraElement(done)


def borchers_identity_check(
    n: int,
    E: CommutatorTable,
    f: Generator | None = None,
    h: Generator | None = None,
) -> bool:
    """Whether ``Phi(f)^n Phi(h) = Phi(h) Phi(f)^n + n i E(f,h) Phi(f)^(n-1)``
    holds in the quotient, comparing normal forms exactly."""
    if n < 1:
        raise ValueError("n must be >= 1")
    f = f or Generator(1)
    h = h or Generator(0)
    F, H = AlgebraElement.field(f), AlgebraElement.field(h)
    lhs = F ** n * H
    rhs = H * F ** n + (n * _times_i(E(f, h))) * F ** (n - 1)
    return canonical_order(lhs, E) == canonical_order(rhs, E)


# --------------------------------------------------------------------------
# states


def _resolve(g: Generator, alphabet):
    if alphabet is None:
        return g
    handle = alphabet[g.id]
    if g.conj:
        return handle.conj() if hasattr(handle, "conj") else handle.conjugate()
    return handle


def expectation(a: AlgebraElement, state, alphabet: Sequence[Any] | None = None):
    """Linear extension of ``word -> w_n(word arguments)``; ``w(I) = 1``.

    ``alphabet[id]`` supplies the test function for ``Generator(id)``; the
    conjugate label resolves through the handle's ``conj()``.
    """
    cap = getattr(state, "max_order", None)
    if cap is not None and a.max_length() > cap:
        raise OrderError(f"element needs order {a.max_length()}, state supports {cap}")
    total = 0
    for word, c in a.items():
        if not word:
            total = total + c
            continue
        total = total + c * state.npoint(tuple(_resolve(g, alphabet) for g in word))
    return total


def state_commutator(state, alphabet: Sequence[Any] | None = None):
    """Commutator function of a state, ``E = -2i w_2-``, as a callable on generators."""

    def E(g: Generator, h: Generator):
        x, y = _resolve(g, alphabet), _resolve(h, alphabet)
        return -1j * (state.npoint((x, y)) - state.npoint((y, x)))

    return E


@dataclass
class Sandwich:
    left: AlgebraElement
    f: Generator
    h: Generator
    right: AlgebraElement


@dataclass
class CCRReport:
    residuals: list[float]
    tol: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    @property
    def passed(self) -> bool:
        return all(r < self.tol for r in self.residuals)

    def as_dict(self):
        return {"passed": self.passed, "tol": self.tol, "max_residual": self.max_residual,
                "residuals": self.residuals}


def random_sandwiches(generators: Sequence[Generator], count: int, max_len: int = 2, seed: int = 0):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        la, lb = rng.randint(0, max_len), rng.randint(0, max_len)
        left = AlgebraElement.word(*[rng.choice(generators) for _ in range(la)])
        right = AlgebraElement.word(*[rng.choice(generators) for _ in range(lb)])
        f, h = rng.sample(list(generators), 2)
        out.append(Sandwich(left, f, h, right))
    return out


def verify_ccr_descends(state, sample: Sequence[Sandwich], tol: float, alphabet=None, E=None) -> CCRReport:
    """Relative size of ``w(A (fh - hf - i E(f,h) I) B)`` over sandwiches.

    ``E`` defaults to the state's own commutator ``-2i w_2-``.
    """
    E = E or state_commutator(state, alphabet)
    residuals = []
    for s in sample:
        F, H = AlgebraElement.field(s.f), AlgebraElement.field(s.h)
        e = E(s.f, s.h)
        fh = expectation(s.left * F * H * s.right, state, alphabet)
        hf = expectation(s.left * H * F * s.right, state, alphabet)
        ab = expectation(s.left * s.right, state, alphabet)
        value = fh - hf - 1j * e * ab
        scale = max(abs(fh), abs(hf), abs(e * ab))
        residuals.append(0.0 if value == 0 else float(abs(value) / scale))
    return CCRReport(residuals, tol)
