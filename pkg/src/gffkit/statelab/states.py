"""State models: n-point functionals evaluated on packet tuples in written order."""

from __future__ import annotations

import cmath
import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from gffkit.errors import NormalisationError, OrderError
from gffkit.statelab.kernels import TwoPointModel, model_from_json, model_to_json

DEFAULT_CAP = 12


class StateModel:
    max_order: int | None = DEFAULT_CAP

    def npoint(self, fns: Sequence) -> complex:
        raise NotImplementedError

    def _check_order(self, n: int) -> None:
        if self.max_order is not None and n > self.max_order:
            raise OrderError(f"order {n} exceeds this state's cap {self.max_order}")

    def masses(self) -> set[float]:
        return set()


def _pair_table(model: TwoPointModel, fns) -> list[list[complex]]:
    # M[p][q] for written positions p < q: the left argument sits at p
    n = len(fns)
    return [[model(fns[p], fns[q]) if p < q else 0j for q in range(n)] for p in range(n)]


def pairing_sum(M, n: int, one=1, mul=operator.mul):
    """Sum over perfect matchings of positions ``0..n-1`` of ``Π M[p][q]`` (``p < q``).

    Memoised on the set of unmatched positions; the lowest free position is
    always paired first, so the reduction order is fixed.  ``one`` and
    ``mul`` allow entries from other rings (e.g. truncated polynomials).
    """
    if n % 2:
        return 0 * one
    memo = {0: one}

    def rec(mask):
        if mask in memo:
            return memo[mask]
        low = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << low)
        total = 0 * one
        q = rest
        while q:
            bit = q & -q
            j = bit.bit_length() - 1
            total = total + mul(M[low][j], rec(rest & ~bit))
            q ^= bit
        memo[mask] = total
        return total

    return rec((1 << n) - 1)


@dataclass(frozen=True, eq=False)
class QuasiFree(StateModel):
    """Quasi-free state: odd orders vanish, even orders are pair-partition sums."""

    model: TwoPointModel
    max_order: int | None = DEFAULT_CAP

    def npoint(self, fns):
        n = len(fns)
        self._check_order(n)
        if n == 0:
            return 1 + 0j
        if n % 2:
            return 0j
        return complex(pairing_sum(_pair_table(self.model, fns), n))

    def masses(self):
        return self.model.masses()


@dataclass(frozen=True, eq=False)
class Trivial(StateModel):
    """``ω_n = 0`` for every ``n > 0``."""

    max_order: int | None = None

    def npoint(self, fns):
        return 1 + 0j if len(fns) == 0 else 0j


@dataclass(frozen=True, eq=False)
class Mixture(StateModel):
    weights: tuple
    states: tuple
    max_order: int | None = None

    def __post_init__(self):
        if len(self.weights) != len(self.states) or not self.states:
            raise ValueError("one weight per state is required")
        if any(w < 0 for w in self.weights):
            raise NormalisationError("mixture weights must be non-negative")
        total = sum(self.weights)
        exact = all(isinstance(w, (int, Fraction)) for w in self.weights)
        if (total != 1) if exact else abs(total - 1) > 1e-12:
            raise NormalisationError(f"mixture weights sum to {total}, not 1")
        caps = [s.max_order for s in self.states if s.max_order is not None]
        object.__setattr__(self, "max_order", min(caps) if caps else None)

    def npoint(self, fns):
        self._check_order(len(fns))
        return sum(float(w) * s.npoint(fns) for w, s in zip(self.weights, self.states))

    def masses(self):
        return set().union(*(s.masses() for s in self.states))


def tilde_coefficient_log(k: int) -> float:
    """``log e^{e^k - 1} = e^k - 1``."""
    return math.expm1(k)


@dataclass(frozen=True, eq=False)
class TildeSeries(StateModel):
    """Poisson-type superposition ``e^{-1} Σ_j ω^j / j!`` of the quasi-free
    states with two-point functions ``e^j w2 + ω2``.

    In closed form, each pair partition contributes
    ``Σ_k e^{e^k - 1} C_k`` where ``C_k`` sums, over every choice of ``k`` of
    its pairs, the product of ``w2`` on those pairs and ``ω2`` on the rest.
    """

    vacuum: TwoPointModel
    w: TwoPointModel
    max_order: int | None = DEFAULT_CAP

    def _coefficients(self, fns) -> np.ndarray:
        """``C_k`` summed over pair partitions, ``k = 0..n/2``."""
        n = len(fns)
        o = _pair_table(self.vacuum, fns)
        w = _pair_table(self.w, fns)
        size = n // 2 + 1
        # entries are the polynomials o + w t as coefficient arrays truncated at degree n/2
        M = [[np.array([o[p][q], w[p][q]] + [0] * (size - 2), dtype=complex) for q in range(n)] for p in range(n)]
        one = np.zeros(size, dtype=complex)
        one[0] = 1
        return pairing_sum(M, n, one, lambda a, b: np.convolve(a, b)[:size])

    def log_npoint(self, fns) -> complex:
        """Complex logarithm of the n-point value (``-inf`` real part for zero)."""
        n = len(fns)
        self._check_order(n)
        if n == 0:
            return 0j
        if n % 2:
            return complex(-math.inf, 0)
        coeffs = self._coefficients(fns)
        terms = [cmath.log(c) + tilde_coefficient_log(k) for k, c in enumerate(coeffs) if c != 0]
        if not terms:
            return complex(-math.inf, 0)
        return complex(logsumexp(np.array(terms)))

    def npoint(self, fns):
        lv = self.log_npoint(fns)
        if lv.real == -math.inf:
            return 0j
        return cmath.exp(lv)

    def masses(self):
        return self.vacuum.masses() | self.w.masses()


def state_to_json(state: StateModel) -> dict:
    if isinstance(state, QuasiFree):
        return {"kind": "quasi-free", "model": model_to_json(state.model)}
    if isinstance(state, Trivial):
        return {"kind": "trivial"}
    if isinstance(state, Mixture):
        return {
            "kind": "mixture",
            "components": [{"weight": str(w), "state": state_to_json(s)} for w, s in zip(state.weights, state.states)],
        }
    if isinstance(state, TildeSeries):
        return {"kind": "tilde-series", "vacuum": model_to_json(state.vacuum), "w": model_to_json(state.w)}
    raise TypeError(f"unknown state {state!r}")


def _weight(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, int):
        return Fraction(v)
    return float(v)


def state_from_json(d: dict) -> StateModel:
    kind = d["kind"]
    if kind == "quasi-free":
        return QuasiFree(model_from_json(d["model"]))
    if kind == "trivial":
        return Trivial()
    if kind == "mixture":
        comps = d["components"]
        return Mixture(tuple(_weight(c["weight"]) for c in comps), tuple(state_from_json(c["state"]) for c in comps))
    if kind == "tilde-series":
        from gffkit.statelab.kernels import Vacuum, WKernel

        mass = float(d.get("mass", 1.0))
        vac = model_from_json(d["vacuum"]) if "vacuum" in d else Vacuum(mass)
        w = model_from_json(d["w"]) if "w" in d else WKernel(mass)
        return TildeSeries(vac, w)
    raise ValueError(f"unknown state kind {kind!r}")
