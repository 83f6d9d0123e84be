"""Desk-scale checks built from the state models: Klein-Gordon bisolution
residuals, the mixed-state counterexample, and two-state comparison."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from gffkit.corrcomb import antisymmetric_two_point, is_generalised_free, swap_difference
from gffkit.statelab.kernels import Scaled, Vacuum
from gffkit.statelab.packets import DifferentiatedPacket
from gffkit.statelab.states import Mixture, QuasiFree, StateModel, Trivial


def _rel(a: complex, b: complex, *scales) -> float:
    scale = max([abs(a), abs(b), *map(abs, scales)])
    return 0.0 if a == b else abs(a - b) / scale if scale else math.inf


# --------------------------------------------------------------------------
# Klein-Gordon


@dataclass
class KGResult:
    residual: float
    raw: complex
    reference: float
    mass: float
    model_masses: list
    mass_mismatch: bool

    def as_dict(self):
        return {
            "residual": self.residual,
            "raw": [self.raw.real, self.raw.imag],
            "reference": self.reference,
            "mass": self.mass,
            "model_masses": self.model_masses,
            "mass_mismatch": self.mass_mismatch,
        }


def kg_residual(state: StateModel, f, mass: float) -> KGResult:
    """``|ω_2(conj(Kf), Kf)|`` relative to ``ω_2(conj(Pf), Pf)``.

    ``K = ∂t² - ∂x² + m²`` and ``P = -∂t² - ∂x² + m²`` are applied to the
    packet in closed form.  The residual vanishes when the two-point function
    is a Klein-Gordon bisolution of mass ``m``.  A mismatch between ``m`` and
    the masses of the state's kernels is flagged rather than raised.
    """
    kf = DifferentiatedPacket.klein_gordon(f, mass)
    pf = DifferentiatedPacket.elliptic(f, mass)
    raw = complex(state.npoint((kf.conj(), kf)))
    ref = abs(complex(state.npoint((pf.conj(), pf))))
    masses = sorted(state.masses())
    mismatch = bool(masses) and not all(math.isclose(mass, m, rel_tol=1e-12) for m in masses)
    return KGResult(abs(raw) / ref if ref else math.inf, raw, ref, mass, masses, mismatch)


# --------------------------------------------------------------------------
# the mixed-state counterexample


def counterexample_states(mass: float = 1.0):
    """``(ω¹, ω², ω³)``: quasi-free with twice the vacuum two-point function,
    the trivial state, and their even mixture."""
    w1 = QuasiFree(Scaled(2.0, Vacuum(mass)))
    w2 = Trivial()
    w3 = Mixture((Fraction(1, 2), Fraction(1, 2)), (w1, w2))
    return w1, w2, w3


@dataclass
class CounterexampleReport:
    lhs: complex
    printed_rhs: complex
    printed_residual: float
    commutator_rhs: complex
    commutator_residual: float
    gff_rhs: complex
    gff_deviation: float
    quasi_free_residual: float
    checker_verdict: str
    tol: float

    @property
    def printed_identity_holds(self) -> bool:
        return self.printed_residual < self.tol

    @property
    def commutator_identity_holds(self) -> bool:
        return self.commutator_residual < self.tol

    @property
    def gff_fails(self) -> bool:
        return self.gff_deviation > self.tol

    def as_dict(self):
        def c(z):
            return [z.real, z.imag]

        return {
            "lhs": c(self.lhs),
            "printed_rhs": c(self.printed_rhs),
            "printed_residual": self.printed_residual,
            "printed_identity_holds": self.printed_identity_holds,
            "commutator_rhs": c(self.commutator_rhs),
            "commutator_residual": self.commutator_residual,
            "commutator_identity_holds": self.commutator_identity_holds,
            "gff_rhs": c(self.gff_rhs),
            "gff_deviation": self.gff_deviation,
            "gff_fails": self.gff_fails,
            "quasi_free_residual": self.quasi_free_residual,
            "checker_verdict": self.checker_verdict,
            "tol": self.tol,
        }


def js_counterexample(fns: Sequence, tol: float = 1e-6, mass: float = 1.0) -> CounterexampleReport:
    """Four-point swap test of the mixture ``ω³`` on packets ``(f4, f3, f2, f1)``.

    Three right-hand sides are compared with ``ω³_4(f4,f3,f2,f1) - ω³_4(f3,f4,f2,f1)``:

    * ``2i ω³_2-(f4,f3) ω³_2(f2,f1)`` as printed in the source example,
    * ``2i E(f4,f3) ω³_2(f2,f1)`` with ``E = -2i ω³_2-`` the commutator,
    * ``2 ω³_2-(f4,f3) ω³_2(f2,f1)``, the value any generalised free field
      state must produce.
    """
    if len(fns) != 4:
        raise ValueError("the counterexample uses exactly four packets")
    f4, f3, f2, f1 = fns
    w1, _, w3 = counterexample_states(mass)

    lhs, gff_rhs = swap_difference(w3, 4, 3, list(fns))
    minus = antisymmetric_two_point(w3, f4, f3)
    two = w3.npoint((f2, f1))
    printed = 2j * minus * two
    E = -2j * minus
    commutator = 2j * E * two

    a = w3.npoint((f4, f3, f2, f1))
    b = w3.npoint((f3, f4, f2, f1))
    ql, qr = swap_difference(w1, 4, 3, list(fns))
    qa, qb = w1.npoint((f4, f3, f2, f1)), w1.npoint((f3, f4, f2, f1))

    verdict = is_generalised_free(w3, 4, tol, list(fns)).verdict
    return CounterexampleReport(
        lhs=lhs,
        printed_rhs=printed,
        printed_residual=_rel(lhs, printed, a, b),
        commutator_rhs=commutator,
        commutator_residual=_rel(lhs, commutator, a, b),
        gff_rhs=gff_rhs,
        gff_deviation=_rel(lhs, gff_rhs, a, b),
        quasi_free_residual=_rel(ql, qr, qa, qb),
        checker_verdict=verdict,
        tol=tol,
    )


# --------------------------------------------------------------------------
# comparison of two states


@dataclass
class ComparisonReport:
    status: str  # "pass" | "fail" | "not-applicable" | "precondition-failed"
    n: int
    commutator_residual: float
    order_n_residual: float
    swap_residual: float
    difference_scale: float
    checked_tuples: int
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def as_dict(self):
        return {
            "status": self.status,
            "n": self.n,
            "commutator_residual": self.commutator_residual,
            "order_n_residual": self.order_n_residual,
            "swap_residual": self.swap_residual,
            "difference_scale": self.difference_scale,
            "checked_tuples": self.checked_tuples,
            "details": self.details,
        }


def _tuples(fns, n, limit, rng):
    total = len(fns) ** n
    if limit is None or total <= limit:
        return list(itertools.product(fns, repeat=n))
    return [tuple(rng.choice(fns) for _ in range(n)) for _ in range(limit)]


def compare_states(a: StateModel, b: StateModel, n: int, fns: Sequence, tol: float,
                   limit: int | None = 200, seed: int = 0) -> ComparisonReport:
    """If ``a`` and ``b`` share the commutator and agree at order ``n``, their
    order-``n+2`` difference must be unchanged by every adjacent swap."""
    rng = random.Random(seed)
    fns = list(fns)

    comm = []
    for f, g in itertools.product(fns, repeat=2):
        ea, eb = antisymmetric_two_point(a, f, g), antisymmetric_two_point(b, f, g)
        comm.append((abs(ea - eb), max(abs(ea), abs(eb))))
    comm_scale = max((s for _, s in comm), default=0.0)
    comm_res = max((d for d, _ in comm), default=0.0) / comm_scale if comm_scale else 0.0
    if comm_res > tol:
        return ComparisonReport("precondition-failed", n, comm_res, math.nan, math.nan, math.nan, 0,
                                {"reason": "the two states have different commutators"})

    order_res = 0.0
    for args in _tuples(fns, n, limit, rng):
        va, vb = a.npoint(args), b.npoint(args)
        order_res = max(order_res, _rel(va, vb))
    if order_res > tol:
        return ComparisonReport("not-applicable", n, comm_res, order_res, math.nan, math.nan, 0,
                                {"reason": f"order-{n} functions differ, so the hypothesis fails"})

    worst, diff_scale, count = 0.0, 0.0, 0
    for args in _tuples(fns, n + 2, limit, rng):
        da = a.npoint(args) - b.npoint(args)
        diff_scale = max(diff_scale, abs(da))
        for p in range(n + 1):
            sw = list(args)
            sw[p], sw[p + 1] = sw[p + 1], sw[p]
            sw = tuple(sw)
            db = a.npoint(sw) - b.npoint(sw)
            scale = max(abs(a.npoint(args)), abs(b.npoint(args)), abs(a.npoint(sw)), abs(b.npoint(sw)))
            if da != db:
                worst = max(worst, abs(da - db) / scale if scale else math.inf)
        count += 1
    status = "pass" if worst <= tol else "fail"
    return ComparisonReport(status, n, comm_res, order_res, worst, diff_scale, count)


def matched_pair_example(lam: float = 0.3, mass: float = 1.0):
    """``QuasiFree(ω2 + λ w2)`` and the even mixture of ``QuasiFree(ω2)`` and
    ``QuasiFree(ω2 + 2λ w2)``: equal two-point functions, different four-point ones."""
    from gffkit.statelab.kernels import Sum, WKernel

    vac, w = Vacuum(mass), WKernel(mass)
    a = QuasiFree(Sum(((1.0, vac), (lam, w))))
    b = Mixture(
        (Fraction(1, 2), Fraction(1, 2)),
        (QuasiFree(vac), QuasiFree(Sum(((1.0, vac), (2 * lam, w))))),
    )
    return a, b
