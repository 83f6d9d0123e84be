"""Moment growth of ``Φ(f)`` in a state: is the cyclic vector analytic?

Everything is kept in the log domain.  With ``m_n = ω_n(f, ..., f)``, the
per-order constant ``d_n = (|m_n| / n!)^{1/n}`` stays bounded for an analytic
vector and blows up otherwise.  Truncated moments come from the scalar
cumulant recursion evaluated with mpmath, so no magnitude overflows.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import mpmath

from gffkit.corrcomb import scalar_cumulants
from gffkit.errors import PreconditionError

NEG_INF = -math.inf


def _log_abs_moment(state, f, n: int) -> tuple[float, float]:
    """``(log|m_n|, arg m_n)``."""
    args = (f,) * n
    if hasattr(state, "log_npoint"):
        lv = state.log_npoint(args)
        return lv.real, lv.imag
    v = complex(state.npoint(args))
    if v == 0:
        return NEG_INF, 0.0
    return math.log(abs(v)), math.atan2(v.imag, v.real)


def _log_d(log_m: float, n: int) -> float:
    if log_m == NEG_INF:
        return NEG_INF
    return (log_m - math.lgamma(n + 1)) / n


def _bounded(log_ds: list[float]) -> bool:
    """Later orders do not outgrow earlier ones by more than a factor 2."""
    finite = [v for v in log_ds if v != NEG_INF]
    if len(finite) < 2:
        return True
    half = len(finite) // 2
    return max(finite[half:]) <= max(finite[:half]) + math.log(2)


@dataclass
class GrowthReport:
    orders: list[int]
    log_moments: list[float]
    phases: list[float]
    log_n_factorial: list[float]
    log_d: list[float]
    log_ratio: list[float]  # log|m_n| / n - log n
    log_truncated: list[float]
    log_d_truncated: list[float]
    verdict: str
    d: float | None
    evidence: dict = field(default_factory=dict)

    @property
    def analytic(self) -> bool:
        return self.verdict == "analytic"

    def fitted_d(self) -> list[float]:
        return [math.exp(v) if v != NEG_INF else 0.0 for v in self.log_d]

    def as_dict(self) -> dict:
        def num(v):
            return None if v == NEG_INF else v

        return {
            "verdict": self.verdict,
            "d": self.d,
            "orders": self.orders,
            "log_moments": [num(v) for v in self.log_moments],
            "log_n_factorial": self.log_n_factorial,
            "fitted_d": self.fitted_d(),
            "log_ratio": [num(v) for v in self.log_ratio],
            "log_truncated": [num(v) for v in self.log_truncated],
            "evidence": self.evidence,
        }

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("# columns: n, log_moment = log|w_n(f,...,f)|, log_n_factorial = log n!, "
                  "fitted_d = (|w_n|/n!)^(1/n); empty log_moment means the moment vanishes\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["n", "log_moment", "log_n_factorial", "fitted_d"])
        for n, lm, lf, d in zip(self.orders, self.log_moments, self.log_n_factorial, self.fitted_d()):
            writer.writerow([n, "" if lm == NEG_INF else repr(lm), repr(lf), repr(d)])
        return out.getvalue()


def _truncated_logs(log_moments: list[float], phases: list[float]) -> list[float]:
    with mpmath.workdps(50):
        moments = [mpmath.mpf(1)]
        for lm, ph in zip(log_moments, phases):
            moments.append(mpmath.mpf(0) if lm == NEG_INF else mpmath.exp(mpmath.mpc(lm, ph)))
        cums = scalar_cumulants(moments)[1:]
        out = []
        for c in cums:
            a = abs(c)
            out.append(NEG_INF if a == 0 else float(mpmath.log(a)))
    return out


def factorial_reduction_holds(n: int) -> bool:
    """``(2n)! <= (2^n n!)^2``, compared exactly."""
    return math.factorial(2 * n) <= (2**n * math.factorial(n)) ** 2


def growth_classify(state, f, n_max: int) -> GrowthReport:
    if not getattr(f, "is_real", False):
        raise PreconditionError("growth analysis needs a real test function")
    cap = getattr(state, "max_order", None)
    if cap is not None and n_max > cap:
        raise PreconditionError(f"n_max = {n_max} exceeds the state's cap {cap}")
    if n_max < 1:
        raise PreconditionError("n_max must be >= 1")

    orders = list(range(1, n_max + 1))
    logs, phases = [], []
    for n in orders:
        lm, ph = _log_abs_moment(state, f, n)
        logs.append(lm)
        phases.append(ph)
    log_fact = [math.lgamma(n + 1) for n in orders]
    log_d = [_log_d(lm, n) for lm, n in zip(logs, orders)]
    log_ratio = [NEG_INF if lm == NEG_INF else lm / n - math.log(n) for lm, n in zip(logs, orders)]
    log_trunc = _truncated_logs(logs, phases)
    log_d_trunc = [_log_d(lk, n) for lk, n in zip(log_trunc, orders)]

    analytic = _bounded(log_d)
    finite = [v for v in log_d + log_d_trunc if v != NEG_INF]
    d = math.exp(max(finite)) if finite else 0.0

    # power-norm formulation: ||Φ(f)^n Ω||^2 = m_2n
    power = []
    for n in range(1, n_max // 2 + 1):
        lm = logs[2 * n - 1]
        if lm == NEG_INF:
            continue
        log_norm = lm / 2
        c_even = (lm - math.lgamma(2 * n + 1)) / (2 * n)  # m_2n <= c^2n (2n)!
        log_pow = (log_norm - math.lgamma(n + 1)) / n  # ||T^n ψ|| <= d_pow^n n!
        power.append((n, log_pow, c_even))
    reduction = all(factorial_reduction_holds(n) for n in range(1, n_max // 2 + 1))
    # with the reduction, ||T^n ψ|| <= c^n sqrt((2n)!) <= (2c)^n n!
    c_sup = max((c for _, _, c in power), default=NEG_INF)
    consistent = all(lp <= c_sup + math.log(2) + 1e-12 for _, lp, _ in power)

    evidence = {
        "factorial_reduction_holds": reduction,
        "power_norm_consistent": consistent,
        "truncated_bounded": _bounded(log_d_trunc),
        "max_log_d_lower_half": None,
        "max_log_d_upper_half": None,
    }
    fin = [v for v in log_d if v != NEG_INF]
    if len(fin) >= 2:
        evidence["max_log_d_lower_half"] = max(fin[: len(fin) // 2])
        evidence["max_log_d_upper_half"] = max(fin[len(fin) // 2:])
    verdict = "analytic" if analytic else "non-analytic"
    return GrowthReport(orders, logs, phases, log_fact, log_d, log_ratio, log_trunc, log_d_trunc,
                        verdict, d if analytic else None, evidence)


def tilde_lower_bound_log(n: int, w_ff: float) -> float:
    """log of ``(2n)!/(2^n n!) e^{e^n - 1} w(f,f)^n``, the all-``w`` contribution."""
    return math.lgamma(2 * n + 1) - n * math.log(2) - math.lgamma(n + 1) + math.expm1(n) + n * math.log(w_ff)
