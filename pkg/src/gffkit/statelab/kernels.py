"""Smeared two-point kernels of a scalar field of mass ``m`` in 1+1 dimensions.

Smears are one-dimensional integrals over spatial momentum of products of
the packets' closed-form Fourier transforms, restricted to the mass shell.
The first argument is the left one in written order: ``w2(f, g)`` smears
``w2(x_2, x_1)`` with ``f`` in ``x_2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from gffkit.errors import QuadratureError

RTOL = 1e-10
_CACHE: dict = {}


@dataclass(frozen=True)
class Smear:
    value: complex
    error: float

    def __add__(self, other: "Smear") -> "Smear":
        return Smear(self.value + other.value, self.error + other.error)

    def scale(self, c) -> "Smear":
        return Smear(c * self.value, abs(c) * self.error)


def _window(f, g, mass: float) -> tuple[float, float]:
    lo = min(f.momentum_window()[0], g.momentum_window()[0])
    hi = max(f.momentum_window()[1], g.momentum_window()[1])
    r = max(abs(lo), abs(hi))
    return -r, r


def integrate_complex(fn: Callable, lo: float, hi: float, rtol: float = RTOL, what: str = "smear",
                      bound: Callable | None = None) -> Smear:
    """Adaptive quadrature of a complex integrand, real and imaginary parts separately.

    ``bound`` dominates ``|fn|`` without internal cancellations; it sets the
    absolute accuracy floor (defaults to ``|fn|``).
    """
    grid = np.linspace(lo, hi, 257)
    scale = float(np.max((bound or (lambda k: np.abs(fn(k))))(grid))) * (hi - lo)
    if scale == 0.0:
        return Smear(0j, 0.0)
    eps_abs = 1e-14 * scale
    parts = []
    for comp in (np.real, np.imag):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err, info = integrate.quad(
                lambda k: float(comp(fn(k))), lo, hi, epsabs=eps_abs, epsrel=rtol, limit=400, full_output=1
            )[:3]
        parts.append((val, err, info))
    value = complex(parts[0][0], parts[1][0])
    error = parts[0][1] + parts[1][1]
    if error > max(1e-8 * abs(value), 1e-10 * scale):
        raise QuadratureError(
            f"{what}: quadrature did not reach tolerance",
            {"value": [value.real, value.imag], "error": error, "scale": scale,
             "window": [lo, hi], "evaluations": [p[2]["neval"] for p in parts]},
        )
    return Smear(value, error)


class TwoPointModel:
    """Base class; subclasses provide :meth:`smear`."""

    def smear(self, f, g) -> Smear:
        raise NotImplementedError

    def __call__(self, f, g) -> complex:
        key = (self, f, g)
        hit = _CACHE.get(key)
        if hit is None:
            hit = _CACHE[key] = self.smear(f, g)
        return hit.value

    def antisymmetric(self, f, g) -> complex:
        return (self(f, g) - self(g, f)) / 2

    def masses(self) -> set[float]:
        return set()


@dataclass(frozen=True)
class Vacuum(TwoPointModel):
    """Minkowski vacuum: ``∫ dk / (4π ω) e^{-iω(t2-t1) + ik(x2-x1)}``."""

    mass: float = 1.0

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive (the massless 1+1 vacuum is infrared divergent)")

    def smear(self, f, g) -> Smear:
        m = self.mass

        def integrand(k):
            w = np.sqrt(k * k + m * m)
            return f.ft(w, -k) * g.ft(-w, k) / (4 * math.pi * w)

        def bound(k):
            w = np.sqrt(k * k + m * m)
            return f.ft_bound(w, -k) * g.ft_bound(-w, k) / (4 * math.pi * w)

        return integrate_complex(integrand, *_window(f, g, m), what="vacuum two-point smear", bound=bound)

    def masses(self):
        return {self.mass}


@dataclass(frozen=True)
class WKernel(TwoPointModel):
    """``∫ d²k e^{-ik·(x1-x2)} e^{-k0²} δ(k² - m²)``: real, symmetric, positive type."""

    mass: float = 1.0

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")

    def smear(self, f, g) -> Smear:
        m = self.mass

        def integrand(k):
            w = np.sqrt(k * k + m * m)
            both = g.ft(w, -k) * f.ft(-w, k) + g.ft(-w, -k) * f.ft(w, k)
            return np.exp(-w * w) * both / (2 * w)

        def bound(k):
            w = np.sqrt(k * k + m * m)
            both = g.ft_bound(w, -k) * f.ft_bound(-w, k) + g.ft_bound(-w, -k) * f.ft_bound(w, k)
            return np.exp(-w * w) * both / (2 * w)

        return integrate_complex(integrand, *_window(f, g, m), what="w-kernel smear", bound=bound)

    def masses(self):
        return {self.mass}


@dataclass(frozen=True)
class Scaled(TwoPointModel):
    factor: float
    inner: TwoPointModel

    def __post_init__(self):
        if not self.factor > 0:
            raise ValueError("scale factor must be positive")

    def smear(self, f, g) -> Smear:
        self.inner(f, g)
        return _CACHE[(self.inner, f, g)].scale(self.factor)

    def masses(self):
        return self.inner.masses()


@dataclass(frozen=True)
class Sum(TwoPointModel):
    terms: tuple  # ((weight, model), ...)

    def smear(self, f, g) -> Smear:
        total = Smear(0j, 0.0)
        for weight, model in self.terms:
            model(f, g)
            total = total + _CACHE[(model, f, g)].scale(weight)
        return total

    def masses(self):
        return set().union(*(m.masses() for _, m in self.terms))


def commutator_integral(f, g, mass: float = 1.0) -> Smear:
    """Smeared commutator function ``E(f, g)`` of the mass-``m`` field.

    Coded directly from ``E(x, y) = -∫ dk sin(ω Δt - k Δx) / (2π ω)``,
    ``Δ = x - y``, in the rapidity variable ``k = m sinh η`` (so ``dk/ω = dη``).
    This shares no code with :class:`Vacuum`.
    """
    m = mass
    lo, hi = _window(f, g, m)
    h = math.asinh(max(abs(lo), abs(hi)) / m)

    def integrand(eta):
        k = m * np.sinh(eta)
        w = m * np.cosh(eta)
        pos = f.ft(-w, k) * g.ft(w, -k)  # ∫∫ f(x) g(y) e^{+i(ωΔt - kΔx)}
        neg = f.ft(w, -k) * g.ft(-w, k)
        return -(pos - neg) / (2j) / (2 * math.pi)

    def bound(eta):
        k = m * np.sinh(eta)
        w = m * np.cosh(eta)
        return (f.ft_bound(-w, k) * g.ft_bound(w, -k) + f.ft_bound(w, -k) * g.ft_bound(-w, k)) / (4 * math.pi)

    return integrate_complex(integrand, -h, h, what="commutator integral", bound=bound)


def clear_cache() -> None:
    _CACHE.clear()


def model_to_json(model: TwoPointModel) -> dict:
    if isinstance(model, Vacuum):
        return {"kind": "vacuum", "mass": model.mass}
    if isinstance(model, WKernel):
        return {"kind": "w-kernel", "mass": model.mass}
    if isinstance(model, Scaled):
        return {"kind": "scaled", "factor": model.factor, "inner": model_to_json(model.inner)}
    if isinstance(model, Sum):
        return {"kind": "sum", "terms": [{"weight": w, "model": model_to_json(m)} for w, m in model.terms]}
    raise TypeError(f"unknown model {model!r}")


def model_from_json(d: dict) -> TwoPointModel:
    kind = d["kind"]
    if kind == "vacuum":
        return Vacuum(float(d.get("mass", 1.0)))
    if kind == "w-kernel":
        return WKernel(float(d.get("mass", 1.0)))
    if kind == "scaled":
        return Scaled(float(d["factor"]), model_from_json(d["inner"]))
    if kind == "sum":
        return Sum(tuple((float(t["weight"]), model_from_json(t["model"])) for t in d["terms"]))
    raise ValueError(f"unknown two-point model kind {kind!r}")
