"""Gaussian wave packets on 1+1 Minkowski space with closed-form Fourier transforms.

Convention: ``ft(a, b) = ∫ f(t, x) exp(-i (a t + b x)) dt dx``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class GaussianPacket:
    """``A exp(-(t-t0)^2/2σt^2 - (x-x0)^2/2σx^2) exp(i(ν0 t + ν1 x))``."""

    t0: float = 0.0
    x0: float = 0.0
    sigma_t: float = 1.0
    sigma_x: float = 1.0
    nu0: float = 0.0
    nu1: float = 0.0
    amplitude: complex = 1.0

    def __post_init__(self):
        if not (self.sigma_t > 0 and self.sigma_x > 0):
            raise ValueError("packet widths must be positive")
        object.__setattr__(self, "amplitude", complex(self.amplitude))

    @property
    def is_real(self) -> bool:
        return self.amplitude.imag == 0 and self.nu0 == 0 and self.nu1 == 0

    def conj(self) -> "GaussianPacket":
        return replace(self, nu0=-self.nu0, nu1=-self.nu1, amplitude=self.amplitude.conjugate())

    def shifted(self, dt: float, dx: float) -> "GaussianPacket":
        return replace(self, t0=self.t0 + dt, x0=self.x0 + dx)

    def __call__(self, t, x):
        t, x = np.asarray(t, dtype=float), np.asarray(x, dtype=float)
        env = np.exp(-((t - self.t0) ** 2) / (2 * self.sigma_t**2) - (x - self.x0) ** 2 / (2 * self.sigma_x**2))
        return self.amplitude * env * np.exp(1j * (self.nu0 * t + self.nu1 * x))

    def ft(self, a, b):
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        da, db = a - self.nu0, b - self.nu1
        norm = self.amplitude * 2 * math.pi * self.sigma_t * self.sigma_x
        expo = -0.5 * (self.sigma_t * da) ** 2 - 0.5 * (self.sigma_x * db) ** 2
        return norm * np.exp(expo - 1j * (da * self.t0 + db * self.x0))

    def ft_bound(self, a, b):
        return np.abs(self.ft(a, b))

    def momentum_window(self, digits: float = 40.0) -> tuple[float, float]:
        """Spatial momenta outside which ``|ft|`` has decayed by ``e^-digits``."""
        r = math.sqrt(2 * digits) / self.sigma_x
        return (-abs(self.nu1) - r, abs(self.nu1) + r)

    def l2_norm(self) -> float:
        return abs(self.amplitude) * math.sqrt(math.pi * self.sigma_t * self.sigma_x)

    def to_json(self) -> dict:
        return {
            "t0": self.t0, "x0": self.x0, "sigma_t": self.sigma_t, "sigma_x": self.sigma_x,
            "nu0": self.nu0, "nu1": self.nu1,
            "amplitude": {"re": self.amplitude.real, "im": self.amplitude.imag},
        }

    @classmethod
    def from_json(cls, d: dict) -> "GaussianPacket":
        amp = d.get("amplitude", 1.0)
        if isinstance(amp, dict):
            amp = complex(amp.get("re", 0.0), amp.get("im", 0.0))
        return cls(
            float(d.get("t0", 0.0)), float(d.get("x0", 0.0)),
            float(d.get("sigma_t", 1.0)), float(d.get("sigma_x", 1.0)),
            float(d.get("nu0", 0.0)), float(d.get("nu1", 0.0)), amp,
        )


@dataclass(frozen=True)
class DifferentiatedPacket:
    """Packet acted on by a constant-coefficient operator with Fourier symbol
    ``c_tt a^2 + c_xx b^2 + c_0``.

    The Klein-Gordon operator ``∂t² - ∂x² + m²`` has symbol ``-a² + b² + m²``.
    """

    inner: GaussianPacket
    c_tt: float
    c_xx: float
    c_0: float

    @classmethod
    def klein_gordon(cls, f: GaussianPacket, mass: float) -> "DifferentiatedPacket":
        return cls(f, -1.0, 1.0, mass**2)

    @classmethod
    def elliptic(cls, f: GaussianPacket, mass: float) -> "DifferentiatedPacket":
        """``-∂t² - ∂x² + m²``, positive symbol; used as a size reference."""
        return cls(f, 1.0, 1.0, mass**2)

    @property
    def is_real(self) -> bool:
        return self.inner.is_real

    def conj(self) -> "DifferentiatedPacket":
        return replace(self, inner=self.inner.conj())

    def ft(self, a, b):
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        return (self.c_tt * a**2 + self.c_xx * b**2 + self.c_0) * self.inner.ft(a, b)

    def ft_bound(self, a, b):
        """``|ft|`` without the cancellation inside the symbol."""
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        return (abs(self.c_tt) * a**2 + abs(self.c_xx) * b**2 + abs(self.c_0)) * self.inner.ft_bound(a, b)

    def momentum_window(self, digits: float = 40.0) -> tuple[float, float]:
        lo, hi = self.inner.momentum_window(digits + 10.0)
        return lo, hi


def random_packet(rng: random.Random, real: bool = True, spread: float = 1.0) -> GaussianPacket:
    """Packet near the origin with moderate widths; optional modulation."""
    nu0 = nu1 = 0.0
    amp: complex = 1.0
    if not real:
        nu0, nu1 = rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)
        amp = complex(rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5))
    return GaussianPacket(
        t0=rng.uniform(-spread, spread),
        x0=rng.uniform(-spread, spread),
        sigma_t=rng.uniform(0.6, 1.4),
        sigma_x=rng.uniform(0.6, 1.4),
        nu0=nu0,
        nu1=nu1,
        amplitude=amp,
    )


def random_packets(count: int, seed: int = 0, real: bool = True, spread: float = 1.0) -> list[GaussianPacket]:
    rng = random.Random(seed)
    return [random_packet(rng, real, spread) for _ in range(count)]
