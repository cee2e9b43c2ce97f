"""Gaussian particle and filter states.

The particle is a freely evolving Gaussian wavepacket with mean
position x0, mean momentum k0, and position width delta (position
variance delta^2/4 at t=0), in hbar = m = 1 units.  The filter is a
stationary Gaussian of width sigma centered at detection point q0.
q0 enters readouts relative to the particle coordinate, so the filter
state itself carries no dynamics.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ParticleGaussian",
    "FilterGaussian",
    "RegimeReport",
    "particle_wavefunction",
    "particle_momentum_wavefunction",
    "filter_wavefunction",
    "validate_regime",
]


@dataclass(frozen=True)
class ParticleGaussian:
    """Free Gaussian wavepacket parameters (x0, k0, delta)."""

    x0: float
    k0: float
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")


@dataclass(frozen=True)
class FilterGaussian:
    """Stationary Gaussian filter parameters (q0, sigma)."""

    q0: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class RegimeReport:
    """Dimensionless fast-particle diagnostics |k0| delta and |k0| sigma."""

    k0_delta: float
    k0_sigma: float
    threshold: float
    passes: bool


def particle_wavefunction(p: ParticleGaussian, x, t):
    """Complex amplitude psi(x, t) of the freely evolved packet.

    psi(x,t) = (delta^2/(2 pi))^{1/4} sqrt(2)/sqrt(delta^2 + 2it)
               * exp(i k0 (x - x0) - i k0^2 t/2 - (x - x0 - k0 t)^2/(delta^2 + 2it))

    Normalized for every t; |psi|^2 peaks at x0 + k0 t.
    """
    x = np.asarray(x, dtype=float)
    gam = p.delta**2 + 2j * t
    amp = (p.delta**2 / (2.0 * np.pi)) ** 0.25 * np.sqrt(2.0) / np.sqrt(gam)
    drift = x - p.x0 - p.k0 * t
    phase = 1j * p.k0 * (x - p.x0) - 0.5j * p.k0**2 * t
    out = amp * np.exp(phase - drift * drift / gam)
    if out.ndim == 0:
        return complex(out)
    return out


def particle_momentum_wavefunction(p: ParticleGaussian, p_, t):
    """Momentum-representation amplitude of the same packet.

    Convention psi(x) = (2 pi)^{-1/2} integral dp e^{i p x} psi~(p):
    psi~(p,t) = (delta^2/(2 pi))^{1/4}
                * exp(-i p x0 - delta^2 (p - k0)^2/4 - i p^2 t/2).
    """
    p_ = np.asarray(p_, dtype=float)
    u = p_ - p.k0
    amp = (p.delta**2 / (2.0 * np.pi)) ** 0.25
    out = amp * np.exp(-1j * p_ * p.x0 - 0.25 * p.delta**2 * u * u - 0.5j * p_ * p_ * t)
    if out.ndim == 0:
        return complex(out)
    return out


def filter_wavefunction(f: FilterGaussian, x):
    """Real amplitude (2/(pi sigma^2))^{1/4} exp(-(x - q0)^2/sigma^2)."""
    x = np.asarray(x, dtype=float)
    amp = (2.0 / (np.pi * f.sigma**2)) ** 0.25
    out = amp * np.exp(-((x - f.q0) ** 2) / f.sigma**2)
    if out.ndim == 0:
        return float(out)
    return out


def validate_regime(p: ParticleGaussian, f: FilterGaussian, threshold: float = 3.0) -> RegimeReport:
    """Check the fast-particle condition that makes arrival time meaningful.

    Reports |k0| delta and |k0| sigma against the threshold.  A failed
    check warns rather than aborts: the propensity itself is exact at
    any parameters, only the time-observable expansions degrade.
    """
    kd = abs(p.k0) * p.delta
    ks = abs(p.k0) * f.sigma
    passes = min(kd, ks) >= threshold
    report = RegimeReport(k0_delta=kd, k0_sigma=ks, threshold=threshold, passes=passes)
    if not passes:
        warnings.warn(
            "slow-particle regime: min(|k0|delta, |k0|sigma) = %.3g < %.3g; "
            "arrival-time expansions carry O(1/(k0 delta)^2) errors" % (min(kd, ks), threshold),
            stacklevel=2,
        )
    return report
