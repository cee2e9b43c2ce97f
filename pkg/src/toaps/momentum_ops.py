"""Momentum-representation operator machinery.

The position operator acts on momentum-space amplitudes as
q = +i d/dp (for the convention psi(x) = (2 pi)^{-1/2} integral dp
e^{ipx} psi~(p)).  Derivatives are taken spectrally on a uniform grid
when the function decays at the window edges, or by an 8th-order
central stencil when it does not (pure-phase eigenfunctions).
"""

from __future__ import annotations

import math

import numpy as np

from .states import ParticleGaussian, particle_momentum_wavefunction

__all__ = [
    "momentum_grid",
    "spectral_derivative",
    "fd8_derivative",
    "position_operator",
    "inner_product",
    "domain_mass_outside",
]

# 8th-order central first-derivative stencil, ascending offsets -4..4.
_FD8 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, 1 / 5, -4 / 105, 1 / 280])
_FD8[6] = -1 / 5  # +2 offset
_FD8 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])


def momentum_grid(p: ParticleGaussian, t=0.0, *, halfwidth_factor=14.0, min_points=4096):
    """Uniform p-grid wide enough for the packet and fine enough for its phase.

    Width covers halfwidth_factor momentum deviations (the packet's
    momentum spread is 1/delta), so edge amplitudes are ~e^{-98}.  The
    sampling step resolves the fastest phase oscillation of
    psi~(p, t) = ... e^{-ip x0 - i p^2 t/2}, whose local rate is
    |x0 + p t|.
    """
    spread = 1.0 / p.delta
    half = halfwidth_factor * spread
    rate = abs(p.x0) + (abs(p.k0) + half) * abs(t)
    n = min_points
    span = 2.0 * half
    if rate > 0:
        needed = span * rate / (math.pi / 4.0)
        while n < needed:
            n *= 2
    grid = p.k0 + np.linspace(-half, half, n, endpoint=False)
    return grid, grid[1] - grid[0]


def spectral_derivative(values, dp):
    """d/dp by FFT; assumes the values decay at the window edges."""
    n = len(values)
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=dp)
    return np.fft.ifft(1j * k * np.fft.fft(values))


def fd8_derivative(values, dp):
    """8th-order central-difference d/dp.

    The outermost 4 samples on each side reuse the nearest interior
    stencil value; callers that cannot tolerate that (non-decaying
    functions) should trim the edges before taking norms.
    """
    values = np.asarray(values)
    out = np.zeros_like(values, dtype=complex)
    core = sum(c * np.roll(values, -off) for c, off in zip(_FD8, range(-4, 5)))
    out[:] = core / dp
    out[:4] = out[4]
    out[-4:] = out[-5]
    return out


def position_operator(values, dp, *, method="spectral"):
    """Apply q = +i d/dp to momentum-space samples."""
    if method == "spectral":
        return 1j * spectral_derivative(values, dp)
    if method == "fd8":
        return 1j * fd8_derivative(values, dp)
    raise ValueError("method must be 'spectral' or 'fd8'")


def inner_product(a, b, dp):
    """<a|b> on the grid."""
    return complex(np.sum(np.conj(a) * b) * dp)


def domain_mass_outside(p: ParticleGaussian, t=0.0, grid=None, dp=None):
    """Probability mass at |p - k0| >= |k0|, where the inverse-momentum
    series stops converging."""
    if grid is None:
        grid, dp = momentum_grid(p, t)
    amp = particle_momentum_wavefunction(p, grid, t)
    dens = np.abs(amp) ** 2
    outside = np.abs(grid - p.k0) >= abs(p.k0)
    return float(np.sum(dens[outside]) * dp)
