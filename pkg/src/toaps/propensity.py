"""Operational phase-space distribution of the joint readout (q, p).

The defining object is the filtered overlap

    Pr(q, p) = |integral dx e^{-ipx} psi(x) F(q + x)|^2 / (2 pi),

a positive, normalized density over the readout plane: q is the
detector-relative position record, p the momentum record.  For the
Gaussian particle/filter pair the integral evaluates in closed form to
a two-factor Gaussian, implemented in propensity_closed; the direct
numerical overlap stays available as propensity_oracle so the closed
form is never trusted on faith.

Structure worth knowing (used throughout the package): with

    S2 = delta^2 + sigma^2,   D = 4 t^2 + S2^2,   u = p - k0,

the distribution factorizes as a time-independent momentum marginal
times a Gaussian in q whose center drifts linearly with the momentum
readout,

    Pr(q, p, t) = N(u) * Normal(q; gamma(p), w_c^2),
    N(u)      = sqrt(s/(2 pi)) exp(-s u^2/2),   s = delta^2 sigma^2 / S2,
    gamma(p)  = q0 - x0 - t (delta^2 k0 + sigma^2 p)/S2,
    w_c^2     = D/(4 S2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import InsufficientSupport
from .grids import PhaseGrid
from .quadrature import QuadratureConfig, integrate_1d
from .states import FilterGaussian, ParticleGaussian

__all__ = [
    "DENSITY_FLOOR",
    "PropensityPoint",
    "PhaseMoments",
    "PropensityField",
    "SampledWavefunction",
    "propensity_closed",
    "propensity_oracle",
    "phase_moments_closed",
    "propensity_grid",
    "momentum_marginal",
    "conditional_center",
    "conditional_variance",
]

# Floor applied to densities before any ratio, so far-tail comparisons
# never divide by an exact zero.
DENSITY_FLOOR = 1e-300


@dataclass(frozen=True)
class PropensityPoint:
    q: float
    p: float
    t: float
    value: float


@dataclass(frozen=True)
class PhaseMoments:
    q_mean: float
    q_sq_mean: float
    p_mean: float
    p_sq_mean: float


@dataclass(frozen=True)
class SampledWavefunction:
    """A wavefunction tabulated on a strictly increasing x-grid."""

    x: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values)
        if x.ndim != 1 or x.size < 8 or v.shape != x.shape:
            raise ValueError("need matching 1D arrays with at least 8 samples")
        if not np.all(np.diff(x) > 0):
            raise ValueError("x grid must be strictly increasing")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class PropensityField:
    """Closed-form values on a PhaseGrid, row-major: values[i, j] = Pr(x_i, y_j)."""

    grid: PhaseGrid
    t: float
    values: np.ndarray

    def peak(self):
        """(x, y, value) at the grid argmax."""
        i, j = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return float(self.grid.x_axis()[i]), float(self.grid.y_axis()[j]), float(self.values[i, j])

    def point(self, i: int, j: int) -> PropensityPoint:
        return PropensityPoint(
            q=float(self.grid.x_axis()[i]),
            p=float(self.grid.y_axis()[j]),
            t=self.t,
            value=float(self.values[i, j]),
        )


def propensity_closed(p: ParticleGaussian, f: FilterGaussian, q, p_, t):
    """Closed-form Pr(q, p, t); broadcasts over array q and p_.

    Pr = (delta sigma / (pi sqrt(D)))
         * exp(-delta^2 sigma^2 S2 (p - k0)^2 / (2 D))
         * exp(-2 [delta^2 (q - qb1)^2 + sigma^2 (q - qbp)^2] / D)

    with qb1 = q0 - x0 - k0 t and qbp = q0 - x0 - p t.  Nonnegative and
    normalized over the plane for every t.
    """
    q = np.asarray(q, dtype=float)
    p_ = np.asarray(p_, dtype=float)
    d2 = p.delta**2
    s2 = f.sigma**2
    S2 = d2 + s2
    D = 4.0 * t * t + S2 * S2
    u = p_ - p.k0
    qb1 = f.q0 - p.x0 - p.k0 * t
    qbp = f.q0 - p.x0 - p_ * t
    pref = p.delta * f.sigma / (np.pi * np.sqrt(D))
    expo = -d2 * s2 * S2 * u * u / (2.0 * D) - 2.0 * (d2 * (q - qb1) ** 2 + s2 * (q - qbp) ** 2) / D
    out = pref * np.exp(expo)
    if out.ndim == 0:
        return float(out)
    return out


def momentum_marginal(p: ParticleGaussian, f: FilterGaussian, p_):
    """integral dq Pr(q, p, t): Gaussian in p around k0, independent of t.

    Variance is 1/delta^2 + 1/sigma^2 (particle plus filter momentum
    noise), i.e. the measured momentum distribution never narrows below
    the filter's own spread.
    """
    p_ = np.asarray(p_, dtype=float)
    s = p.delta**2 * f.sigma**2 / (p.delta**2 + f.sigma**2)
    u = p_ - p.k0
    out = np.sqrt(s / (2.0 * np.pi)) * np.exp(-0.5 * s * u * u)
    if out.ndim == 0:
        return float(out)
    return out


def conditional_center(p: ParticleGaussian, f: FilterGaussian, p_, t):
    """Mean of q given a momentum readout p: drifts linearly in p."""
    p_ = np.asarray(p_, dtype=float)
    S2 = p.delta**2 + f.sigma**2
    out = f.q0 - p.x0 - t * (p.delta**2 * p.k0 + f.sigma**2 * p_) / S2
    if out.ndim == 0:
        return float(out)
    return out


def conditional_variance(p: ParticleGaussian, f: FilterGaussian, t) -> float:
    """Variance of q given any momentum readout: D/(4 S2)."""
    S2 = p.delta**2 + f.sigma**2
    return (4.0 * t * t + S2 * S2) / (4.0 * S2)


def _tail_mass_estimate(w: SampledWavefunction) -> float:
    """Crude bound on |w|^2 mass beyond the tabulated window.

    Treats the edge density as flat over one window length, which
    overestimates any decaying tail; good enough to reject grids that
    obviously clip the state.
    """
    dens = np.abs(w.values) ** 2
    span = w.x[-1] - w.x[0]
    return float(max(dens[0], dens[-1]) * span)


def propensity_oracle(
    psi: SampledWavefunction,
    filt: SampledWavefunction,
    q,
    p_,
    cfg: QuadratureConfig | None = None,
    support_tol: float = 1e-10,
):
    """Direct evaluation of the defining overlap integral.

    Splines the tabulated wavefunctions and integrates
    e^{-i p x} psi(x) F(q + x) adaptively over the joint support.  This
    is the brute-force reference for propensity_closed; it assumes
    nothing about Gaussians beyond smoothness of the samples.

    Raises InsufficientSupport when either tabulation carries
    non-negligible density at its grid edges.
    """
    for name, w in (("psi", psi), ("filter", filt)):
        if _tail_mass_estimate(w) > support_tol:
            raise InsufficientSupport(
                "%s grid edges carry an estimated tail mass above %.1g" % (name, support_tol)
            )

    vals = np.asarray(psi.values, dtype=complex)
    re_psi = CubicSpline(psi.x, vals.real)
    im_psi = CubicSpline(psi.x, vals.imag)
    f_re = CubicSpline(filt.x, np.asarray(filt.values, dtype=float))

    # The product lives where both factors do: psi on its own grid,
    # F(q + x) on the filter grid shifted by -q.
    lo = max(psi.x[0], filt.x[0] - q)
    hi = min(psi.x[-1], filt.x[-1] - q)
    if hi <= lo:
        return 0.0

    def real_part(x):
        fx = f_re(x + q)
        return (re_psi(x) * np.cos(p_ * x) + im_psi(x) * np.sin(p_ * x)) * fx

    def imag_part(x):
        fx = f_re(x + q)
        return (im_psi(x) * np.cos(p_ * x) - re_psi(x) * np.sin(p_ * x)) * fx

    cfg = cfg or QuadratureConfig(rel_tol=1e-11, abs_tol=1e-16)
    re = integrate_1d(real_part, lo, hi, cfg, vectorized=True, initial_panels=16)
    im = integrate_1d(imag_part, lo, hi, cfg, vectorized=True, initial_panels=16)
    return (re.value**2 + im.value**2) / (2.0 * np.pi)


def phase_moments_closed(p: ParticleGaussian, f: FilterGaussian, t) -> PhaseMoments:
    """First two moments of the readout pair.

    q_mean    = q0 - (x0 + k0 t)
    q_sq_mean = q_mean^2 + t^2/delta^2 + (delta^2 + sigma^2)/4
    p_mean    = k0
    p_sq_mean = k0^2 + 1/delta^2 + 1/sigma^2
    """
    qm = f.q0 - (p.x0 + p.k0 * t)
    qsq = qm * qm + t * t / p.delta**2 + (p.delta**2 + f.sigma**2) / 4.0
    pm = p.k0
    psq = p.k0**2 + 1.0 / p.delta**2 + 1.0 / f.sigma**2
    return PhaseMoments(q_mean=qm, q_sq_mean=qsq, p_mean=pm, p_sq_mean=psq)


def propensity_grid(p: ParticleGaussian, f: FilterGaussian, grid: PhaseGrid, t) -> PropensityField:
    """Closed-form values over a (q, p) grid; deterministic, row-major."""
    q = grid.x_axis()[:, None]
    p_ = grid.y_axis()[None, :]
    values = propensity_closed(p, f, q, p_, t)
    values = np.atleast_2d(np.asarray(values, dtype=float))
    return PropensityField(grid=grid, t=t, values=values)
