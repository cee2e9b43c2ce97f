"""Adaptive 1D/2D quadrature and stable special-function kernels.

The integrator is a deterministic embedded Gauss-Legendre pair: every
panel is evaluated with a 10-point and a 21-point rule, the difference
serves as the error estimate, and the panel with the largest estimate
is bisected until the summed estimate meets tolerance.  No randomness,
no work stealing: identical inputs give bit-identical results.

Infinite bounds are truncated at ``truncation_radius`` scale units from
a caller-supplied center, which is the right tool here because every
integrand in this package is Gaussian-dominated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special as _sf

from .errors import NotConverged

__all__ = [
    "QuadratureConfig",
    "IntegralResult",
    "integrate_1d",
    "integrate_2d",
    "erf",
    "erfc",
    "erfcx",
    "log_density_eval",
]

# Embedded rule pair. leggauss is deterministic, so these are constants.
_XLO, _WLO = leggauss(10)
_XHI, _WHI = leggauss(21)


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and domain-truncation policy for the adaptive integrator."""

    rel_tol: float = 1e-9
    abs_tol: float = 1e-14
    max_subdivisions: int = 4000
    truncation_radius: float = 12.0

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")
        if self.truncation_radius <= 0:
            raise ValueError("truncation_radius must be positive")


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    subdivisions_used: int
    converged: bool


_DEFAULT_CFG = QuadratureConfig()


def _panel_eval(f, lo, hi, vectorized):
    """Return (I_high, |I_high - I_low|) for one panel."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = np.concatenate((mid + half * _XHI, mid + half * _XLO))
    if vectorized:
        y = np.asarray(f(x), dtype=float)
    else:
        y = np.array([f(v) for v in x], dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("integrand returned a non-finite value inside (%g, %g)" % (lo, hi))
    i_hi = half * float(np.dot(_WHI, y[:21]))
    i_lo = half * float(np.dot(_WLO, y[21:]))
    return i_hi, abs(i_hi - i_lo)


def _resolve_bounds(a, b, center, scale, radius):
    # Truncate infinite ends at center +- radius*scale.
    if math.isinf(a) and math.isinf(b):
        c = 0.0 if center is None else center
        return c - radius * scale, c + radius * scale
    if math.isinf(b):
        c = a if center is None else center
        return a, max(c + radius * scale, a + radius * scale)
    if math.isinf(a):
        c = b if center is None else center
        return min(c - radius * scale, b - radius * scale), b
    return a, b


def integrate_1d(
    f,
    a,
    b,
    cfg: QuadratureConfig | None = None,
    *,
    vectorized=False,
    points=(),
    center=None,
    scale=1.0,
    sqrt_singularity_at=None,
    initial_panels=8,
):
    """Adaptive integral of ``f`` over (a, b).

    Infinite bounds are truncated ``cfg.truncation_radius`` scale units
    away from ``center`` (defaulting to the finite endpoint, or 0).
    ``points`` seeds extra panel boundaries at known features.  An
    integrable inverse-square-root endpoint singularity must be declared
    via ``sqrt_singularity_at`` ('a' or 'b'); the panel rules never
    evaluate the endpoints themselves, but without the substitution the
    subdivision cap would be wasted resolving it.

    Raises NotConverged when the subdivision cap is hit first.
    """
    cfg = cfg or _DEFAULT_CFG
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    a, b = _resolve_bounds(a, b, center, scale, cfg.truncation_radius)
    if a == b:
        return IntegralResult(0.0, 0.0, 0, True)

    g = f
    g_vectorized = vectorized
    pts = [p for p in points if a < p < b]
    if sqrt_singularity_at == "a":
        # x = a + u^2 maps the singular end to a regular origin.
        width = b - a
        aa = a
        if vectorized:
            g = lambda u: 2.0 * u * np.asarray(f(aa + u * u))
        else:
            g = lambda u: 2.0 * u * f(aa + u * u)
        a, b = 0.0, math.sqrt(width)
        pts = []  # breakpoints are not carried through the substitution
    elif sqrt_singularity_at == "b":
        width = b - a
        bb = b
        if vectorized:
            g = lambda u: 2.0 * u * np.asarray(f(bb - u * u))
        else:
            g = lambda u: 2.0 * u * f(bb - u * u)
        a, b = 0.0, math.sqrt(width)
        pts = []
    elif sqrt_singularity_at is not None:
        raise ValueError("sqrt_singularity_at must be 'a', 'b' or None")

    bounds = sorted(set([a, b] + list(np.linspace(a, b, initial_panels + 1))) | set(pts))
    los = bounds[:-1]
    his = bounds[1:]
    vals = []
    errs = []
    for lo, hi in zip(los, his):
        v, e = _panel_eval(g, lo, hi, g_vectorized)
        vals.append(v)
        errs.append(e)

    used = 0
    while True:
        total = math.fsum(vals)
        err = math.fsum(errs)
        if err <= max(cfg.rel_tol * abs(total), cfg.abs_tol):
            return IntegralResult(sign * total, err, used, True)
        if used >= cfg.max_subdivisions:
            raise NotConverged(
                "subdivision cap %d reached (value %.6g, error %.3g)"
                % (cfg.max_subdivisions, sign * total, err),
                value=sign * total,
                error_estimate=err,
                subdivisions_used=used,
            )
        i = int(np.argmax(errs))
        lo, hi = los[i], his[i]
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # Panel at float resolution; its estimate cannot improve.
            errs[i] = 0.0
            continue
        v1, e1 = _panel_eval(g, lo, mid, g_vectorized)
        v2, e2 = _panel_eval(g, mid, hi, g_vectorized)
        los[i], his[i], vals[i], errs[i] = lo, mid, v1, e1
        los.insert(i + 1, mid)
        his.insert(i + 1, hi)
        vals.insert(i + 1, v2)
        errs.insert(i + 1, e2)
        used += 1


def integrate_2d(
    f,
    x_bounds,
    y_bounds,
    cfg: QuadratureConfig | None = None,
    *,
    excluded_y_band=None,
    x_center=None,
    x_scale=1.0,
    y_center=None,
    y_scale=1.0,
    x_points=(),
):
    """Iterated adaptive integral of ``f(x, y)`` over a rectangle.

    The outer loop runs over y; for every outer node the inner x
    integral is evaluated adaptively with ``f`` vectorized in x.
    ``excluded_y_band = eps`` removes y in [-eps, eps], splitting the
    outer domain into two half-domains, which is how a punctured
    momentum axis is integrated.
    """
    cfg = cfg or _DEFAULT_CFG
    inner_cfg = QuadratureConfig(
        rel_tol=max(cfg.rel_tol * 1e-2, 1e-15),
        abs_tol=cfg.abs_tol * 1e-2,
        max_subdivisions=cfg.max_subdivisions,
        truncation_radius=cfg.truncation_radius,
    )
    ylo, yhi = _resolve_bounds(y_bounds[0], y_bounds[1], y_center, y_scale, cfg.truncation_radius)

    segments = []
    if excluded_y_band is not None:
        eps = float(excluded_y_band)
        if eps < 0:
            raise ValueError("excluded band half-width must be nonnegative")
        if ylo < -eps:
            segments.append((ylo, min(-eps, yhi)))
        if yhi > eps:
            segments.append((max(eps, ylo), yhi))
    else:
        segments.append((ylo, yhi))

    inner_err_max = 0.0
    inner_used_total = 0

    def outer_integrand(y):
        nonlocal inner_err_max, inner_used_total
        res = integrate_1d(
            lambda x: f(x, y),
            x_bounds[0],
            x_bounds[1],
            inner_cfg,
            vectorized=True,
            center=x_center,
            scale=x_scale,
            points=x_points,
        )
        inner_err_max = max(inner_err_max, res.error_estimate)
        inner_used_total += res.subdivisions_used
        return res.value

    total = 0.0
    err = 0.0
    used = 0
    for lo, hi in segments:
        if hi <= lo:
            continue
        res = integrate_1d(outer_integrand, lo, hi, cfg, vectorized=False)
        total += res.value
        err += res.error_estimate
        used += res.subdivisions_used
    # Inner estimates are driven two orders tighter than the outer ones;
    # fold a conservative bound on their accumulation into the estimate.
    span = math.fsum(hi - lo for lo, hi in segments)
    err = err + inner_err_max * span
    return IntegralResult(total, err, used + inner_used_total, True)


def erf(x):
    """Error function, exact to double precision, odd, erf(+-inf)=+-1."""
    return _sf.erf(x)


def erfc(x):
    return _sf.erfc(x)


def erfcx(x):
    """Scaled complement exp(x^2) erfc(x); stable for large positive x."""
    return _sf.erfcx(x)


def log_density_eval(a, b):
    """Stable exp(a) * cosh(b).

    Evaluated as 0.5 exp(a + |b|) (1 + exp(-2|b|)), so the only way to
    overflow is for the true value itself to exceed float range.  Works
    elementwise on arrays.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    hi = a + np.abs(b)
    out = 0.5 * np.exp(hi) * (1.0 + np.exp(-2.0 * np.abs(b)))
    if out.ndim == 0:
        return float(out)
    return out
