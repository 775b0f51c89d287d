"""Numerical foundation: Bessel functions, adaptive contour quadrature,
biquadratic roots and power-law slope fits.

All energies, couplings and times are measured in units of the chain
hopping ``b = 1``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .errors import (
    BudgetExceeded,
    DegenerateLeadingCoefficient,
    InsufficientSamples,
    NonpositiveProbability,
    NumericalError,
    ValidationError,
)

DEFAULT_MAX_EVALS = 50_000_000
TOL_SPECTRAL = 1e-10
TOL_SERIES = 1e-8


def max_evals_from_env(default: int = DEFAULT_MAX_EVALS) -> int:
    """Evaluation budget, overridable with ``EPDYN_MAX_EVALS``."""
    raw = os.environ.get("EPDYN_MAX_EVALS")
    if not raw:
        return default
    try:
        value = int(float(raw))
    except ValueError as exc:
        raise ValidationError(f"EPDYN_MAX_EVALS must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise ValidationError("EPDYN_MAX_EVALS must be positive")
    return value


def finite_complex(z) -> complex:
    """Convert to ``complex`` and refuse NaN or infinite values."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise NumericalError(f"non-finite complex value {z!r}")
    return z


# ---------------------------------------------------------------- Bessel

def bessel_j(order: int, z):
    """Bessel function of the first kind of order 0 or 1.

    Parameters
    ----------
    order : {0, 1}
    z : float or array_like
        Real argument(s).

    Returns
    -------
    float or ndarray
    """
    if order not in (0, 1):
        raise ValidationError("order must be 0 or 1")
    arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("bessel_j requires finite arguments")
    fn = kernels.j0 if order == 0 else kernels.j1
    if arr.ndim == 0:
        return float(fn(float(arr)))
    return np.asarray(fn(arr.ravel())).reshape(arr.shape)


def bessel_asymptotic(order: int, z):
    """Leading large-argument form ``sqrt(2/(pi z)) cos(z - pi/4 - order pi/2)``.

    Only defined here for ``z >= 2``.
    """
    if order not in (0, 1):
        raise ValidationError("order must be 0 or 1")
    arr = np.asarray(z, dtype=float)
    if np.any(arr < 2.0):
        raise ValidationError("bessel_asymptotic requires z >= 2")
    out = np.sqrt(2.0 / (np.pi * arr)) * np.cos(arr - np.pi / 4 - order * np.pi / 2)
    return float(out) if out.ndim == 0 else out


# ------------------------------------------------------------ Quadrature

@dataclass(frozen=True)
class QuadratureResult:
    """Outcome of an adaptive integration."""

    value: complex
    abs_error_estimate: float
    evaluations: int

    def __post_init__(self):
        if not self.abs_error_estimate >= 0:
            raise NumericalError("negative or NaN error estimate")


@dataclass(frozen=True)
class Segment:
    """One smooth piece ``s in [0, 1] -> z(s)`` with derivative ``dz/ds``."""

    z: Callable[[np.ndarray], np.ndarray]
    dz: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ContourSpec:
    """A piecewise-smooth contour in the complex plane.

    ``orientation`` is descriptive; the traversal direction is carried by the
    segment parameterizations themselves.
    """

    segments: Sequence[Segment]
    orientation: str = "counterclockwise"
    closed: bool = True
    breakpoints: Sequence[float] = field(default_factory=tuple)

    def __post_init__(self):
        if self.orientation not in ("clockwise", "counterclockwise"):
            raise ValidationError("orientation must be 'clockwise' or 'counterclockwise'")
        if not self.segments:
            raise ValidationError("contour needs at least one segment")
        if self.closed:
            start = complex(self.segments[0].z(np.array([0.0]))[0])
            end = complex(self.segments[-1].z(np.array([1.0]))[0])
            if abs(start - end) > 1e-12 * max(1.0, abs(start)):
                raise ValidationError("closed contour does not return to its start")

    @classmethod
    def circle(cls, center: complex = 0.0, radius: float = 1.0,
               orientation: str = "counterclockwise") -> "ContourSpec":
        """Circle split into four quarter-arc segments."""
        if radius <= 0:
            raise ValidationError("radius must be positive")
        sgn = 1.0 if orientation == "counterclockwise" else -1.0
        segs = []
        for k in range(4):
            phi0 = sgn * k * np.pi / 2

            def z(s, phi0=phi0):
                return center + radius * np.exp(1j * (phi0 + sgn * s * np.pi / 2))

            def dz(s, phi0=phi0):
                return 1j * sgn * (np.pi / 2) * radius * np.exp(1j * (phi0 + sgn * s * np.pi / 2))

            segs.append(Segment(z, dz))
        return cls(tuple(segs), orientation=orientation)

    @classmethod
    def polygon(cls, vertices: Sequence[complex], orientation: str = "counterclockwise",
                closed: bool = True) -> "ContourSpec":
        """Straight segments through ``vertices`` (closed back to the first)."""
        pts = [complex(v) for v in vertices]
        if closed:
            pts = pts + [pts[0]]
        segs = []
        for z0, z1 in zip(pts[:-1], pts[1:]):
            segs.append(Segment(lambda s, z0=z0, z1=z1: z0 + (z1 - z0) * s,
                                lambda s, z0=z0, z1=z1: (z1 - z0) * np.ones_like(s, dtype=complex)))
        return cls(tuple(segs), orientation=orientation, closed=closed)


_NODES = kernels._kernels_py.NODES
_WK = kernels._kernels_py.WK
_WG = kernels._kernels_py.WGAUSS


def gk21_panels(f: Callable[[np.ndarray], np.ndarray], a, b):
    """Apply the 21-point Gauss-Kronrod rule to a vectorized ``f`` on panels."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    x = c[:, None] + h[:, None] * _NODES[None, :]
    fx = np.asarray(f(x), dtype=complex)
    k = fx @ _WK * h
    g = fx @ _WG * h
    return k, np.abs(k - g)


def adaptive_panels(panel_fn: Callable, edges, tol: float,
                    max_evals: int | None = None, min_width: float = 0.0) -> QuadratureResult:
    """Globally adaptive GK21 over consecutive panels.

    Parameters
    ----------
    panel_fn : callable
        ``panel_fn(a, b) -> (values, errors)`` for arrays of panel bounds.
    edges : array_like
        Initial partition (monotone).
    tol : float
        Absolute target for the summed error estimate.
    max_evals : int, optional
        Budget of integrand evaluations; defaults to ``EPDYN_MAX_EVALS``.
    min_width : float
        Panels narrower than this are never split further.

    Raises
    ------
    BudgetExceeded
        If the budget is spent before the error target is met.
    """
    if max_evals is None:
        max_evals = max_evals_from_env()
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    if 21 * a.size > max_evals:
        raise BudgetExceeded(f"initial partition needs {21 * a.size} evaluations > budget {max_evals}")
    vals, errs = panel_fn(a, b)
    vals = np.asarray(vals, dtype=complex)
    errs = np.asarray(errs, dtype=float)
    evals = 21 * a.size
    span = abs(edges[-1] - edges[0]) or 1.0
    width_floor = max(min_width, 64 * np.finfo(float).eps * max(abs(edges[0]), abs(edges[-1]), 1.0))
    while True:
        total_err = errs.sum()
        if not np.isfinite(total_err) or not np.all(np.isfinite(vals)):
            raise NumericalError("non-finite integrand on the contour")
        if total_err <= tol:
            break
        width = np.abs(b - a)
        splittable = width > width_floor
        split = (errs > tol * width / span) & splittable
        if not split.any():
            # error is spread thinly; refine the worst tenth
            split = (errs >= np.quantile(errs[splittable], 0.9)) & splittable if splittable.any() else split
            if not split.any():
                break
        sa, sb = a[split], b[split]
        mid = 0.5 * (sa + sb)
        na = np.concatenate([sa, mid])
        nb = np.concatenate([mid, sb])
        evals += 21 * na.size
        if evals > max_evals:
            raise BudgetExceeded(
                f"quadrature budget {max_evals} exhausted; error estimate {total_err:.3e} > tol {tol:.1e}")
        nv, ne = panel_fn(na, nb)
        keep = ~split
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        vals = np.concatenate([vals[keep], np.asarray(nv, dtype=complex)])
        errs = np.concatenate([errs[keep], np.asarray(ne, dtype=float)])
    order = np.argsort(a)
    return QuadratureResult(finite_complex(vals[order].sum()), float(errs.sum()), int(evals))


def integrate_contour(f: Callable, c: ContourSpec, tol: float = TOL_SPECTRAL,
                      max_evals: int | None = None, panels_per_segment: int = 4) -> QuadratureResult:
    """Adaptive integral of a vectorized ``f(z)`` along a contour.

    Examples
    --------
    >>> r = integrate_contour(lambda z: 1 / z, ContourSpec.circle())
    >>> abs(r.value - 2j * np.pi) < 1e-10
    True
    """
    if max_evals is None:
        max_evals = max_evals_from_env()
    total = 0.0 + 0.0j
    err = 0.0
    evals = 0
    nseg = len(c.segments)
    for seg in c.segments:
        def integrand(s, seg=seg):
            return f(seg.z(s)) * seg.dz(s)

        res = adaptive_panels(lambda a, b: gk21_panels(integrand, a, b),
                              np.linspace(0.0, 1.0, panels_per_segment + 1),
                              tol / nseg, max_evals - evals)
        total += res.value
        err += res.abs_error_estimate
        evals += res.evaluations
    return QuadratureResult(finite_complex(total), err, evals)


# ------------------------------------------------------------ Polynomials

def quartic_roots(c4: float, c2: float, c0: float) -> np.ndarray:
    """Roots of the biquadratic ``c4 E^4 + c2 E^2 + c0``.

    Returns
    -------
    ndarray of complex, shape (4,)
        Ordered ``(r1, -r1, r2, -r2)`` where ``r1**2`` and ``r2**2`` are the
        two roots of the quadratic in ``E**2``.
    """
    if c4 == 0:
        raise DegenerateLeadingCoefficient("c4 must be nonzero")
    c4, c2, c0 = complex(c4), complex(c2), complex(c0)
    disc = np.sqrt(c2 * c2 - 4 * c4 * c0)
    sgn = 1.0 if (np.conj(c2) * disc).real >= 0 else -1.0
    q = -0.5 * (c2 + sgn * disc)
    if q == 0:
        u1 = u2 = 0.0 + 0.0j
    else:
        u1 = q / c4
        u2 = c0 / q
    r1 = np.sqrt(u1)
    r2 = np.sqrt(u2)
    roots = np.array([r1, -r1, r2, -r2], dtype=complex)
    return np.array([_polish_biquadratic(c4, c2, c0, r) for r in roots])


def _polish_biquadratic(c4, c2, c0, r, steps: int = 2):
    for _ in range(steps):
        p = (c4 * r * r + c2) * r * r + c0
        dp = (4 * c4 * r * r + 2 * c2) * r
        if dp == 0:
            break
        with np.errstate(over="ignore", invalid="ignore"):
            step = p / dp
        if not np.isfinite(step):
            break
        r_new = r - step
        if abs((c4 * r_new * r_new + c2) * r_new * r_new + c0) < abs(p):
            r = r_new
        else:
            break
    return complex(r)


# ------------------------------------------------------------ Slope fits

def loglog_slope(series, t_lo: float, t_hi: float) -> float:
    """Least-squares slope of ``log P`` against ``log t`` inside a window.

    ``series`` may be any object with ``times`` and ``probability``
    attributes, or a ``(times, probability)`` pair.
    """
    if hasattr(series, "times"):
        t, p = series.times, series.probability
    else:
        t, p = series
    t = np.asarray(t, dtype=float)
    p = np.asarray(p, dtype=float)
    if not t_lo < t_hi:
        raise ValidationError("t_lo must be below t_hi")
    m = (t >= t_lo) & (t <= t_hi)
    if m.sum() < 10:
        raise InsufficientSamples(f"need >= 10 samples in window, got {int(m.sum())}")
    if np.any(p[m] <= 0):
        raise NonpositiveProbability("all probabilities in the window must be positive")
    slope, _ = np.polyfit(np.log(t[m]), np.log(p[m]), 1)
    return float(slope)


# ------------------------------------------------- Unit-circle transform

def circle_radius(t: float) -> float:
    """Radius of the numerical contour just inside ``|lam| = 1``.

    On ``|lam| = r`` the factor ``exp(i t (lam + 1/lam))`` can reach
    ``exp((1/r - r) t)``; keeping ``1 - r <= 0.25 / t`` bounds it by ``e**0.5``.
    """
    return 1.0 - min(1e-3, 0.25 / t) if t > 0 else 1.0 - 1e-3


def circle_transform(num, den, t: float, tol: float = TOL_SPECTRAL,
                     inner_poles: str = "include", max_evals: int | None = None,
                     pole_tol: float = 1e-9) -> QuadratureResult:
    """Clockwise integral just inside the unit circle.

    Computes ``(1 / 2 pi i) oint (1/lam - lam) exp(i t (lam + 1/lam)) N/D dlam``
    for ascending coefficient arrays ``num`` and ``den`` (simple poles off the
    unit circle).

    Parameters
    ----------
    inner_poles : {"include", "exclude"}
        Whether poles of ``N/D`` with ``|lam| < 1`` count as enclosed. The
        contour of the ``I(lam_n, t)`` integrals encloses them; survival
        amplitudes need them excluded (bound states on the physical sheet).
    """
    if inner_poles not in ("include", "exclude"):
        raise ValidationError("inner_poles must be 'include' or 'exclude'")
    if t < 0:
        raise ValidationError("t must be non-negative")
    num = np.asarray(num, dtype=complex)
    den = np.asarray(den, dtype=complex)
    r = circle_radius(t)
    n = max(16, int(math.ceil(2.0 * max(t, 1.0))))
    edges = np.linspace(0.0, 2.0 * np.pi, n + 1)
    res = adaptive_panels(lambda a, b: kernels.circle_panels(num, den, r, t, a, b),
                          edges, tol * 2.0 * np.pi, max_evals)
    value = -res.value / (2.0 * np.pi)
    err = res.abs_error_estimate / (2.0 * np.pi)
    poles = np.roots(den[::-1]) if den.size > 1 else np.array([])
    dden = np.polynomial.polynomial.polyder(den)
    for p in poles:
        mod = abs(p)
        if abs(mod - 1.0) < pole_tol:
            raise NumericalError(f"pole {p} lies on the unit circle")
        if mod >= 1.0:
            continue
        enclosed_numerically = mod < r
        want_enclosed = inner_poles == "include"
        if enclosed_numerically == want_enclosed:
            continue
        d = np.polynomial.polynomial.polyval(p, dden)
        if abs(d) < 1e-300:
            raise NumericalError("repeated pole inside the unit circle")
        residue = ((1.0 / p - p) * np.exp(1j * t * (p + 1.0 / p))
                   * np.polynomial.polynomial.polyval(p, num) / d)
        value += -residue if want_enclosed else residue
    return QuadratureResult(finite_complex(value), err, res.evaluations)
