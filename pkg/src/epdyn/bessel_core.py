"""The band-edge integral ``I(lam_n, t)`` and its Bessel-function forms.

``I(lam_n, t) = (1 / 2 pi i) oint_C (1/lam - lam) exp(i t (lam + 1/lam)) / (lam - lam_n) dlam``
with ``C`` clockwise just inside the unit circle. Three independent
evaluations are provided:

* ``"lambda"``: the contour integral itself;
* ``"energy"``: ``(1/pi) int_{-2}^{2} exp(-iEt) sqrt(1 - E^2/4) / (E - E_n) dE``;
* ``"time"``: ``exp(-i E_n t) [lam_n^s - i int_0^t exp(i E_n t') J1(2t')/t' dt']``,

where ``E_n = -lam_n - 1/lam_n`` and ``s = +1`` if ``|lam_n| < 1`` else ``-1``.
Near the lower band edge the time integral expands in ``Delta_n = -(E_n + 2)``
with coefficients ``K_l(t) = int_0^t exp(-2it') J1(2t') t'^(l-1) dt'``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import RouteInvalid, UnimplementedOrder, ValidationError
from .numerics import (
    QuadratureResult,
    TOL_SERIES,
    adaptive_panels,
    bessel_j,
    circle_transform,
    finite_complex,
    gk21_panels,
)

ROUTES = ("lambda", "energy", "time")
MAX_K_ORDER = 12
EPS_PRESCRIPTION = 1e-10


@dataclass(frozen=True)
class GapParams:
    """A discrete eigenvalue viewed from the band edge at ``E = -2``."""

    E_n: complex
    lambda_n: complex
    delta_n: complex
    s: int

    @classmethod
    def from_lambda(cls, lam) -> "GapParams":
        lam = complex(lam)
        if lam == 0:
            raise ValidationError("lambda_n must be nonzero")
        if abs(abs(lam) - 1.0) < 1e-12:
            raise ValidationError("lambda_n must lie off the unit circle")
        e = -lam - 1.0 / lam
        return cls(e, lam, -(e + 2.0), 1 if abs(lam) < 1.0 else -1)

    @property
    def lam_phys(self) -> complex:
        """``lambda_n ** s``: the root of ``E_n = -lam - 1/lam`` inside the unit disc."""
        return self.lambda_n if self.s == 1 else 1.0 / self.lambda_n


def _lambda_route(gp: GapParams, t: float, tol: float) -> QuadratureResult:
    return circle_transform([1.0], [-gp.lambda_n, 1.0], t, tol, inner_poles="include")


def _energy_route(gp: GapParams, t: float, tol: float) -> QuadratureResult:
    en = gp.E_n
    if abs(en.imag) < 1e-14 and -2.0 <= en.real <= 2.0:
        raise RouteInvalid("E_n lies on the branch cut")

    # E = -2 cos k removes the square-root endpoint singularities.
    def f(k):
        e = -2.0 * np.cos(k)
        return np.exp(-1j * e * t) * 2.0 * np.sin(k) ** 2 / (e - en) / np.pi

    n = max(8, int(math.ceil(2.0 * t)))
    res = adaptive_panels(lambda a, b: gk21_panels(f, a, b), np.linspace(0.0, np.pi, n + 1), tol)
    return res


def bessel_time_integral(E_n: complex, t: float, tol: float = TOL_SERIES,
                         shifted: bool = True) -> QuadratureResult:
    """``int_0^t exp(i E_n (t' - t0)) J1(2t') / t' dt'`` with ``t0 = t`` if shifted else 0."""
    if t < 0:
        raise ValidationError("t must be non-negative")
    if t == 0:
        return QuadratureResult(0j, 0.0, 0)
    en = complex(E_n)
    shift = t if shifted else 0.0
    width = math.pi / max(abs(en.real) + 2.0, 1.0)
    n = max(4, int(math.ceil(t / width)))
    return adaptive_panels(lambda a, b: kernels.bessel_time_panels(en, a, b, shift),
                           np.linspace(0.0, t, n + 1), tol)


def _upper_tail(en: complex, t: float, tol: float) -> QuadratureResult:
    """``int_t^inf exp(i E_n (t' - t)) J1(2t')/t' dt'`` for ``Im E_n > 0``."""
    length = math.log(1.0 / (tol * max(t, 1.0))) / en.imag
    width = math.pi / max(abs(en.real) + 2.0, 1.0)
    n = max(4, int(math.ceil(length / width)))
    return adaptive_panels(lambda a, b: kernels.bessel_time_panels(en, a, b, t),
                           np.linspace(t, t + length, n + 1), tol)


def _time_route(gp: GapParams, t: float, tol: float) -> QuadratureResult:
    en = gp.E_n
    if en.imag * t > 2.0:
        # the forward form amplifies roundoff by exp(Im E_n t); since
        # lam^s = i int_0^inf exp(i E_n t') J1(2t')/t' dt' here, only the tail remains
        tail = _upper_tail(en, t, tol)
        return QuadratureResult(finite_complex(1j * tail.value), tail.abs_error_estimate,
                                tail.evaluations)
    if en.imag == 0.0:
        # -i eps prescription, confirmed by one halving of eps
        vals = []
        for eps in (EPS_PRESCRIPTION, EPS_PRESCRIPTION / 2):
            r = bessel_time_integral(en - 1j * eps, t, tol)
            vals.append(r)
        v = 2 * vals[1].value - vals[0].value
        inner = QuadratureResult(v, vals[1].abs_error_estimate + abs(vals[1].value - vals[0].value),
                                 vals[0].evaluations + vals[1].evaluations)
    else:
        inner = bessel_time_integral(en, t, tol)
    value = np.exp(-1j * en * t) * gp.lam_phys - 1j * inner.value
    return QuadratureResult(finite_complex(value), inner.abs_error_estimate, inner.evaluations)


def integral_I(gp: GapParams, t: float, route: str = "time", tol: float = 1e-11) -> complex:
    """Evaluate ``I(lam_n, t)`` by the requested route.

    For ``Im E_n > 0`` and large ``t`` the time route integrates the
    exponentially damped tail ``i int_t^inf`` instead of the forward integral.
    """
    if t < 0:
        raise ValidationError("t must be non-negative")
    if route not in ROUTES:
        raise ValidationError(f"route must be one of {ROUTES}")
    fn = {"lambda": _lambda_route, "energy": _energy_route, "time": _time_route}[route]
    return fn(gp, float(t), tol).value


def tail_closed_form(E_n: complex) -> complex:
    """Closed form of ``int_{-inf}^0 exp(i E_n t') J1(2t')/t' dt'`` (``Im E_n < 0``).

    Equals ``1 / (i E_n (1/2 + sqrt(1 - 4/E_n^2)/2))``, i.e. ``i lam^s``.
    """
    en = complex(E_n)
    root = np.sqrt(1.0 - 4.0 / en ** 2)
    # pick the branch continuous from large |E_n| (root -> 1)
    return complex(1.0 / (1j * en * (0.5 + 0.5 * root)))


# ------------------------------------------------------------------ K_l

def _m_sequence(m_max: int, z: float) -> list:
    """``M_m(z) = int_0^z exp(-iu) J1(u) u^m du`` for ``m = 0..m_max``."""
    ph = np.exp(-1j * z)
    j0 = bessel_j(0, z)
    j1 = bessel_j(1, z)
    A = [ph * z ** m * j0 for m in range(m_max + 2)]
    B = [ph * z ** m * j1 for m in range(m_max + 2)]
    M = [1.0 - ph * ((1.0 + 1j * z) * j0 - z * j1)]
    for m in range(1, m_max + 1):
        M.append((m + 1) / (2 * m + 1) * (1j * B[m] - 1j * (m - 1) * M[m - 1])
                 - 1j * (A[m + 1] + 1j * B[m + 1]) / (2 * m + 1))
    return M


def k_integral(l: int, t: float) -> complex:
    """``K_l(t) = int_0^t exp(-2it') J1(2t') t'^(l-1) dt'`` via an exact recursion."""
    if l < 0 or int(l) != l:
        raise ValidationError("l must be a non-negative integer")
    if l > MAX_K_ORDER:
        raise UnimplementedOrder(f"K_l implemented for l <= {MAX_K_ORDER}")
    if t < 0:
        raise ValidationError("t must be non-negative")
    if l == 0:
        return complex(1j * (-1.0 + np.exp(-2j * t) * (bessel_j(0, 2 * t) + 1j * bessel_j(1, 2 * t))))
    M = _m_sequence(l - 1, 2.0 * t)
    return complex(M[l - 1] / 2.0 ** l)


def k_closed_form(l: int, t: float) -> complex:
    """The explicit low-order expressions ``K_0 .. K_3`` as commonly quoted.

    ``K_0``, ``K_1`` and ``K_2`` agree with :func:`k_integral`; the quoted
    ``K_3`` does not (kept for comparison only).
    """
    z = 2.0 * t
    ph = np.exp(-1j * z)
    j0 = bessel_j(0, z)
    j1 = bessel_j(1, z)
    if l == 0:
        return complex(1j * (-1.0 + ph * (j0 + 1j * j1)))
    if l == 1:
        return complex(0.5 * (1.0 - ph * ((1 + 2j * t) * j0 - 2 * t * j1)))
    if l == 2:
        return complex(t / 3.0 * ph * (-1j * t * j0 + (1j + t) * j1))
    if l == 3:
        return complex(t / 10.0 * ph * (-t * (1 + 2j * t) * j0 + (1 + 2j * t + t * t) * j1))
    raise UnimplementedOrder("closed forms quoted only for l <= 3")


def i_series(gp: GapParams, t: float, l_max: int) -> complex:
    """Band-edge expansion of ``I(lam_n, t)`` truncated at ``l_max``.

    ``I ~ exp(-i E_n t) [lam_n^s - i sum_{l <= l_max} (-i Delta_n)^l / l! K_l(t)]``.
    """
    if l_max < 0:
        raise ValidationError("l_max must be non-negative")
    total = 0j
    for l in range(l_max + 1):
        total += (-1j * gp.delta_n) ** l / math.factorial(l) * k_integral(l, t)
    return complex(np.exp(-1j * gp.E_n * t) * (gp.lam_phys - 1j * total))
