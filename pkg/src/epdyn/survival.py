"""Survival amplitudes ``A(t) = <d| exp(-iHt) |d>`` and their approximations.

Exact amplitudes come from two independent routes: the unit-circle contour
integral of the impurity Green's function (``amplitude_contour``) and exact
diagonalization of a truncated chain (``amplitude_finite_chain``). The
remaining functions are closed-form approximations valid in particular time
windows; they carry no unitarity guarantee.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import model_one, model_two
from .errors import BudgetExceeded, LightConeViolation, NumericalError, ValidationError
from .model_one import ModelOneParams
from .model_two import ModelTwoParams
from .numerics import circle_transform

Params = Union[ModelOneParams, ModelTwoParams]

UNITARITY_SLACK = 1e-8
LIGHT_CONE_MARGIN = 10
CONTOUR_TOL = 1e-11


class Method(str, Enum):
    CONTOUR = "contour"
    FINITE_CHAIN = "finite_chain"
    ZENO = "zeno"
    EP2A_POLE = "ep2a_pole"
    NEAR_THRESHOLD = "near_threshold"
    LONGTIME = "longtime"
    EP2B_POLE = "ep2b_pole"
    EP2B_LONGTIME = "ep2b_longtime"

    @property
    def exact(self) -> bool:
        return self in (Method.CONTOUR, Method.FINITE_CHAIN)


@dataclass(frozen=True)
class SurvivalSeries:
    """A sampled survival curve.

    ``amplitude`` is NaN for formulas that only provide ``P``; wherever it is
    finite, ``probability == |amplitude|**2``. ``err_est`` is the quadrature
    error estimate per point (0 for closed forms, ``inf`` for failed points).
    """

    times: np.ndarray
    amplitude: np.ndarray
    probability: np.ndarray
    method: Method
    params: dict
    err_est: np.ndarray

    @property
    def failed(self) -> np.ndarray:
        return ~np.isfinite(self.err_est)

    @property
    def is_unitary(self) -> bool:
        p = self.probability[~self.failed]
        return bool(np.all(p <= 1.0 + UNITARITY_SLACK))


@dataclass(frozen=True)
class Timescales:
    """Characteristic times; fields not defined for a model are ``None``."""

    t_zeno: float
    t_ep: float
    t_ep_edges: Optional[tuple] = None
    gamma_bar: Optional[float] = None


def _times(times) -> np.ndarray:
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if t.ndim != 1 or not np.all(np.isfinite(t)):
        raise ValidationError("times must be a finite 1-d grid")
    if np.any(t < 0):
        raise ValidationError("times must be non-negative")
    if np.any(np.diff(t) < 0):
        raise ValidationError("times must be ascending")
    return t


def _snapshot(p: Params) -> dict:
    d = dataclasses.asdict(p)
    d["model"] = "I" if isinstance(p, ModelOneParams) else "II"
    return d


def _series(t, amp, prob, method, params, err=None) -> SurvivalSeries:
    t = np.asarray(t, dtype=float)
    err = np.zeros_like(t) if err is None else np.asarray(err, dtype=float)
    return SurvivalSeries(t, np.asarray(amp, dtype=complex), np.asarray(prob, dtype=float),
                          Method(method), params, err)


def _green(p: Params):
    if isinstance(p, ModelOneParams):
        return model_one.green_coefficients(p)
    if isinstance(p, ModelTwoParams):
        return model_two.green_coefficients(p)
    raise ValidationError("params must be ModelOneParams or ModelTwoParams")


# ----------------------------------------------------------- exact routes

def amplitude_contour(p: Params, times, tol: float = CONTOUR_TOL,
                      max_evals: int | None = None) -> SurvivalSeries:
    """Exact amplitude from the contour integral over ``|lam| = 1``.

    ``A(t) = (1/2 pi i) oint_cw (1/lam - lam) exp(i(lam + 1/lam)t) lam G_dd dlam / lam``
    with ``G_dd = lam N(lam)/D(lam)``. Bound states (poles with ``|lam| < 1``)
    lie outside the contour. A point whose quadrature budget runs out is
    returned as NaN with ``err_est = inf`` instead of aborting the series.
    """
    t = _times(times)
    if p.g == 0.0:
        # decoupled from the chain: the poles sit on the unit circle, use the closed form
        amp = np.exp(-1j * p.eps_d * t) if isinstance(p, ModelOneParams) else np.cos(p.V * t) + 0j
        return _series(t, amp, np.abs(amp) ** 2, Method.CONTOUR, _snapshot(p))
    num, den = _green(p)
    amp = np.empty(t.size, dtype=complex)
    err = np.empty(t.size)
    for i, ti in enumerate(t):
        if ti == 0.0:
            amp[i], err[i] = 1.0, 0.0
            continue
        try:
            r = circle_transform(num, den, ti, tol, inner_poles="exclude", max_evals=max_evals)
        except BudgetExceeded:
            amp[i], err[i] = np.nan, np.inf
            continue
        amp[i], err[i] = r.value, r.abs_error_estimate
    prob = np.abs(amp) ** 2
    ok = np.isfinite(prob)
    if np.any(prob[ok] > 1.0 + UNITARITY_SLACK):
        raise NumericalError("contour amplitude violates unitarity; tighten tol")
    return _series(t, amp, prob, Method.CONTOUR, _snapshot(p), err)


def amplitude_contour_m1(p: ModelOneParams, times, **kw) -> SurvivalSeries:
    if not isinstance(p, ModelOneParams):
        raise ValidationError("expected ModelOneParams")
    return amplitude_contour(p, times, **kw)


def amplitude_contour_m2(p: ModelTwoParams, times, **kw) -> SurvivalSeries:
    if not isinstance(p, ModelTwoParams):
        raise ValidationError("expected ModelTwoParams")
    return amplitude_contour(p, times, **kw)


def chain_hamiltonian(p: Params, n_sites: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of the truncated tight-binding Hamiltonian.

    Site 0 is the initially occupied impurity; all chain hoppings are ``-1``.
    """
    if isinstance(p, ModelOneParams):
        head_d, head_e = [p.eps_d], [-p.g]
    elif isinstance(p, ModelTwoParams):
        head_d, head_e = [0.0, 0.0], [-p.V, -p.g]
    else:
        raise ValidationError("params must be ModelOneParams or ModelTwoParams")
    if n_sites < len(head_d) + 1:
        raise ValidationError("n_sites too small for the impurity structure")
    d = np.zeros(n_sites)
    d[: len(head_d)] = head_d
    e = -np.ones(n_sites - 1)
    e[: len(head_e)] = head_e
    return d, e


def amplitude_finite_chain(p: Params, n_sites: int, times, check_light_cone: bool = True,
                           margin: int = LIGHT_CONE_MARGIN) -> SurvivalSeries:
    """Oracle amplitude ``sum_m |<d|m>|^2 exp(-i E_m t)`` on a finite chain.

    Valid while reflections from the far end have not returned: the front
    moves at most two sites per unit time, so ``n_sites >= 2 t_max + margin``
    is required unless ``check_light_cone`` is off.
    """
    t = _times(times)
    n_sites = int(n_sites)
    if check_light_cone and t.size and n_sites < 2.0 * t[-1] + margin:
        raise LightConeViolation(
            f"n_sites={n_sites} < 2 t_max + {margin} = {2.0 * t[-1] + margin:g}")
    d, e = chain_hamiltonian(p, n_sites)
    if np.all(e[:1] == 0.0):
        amp = np.exp(-1j * d[0] * t)
    else:
        w, v = eigh_tridiagonal(d, e)
        weight = v[0] ** 2
        amp = np.empty(t.size, dtype=complex)
        chunk = max(1, 2_000_000 // max(n_sites, 1))
        for s in range(0, t.size, chunk):
            ts = t[s:s + chunk]
            amp[s:s + chunk] = np.exp(-1j * np.outer(ts, w)) @ weight
    return _series(t, amp, np.abs(amp) ** 2, Method.FINITE_CHAIN, _snapshot(p))


# ------------------------------------------------------- approximations

def zeno(p: Params, t):
    """Short-time parabola ``1 - g^2 t^2`` (Model I) or ``1 - V^2 t^2`` (Model II)."""
    t = np.asarray(t, dtype=float)
    coupling = p.g if isinstance(p, ModelOneParams) else p.V
    return 1.0 - coupling ** 2 * t ** 2


def delta_ep(g: float) -> float:
    """Gap ``-(E_bar + 2)`` between the lower EP energy and the band edge."""
    c = math.sqrt(1.0 - g * g)
    return (2.0 - g * g) / c - 2.0


def ep2a_pole(g: float, t, variant: str = "exact"):
    """Half-residue of the coalesced pole at the lower EP.

    ``exact``: ``(1 + lam_bar^2 + i t g^4 lam_bar^3) exp(-i E_bar t) / 2``.
    ``small_g``: the same to relative order ``g^4``,
    ``(1 + g^2/2 + i t g^4 (1 + 3 g^2/2) / 2) exp(-i E_bar t)``.
    Never unitary: ``|A(0)|^2 = ((1 + lam_bar^2)/2)^2 > 1``.
    """
    ep = model_one.ep_location(g)
    t = np.asarray(t, dtype=float)
    phase = np.exp(-1j * ep.E_bar * t)
    lb = ep.lambda_bar
    if variant == "exact":
        return 0.5 * (1.0 + lb ** 2 + 1j * t * g ** 4 * lb ** 3) * phase
    if variant == "small_g":
        return (1.0 + g * g / 2.0 + 0.5j * t * g ** 4 * (1.0 + 1.5 * g * g)) * phase
    raise ValidationError("variant must be 'exact' or 'small_g'")


def ep2a_near_threshold(g: float, t):
    """``(A_Delta, P_Delta)`` for a lower EP close to the band edge.

    ``A_Delta = exp(-i E_bar t) [1 - 4 sqrt(i t D / pi) + 2 i t D]`` and the
    truncated ``P_Delta = 1 - 4 sqrt(2 t D / pi) + 16 t D / pi`` with
    ``D = delta_ep(g)``; intended for ``T_Z << t << 1/D``.
    """
    ep = model_one.ep_location(g)
    dlt = delta_ep(g)
    t = np.asarray(t, dtype=float)
    amp = np.exp(-1j * ep.E_bar * t) * (1.0 - 4.0 * np.sqrt(1j * t * dlt / np.pi)
                                        + 2j * t * dlt)
    prob = 1.0 - 4.0 * np.sqrt(2.0 * t * dlt / np.pi) + 16.0 * t * dlt / np.pi
    return amp, prob


def ep2a_longtime(g: float, t):
    """Long-time law ``P_LT = g^4 / (4 pi (1 - sqrt(1 - g^2))^8 t^3)``."""
    t = np.asarray(t, dtype=float)
    c = math.sqrt(1.0 - g * g)
    return g ** 4 / (4.0 * np.pi * (1.0 - c) ** 8 * t ** 3)


def ep2b_pole(g: float, t):
    """Coalesced-pole contribution at the Model II EP, ``(A_P, P_P)``.

    ``A_P = [1 + t g^2 (1 + c) / (4 c^(3/2))] exp(-|E_bar| t)`` with
    ``c = sqrt(1 - g^2)``. Purely real, ``A_P(0) = 1``.
    """
    if not 0.0 < g < 1.0:
        raise ValidationError("g must lie in (0,1)")
    t = np.asarray(t, dtype=float)
    c = math.sqrt(1.0 - g * g)
    half_gamma = math.sqrt((2.0 - g * g) / c - 2.0)
    slope = g * g * (1.0 + c) / (4.0 * c ** 1.5)
    amp = (1.0 + slope * t) * np.exp(-half_gamma * t)
    prob = (1.0 + g * g * (1.0 + c) / (2.0 * c ** 1.5) * t
            + g ** 4 * (2.0 - g * g + 2.0 * c) / (16.0 * c ** 3) * t * t) * np.exp(-2.0 * half_gamma * t)
    return amp, prob


def ep2b_edge_coefficient(g: float, coefficient: str = "band_edge") -> float:
    """Coefficient ``a`` of ``a t^(-3/2) cos(2t + pi/4)`` in the EP2B long-time amplitude.

    ``band_edge``: ``(R(1) + R'(1)) / sqrt(pi)`` with ``R = N/D`` the
    Green's-function ratio at ``V = V_bar``, from the stationary-phase
    expansion at both band edges. ``printed``: the alternative
    ``(1/lam_bar - lam_bar)(-2 E_bar^3)/(4 - E_bar^2)/(2 sqrt(pi))``, kept for
    comparison; it has the right ``g^6`` scaling but not the right size.
    """
    ep = model_two.ep_locations_m2(g).ep2b
    if coefficient == "band_edge":
        num, den = model_two.green_coefficients(ModelTwoParams(g, ep.V_bar))
        P = np.polynomial.polynomial
        n1, d1 = P.polyval(1.0, num), P.polyval(1.0, den)
        dn, dd = P.polyval(1.0, P.polyder(num)), P.polyval(1.0, P.polyder(den))
        r = n1 / d1
        dr = (dn * d1 - n1 * dd) / d1 ** 2
        return float(np.real(r + dr)) / math.sqrt(math.pi)
    if coefficient == "printed":
        lb, eb = ep.lambda_bar, ep.E_bar
        val = (1.0 / lb - lb) * (-2.0 * eb ** 3) / (4.0 - eb ** 2) / (2.0 * math.sqrt(math.pi))
        return float(np.real(val))
    raise ValidationError("coefficient must be 'band_edge' or 'printed'")


def ep2b_longtime(g: float, t, coefficient: str = "band_edge"):
    """Long-time amplitude at the EP2B: edge term ``t^(-3/2) cos(2t + pi/4)`` plus ``A_P``."""
    t = np.asarray(t, dtype=float)
    a = ep2b_edge_coefficient(g, coefficient)
    with np.errstate(divide="ignore", invalid="ignore"):
        edge = a * t ** -1.5 * np.cos(2.0 * t + np.pi / 4.0)
    return edge + ep2b_pole(g, t)[0]


def timescales(p: Params) -> Timescales:
    """Zeno time, EP gap time and (Model II) band-edge times and decay rate."""
    if isinstance(p, ModelOneParams):
        if p.eps_d == 0:
            raise ValidationError("T_Z undefined for eps_d = 0")
        if p.g == 0:
            raise ValidationError("no exceptional point for g = 0")
        return Timescales(1.0 / abs(p.eps_d), 1.0 / delta_ep(p.g))
    if isinstance(p, ModelTwoParams):
        ep = model_two.ep_locations_m2(p.g).ep2b
        edges = (1.0 / abs(ep.E_bar + 2.0), 1.0 / abs(ep.E_bar - 2.0))
        return Timescales(1.0 / (math.sqrt(2.0) * p.V), max(edges), edges, ep.gamma_bar)
    raise ValidationError("params must be ModelOneParams or ModelTwoParams")


# ------------------------------------------------------------- dispatch

def survival_series(p: Params, times, method, n_sites: int | None = None,
                    tol: float = CONTOUR_TOL) -> SurvivalSeries:
    """Evaluate one method on a grid; closed forms use ``p.g`` at the relevant EP."""
    method = Method(method)
    t = _times(times)
    snap = _snapshot(p)
    nan = np.full(t.size, np.nan, dtype=complex)
    is_one = isinstance(p, ModelOneParams)
    if method is Method.CONTOUR:
        return amplitude_contour(p, t, tol)
    if method is Method.FINITE_CHAIN:
        n = n_sites if n_sites is not None else int(2 * (t[-1] if t.size else 0) + 2 * LIGHT_CONE_MARGIN)
        return amplitude_finite_chain(p, n, t)
    if method is Method.ZENO:
        return _series(t, nan, zeno(p, t), method, snap)
    if method in (Method.EP2A_POLE, Method.NEAR_THRESHOLD, Method.LONGTIME) and not is_one:
        raise ValidationError(f"{method.value} applies to Model I")
    if method in (Method.EP2B_POLE, Method.EP2B_LONGTIME) and is_one:
        raise ValidationError(f"{method.value} applies to Model II")
    if method is Method.EP2A_POLE:
        a = ep2a_pole(p.g, t)
        return _series(t, a, np.abs(a) ** 2, method, snap)
    if method is Method.NEAR_THRESHOLD:
        return _series(t, nan, ep2a_near_threshold(p.g, t)[1], method, snap)
    if method is Method.LONGTIME:
        with np.errstate(divide="ignore"):
            return _series(t, nan, ep2a_longtime(p.g, t), method, snap)
    if method is Method.EP2B_POLE:
        a = ep2b_pole(p.g, t)[0]
        return _series(t, a, np.abs(a) ** 2, method, snap)
    a = ep2b_longtime(p.g, t)
    return _series(t, a, np.abs(a) ** 2, method, snap)
