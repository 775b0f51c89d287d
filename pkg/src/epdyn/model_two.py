"""Two coupled impurities, one of them attached to a semi-infinite chain.

Site ``d_A`` couples to ``d_B`` with strength ``V``; ``d_B`` couples to the
chain with strength ``g``. Both impurity energies are zero. The discrete
energies are the roots of the biquadratic

    p(E) = (1 - g**2) E**4 + [g**4 + (g**2 - 2) V**2] E**2 + V**4,

and ``u = lam**2`` solves ``(1 - g**2) u**2 + (2 - g**2 - V**2) u + 1 = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import NearEP, ValidationError
from .model_one import Classification, SpectralPoint
from .numerics import quartic_roots

EP_TOL = 1e-12
REAL_TOL = 1e-13
BETA_CAP = 1e4


@dataclass(frozen=True)
class ModelTwoParams:
    g: float
    V: float

    def __post_init__(self):
        if not (math.isfinite(self.g) and math.isfinite(self.V)):
            raise ValidationError("parameters must be finite")
        if not 0.0 <= self.g < 1.0:
            raise ValidationError("g must lie in (0,1)")
        if not self.V > 0.0:
            raise ValidationError("V must be positive")


@dataclass(frozen=True)
class Ep2bData:
    V_bar: float
    E_bar: complex
    lambda_bar: complex
    gamma_bar: float


@dataclass(frozen=True)
class EpLocationsM2:
    ep2a: float
    ep2b: Ep2bData


@dataclass(frozen=True)
class ModelTwoSpectrum:
    points: tuple
    at_ep: bool
    discriminant: float

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class GepSystemM2:
    F: np.ndarray
    G: np.ndarray
    lambdas: np.ndarray
    U: np.ndarray
    U_tilde: np.ndarray
    dA2: np.ndarray


@dataclass(frozen=True)
class Ep2bExpansion:
    """Near-EP2B expansions keyed by ``(s, branch)`` with ``s, branch in {+1, -1}``."""

    lam: dict
    dA2: dict


def poly_coefficients(p: ModelTwoParams) -> tuple[float, float, float]:
    """``(c4, c2, c0)`` of the energy biquadratic."""
    g2, V2 = p.g ** 2, p.V ** 2
    return 1.0 - g2, g2 * g2 + (g2 - 2.0) * V2, V2 * V2


def inner_discriminant(g: float, V: float) -> float:
    """``g**4 + 2 (g**2 - 2) V**2 + V**4`` in factored form.

    The roots in ``V`` are ``1 -+ sqrt(1 - g**2)``; factoring keeps full
    relative accuracy next to them.
    """
    c = math.sqrt(1.0 - g * g)
    lo, hi = 1.0 - c, 1.0 + c
    return (V - lo) * (V + lo) * (V - hi) * (V + hi)


def lambda_roots(g: float, V: float) -> np.ndarray:
    """The four ``lam`` roots ``(+l1, -l1, +l2, -l2)``."""
    c2 = 1.0 - g * g
    b = V * V + g * g - 2.0
    root = np.sqrt(complex(inner_discriminant(g, V)))
    u1 = (b + root) / (2 * c2)
    u2 = (b - root) / (2 * c2)
    l1, l2 = np.sqrt(u1), np.sqrt(u2)
    return np.array([l1, -l1, l2, -l2], dtype=complex)


def ep_locations_m2(g: float) -> EpLocationsM2:
    """Both exceptional points in ``V`` and the EP2B data."""
    if not 0.0 < g < 1.0:
        raise ValidationError("g must lie in (0,1)")
    c = math.sqrt(1.0 - g * g)
    e_bar = 1j * math.sqrt((2.0 - g * g) / c - 2.0)
    lam_bar = 1j * (1.0 - g * g) ** -0.25
    return EpLocationsM2(1.0 + c, Ep2bData(1.0 - c, e_bar, lam_bar, 2.0 * abs(e_bar)))


def _classify(lam: complex, energy: complex) -> Classification:
    if abs(energy.imag) <= REAL_TOL * (1.0 + abs(energy)):
        return Classification.BOUND if abs(lam) < 1.0 else Classification.VIRTUAL_BOUND
    return Classification.RESONANCE if energy.imag < 0 else Classification.ANTI_RESONANCE


def quartic_spectrum(p: ModelTwoParams, ep_tol: float = EP_TOL) -> ModelTwoSpectrum:
    """All four discrete solutions, energies paired with ``lam`` through the dispersion.

    Energies come from the biquadratic, ``lam`` from its own quadratic in
    ``lam**2``; the pairing minimizes ``|E + lam + 1/lam|`` over all
    assignments.
    """
    energies = quartic_roots(*poly_coefficients(p))
    lams = lambda_roots(p.g, p.V)
    cost = np.abs(energies[:, None] + lams[None, :] + 1.0 / lams[None, :])
    rows, cols = linear_sum_assignment(cost)
    disc = inner_discriminant(p.g, p.V)
    at_ep = abs(disc) < ep_tol
    pts = []
    for i, j in zip(rows, cols):
        lam, e = complex(lams[j]), complex(energies[i])
        cls = Classification.COALESCED if at_ep else _classify(lam, e)
        pts.append(SpectralPoint(lam, e, complex(-1j * np.log(lam)), cls))
    return ModelTwoSpectrum(tuple(pts), at_ep, disc)


def gep_matrices(g: float, V: float) -> tuple[np.ndarray, np.ndarray]:
    F = np.array([[0, 0, 1, 0],
                  [0, 0, 0, 1],
                  [1, 0, 0, -V],
                  [0, 1, -V, 0]], dtype=complex)
    G = np.diag([1.0, 1.0, -1.0, g * g - 1.0]).astype(complex)
    return F, G


def dA_component_sq(g: float, V: float, lam) -> np.ndarray:
    """Squared ``d_A`` component of the normalized right eigenvector."""
    lam = np.asarray(lam, dtype=complex)
    l2 = lam * lam
    den = (1.0 + (1.0 + g * g + V * V) * l2 - (1.0 - 2.0 * g * g + V * V) * l2 ** 2
           - (1.0 - g * g) * l2 ** 3)
    with np.errstate(divide="ignore", invalid="ignore"):
        return V * V * l2 / den


def build_gep_m2(p: ModelTwoParams, beta_cap: float = BETA_CAP) -> GepSystemM2:
    """4x4 linearized problem with ``Psi = [a, b, lam a, lam b]``.

    Normalization uses ``Psi^T G Psi = 1``; left eigenvectors are transposes.
    """
    F, G = gep_matrices(p.g, p.V)
    lams = lambda_roots(p.g, p.V)
    a2 = dA_component_sq(p.g, p.V, lams)
    if np.any(~np.isfinite(a2)) or np.any(np.abs(a2) > beta_cap ** 2):
        raise NearEP("d_A normalization diverges close to an exceptional point")
    a = np.sqrt(a2)
    b = a * (1.0 + lams ** 2) / (p.V * lams)
    U = np.vstack([a, b, lams * a, lams * b])
    return GepSystemM2(F, G, lams, U, U.T.copy(), a2)


def green_coefficients(p: ModelTwoParams) -> tuple[np.ndarray, np.ndarray]:
    """Ascending ``(N, D)`` with ``G_AA(E) = lam N(lam) / D(lam)``."""
    c2 = 1.0 - p.g ** 2
    return (np.array([-1.0, 0.0, -c2], dtype=complex),
            np.array([1.0, 0.0, 2.0 - p.g ** 2 - p.V ** 2, 0.0, c2], dtype=complex))


def near_ep2b_expansion(g: float, delta: float) -> Ep2bExpansion:
    """Expansion about the EP2B in ``V = V_bar_B + delta``.

    ``lam_{s,pm} = s lam_bar (1 -+ A d^(1/2) + B d +- C d^(3/2))`` with remainder
    ``O(d^2)``, and ``<d_A|psi_{s,pm}>^2 = (1 -+ S / sqrt(2 d) -+ K d^(1/2)) / 4``
    with remainder ``O(d^(3/2))`` (its ``d`` term vanishes identically).
    """
    if not delta > 0:
        raise ValidationError("delta must be positive")
    if not 0.0 < g < 1.0:
        raise ValidationError("g must lie in (0,1)")
    c = math.sqrt(1.0 - g * g)
    lam_bar = ep_locations_m2(g).ep2b.lambda_bar
    A = np.sqrt(complex((1.0 - 1.0 / c) / 2.0))
    B = (1.0 - 1.0 / c) / 4.0
    S = np.sqrt(complex(1.0 - g * g - c))
    C = 1.0 / (4.0 * math.sqrt(2.0) * S)
    K = math.sqrt(2.0) * (3.0 - c - c * c) / (8.0 * S)
    x = math.sqrt(delta)
    lam, dA2 = {}, {}
    for br in (1, -1):
        core = 1.0 - br * A * x + B * delta + br * C * x ** 3
        for s in (1, -1):
            lam[(s, br)] = complex(s * lam_bar * core)
        dA2[br] = complex(0.25 * (1.0 - br * S / math.sqrt(2.0 * delta) - br * K * x))
    return Ep2bExpansion(lam, dA2)
