"""Single impurity coupled to a semi-infinite chain.

The impurity ``d`` with energy ``eps_d`` couples with strength ``g`` to the
first site of a uniform chain with hopping 1. Discrete states satisfy the
dispersion ``E = -lam - 1/lam`` together with the effective equation
``E = eps_d - g**2 lam``, i.e. the quadratic

    (1 - g**2) lam**2 + eps_d lam + 1 = 0.

Its linearization is the 2x2 generalized eigenproblem ``F Psi = lam G Psi``
with ``F = [[0, 1], [1, eps_d]]`` and ``G = diag(1, g**2 - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NearEP, ValidationError

EP_TOL = 1e-12
NEAR_EP_BAND = 1e-6
BETA_CAP = 1e4


class Classification(str, Enum):
    BOUND = "bound"
    VIRTUAL_BOUND = "virtual-bound"
    RESONANCE = "resonance"
    ANTI_RESONANCE = "anti-resonance"
    COALESCED = "coalesced"


@dataclass(frozen=True)
class ModelOneParams:
    """Coupling ``g`` and impurity energy ``eps_d``.

    ``g = 0`` is accepted as the decoupled limit; every spectral routine is
    meant for ``0 < g < 1``.
    """

    g: float
    eps_d: float

    def __post_init__(self):
        if not (math.isfinite(self.g) and math.isfinite(self.eps_d)):
            raise ValidationError("parameters must be finite")
        if not 0.0 <= self.g < 1.0:
            raise ValidationError("g must lie in (0,1)")


@dataclass(frozen=True)
class SpectralPoint:
    lam: complex
    energy: complex
    k: complex
    classification: Classification

    @property
    def dispersion_residual(self) -> float:
        return abs(self.energy + self.lam + 1.0 / self.lam)


@dataclass(frozen=True)
class ModelOneSpectrum:
    """The pair of discrete solutions ``(plus, minus)``.

    ``at_ep`` is set when ``eps_d`` is within ``EP_TOL`` of either EP, and
    ``near_ep`` inside the wider ``NEAR_EP_BAND``.
    """

    plus: SpectralPoint
    minus: SpectralPoint
    at_ep: bool
    near_ep: bool

    def __iter__(self):
        return iter((self.plus, self.minus))

    def __getitem__(self, i):
        return (self.plus, self.minus)[i]


@dataclass(frozen=True)
class EPLocation:
    eps_bar: float
    E_bar: float
    lambda_bar: float


@dataclass(frozen=True)
class GepSystem:
    """Matrix pair and biorthonormal eigen-data of ``F Psi = lam G Psi``.

    Columns of ``U`` are the right eigenvectors; rows of ``U_tilde`` are the
    left eigenvectors (transposes of the right ones).
    """

    F: np.ndarray
    G: np.ndarray
    lambdas: np.ndarray
    U: np.ndarray
    U_tilde: np.ndarray
    betas: np.ndarray

    @property
    def right(self):
        return [self.U[:, j] for j in range(self.U.shape[1])]

    @property
    def left(self):
        return [self.U_tilde[j, :] for j in range(self.U_tilde.shape[0])]


@dataclass(frozen=True)
class JordanData:
    lambda_bar: complex
    energy_bar: complex
    mu: complex
    psi_ep: np.ndarray
    phi_ep: np.ndarray
    R: np.ndarray
    R_tilde: np.ndarray
    F: np.ndarray
    G: np.ndarray


@dataclass(frozen=True)
class PuiseuxResult:
    lam_plus: complex
    lam_minus: complex
    norm2_plus: complex
    norm2_minus: complex


def lambda_roots(g: float, eps_d: complex) -> tuple[complex, complex]:
    """Exact ``(lam_plus, lam_minus)`` with the principal square root.

    ``eps_d`` may be complex (used by the encirclement module).
    """
    c2 = 1.0 - g * g
    root = np.sqrt(complex(eps_d) ** 2 - 4.0 * c2)
    return complex((-eps_d - root) / (2 * c2)), complex((-eps_d + root) / (2 * c2))


def ep_location(g: float, which: str = "lower") -> EPLocation:
    """Location of an exceptional point in parameter, energy and lambda space."""
    if not 0.0 <= g < 1.0:
        raise ValidationError("g must lie in (0,1)")
    c = math.sqrt(1.0 - g * g)
    if which == "lower":
        s = 1.0
    elif which == "upper":
        s = -1.0
    else:
        raise ValidationError("which must be 'lower' or 'upper'")
    return EPLocation(-s * 2.0 * c, -s * (2.0 - g * g) / c, s / c)


def distance_to_ep(p: ModelOneParams) -> float:
    c = math.sqrt(1.0 - p.g * p.g)
    return min(abs(p.eps_d + 2 * c), abs(p.eps_d - 2 * c))


def _classify_point(lam: complex, energy: complex, real: bool) -> Classification:
    if real:
        return Classification.BOUND if abs(lam) < 1.0 else Classification.VIRTUAL_BOUND
    return Classification.RESONANCE if energy.imag < 0 else Classification.ANTI_RESONANCE


def discrete_spectrum(p: ModelOneParams, ep_tol: float = EP_TOL) -> ModelOneSpectrum:
    """Both discrete solutions of the effective eigenvalue equation.

    Examples
    --------
    >>> s = discrete_spectrum(ModelOneParams(0.6, 0.0))
    >>> round(s.plus.energy.imag, 12), round(s.minus.energy.imag, 12)
    (0.45, -0.45)
    """
    g, eps = p.g, p.eps_d
    dist = distance_to_ep(p)
    at_ep = dist < ep_tol
    real = eps * eps - 4.0 * (1.0 - g * g) >= 0.0
    pts = []
    for lam in lambda_roots(g, eps):
        if real:
            lam = complex(lam.real, 0.0)
        energy = eps - g * g * lam
        if at_ep:
            cls = Classification.COALESCED
        else:
            cls = _classify_point(lam, energy, real)
        pts.append(SpectralPoint(lam, energy, complex(-1j * np.log(lam)), cls))
    return ModelOneSpectrum(pts[0], pts[1], at_ep, dist < NEAR_EP_BAND)


def classify(p: ModelOneParams, s: SpectralPoint) -> Classification:
    """Classification of one point of ``discrete_spectrum(p)``."""
    real = p.eps_d ** 2 - 4.0 * (1.0 - p.g ** 2) >= 0.0
    if distance_to_ep(p) < EP_TOL:
        return Classification.COALESCED
    return _classify_point(s.lam, s.energy, real)


def gep_matrices(g: float, eps_d: complex) -> tuple[np.ndarray, np.ndarray]:
    F = np.array([[0.0, 1.0], [1.0, eps_d]], dtype=complex)
    G = np.diag([1.0, g * g - 1.0]).astype(complex)
    return F, G


def build_gep(p: ModelOneParams, beta_cap: float = BETA_CAP) -> GepSystem:
    """Linearized eigenproblem with biorthonormal eigenvectors.

    Raises
    ------
    NearEP
        If a norm ``|beta|`` exceeds ``beta_cap`` (or ``p`` sits on an EP).
    """
    F, G = gep_matrices(p.g, p.eps_d)
    lams = np.array(lambda_roots(p.g, p.eps_d))
    c2 = 1.0 - p.g ** 2
    denom = 1.0 - c2 * lams ** 2
    if np.any(np.abs(denom) == 0.0):
        raise NearEP("eigenvector is self-orthogonal (exceptional point)")
    betas = 1.0 / np.sqrt(denom)
    if np.any(np.abs(betas) > beta_cap):
        raise NearEP(f"|beta| = {np.abs(betas).max():.3e} exceeds cap {beta_cap:.1e}")
    U = np.vstack([betas, betas * lams])
    return GepSystem(F, G, lams, U, U.T.copy(), betas)


def jordan_form(g: float, which: str = "lower") -> JordanData:
    """Jordan chain of the linearized problem exactly at an EP.

    ``mu = sqrt(2 / eps_bar)`` on the principal branch fixes the
    representative; ``R = [Psi_EP, Phi_EP]`` and ``R_tilde = R^-1 G^-1``
    bring ``F`` to ``[[lam_bar, 1], [0, lam_bar]]``.
    """
    ep = ep_location(g, which)
    F, G = gep_matrices(g, ep.eps_bar)
    eb = complex(ep.eps_bar)
    mu = np.sqrt(2.0 / eb)
    psi = np.array([mu, -2.0 * mu / eb])
    phi = np.array([1.0 / (2.0 * mu), 1.0 / (mu * eb)])
    R = np.column_stack([psi, phi])
    R_tilde = np.linalg.inv(R) @ np.linalg.inv(G)
    return JordanData(complex(ep.lambda_bar), complex(ep.E_bar), complex(mu), psi, phi, R, R_tilde, F, G)


PUISEUX_ORDERS = ("half", "one", "three_halves")


def puiseux(g: float, delta: float, order: str = "one") -> PuiseuxResult:
    """Fractional-power expansion about the lower EP, ``eps_d = eps_bar + delta``.

    The ``+`` branch is the one with ``Im lam > 0``, so it corresponds to
    ``discrete_spectrum(...).minus``. Norms are given to leading order,
    ``(1 +- i / sqrt(lam_bar delta)) / 2``.
    """
    if not delta > 0:
        raise ValidationError("delta must be positive")
    if order not in PUISEUX_ORDERS:
        raise ValidationError(f"order must be one of {PUISEUX_ORDERS}")
    lb = ep_location(g).lambda_bar
    q = math.sqrt(lb * delta)
    out = []
    for s in (1.0, -1.0):
        val = 1.0 + s * 1j * q
        if order in ("one", "three_halves"):
            val += -q * q / 2.0
        if order == "three_halves":
            val += -s * 1j * q ** 3 / 8.0
        out.append(lb * val)
    n_plus = 0.5 * (1.0 + 1j / q)
    n_minus = 0.5 * (1.0 - 1j / q)
    return PuiseuxResult(complex(out[0]), complex(out[1]), n_plus, n_minus)


def green_coefficients(p: ModelOneParams) -> tuple[np.ndarray, np.ndarray]:
    """Ascending coefficients ``(N, D)`` of the impurity Green's-function factor.

    With ``E = -lam - 1/lam`` the impurity Green's function is
    ``G_dd(E) = 1 / (E - eps_d + g**2 lam) = lam N(lam) / D(lam)``.
    """
    return (np.array([-1.0], dtype=complex),
            np.array([1.0, p.eps_d, 1.0 - p.g ** 2], dtype=complex))
