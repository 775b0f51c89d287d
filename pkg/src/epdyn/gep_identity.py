"""Resolvent of the effective Hamiltonian from the linearized eigenproblem.

For Model I the impurity Green's function ``(E - H_eff(E))^-1`` with
``H_eff(E) = eps_d - g^2 lam(E)`` equals

    -lam [1 0] (F - lam G)^-1 [0 1]^T,   (F - lam G)^-1 = U (Lambda - lam)^-1 U~,

where ``lam`` is the root of ``lam^2 + E lam + 1 = 0`` inside the unit disc
(the physical sheet). This module evaluates both sides independently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BranchAmbiguity, ValidationError
from .model_one import ModelOneParams, build_gep

BRANCH_TOL = 1e-12
POLE_TOL = 1e-14


@dataclass(frozen=True)
class ResolventSample:
    E: complex
    lam: complex
    lhs: complex
    rhs: complex

    @property
    def abs_diff(self) -> float:
        return abs(self.lhs - self.rhs)


def physical_lambda(E: complex, tol: float = BRANCH_TOL) -> complex:
    """Root of ``lam^2 + E lam + 1 = 0`` with ``|lam| < 1``.

    The two roots have product 1; on the cut ``E in [-2, 2]`` both lie on the
    unit circle and the choice is ambiguous.
    """
    E = complex(E)
    root = np.sqrt(E * E - 4.0)
    a, b = (-E + root) / 2.0, (-E - root) / 2.0
    lam = a if abs(a) < abs(b) else b
    if abs(abs(lam) - 1.0) < tol:
        raise BranchAmbiguity(f"E = {E} lies on the branch cut; |lam| = 1")
    return complex(lam)


def green_direct(p: ModelOneParams, E: complex) -> complex:
    """``1 / (E - eps_d + g^2 lam(E))`` on the physical sheet."""
    lam = physical_lambda(E)
    den = complex(E) - p.eps_d + p.g ** 2 * lam
    if abs(den) < POLE_TOL:
        raise ValidationError("E is a discrete eigenvalue")
    return 1.0 / den


def green_from_eigs(p: ModelOneParams, lam: complex) -> complex:
    """``-lam [1 0] U (Lambda - lam)^-1 U~ [0 1]^T`` for any ``lam`` off the spectrum."""
    gep = build_gep(p)
    lam = complex(lam)
    gaps = gep.lambdas - lam
    if np.any(np.abs(gaps) < POLE_TOL):
        raise ValidationError("lam coincides with an eigenvalue")
    total = np.sum(gep.U[0, :] * gep.U_tilde[:, 1] / gaps)
    return complex(-lam * total)


def green_from_inverse(p: ModelOneParams, lam: complex) -> complex:
    """``-lam [1 0] (F - lam G)^-1 [0 1]^T`` by a direct linear solve."""
    gep = build_gep(p)
    x = np.linalg.solve(gep.F - complex(lam) * gep.G, np.array([0.0, 1.0], dtype=complex))
    return complex(-lam * x[0])


def resolvent_identity_check(p: ModelOneParams, E: complex) -> ResolventSample:
    """Both sides of the resolvent decomposition at energy ``E``."""
    lam = physical_lambda(E)
    return ResolventSample(complex(E), lam, green_direct(p, E), green_from_eigs(p, lam))


def contour_integrands(p: ModelOneParams, lam) -> tuple[np.ndarray, np.ndarray]:
    """Amplitude integrands on ``lam`` points: pole-sum form and Green's-function form.

    Both omit the common factor ``(1/lam - lam) exp(i t (lam + 1/lam)) / lam``;
    the first is ``-lam sum_j U_0j U~_j1 / (lam_j - lam)``, the second
    ``lam N(lam) / D(lam)``.
    """
    lam = np.asarray(lam, dtype=complex)
    gep = build_gep(p)
    coef = gep.U[0, :] * gep.U_tilde[:, 1]
    pole_sum = -lam * np.sum(coef[None, :] / (gep.lambdas[None, :] - lam[:, None]), axis=1)
    direct = -lam / (1.0 + p.eps_d * lam + (1.0 - p.g ** 2) * lam ** 2)
    return pole_sum, direct
