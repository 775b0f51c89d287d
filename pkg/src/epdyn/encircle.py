"""Quasi-static parametric encirclement of the lower Model I exceptional point.

With ``xi = -eps_d / (2 (1 - g^2))`` the two roots are
``lam_pm = xi -+ sqrt(xi^2 - lam_bar^2)``, so the exceptional points sit at
``xi = +-lam_bar``. Writing ``lam_- = i lam_bar tan(theta)`` gives the
normalized eigenvectors

    Psi_-(theta) = [cos theta,  i lam_bar sin theta]
    Psi_+(theta) = [sin theta, -i lam_bar cos theta]

and one loop around ``xi = lam_bar`` shifts ``theta`` by ``pi/2``: ``+pi/2``
for a counterclockwise loop, ``-pi/2`` for a clockwise one. Orientation
follows the sense of the ``theta`` shift; a loop ``xi = lam_bar + chi e^(i delta)``
with ``delta`` increasing from 0 to ``2 pi`` is the clockwise one.

Nothing here evolves a state in time; parameters are varied quasi-statically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import StepTooCoarse, ValidationError
from .model_one import gep_matrices

DIRECTIONS = ("ccw", "cw")
MIN_STEPS = 16
MATCH_TOL = 1e-12


def _check_g(g: float) -> None:
    if not 0.0 < g < 1.0:
        raise ValidationError("g must lie in (0,1)")


def _check_direction(direction: str) -> int:
    if direction not in DIRECTIONS:
        raise ValidationError(f"direction must be one of {DIRECTIONS}")
    return 1 if direction == "ccw" else -1


def lambda_bar(g: float) -> float:
    return 1.0 / math.sqrt(1.0 - g * g)


@dataclass(frozen=True)
class ThetaState:
    """Eigenpair data at angle ``theta``.

    The eigenvalues are stored as projective pairs ``(x, y)`` with
    ``lam = y / x`` so ``theta = pi/2`` needs no special casing.
    """

    theta: float
    lambda_bar: float
    psi_minus: np.ndarray
    psi_plus: np.ndarray

    @property
    def lambda_minus(self) -> complex:
        x, y = self.psi_minus
        return complex(y / x) if x != 0 else complex(np.inf)

    @property
    def lambda_plus(self) -> complex:
        x, y = self.psi_plus
        return complex(y / x) if x != 0 else complex(np.inf)

    @property
    def eps_d(self) -> complex:
        """Impurity energy at which these are the eigenpairs, ``2 i c cot(2 theta)``."""
        c = 1.0 / self.lambda_bar
        s2 = math.sin(2.0 * self.theta)
        if s2 == 0.0:
            return complex(np.inf)
        return complex(2j * c * math.cos(2.0 * self.theta) / s2)


def theta_eigvecs(g: float, theta: float) -> ThetaState:
    _check_g(g)
    lb = lambda_bar(g)
    c, s = math.cos(theta), math.sin(theta)
    return ThetaState(float(theta), lb,
                      np.array([c, 1j * lb * s]), np.array([s, -1j * lb * c]))


def gep_residual(g: float, state: ThetaState) -> float:
    """Largest ``|(F - lam G) Psi|`` over both eigenpairs at the matching ``eps_d``."""
    F, G = gep_matrices(g, state.eps_d)
    worst = 0.0
    for psi in (state.psi_minus, state.psi_plus):
        # projective form of (F - lam G) psi with lam = y / x
        x, y = psi
        r = F @ psi * x - G @ psi * y
        worst = max(worst, float(np.max(np.abs(r))))
    return worst


def _identify(vec: np.ndarray, ref: ThetaState) -> tuple[int, str]:
    for label, base in (("+", ref.psi_plus), ("-", ref.psi_minus)):
        for sign in (1, -1):
            if np.max(np.abs(vec - sign * base)) < MATCH_TOL * max(1.0, ref.lambda_bar):
                return sign, label
    raise ValidationError("vector is not +-Psi_+ or +-Psi_- at the reference angle")


@dataclass(frozen=True)
class ExchangeReport:
    """Images of the two eigenvectors after the loops, as ``(sign, label)`` pairs."""

    direction: str
    loops: int
    plus_to: tuple
    minus_to: tuple

    @property
    def is_identity(self) -> bool:
        return self.plus_to == (1, "+") and self.minus_to == (1, "-")

    def describe(self) -> str:
        if self.is_identity:
            return "identity restored"
        sub = {"+": "\u208a", "-": "\u208b"}
        fmt = lambda sl: ("\u2212" if sl[0] < 0 else "") + "\u03a8" + sub[sl[1]]
        parts = [f"\u03a8\u208b \u2192 {fmt(self.minus_to)}", f"\u03a8\u208a \u2192 {fmt(self.plus_to)}"]
        return ("swap: " if self.minus_to[1] == "+" else "sign flip: ") + ", ".join(parts)


def _after_loops(g: float, direction: str, loops: int, theta0: float) -> ExchangeReport:
    sense = _check_direction(direction)
    ref = theta_eigvecs(g, theta0)
    moved = theta_eigvecs(g, theta0 + sense * loops * math.pi / 2.0)
    return ExchangeReport(direction, loops, _identify(moved.psi_plus, ref),
                          _identify(moved.psi_minus, ref))


def encircle_once(g: float, direction: str, theta0: float = 0.0) -> ExchangeReport:
    """One loop: ccw maps ``Psi_- -> -Psi_+``, ``Psi_+ -> Psi_-``; cw the mirror image."""
    return _after_loops(g, direction, 1, theta0)


def revolution_cycle(g: float, direction: str, n_loops: int,
                     theta0: float = 0.0) -> list:
    """The orbit of ``(Psi_+, Psi_-)`` after 1, 2, ..., ``n_loops`` loops.

    Each entry is ``((sign, label), (sign, label))``: the current content of
    the slot that started as ``Psi_+`` and of the one that started as ``Psi_-``.
    """
    if int(n_loops) != n_loops or n_loops < 1:
        raise ValidationError("n_loops must be a positive integer")
    out = []
    for k in range(1, int(n_loops) + 1):
        r = _after_loops(g, direction, k, theta0)
        out.append((r.plus_to, r.minus_to))
    return out


# ------------------------------------------------------------- lambda loop

@dataclass(frozen=True)
class LoopSpec:
    """Circle ``xi = center + radius e^(i delta)`` in the ``xi`` plane."""

    center: float
    radius: float
    direction: str
    steps: int

    def __post_init__(self):
        _check_direction(self.direction)
        if not (math.isfinite(self.center) and math.isfinite(self.radius)) or self.radius <= 0:
            raise ValidationError("radius must be positive and finite")
        if int(self.steps) != self.steps or self.steps < MIN_STEPS:
            raise ValidationError(f"steps must be an integer >= {MIN_STEPS}")

    @classmethod
    def around_ep(cls, g: float, chi_ratio: float, direction: str = "ccw",
                  steps: int = 256) -> "LoopSpec":
        """Loop centred on the lower EP; requires ``0 < chi_ratio < 1``."""
        _check_g(g)
        if not 0.0 < chi_ratio < 1.0:
            raise ValidationError("chi_ratio must lie in (0,1) for a loop centred on the EP")
        lb = lambda_bar(g)
        return cls(lb, chi_ratio * lb, direction, steps)

    @classmethod
    def around_both(cls, g: float, chi_ratio: float, direction: str = "ccw",
                    steps: int = 256) -> "LoopSpec":
        """Loop centred on ``xi = 0``; encloses both EPs when ``chi_ratio > 1``."""
        _check_g(g)
        if not chi_ratio > 0.0:
            raise ValidationError("chi_ratio must be positive")
        lb = lambda_bar(g)
        return cls(0.0, chi_ratio * lb, direction, steps)


@dataclass(frozen=True)
class LoopTrace:
    delta: np.ndarray
    xi: np.ndarray
    eps_d: np.ndarray
    branch_a: np.ndarray
    branch_b: np.ndarray
    theta_shift: float
    enclosed: int

    @property
    def swapped(self) -> bool:
        a0, a1, b0 = self.branch_a[0], self.branch_a[-1], self.branch_b[0]
        return bool(abs(a1 - b0) < abs(a1 - a0))


def trace_lambda_loop(g: float, loop: LoopSpec) -> LoopTrace:
    """Follow both roots around the loop by nearest-neighbour continuation.

    ``branch_a`` starts on ``lam_-``. ``theta_shift`` is the accumulated change
    of ``theta`` along ``branch_a`` (``+-pi/2`` when exactly one EP is enclosed).
    Raises :class:`StepTooCoarse` when a step cannot tell the branches apart.
    """
    _check_g(g)
    lb = lambda_bar(g)
    c2 = 1.0 - g * g
    for ep in (lb, -lb):
        if abs(abs(ep - loop.center) - loop.radius) < 1e-9 * lb:
            raise ValidationError("loop passes through an exceptional point")
    sense = -1.0 if loop.direction == "ccw" else 1.0
    delta = sense * np.linspace(0.0, 2.0 * np.pi, int(loop.steps) + 1)
    xi = loop.center + loop.radius * np.exp(1j * delta)
    root = np.sqrt(xi * xi - lb * lb)
    cand = np.stack([xi + root, xi - root], axis=1)
    a = np.empty(xi.size, dtype=complex)
    b = np.empty(xi.size, dtype=complex)
    a[0], b[0] = cand[0]
    for k in range(1, xi.size):
        c0, c1 = cand[k]
        gap = abs(c0 - c1)
        d_same = abs(c0 - a[k - 1]) + abs(c1 - b[k - 1])
        d_swap = abs(c1 - a[k - 1]) + abs(c0 - b[k - 1])
        if abs(d_same - d_swap) < 0.5 * gap * 1e-3 or min(d_same, d_swap) > 0.5 * gap:
            raise StepTooCoarse(f"ambiguous continuation at step {k}; increase steps")
        if d_same <= d_swap:
            a[k], b[k] = c0, c1
        else:
            a[k], b[k] = c1, c0
    w = a / lb
    phase = np.unwrap(np.angle((1.0 + w) / (1.0 - w)))
    shift = 0.5 * float(phase[-1] - phase[0])
    enclosed = sum(abs(ep - loop.center) < loop.radius for ep in (lb, -lb))
    return LoopTrace(delta, xi, -2.0 * c2 * xi, a, b, shift, int(enclosed))
