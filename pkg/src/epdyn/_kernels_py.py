"""Vectorized numpy implementation of the hot quadrature kernels.

This module mirrors ``_kernels.pyx`` function for function and is used when
the compiled extension is unavailable (or when ``EPDYN_PURE_PYTHON=1``).
"""

import numpy as np
from scipy import special

# 21-point Gauss-Kronrod rule on [-1, 1] (abscissae in decreasing order,
# the centre last). Gauss weights belong to the odd-indexed abscissae.
XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208980223214,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# Full 21-node layout on [-1, 1].
NODES = np.concatenate([-XGK[:-1], XGK[::-1]])
WK = np.concatenate([WGK[:-1], WGK[::-1]])
WGAUSS = np.zeros(21)
WGAUSS[1:10:2] = WG
WGAUSS[11:20:2] = WG[::-1]


def j0(x):
    return special.j0(x)


def j1(x):
    return special.j1(x)


def _gk_apply(fvals, half):
    k = fvals @ WK * half
    g = fvals @ WGAUSS * half
    return k, np.abs(k - g)


def _panel_points(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    return c[:, None] + h[:, None] * NODES[None, :], h


def _horner(coefs, z):
    out = np.zeros_like(z)
    for c in coefs[::-1]:
        out = out * z + c
    return out


def circle_panels(num, den, r, t, a, b):
    """GK21 on panels [a_k, b_k] of the angle integrand on |lambda| = r.

    The integrand is ``(1 - lam**2) * exp(i t (lam + 1/lam)) * N(lam) / D(lam)``
    with ``lam = r exp(i phi)``; ``num`` and ``den`` are ascending
    coefficient arrays.
    """
    num = np.asarray(num, dtype=complex)
    den = np.asarray(den, dtype=complex)
    phi, half = _panel_points(a, b)
    lam = r * np.exp(1j * phi)
    f = (1.0 - lam * lam) * np.exp(1j * t * (lam + 1.0 / lam))
    f = f * _horner(num, lam) / _horner(den, lam)
    return _gk_apply(f, half)


def bessel_time_panels(en, a, b, shift=0.0):
    """GK21 on panels of ``exp(i en (tau - shift)) J1(2 tau) / tau``."""
    tau, half = _panel_points(a, b)
    with np.errstate(invalid="ignore", divide="ignore"):
        kern = np.where(tau == 0.0, 1.0, special.j1(2.0 * tau) / tau)
    f = np.exp(1j * en * (tau - shift)) * kern
    return _gk_apply(f, half)
