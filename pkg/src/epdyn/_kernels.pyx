# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled quadrature kernels.

Same interface as ``_kernels_py``; see that module for the definitions.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, cos, sin
from scipy.special.cython_special cimport j0 as _j0, j1 as _j1

cnp.import_array()

cdef double XGK[11]
cdef double WGK[11]
cdef double WG[5]

XGK[:] = [
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
    0.0,
]
WGK[:] = [
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
]
WG[:] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
]


def j0(x):
    cdef cnp.ndarray[double, ndim=1] xs = np.ascontiguousarray(np.atleast_1d(x), dtype=np.float64).ravel()
    cdef Py_ssize_t i, n = xs.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    for i in range(n):
        out[i] = _j0(xs[i])
    return out.reshape(np.shape(x)) if np.ndim(x) else out[0]


def j1(x):
    cdef cnp.ndarray[double, ndim=1] xs = np.ascontiguousarray(np.atleast_1d(x), dtype=np.float64).ravel()
    cdef Py_ssize_t i, n = xs.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    for i in range(n):
        out[i] = _j1(xs[i])
    return out.reshape(np.shape(x)) if np.ndim(x) else out[0]


cdef inline double complex _horner(const double complex* c, Py_ssize_t n,
                                   double complex z) noexcept nogil:
    cdef Py_ssize_t k
    cdef double zr = z.real, zi = z.imag, orr = 0.0, oi = 0.0, tmp
    for k in range(n - 1, -1, -1):
        tmp = orr * zr - oi * zi + c[k].real
        oi = orr * zi + oi * zr + c[k].imag
        orr = tmp
    return orr + 1j * oi


cdef inline double complex _cdiv(double complex a, double complex b) noexcept nogil:
    # plain quotient; operands here are O(1) so no scaling is needed
    cdef double d = b.real * b.real + b.imag * b.imag
    return ((a.real * b.real + a.imag * b.imag) + 1j * (a.imag * b.real - a.real * b.imag)) / d


cdef inline double complex _circle_f(const double complex* num, Py_ssize_t nn,
                                     const double complex* den, Py_ssize_t nd, double r, double rp, double rm, double t,
                                     double cp, double sp) noexcept nogil:
    # lam = r e^(i phi); lam + 1/lam = rp cos(phi) + i rm sin(phi)
    cdef double complex lam = r * cp + 1j * (r * sp)
    cdef double mag = exp(-t * rm * sp)
    cdef double ph = t * rp * cp
    cdef double lr = lam.real, li = lam.imag
    cdef double complex w = (1.0 - lr * lr + li * li) - 1j * (2.0 * lr * li)
    cdef double complex e = mag * cos(ph) + 1j * (mag * sin(ph))
    cdef double complex q = _cdiv(_horner(num, nn, lam), _horner(den, nd, lam))
    return w * e * q


def circle_panels(num, den, double r, double t, a, b):
    cdef double complex[::1] cn = np.ascontiguousarray(num, dtype=np.complex128)
    cdef double complex[::1] cd = np.ascontiguousarray(den, dtype=np.complex128)
    cdef double[::1] aa = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] bb = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = aa.shape[0], p, j
    vals = np.empty(n, dtype=np.complex128)
    errs = np.empty(n, dtype=np.float64)
    cdef double complex[::1] vv = vals
    cdef double[::1] ee = errs
    cdef double c, h, cc, sc, cd_, sd, rp = r + 1.0 / r, rm = r - 1.0 / r
    cdef double complex fc, f1, f2, resk, resg
    with nogil:
        for p in range(n):
            c = 0.5 * (aa[p] + bb[p])
            h = 0.5 * (bb[p] - aa[p])
            cc = cos(c)
            sc = sin(c)
            fc = _circle_f(&cn[0], cn.shape[0], &cd[0], cd.shape[0], r, rp, rm, t, cc, sc)
            resk = fc * WGK[10]
            resg = 0
            for j in range(10):
                # angle addition avoids two more sin/cos pairs per node pair
                cd_ = cos(h * XGK[j])
                sd = sin(h * XGK[j])
                f1 = _circle_f(&cn[0], cn.shape[0], &cd[0], cd.shape[0], r, rp, rm, t, cc * cd_ + sc * sd, sc * cd_ - cc * sd)
                f2 = _circle_f(&cn[0], cn.shape[0], &cd[0], cd.shape[0], r, rp, rm, t, cc * cd_ - sc * sd, sc * cd_ + cc * sd)
                resk = resk + WGK[j] * (f1 + f2)
                if j % 2 == 1:
                    resg = resg + WG[j // 2] * (f1 + f2)
            vv[p] = resk * h
            ee[p] = abs((resk - resg) * h)
    return vals, errs


cdef inline double complex _bessel_f(double complex en, double tau, double shift) noexcept nogil:
    cdef double kern
    cdef double complex z = 1j * en * (tau - shift)
    if tau == 0.0:
        kern = 1.0
    else:
        kern = _j1(2.0 * tau) / tau
    return exp(z.real) * (cos(z.imag) + 1j * sin(z.imag)) * kern


def bessel_time_panels(double complex en, a, b, double shift=0.0):
    cdef double[::1] aa = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] bb = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = aa.shape[0], p, j
    vals = np.empty(n, dtype=np.complex128)
    errs = np.empty(n, dtype=np.float64)
    cdef double complex[::1] vv = vals
    cdef double[::1] ee = errs
    cdef double c, h, dx
    cdef double complex f1, f2, resk, resg
    with nogil:
        for p in range(n):
            c = 0.5 * (aa[p] + bb[p])
            h = 0.5 * (bb[p] - aa[p])
            resk = _bessel_f(en, c, shift) * WGK[10]
            resg = 0
            for j in range(10):
                dx = h * XGK[j]
                f1 = _bessel_f(en, c - dx, shift)
                f2 = _bessel_f(en, c + dx, shift)
                resk = resk + WGK[j] * (f1 + f2)
                if j % 2 == 1:
                    resg = resg + WG[j // 2] * (f1 + f2)
            vv[p] = resk * h
            ee[p] = abs((resk - resg) * h)
    return vals, errs
