# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled exponential-sum kernel behind the finite-interval Fourier transform."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

cdef Py_ssize_t RESEED = 32


def exp_sums(double c0, double dc, double complex[:, ::1] coeffs, double[::1] x):
    """out[i, k] = sum_g coeffs[g, k] * exp(-1j * x[i] * (c0 + g * dc))."""
    cdef Py_ssize_t nx = x.shape[0]
    cdef Py_ssize_t ng = coeffs.shape[0]
    cdef Py_ssize_t nk = coeffs.shape[1]
    out_arr = np.zeros((nx, nk), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef Py_ssize_t i, g, k
    cdef double xi, zr, zi, wr, wi, tr, ar, ai, phase
    cdef double accr[16]
    cdef double acci[16]
    if nk > 16:
        raise ValueError("at most 16 coefficient columns are supported")
    for i in range(nx):
        xi = x[i]
        wr = cos(xi * dc)
        wi = -sin(xi * dc)
        for k in range(nk):
            accr[k] = 0.0
            acci[k] = 0.0
        for g in range(ng):
            if g % RESEED == 0:
                phase = xi * (c0 + g * dc)
                zr = cos(phase)
                zi = -sin(phase)
            for k in range(nk):
                ar = coeffs[g, k].real
                ai = coeffs[g, k].imag
                accr[k] += ar * zr - ai * zi
                acci[k] += ar * zi + ai * zr
            tr = zr * wr - zi * wi
            zi = zr * wi + zi * wr
            zr = tr
        for k in range(nk):
            out[i, k] = accr[k] + 1j * acci[k]
    return out_arr
