"""Finite-interval Fourier transform and analytic tails of momentum densities.

``Fphi(x) = (2 pi)^(-1/2) * int_0^ell exp(-i x t) phi(t) dt`` is evaluated by a
Filon-type rule: on each group of four grid panels ``phi`` is replaced by its
quartic interpolant and the oscillatory factor is integrated exactly.  The
error is set by the interpolation error alone, uniformly in ``x``.

Beyond a cutoff the transform is replaced by its large-``|x|`` expansion from
endpoint derivatives, and integrals of ``x**p |Fphi|**2`` over the tails are
summed term by term with generalized exponential integrals.
"""
import math
from functools import lru_cache

import mpmath
import numpy as np

from opint.kernels import exp_sums
from opint.measures import TailModel

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
GROUP = 4  # panels per Filon group
_NODES = np.linspace(-1.0, 1.0, GROUP + 1)
_VANDER_INV = np.linalg.inv(np.vander(_NODES, GROUP + 1, increasing=True))
_SERIES_CUTOFF = 2.0
_SERIES_TERMS = 40


def filon_moments(theta, kmax=GROUP):
    """``m_k(theta) = int_{-1}^{1} s**k exp(-i theta s) ds`` for ``k = 0..kmax``.

    Returns an array of shape ``(theta.size, kmax + 1)``.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    out = np.empty((theta.size, kmax + 1), dtype=complex)
    small = np.abs(theta) < _SERIES_CUTOFF
    if small.any():
        t = theta[small]
        j = np.arange(_SERIES_TERMS)
        fact = np.cumprod(np.concatenate(([1.0], np.arange(1, _SERIES_TERMS))))
        powers = (-1j * t[:, None]) ** j / fact
        for k in range(kmax + 1):
            w = (1 + (-1.0) ** (k + j)) / (k + j + 1)
            out[small, k] = powers @ w
    big = ~small
    if big.any():
        t = theta[big]
        em, ep = np.exp(-1j * t), np.exp(1j * t)
        m = 2.0 * np.sin(t) / t + 0j
        out[big, 0] = m
        for k in range(1, kmax + 1):
            m = (em - (-1) ** k * ep) / (-1j * t) + (k / (1j * t)) * m
            out[big, k] = m
    return out


def filon_transform(samples, ell, x, backend=None):
    """Fourier transform of grid samples ``phi(j * ell / M)``, ``j = 0..M``.

    ``M`` must be a positive multiple of 4.
    """
    y = np.asarray(samples, dtype=complex)
    M = y.size - 1
    if M < GROUP or M % GROUP:
        raise ValueError("number of grid panels must be a positive multiple of 4")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h = ell / M
    H = GROUP * h / 2.0
    groups = M // GROUP
    idx = GROUP * np.arange(groups)[:, None] + np.arange(GROUP + 1)
    coeffs = y[idx] @ _VANDER_INV.T
    sums = exp_sums(H, 2.0 * H, coeffs, x, backend=backend)
    return INV_SQRT_2PI * H * np.einsum("ik,ik->i", filon_moments(x * H), sums)


def asymptotic_transform(d0, dl, ell, x):
    """Large-``|x|`` expansion built from endpoint derivatives ``d0[k], dl[k]``."""
    x = np.asarray(x, dtype=float)
    total = np.zeros(x.shape, dtype=complex)
    phase = np.exp(-1j * x * ell)
    for k, (a, b) in enumerate(zip(d0, dl)):
        total += (a - b * phase) / (1j * x) ** (k + 1)
    return INV_SQRT_2PI * total


@lru_cache(maxsize=65536)
def _osc_tail(q, omega_T, T):
    """``int_T^inf y**(-q) exp(i omega y) dy`` with ``omega_T = omega * T``."""
    if omega_T == 0.0:
        if q <= 1:
            return None
        return complex(T ** (1 - q) / (q - 1))
    if q <= 0:
        return None
    return complex(T ** (1 - q) * mpmath.expint(q, -1j * omega_T))


class BoundaryTail(TailModel):
    """Tail of ``x**p |Fphi(x)|**2`` from the endpoint derivative expansion."""

    def __init__(self, d0, dl, ell, tol=0.0):
        self.d0 = np.asarray(d0, dtype=complex)
        self.dl = np.asarray(dl, dtype=complex)
        self.ell = float(ell)
        scale = max(1.0, float(np.abs(np.concatenate([self.d0, self.dl])).max(initial=0.0)))
        self.zero = tol * scale
        self.d0[np.abs(self.d0) <= self.zero] = 0.0
        self.dl[np.abs(self.dl) <= self.zero] = 0.0

    @property
    def order(self):
        return self.d0.size

    def leading_index(self):
        """First derivative order with a nonzero endpoint value (``None`` if all vanish)."""
        nz = (np.abs(self.d0) > self.zero) | (np.abs(self.dl) > self.zero)
        return int(np.argmax(nz)) if nz.any() else None

    def decay_exponent(self):
        """``p`` with ``|Fphi(x)|**2 ~ |x|**(-p)``; ``None`` when the expansion is empty."""
        k = self.leading_index()
        return None if k is None else 2 * k + 2

    def tail(self, power, absolute, T, side):
        sigma = 1 if side > 0 else -1
        sign = 1 if absolute or power % 2 == 0 else sigma
        ell = self.ell
        total = 0j
        K = self.order
        for j in range(K):
            cj = np.conj((1j * sigma) ** (-(j + 1)))
            for k in range(K):
                ck = (1j * sigma) ** (-(k + 1))
                A = np.conj(self.d0[j]) * self.d0[k] + np.conj(self.dl[j]) * self.dl[k]
                B = -np.conj(self.d0[j]) * self.dl[k]
                C = -np.conj(self.dl[j]) * self.d0[k]
                q = j + k + 2 - power
                pref = cj * ck
                for coef, omega in ((A, 0.0), (B, -sigma * ell), (C, sigma * ell)):
                    if coef == 0:
                        continue
                    val = _osc_tail(q, float(omega * T), float(T))
                    if val is None:
                        return None
                    total += pref * coef * val
        value = sign * INV_SQRT_2PI**2 * total
        return float(value.real)
