import math

import mpmath
import numpy as np
import pytest

from opint.fourier import INV_SQRT_2PI, BoundaryTail, asymptotic_transform, filon_moments, filon_transform
from opint.kernels import available_backends

ELL = math.pi


def sine_transform(n, x, ell=ELL):
    """Closed form of the transform of sqrt(2/ell) sin(n pi t / ell)."""
    k = n * math.pi / ell
    x = np.asarray(x, dtype=float)
    return INV_SQRT_2PI * math.sqrt(2 / ell) * k * (1 - (-1) ** n * np.exp(-1j * x * ell)) / (k**2 - x**2)


@pytest.mark.parametrize("theta", [0.0, 0.3, 1.999, 2.0, 2.001, 7.5, -40.0])
def test_moments_against_quadrature(theta):
    m = filon_moments(theta)[0]
    for k in range(5):
        ref = complex(mpmath.quad(lambda s: s**k * mpmath.exp(-1j * theta * s), [-1, 0, 1]))
        assert m[k] == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("backend", available_backends())
@pytest.mark.parametrize("n", [1, 2, 5])
def test_sine_transform_closed_form(backend, n):
    M = 512
    t = np.linspace(0, ELL, M + 1)
    y = math.sqrt(2 / ELL) * np.sin(n * t)
    x = np.array([-30.3, -5.3, 0.0, 0.7, 12.0, 63.1])
    got = filon_transform(y, ELL, x, backend=backend)
    assert np.abs(got - sine_transform(n, x)).max() < 1e-9


def test_filon_is_exact_for_quartics():
    t = np.linspace(0, 1.0, 9)
    y = t**4 - 2 * t
    x = np.array([0.0, 3.0, 250.0])
    exact = [INV_SQRT_2PI * complex(mpmath.quad(lambda s: (s**4 - 2 * s) * mpmath.exp(-1j * xi * s), [0, 1]))
             for xi in x]
    assert np.abs(filon_transform(y, 1.0, x) - exact).max() < 1e-13


def test_panel_count_must_be_multiple_of_four():
    with pytest.raises(ValueError):
        filon_transform(np.zeros(7), 1.0, [0.0])


def test_asymptotic_expansion_matches_at_large_x():
    x = np.array([200.0, 400.0])
    t = np.linspace(0, ELL, 2049)
    y = math.sqrt(2 / ELL) * np.sin(t)
    d0 = math.sqrt(2 / ELL) * np.array([0.0, 1.0, 0.0, -1.0])
    dl = math.sqrt(2 / ELL) * np.array([0.0, -1.0, 0.0, 1.0])
    approx = asymptotic_transform(d0, dl, ELL, x)
    assert np.abs(approx - filon_transform(y, ELL, x)).max() < 1e-10


@pytest.mark.parametrize("power,absolute", [(0, False), (2, False), (1, True), (1, False)])
def test_boundary_tail_against_quadrature(power, absolute):
    amp = math.sqrt(2 / ELL)
    n = 2
    d0 = amp * np.array([0.0, n, 0.0, -(n**3), 0.0, n**5])
    dl = d0.copy()  # psi_2 is odd about the midpoint, even derivatives vanish
    tail = BoundaryTail(d0, dl, ELL)
    T, X = 40.0, 4e4
    s, w = np.polynomial.legendre.leggauss(12)
    edges = np.arange(T, X + 0.125, 0.25)
    mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * np.diff(edges)
    nodes, weights = (mid[:, None] + half[:, None] * s).ravel(), (half[:, None] * w).ravel()
    for side in (1, -1):
        x = side * nodes
        g = np.abs(sine_transform(n, x)) ** 2 * (np.abs(x) ** power if absolute else x**power)
        ref = float(np.sum(g * weights))
        remainder = 4 * amp**2 * n**2 * INV_SQRT_2PI**2 * X ** (power - 3) / (3 - power)
        assert tail.tail(power, absolute, T, side) == pytest.approx(ref, abs=remainder + 1e-12)


def test_boundary_tail_divergent_returns_none():
    tail = BoundaryTail([1.0, 0.0], [0.0, 0.0], 1.0)
    assert tail.tail(1, True, 10.0, 1) is None
    assert tail.decay_exponent() == 2


def test_boundary_tail_drops_rounding_residue():
    tail = BoundaryTail([1e-17, 2.0], [0.0, 2.0], ELL, tol=1e-12)
    assert tail.leading_index() == 1
    assert tail.decay_exponent() == 4
