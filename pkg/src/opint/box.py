"""Momentum of a particle confined to ``[0, ell]``.

States live on a uniform grid ``t_j = j * ell / M`` together with their
endpoint derivatives.  The momentum POVM is the pull-back of the momentum
spectral measure on the line, so its densities are ``|Fphi(x)|**2`` with
``F`` the finite-interval Fourier transform from :mod:`opint.fourier`.

Two discretizations of ``-i d/dx`` are offered: central finite differences
(with either zero boundary data or free one-sided boundary rows) and a
Galerkin projection between the sine and cosine bases.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.fft
import scipy.linalg
import scipy.sparse as sp
import sympy

from opint.errors import (
    ConfigError,
    DomainViolation,
    EigSolverFailure,
    IndexOutOfRange,
    InsufficientBoundaryData,
    QuadratureFailure,
)
from opint.fourier import INV_SQRT_2PI, BoundaryTail, filon_transform
from opint.measures import (
    DensityComplexMeasure,
    IntegrationVerdict,
    Monomial,
    QuadraturePolicy,
    Status,
    integrate,
)

BOUNDARY_ORDER = 8


@dataclass(frozen=True)
class BoxConfig:
    ell: float = math.pi
    N: int = 16
    M: int = 512
    x_max: Optional[float] = None
    tol_quad: float = 1e-3
    tol_eig: float = 5e-3
    mass: float = 1.0
    doublings: int = 4

    def __post_init__(self):
        for name in ("ell", "tol_quad", "tol_eig", "mass"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.N < 1 or self.M < 1:
            raise ConfigError("N and M must be positive")
        if self.M < 4 * self.N:
            raise ConfigError(f"M={self.M} is below 4*N={4 * self.N}")
        if self.M % 4:
            raise ConfigError("M must be a multiple of 4")
        if self.x_max is None:
            object.__setattr__(self, "x_max", 200.0 / self.ell)
        elif not self.x_max > 0:
            raise ConfigError("x_max must be positive")

    @property
    def h(self):
        return self.ell / self.M

    @property
    def grid(self):
        return np.linspace(0.0, self.ell, self.M + 1)

    def with_(self, **changes):
        values = {**self.__dict__, **changes}
        if "ell" in changes and "x_max" not in changes:
            values["x_max"] = None
        return BoxConfig(**values)


def boole_weights(M, ell):
    """Composite Boole weights on ``M + 1`` equispaced nodes (``M % 4 == 0``)."""
    if M % 4:
        raise ValueError("M must be a multiple of 4")
    h = ell / M
    w = np.zeros(M + 1)
    for g in range(M // 4):
        w[4 * g:4 * g + 5] += np.array([7.0, 32.0, 12.0, 32.0, 7.0])
    return w * (2.0 * h / 45.0)


# ---------------------------------------------------------------------------
# finite-difference weights


def fd_weights(z, x, m):
    """Fornberg weights for derivatives ``0..m`` at ``z`` on the nodes ``x``.

    Returns an array ``c`` with ``c[k, j]`` the weight of ``f(x[j])`` in ``f^(k)(z)``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    c = np.zeros((m + 1, n))
    c1, c4 = 1.0, x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2, c5, c4 = 1.0, c4, x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


def _central_stencil(n):
    half = (n + 1) // 2
    offsets = np.arange(-half, half + 1)
    return offsets, fd_weights(0.0, offsets, n)[n]


# ---------------------------------------------------------------------------
# states


@dataclass(frozen=True, eq=False)
class BoxState:
    """A wave function on ``[0, ell]`` sampled on the grid of ``config``.

    ``d0[k]``, ``dl[k]`` are ``phi^(k)(0)`` and ``phi^(k)(ell)`` with estimated
    absolute uncertainty ``boundary_error`` (zero for analytic descriptors).
    """

    config: BoxConfig
    samples: np.ndarray
    d0: np.ndarray
    dl: np.ndarray
    derivative_fn: Optional[Callable] = None
    coefficients: Optional[np.ndarray] = None
    boundary_error: float = 0.0
    label: str = ""
    expr: Optional[sympy.Expr] = field(default=None, repr=False)

    @property
    def ell(self):
        return self.config.ell

    @property
    def grid(self):
        return self.config.grid

    @property
    def boundary_order(self):
        return self.d0.size

    def derivative(self, k):
        """Samples of ``phi^(k)`` on the grid."""
        if k == 0:
            return self.samples
        if self.derivative_fn is not None:
            return self.derivative_fn(k)
        return _fd_derivative(self.samples, self.config.h, k)

    def norm(self):
        if self.coefficients is not None:
            return float(np.linalg.norm(self.coefficients))
        w = boole_weights(self.config.M, self.ell)
        return math.sqrt(float(w @ np.abs(self.samples) ** 2))

    def l1_norm(self):
        w = boole_weights(self.config.M, self.ell)
        return float(w @ np.abs(self.samples))

    def scaled(self, c):
        return BoxState(
            self.config, c * self.samples, c * self.d0, c * self.dl,
            derivative_fn=(lambda k: c * self.derivative_fn(k)) if self.derivative_fn else None,
            coefficients=None if self.coefficients is None else c * self.coefficients,
            boundary_error=abs(c) * self.boundary_error, label=f"{c}*{self.label}",
            expr=None if self.expr is None else c * self.expr,
        )

    def tail_model(self, tol=1e-9):
        return BoundaryTail(self.d0, self.dl, self.ell, tol=tol + self.boundary_error)

    def p0_norm_squared(self):
        """``||P0 phi||**2 = int |phi'|**2``."""
        if self.coefficients is not None:
            n = np.arange(1, self.coefficients.size + 1)
            return float(np.sum(np.abs(self.coefficients) ** 2 * (n * math.pi / self.ell) ** 2))
        w = boole_weights(self.config.M, self.ell)
        return float(w @ np.abs(self.derivative(1)) ** 2)


def from_sine_coefficients(coefficients, config, label="sine", order=BOUNDARY_ORDER):
    c = np.asarray(coefficients, dtype=complex)
    if c.size > config.N:
        raise ConfigError(f"{c.size} coefficients exceed N={config.N}")
    ell = config.ell
    t = config.grid
    k_n = np.arange(1, c.size + 1) * math.pi / ell
    amp = math.sqrt(2.0 / ell)

    def derivative(k, at=t):
        phase = np.outer(np.atleast_1d(at), k_n) + k * math.pi / 2
        return amp * (np.sin(phase) @ (c * k_n**k))

    ks = range(order)
    d0 = np.array([derivative(k, 0.0)[0] for k in ks])
    dl = np.array([derivative(k, ell)[0] for k in ks])
    # exact zeros at the endpoints for odd-free terms are lost to rounding in sin(n pi)
    scale = amp * np.abs(c).sum() * np.maximum(1.0, k_n[-1]) ** np.arange(order)
    d0[np.abs(d0) < 1e-13 * scale] = 0.0
    dl[np.abs(dl) < 1e-13 * scale] = 0.0
    return BoxState(config, derivative(0), d0, dl, derivative_fn=derivative,
                    coefficients=c, label=label)


def from_expr(expr, config, symbol=None, label=None, order=BOUNDARY_ORDER):
    """State from a sympy expression in one variable (exact derivatives)."""
    expr = sympy.sympify(expr)
    free = sorted(expr.free_symbols, key=str)
    if symbol is None:
        if len(free) > 1:
            raise ValueError("expression has more than one free symbol")
        symbol = free[0] if free else sympy.Symbol("t")
    t = config.grid
    derivs = [expr]
    for _ in range(order):
        derivs.append(sympy.diff(derivs[-1], symbol))
    funcs = [sympy.lambdify(symbol, d, "numpy") for d in derivs]

    def derivative(k, at=t):
        if k < len(funcs):
            f = funcs[k]
        else:
            f = sympy.lambdify(symbol, sympy.diff(expr, symbol, k), "numpy")
        values = np.asarray(f(at), dtype=complex)
        return np.broadcast_to(values, np.shape(at)).astype(complex)

    d0 = np.array([complex(d.subs(symbol, 0)) for d in derivs[:order]])
    dl = np.array([complex(d.subs(symbol, config.ell)) for d in derivs[:order]])
    return BoxState(config, derivative(0), d0, dl, derivative_fn=derivative,
                    label=label or str(expr), expr=expr)


def from_samples(samples, config, order=4, label="samples"):
    """State from raw grid samples; endpoint derivatives by one-sided differences."""
    y = np.asarray(samples, dtype=complex)
    if y.size != config.M + 1:
        raise ConfigError(f"expected {config.M + 1} samples, got {y.size}")
    if not np.all(np.isfinite(y)):
        raise ValueError("samples must be finite")
    h = config.h
    d0, dl, err = np.zeros(order, complex), np.zeros(order, complex), 0.0
    for k in range(order):
        lo, hi = _one_sided(y, h, k, k + 3), _one_sided(y, h, k, k + 4)
        d0[k], dl[k] = hi
        err = max(err, float(np.max(np.abs(np.array(hi) - np.array(lo)))))
    return BoxState(config, y, d0, dl, boundary_error=err, label=label)


def _one_sided(y, h, k, width):
    nodes = np.arange(width)
    w = fd_weights(0.0, nodes, k)[k] / h**k
    left = complex(w @ y[:width])
    right = complex(((-1) ** k * w) @ y[::-1][:width])
    return left, right


def _fd_derivative(y, h, k):
    out = np.array(y, dtype=complex)
    for _ in range(k):
        out = np.gradient(out, h, edge_order=2)
    return out


_T = sympy.Symbol("t", real=True)


def sine_basis(n, config):
    """``psi_n(t) = sqrt(2/ell) sin(n pi t / ell)`` for ``n >= 1``."""
    if int(n) != n or n < 1:
        raise IndexOutOfRange(f"sine index must be an integer >= 1, got {n}")
    if n > config.N:
        config = config.with_(N=int(n), M=max(config.M, 4 * ((int(n) + 3) // 4) * 4))
    c = np.zeros(int(n), dtype=complex)
    c[-1] = 1.0
    return from_sine_coefficients(c, config, label=f"psi_{n}")


def phi_ab(a, b, config):
    """Linear state ``(b - a) t / ell + a`` with endpoint values ``a``, ``b``."""
    ell = sympy.nsimplify(config.ell) if config.ell != math.pi else sympy.pi
    expr = (sympy.nsimplify(b) - sympy.nsimplify(a)) * _T / ell + sympy.nsimplify(a)
    state = from_expr(expr, config, symbol=_T, label=f"phi_{a},{b}")
    return state


def poly_bump(p, config):
    """``t**p (ell - t)**p``."""
    ell = sympy.pi if config.ell == math.pi else sympy.nsimplify(config.ell)
    return from_expr(_T**p * (ell - _T) ** p, config, symbol=_T, label=f"t^{p}(l-t)^{p}")


def plane_wave(theta, config):
    """``exp(-i theta t)``."""
    theta = float(theta)
    ell = config.ell
    t = config.grid

    def derivative(k, at=t):
        return (-1j * theta) ** k * np.exp(-1j * theta * np.asarray(at, dtype=float))

    ks = range(BOUNDARY_ORDER)
    d0 = np.array([(-1j * theta) ** k for k in ks], dtype=complex)
    dl = d0 * np.exp(-1j * theta * ell)
    return BoxState(config, derivative(0), d0, dl, derivative_fn=derivative, label=f"wave_{theta:g}")


def random_sine_state(rng, config, terms=None, real=True):
    terms = terms or min(config.N, 6)
    c = rng.standard_normal(terms)
    if not real:
        c = c + 1j * rng.standard_normal(terms)
    c = c / np.linalg.norm(c)
    return from_sine_coefficients(c, config, label="random")


def random_boundary_state(rng, config):
    """Random state with random boundary vanishing order.

    One of: a random sine series; ``(t (ell - t))**p`` times a quadratic; the
    same plus a linear term ``b t / ell + a`` that breaks the boundary zeros.
    """
    kind = int(rng.integers(0, 3))
    if kind == 0:
        return random_sine_state(rng, config)
    ell = sympy.pi if config.ell == math.pi else sympy.nsimplify(config.ell)
    p = int(rng.integers(1, 4))
    c = [int(v) for v in rng.integers(-3, 4, size=3)]
    expr = (_T * (ell - _T)) ** p * (c[0] + c[1] * _T + c[2] * _T**2)
    if kind == 2:
        expr += int(rng.integers(-2, 3)) * _T / ell + int(rng.integers(-2, 3))
    return from_expr(expr, config, symbol=_T, label="random_poly")


def sine_coefficients(state, N=None):
    """Sine-series coefficients of a state from its grid samples (DST-I)."""
    N = N or state.config.N
    M = state.config.M
    y = state.samples[1:-1]
    scale = math.sqrt(state.ell / 2.0) / M
    re = scipy.fft.dst(y.real, type=1)
    im = scipy.fft.dst(y.imag, type=1)
    return scale * (re + 1j * im)[:N]


# ---------------------------------------------------------------------------
# Fourier transform and momentum densities


@dataclass(frozen=True)
class TransformResult:
    values: np.ndarray
    flags: np.ndarray
    bound: float

    @property
    def ok(self):
        return not self.flags.any()


def fourier_transform(phi, x_grid, backend=None):
    """``Fphi`` on ``x_grid`` with flags for non-finite, oversized or non-Lipschitz samples."""
    x = np.atleast_1d(np.asarray(x_grid, dtype=float))
    values = filon_transform(phi.samples, phi.ell, x, backend=backend)
    l1 = phi.l1_norm()
    bound = INV_SQRT_2PI * l1
    slack = 1e-9 * max(bound, 1e-300) + 1e-14
    flags = ~np.isfinite(values) | (np.abs(values) > bound + slack)
    if x.size > 1:
        order = np.argsort(x)
        lip = INV_SQRT_2PI * phi.ell * l1
        jumps = np.abs(np.diff(values[order])) > lip * np.diff(x[order]) + slack
        flags[order[1:]] |= jumps
    return TransformResult(values, flags, bound)


class MomentumDensity:
    """``x -> conj(Fpsi(x)) Fphi(x)``; with ``psi = phi`` the density ``|Fphi|**2``."""

    def __init__(self, phi, psi=None, backend=None):
        self.phi = phi
        self.psi = phi if psi is None else psi
        self.backend = backend
        self.config = phi.config
        self.diagonal = psi is None or psi is phi

    def transform(self, x):
        res = fourier_transform(self.phi, x, self.backend)
        if not res.ok:
            bad = np.asarray(x).ravel()[np.argmax(res.flags)]
            raise QuadratureFailure(f"flagged transform sample at x={bad!r}")
        return res.values

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        fphi = self.transform(x.ravel())
        if self.diagonal:
            return (np.abs(fphi) ** 2).reshape(x.shape)
        fpsi = MomentumDensity(self.psi, backend=self.backend).transform(x.ravel())
        return (np.conj(fpsi) * fphi).reshape(x.shape)

    def tail_model(self):
        if self.diagonal:
            if self.phi.boundary_order == 0:
                return None
            return self.phi.tail_model()
        return _CrossTail(self.psi.tail_model(), self.phi.tail_model())

    def decay_exponent(self):
        """Algebraic decay exponent of ``|Fphi|**2`` from the endpoint data."""
        return self.phi.tail_model().decay_exponent()

    def measure(self, support=(-math.inf, math.inf), policy=None):
        cfg = self.config
        policy = policy or QuadraturePolicy(period=2 * math.pi / cfg.ell, doublings=cfg.doublings,
                                            tol=1e-5)
        return DensityComplexMeasure(self, support=support, x_max=cfg.x_max, frequency=cfg.ell,
                                     policy=policy, tail=self.tail_model(), positive=self.diagonal)


class _CrossTail(BoundaryTail):
    """Tail of ``x**p conj(Fpsi) Fphi``; the absolute tail is the Cauchy-Schwarz bound."""

    def __init__(self, left, right):
        self.left, self.right = left, right
        self.ell = right.ell
        self.zero = 0.0

    def tail(self, power, absolute, T, side):
        if absolute:
            a = self.left.tail(power, True, T, side)
            b = self.right.tail(power, True, T, side)
            return None if a is None or b is None else math.sqrt(a * b)
        return _cross_tail(self.left, self.right, power, T, side)


def _cross_tail(left, right, power, T, side):
    from opint.fourier import _osc_tail

    sigma = 1 if side > 0 else -1
    sign = 1 if power % 2 == 0 else sigma
    ell = right.ell
    K = min(left.order, right.order)
    total = 0j
    for j in range(K):
        cj = np.conj((1j * sigma) ** (-(j + 1)))
        for k in range(K):
            ck = (1j * sigma) ** (-(k + 1))
            A = np.conj(left.d0[j]) * right.d0[k] + np.conj(left.dl[j]) * right.dl[k]
            B = -np.conj(left.d0[j]) * right.dl[k]
            C = -np.conj(left.dl[j]) * right.d0[k]
            q = j + k + 2 - power
            for coef, omega in ((A, 0.0), (B, -sigma * ell), (C, sigma * ell)):
                if coef == 0:
                    continue
                val = _osc_tail(q, float(omega * T), float(T))
                if val is None:
                    return None
                total += cj * ck * coef * val
    return complex(sign * INV_SQRT_2PI**2 * total)


def momentum_scalar_measure(psi, phi, intervals=((-math.inf, math.inf),), backend=None):
    """``int_Y conj(Fpsi) Fphi dx`` over a finite union of intervals ``Y``."""
    dens = MomentumDensity(phi, psi if psi is not phi else None, backend=backend)
    total = 0j
    for lo, hi in intervals:
        verdict = integrate(Monomial(0), dens.measure(support=(lo, hi)))
        total += verdict.value
    return total


def momentum_verdict(phi, k, support=(-math.inf, math.inf), backend=None):
    return integrate(Monomial(k), MomentumDensity(phi, backend=backend).measure(support=support))


def moment(phi, k, backend=None) -> IntegrationVerdict:
    """``int x**k |Fphi(x)|**2 dx`` with tail model and divergence classification."""
    return momentum_verdict(phi, k, backend=backend)


def plancherel_defect(phi, backend=None):
    v = moment(phi, 0, backend=backend)
    return abs(v.value - phi.norm() ** 2), v


# ---------------------------------------------------------------------------
# operators


def p0_power_matrix(n, config, flavor="dirichlet"):
    """Finite-difference matrix of ``(-i d/dx)**n``.

    ``flavor="dirichlet"`` acts on the interior nodes with zero data outside:
    the boundary rows of the full grid are removed, which encodes
    ``phi^(k)(0) = phi^(k)(ell) = 0`` for ``k < n`` at this order.  The result
    for ``n = 2`` is the tridiagonal ``(-1, 2, -1) / h**2``.

    ``flavor="adjoint"`` acts on all ``M + 1`` nodes with no boundary
    conditions; rows near the ends use one-sided second-order stencils.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    M, h = config.M, config.h
    if M < 2 * (n + 2):
        raise ConfigError(f"M={M} too small for derivative order {n}")
    factor = (-1j) ** n / h**n
    if flavor == "dirichlet":
        size = M - 1
        offsets, w = _central_stencil(n)
        diags = [np.full(size - abs(o), wk) for o, wk in zip(offsets, w) if wk != 0 and abs(o) < size]
        offs = [o for o, wk in zip(offsets, w) if wk != 0 and abs(o) < size]
        mat = sp.diags(diags, offs, shape=(size, size), format="csr")
        if n % 2 == 0:
            return (mat * factor.real).tocsr()
        return (mat * factor).tocsr()
    if flavor == "adjoint":
        size = M + 1
        offsets, w = _central_stencil(n)
        half = offsets[-1]
        width = n + 2
        rows, cols, vals = [], [], []
        one_sided = {}
        for i in range(size):
            if half <= i <= size - 1 - half:
                idx, ww = i + offsets, w
            else:
                start = 0 if i < half else size - width
                key = (start, i - start)
                if key not in one_sided:
                    one_sided[key] = fd_weights(float(i - start), np.arange(width), n)[n]
                idx, ww = start + np.arange(width), one_sided[key]
            rows.extend([i] * len(idx))
            cols.extend(idx)
            vals.extend(ww)
        mat = sp.csr_matrix((vals, (rows, cols)), shape=(size, size))
        return (mat * factor).tocsr()
    raise ValueError(f"unknown flavor {flavor!r}")


@dataclass(frozen=True)
class EigenReport:
    index: np.ndarray
    fd: np.ndarray
    fd_exact: np.ndarray
    analytic: np.ndarray
    galerkin: np.ndarray
    printed: np.ndarray
    hamiltonian: np.ndarray
    overlaps: np.ndarray
    relative_error: np.ndarray
    discrepancy: bool

    def rows(self):
        return [dict(n=int(n), fd=float(a), fd_exact=float(b), analytic=float(c), galerkin=float(g),
                     printed=float(p), hamiltonian=float(hm), overlap=float(o), rel_error=float(e))
                for n, a, b, c, g, p, hm, o, e in zip(self.index, self.fd, self.fd_exact, self.analytic,
                                                     self.galerkin, self.printed, self.hamiltonian,
                                                     self.overlaps, self.relative_error)]


def eigen_p0star_p0(config, count=5):
    """Lowest eigenpairs of ``P0* P0`` (Dirichlet ``-d**2/dx**2``).

    ``printed`` holds ``n**2 pi**2 / (2 ell**2)``; ``discrepancy`` is set when it
    differs from the computed spectrum, which it matches only after the
    ``1/(2m)`` Hamiltonian factor at ``m = 1``.
    """
    M, h, ell = config.M, config.h, config.ell
    size = M - 1
    if count > size:
        raise ConfigError("more eigenvalues requested than interior nodes")
    d = np.full(size, 2.0 / h**2)
    e = np.full(size - 1, -1.0 / h**2)
    try:
        vals, vecs = scipy.linalg.eigh_tridiagonal(d, e, select="i", select_range=(0, count - 1))
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigSolverFailure(str(exc)) from exc
    if not np.all(np.isfinite(vals)):
        raise EigSolverFailure("non-finite eigenvalues")
    n = np.arange(1, count + 1)
    analytic = (n * math.pi / ell) ** 2
    fd_exact = 2.0 / h**2 * (1.0 - np.cos(n * math.pi * h / ell))
    interior = config.grid[1:-1]
    overlaps = np.empty(count)
    for i in range(count):
        psi = math.sqrt(2.0 / ell) * np.sin((i + 1) * math.pi * interior / ell) * math.sqrt(h)
        overlaps[i] = abs(vecs[:, i] @ psi)
    printed = n**2 * math.pi**2 / (2.0 * ell**2)
    discrepancy = not np.allclose(printed, analytic, rtol=1e-12)
    return EigenReport(n, vals, fd_exact, analytic, galerkin_p0star_p0(config, count), printed,
                       analytic / (2.0 * config.mass), overlaps, np.abs(vals - analytic) / analytic,
                       discrepancy)


def galerkin_p0_matrix(config):
    """Matrix of ``P0`` from the sine basis into the cosine basis.

    Entries are quadratures of ``<chi_m | -i psi_n'>`` with ``chi_0 = ell**(-1/2)``,
    ``chi_m = sqrt(2/ell) cos(m pi t/ell)``; ``m = 0..N``, ``n = 1..N``.
    """
    N, ell = config.N, config.ell
    t = config.grid
    w = boole_weights(config.M, ell)
    chi = np.empty((N + 1, t.size))
    chi[0] = 1.0 / math.sqrt(ell)
    for m in range(1, N + 1):
        chi[m] = math.sqrt(2.0 / ell) * np.cos(m * math.pi * t / ell)
    A = np.empty((N + 1, N), dtype=complex)
    for j in range(1, N + 1):
        c = np.zeros(j)
        c[-1] = 1.0
        dpsi = from_sine_coefficients(c, config).derivative(1)
        A[:, j - 1] = (chi * w) @ (-1j * dpsi)
    return A


def galerkin_p0star_p0(config, count=5):
    A = galerkin_p0_matrix(config)
    T = A.conj().T @ A
    vals = np.linalg.eigvalsh(0.5 * (T + T.conj().T))
    return vals[:count]


# ---------------------------------------------------------------------------
# domains and identities


@dataclass(frozen=True)
class DomainFlags:
    in_dom_p2n: bool
    in_dom_pprime2n: bool
    n: int

    @property
    def classification(self):
        if self.in_dom_p2n:
            return "InDomP2n"
        if self.in_dom_pprime2n:
            return "InDomPprime2n"
        return "Neither"


def vanishing_orders(phi, tol=1e-8):
    """Boolean per derivative order: does ``phi^(k)`` vanish at both endpoints."""
    scale = tol * max(1.0, phi.norm()) + 3.0 * phi.boundary_error
    return (np.abs(phi.d0) <= scale) & (np.abs(phi.dl) <= scale)


def boundary_domain_detector(phi, n=1, tol=1e-8):
    """Membership of ``phi`` in the domains of ``P[2n]`` and ``P'[2n]``.

    ``P[2n]`` needs derivatives ``0..2n-1`` to vanish at both ends, ``P'[2n]``
    only ``0..n-1``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if phi.boundary_order < 2 * n:
        raise InsufficientBoundaryData(
            f"need endpoint derivatives up to order {2 * n - 1}, have {phi.boundary_order - 1}")
    zero = vanishing_orders(phi, tol)
    return DomainFlags(bool(zero[:2 * n].all()), bool(zero[:n].all()), n)


@dataclass(frozen=True)
class VarianceFreeResult:
    second_moment: float
    p0_norm_squared: float
    defect: float
    relative_defect: float
    first_moment: complex
    passed: bool
    verdict: IntegrationVerdict


def variance_free_check(phi, backend=None, tol=None):
    """Compare ``int x**2 |Fphi|**2`` with ``||P0 phi||**2``."""
    if not vanishing_orders(phi)[:1].all():
        raise DomainViolation("state does not vanish at the endpoints")
    tol = phi.config.tol_quad if tol is None else tol
    v2 = moment(phi, 2, backend=backend)
    v1 = moment(phi, 1, backend=backend)
    norm2 = phi.p0_norm_squared()
    defect = abs(v2.value - norm2)
    rel = defect / norm2 if norm2 > 0 else defect
    passed = v2.status is Status.CONVERGED and defect <= tol * (1.0 + norm2)
    return VarianceFreeResult(float(v2.value.real), norm2, defect, rel, v1.value, passed, v2)


@dataclass(frozen=True)
class IdentityResidual:
    residual: float
    coarse: float
    fine: float
    halved: bool
    floor: float


ROUNDOFF_FLOOR = 1e-13


def _a2_residual(phi, x, n, backend):
    ell = phi.ell
    if n == 1:
        lhs = filon_transform(phi.derivative(1), ell, x, backend=backend)
        rhs = 1j * x * filon_transform(phi.samples, ell, x, backend=backend)
        rhs += INV_SQRT_2PI * (phi.dl[0] * np.exp(-1j * ell * x) - phi.d0[0])
        return lhs - rhs
    lhs = x**n * filon_transform(phi.samples, ell, x, backend=backend)
    rhs = (-1j) ** n * filon_transform(phi.derivative(n), ell, x, backend=backend)
    # iterating the first-order identity gives the boundary factor -(-i)**n
    rhs += -((-1j) ** n) * INV_SQRT_2PI * (phi.dl[n - 1] * np.exp(-1j * ell * x) - phi.d0[n - 1])
    return lhs - rhs


def lemma_a2_identity_check(phi, x_grid, n=1, coarse_M=16, backend=None):
    """Sup residual of the integration-by-parts identity for ``F[phi^(n)]``.

    ``n = 1``: ``F[phi'] = i x F[phi] + (phi(ell) e^{-i ell x} - phi(0)) / sqrt(2 pi)``.
    ``n > 1`` (``phi^(k)`` vanishing at the ends for ``k < n - 1``):
    ``x**n F[phi] = (-i)**n F[phi^(n)] - (-i)**n (phi^(n-1)(ell) e^{-i ell x} - phi^(n-1)(0)) / sqrt(2 pi)``.

    Also evaluates the residual on grids with ``coarse_M`` and ``2 * coarse_M``
    panels; ``halved`` holds when refining at least halves it or both sit at the
    rounding floor.
    """
    x = np.asarray(x_grid, dtype=float)
    if n > 1 and not vanishing_orders(phi)[:n - 1].all():
        raise DomainViolation(f"derivatives below order {n - 1} must vanish at the endpoints")
    residual = float(np.abs(_a2_residual(phi, x, n, backend)).max())
    res = []
    for M in (coarse_M, 2 * coarse_M):
        sub = _resample(phi, M)
        res.append(float(np.abs(_a2_residual(sub, x, n, backend)).max()))
    floor = ROUNDOFF_FLOOR * max(1.0, float(np.abs(x).max()) ** n) * max(1.0, phi.norm())
    halved = res[1] <= 0.5 * res[0] or max(res) <= floor
    return IdentityResidual(residual, res[0], res[1], halved, floor)


def _resample(phi, M):
    cfg = phi.config.with_(M=M, N=min(phi.config.N, M // 4))
    if phi.derivative_fn is None:
        raise ValueError("resampling needs an analytic state")
    t = cfg.grid
    fn = phi.derivative_fn
    return BoxState(cfg, fn(0, t), phi.d0, phi.dl, derivative_fn=lambda k, at=t: fn(k, at),
                    label=phi.label)


@dataclass(frozen=True)
class DivergenceProbe:
    a: complex
    b: complex
    theta: float
    verdict: IntegrationVerdict

    @property
    def status(self):
        return self.verdict.status

    @property
    def slope(self):
        return None if self.verdict.fit is None else self.verdict.fit.slope

    @property
    def residual(self):
        return None if self.verdict.fit is None else self.verdict.fit.residual


def witness_theta(a, b, ell):
    """Plane-wave frequency making ``conj(F psi_theta) (a e^{-i ell x} - b)`` non-integrable."""
    a, b = complex(a), complex(b)
    if abs(a) != abs(b) or (a == 0 and b == 0):
        return 0.0
    return -float(np.angle(-a / b)) / ell


def probe_horizons(T0=100.0, doublings=7):
    return tuple(T0 * 2.0**j for j in range(doublings + 1))


def lemma_a3_divergence_probe(a, b, config, theta=None, horizons=None, backend=None):
    """Partial integrals of ``|conj(F psi_theta)(x) (a e^{-i ell x} - b)|`` over ``[1, T]``."""
    ell = config.ell
    theta = witness_theta(a, b, ell) if theta is None else float(theta)
    psi = plane_wave(theta, config)
    a, b = complex(a), complex(b)

    def density(x):
        f = filon_transform(psi.samples, ell, np.ravel(x), backend=backend).reshape(np.shape(x))
        return np.abs(np.conj(f) * (a * np.exp(-1j * ell * x) - b))

    policy = QuadraturePolicy(horizons=horizons or probe_horizons(), tail_model=False, tol=1e-5)
    mu = DensityComplexMeasure(density, support=(1.0, math.inf), frequency=ell, policy=policy,
                               positive=True)
    return DivergenceProbe(a, b, theta, integrate(lambda x: np.ones_like(x), mu))


def first_moment_tail_probe(a, b, config, horizons=None, backend=None):
    """``int_1^T x |F phi_{a,b}(x)|**2 dx`` on a doubling schedule of ``T``."""
    phi = phi_ab(a, b, config)
    policy = QuadraturePolicy(horizons=horizons or probe_horizons(), tol=1e-5)
    mu = MomentumDensity(phi, backend=backend).measure(support=(1.0, math.inf), policy=policy)
    return DivergenceProbe(complex(a), complex(b), 0.0, integrate(Monomial(1), mu))


@dataclass(frozen=True)
class RangeStability:
    outside_mass: float
    inside_mismatch: float
    padding: int


def range_stability_check(phi, pad=None):
    """Apply the central first-derivative stencil to ``phi`` extended by zero.

    Reports the squared mass of the result outside ``[0, ell]`` and the largest
    mismatch inside against the Dirichlet matrix.
    """
    cfg = phi.config
    M, h = cfg.M, cfg.h
    pad = pad or max(4, M // 4)
    y = np.zeros(M + 1 + 2 * pad, dtype=complex)
    y[pad:pad + M + 1] = phi.samples
    d = np.zeros_like(y)
    d[1:-1] = -1j * (y[2:] - y[:-2]) / (2 * h)
    outside = np.concatenate([d[:pad], d[pad + M + 1:]])
    mass = float(h * np.sum(np.abs(outside) ** 2))
    inner = p0_power_matrix(1, cfg, "dirichlet") @ phi.samples[1:-1]
    mismatch = float(np.abs(d[pad + 1:pad + M] - inner).max())
    return RangeStability(mass, mismatch, pad)
