"""Complex and positive measures on atomic and density-represented outcome spaces.

Two representations are supported:

* :class:`AtomicComplexMeasure` -- finitely many weighted atoms, or a sequence
  of atoms ``j = 0, 1, 2, ...`` given by vectorized weight/location functions
  and a truncation horizon ``n_max``.
* :class:`DensityComplexMeasure` -- a density on (a subinterval of) the real
  line, integrated on Gauss-Legendre panels up to a cutoff.

Integrals are returned as :class:`IntegrationVerdict` objects.  A verdict
is ``Converged`` only when the last two horizons agree, ``Divergent`` only
when the absolute partial integrals keep growing with a clean fit against
``log T``, and ``Inconclusive`` otherwise.  A truncation never silently
answers an infinite-horizon question.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from opint.errors import NonEvaluable

N_MAX_DEFAULT = 10**6


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    DIVERGENT = "Divergent"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class LogFit:
    """Least-squares fit ``y = slope * log(T) + intercept`` (or ``log y`` for ``model="power"``)."""

    slope: float
    intercept: float
    residual: float
    model: str = "log"


@dataclass(frozen=True)
class IntegrationVerdict:
    value: complex
    status: Status
    horizons: np.ndarray
    partials: np.ndarray
    abs_partials: np.ndarray
    extrapolated: Optional[np.ndarray] = None
    fit: Optional[LogFit] = None
    note: str = ""

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    @property
    def divergent(self) -> bool:
        return self.status is Status.DIVERGENT

    def rows(self):
        return [(float(h), float(p.real), float(p.imag)) for h, p in zip(self.horizons, self.partials)]

    def to_csv(self, target=None) -> str:
        """Write the evidence table (horizon, partial_real, partial_imag).

        ``target`` may be a path or an open text file; the CSV text is returned.
        """
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["horizon", "partial_real", "partial_imag"])
        for row in self.rows():
            writer.writerow([repr(v) for v in row])
        text = buf.getvalue()
        if target is None:
            return text
        if hasattr(target, "write"):
            target.write(text)
        else:
            with open(target, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text


# ---------------------------------------------------------------------------
# integrands


@dataclass(frozen=True)
class Monomial:
    """``x -> x**power`` (or ``|x|**power``); the power lets tail models apply."""

    power: int
    absolute: bool = False

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.abs(x) ** self.power if self.absolute else x**self.power


def abs_function(f):
    if isinstance(f, Monomial):
        return Monomial(f.power, absolute=True)
    return lambda x: np.abs(f(x))


def abs_squared_function(f):
    if isinstance(f, Monomial):
        return Monomial(2 * f.power, absolute=True)
    return lambda x: np.abs(f(x)) ** 2


def evaluate(f, x):
    """Evaluate ``f`` on the array ``x``; raise :class:`NonEvaluable` on failure."""
    x = np.asarray(x)
    try:
        with np.errstate(all="ignore"):
            values = np.asarray(f(x), dtype=complex)
        if values.shape != x.shape:
            values = np.broadcast_to(values, x.shape).astype(complex)
    except NonEvaluable:
        raise
    except Exception:
        try:
            values = np.array([complex(f(xi)) for xi in x.ravel()]).reshape(x.shape)
        except Exception as exc:
            raise NonEvaluable(f"integrand failed to evaluate: {exc}") from exc
    bad = ~np.isfinite(values)
    if bad.any():
        where = x[bad].ravel()[0]
        raise NonEvaluable(f"integrand is not finite at node {where!r}")
    return values


# ---------------------------------------------------------------------------
# atomic measures


def natural_locations(j):
    return np.asarray(j, dtype=float)


@dataclass(frozen=True, eq=False)
class AtomicComplexMeasure:
    """Weighted atoms, either a finite list or a sequence truncated at ``n_max``."""

    locations: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None
    weight_fn: Optional[Callable] = None
    location_fn: Optional[Callable] = None
    n_max: int = N_MAX_DEFAULT
    labels: Optional[tuple] = None
    positive: bool = False

    def __post_init__(self):
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=complex)
            loc = np.asarray(self.locations, dtype=float)
            if w.shape != loc.shape or w.ndim != 1:
                raise ValueError("locations and weights must be 1-d arrays of equal length")
            if not np.all(np.isfinite(w)):
                raise ValueError("weights must be finite")
            if self.positive:
                _check_positive(w)
            object.__setattr__(self, "weights", w)
            object.__setattr__(self, "locations", loc)
        elif self.weight_fn is None:
            raise ValueError("either weights or weight_fn is required")
        elif self.location_fn is None:
            object.__setattr__(self, "location_fn", natural_locations)

    @classmethod
    def finite(cls, locations, weights, labels=None, positive=False):
        return cls(locations=np.asarray(locations, dtype=float), weights=weights,
                   labels=tuple(labels) if labels is not None else None, positive=positive)

    @classmethod
    def sequence(cls, weight_fn, location_fn=None, n_max=N_MAX_DEFAULT, positive=False):
        return cls(weight_fn=weight_fn, location_fn=location_fn, n_max=int(n_max), positive=positive)

    @property
    def is_finite(self) -> bool:
        return self.weights is not None

    def weights_at(self, j):
        if self.is_finite:
            return self.weights[j]
        w = np.asarray(self.weight_fn(np.asarray(j)), dtype=complex)
        if w.shape != np.shape(j):
            w = np.broadcast_to(w, np.shape(j)).astype(complex)
        if self.positive:
            _check_positive(w)
        return w

    def locations_at(self, j):
        if self.is_finite:
            return self.locations[j]
        return np.asarray(self.location_fn(np.asarray(j)), dtype=float)

    def total_mass(self) -> complex:
        if not self.is_finite:
            raise ValueError("total mass of a sequence measure needs integrate()")
        return complex(self.weights.sum())

    def map_weights(self, g, positive=None):
        """Measure with weights ``g(w)`` on the same atoms."""
        positive = self.positive if positive is None else positive
        if self.is_finite:
            return AtomicComplexMeasure(self.locations, g(self.weights), labels=self.labels,
                                        positive=positive)
        fn = self.weight_fn
        return AtomicComplexMeasure(weight_fn=lambda j: g(np.asarray(fn(j), dtype=complex)),
                                    location_fn=self.location_fn, n_max=self.n_max,
                                    positive=positive)

    def scaled(self, c):
        return self.map_weights(lambda w: c * w, positive=self.positive and _is_nonneg(c))

    def conj(self):
        return self.map_weights(np.conj)

    def restrict(self, predicate):
        """Restriction to the atoms whose location satisfies ``predicate`` (vectorized)."""
        if self.is_finite:
            mask = np.asarray(predicate(self.locations), dtype=bool)
            return AtomicComplexMeasure(self.locations, np.where(mask, self.weights, 0),
                                        labels=self.labels, positive=self.positive)
        fn, loc = self.weight_fn, self.location_fn

        def weight_fn(j):
            mask = np.asarray(predicate(loc(j)), dtype=bool)
            return np.where(mask, np.asarray(fn(j), dtype=complex), 0)

        return AtomicComplexMeasure(weight_fn=weight_fn, location_fn=loc, n_max=self.n_max,
                                    positive=self.positive)

    @staticmethod
    def combine(coeffs: Sequence[complex], measures: Sequence["AtomicComplexMeasure"]):
        """Linear combination ``sum_i c_i mu_i``.

        Finite measures are merged on the union of their atom locations.  Sequence
        measures must share one location function.
        """
        coeffs = [complex(c) for c in coeffs]
        if len(coeffs) != len(measures) or not measures:
            raise ValueError("need one coefficient per measure")
        positive = all(m.positive for m in measures) and all(_is_nonneg(c) for c in coeffs)
        if all(m.is_finite for m in measures):
            first = measures[0]
            if all(m.locations.shape == first.locations.shape
                   and np.array_equal(m.locations, first.locations) for m in measures):
                w = sum(c * m.weights for c, m in zip(coeffs, measures))
                return AtomicComplexMeasure(first.locations, w, labels=first.labels,
                                            positive=positive)
            locs = np.concatenate([m.locations for m in measures])
            ws = np.concatenate([c * m.weights for c, m in zip(coeffs, measures)])
            uniq, inv = np.unique(locs, return_inverse=True)
            w = np.zeros(uniq.shape, dtype=complex)
            np.add.at(w, inv, ws)
            return AtomicComplexMeasure(uniq, w, positive=positive)
        if any(m.is_finite for m in measures):
            raise ValueError("cannot combine finite and sequence measures")
        loc = measures[0].location_fn
        if any(m.location_fn is not loc for m in measures):
            raise ValueError("sequence measures must share a location function")
        fns = [m.weight_fn for m in measures]

        def weight_fn(j):
            return sum(c * np.asarray(fn(j), dtype=complex) for c, fn in zip(coeffs, fns))

        return AtomicComplexMeasure(weight_fn=weight_fn, location_fn=loc,
                                    n_max=min(m.n_max for m in measures), positive=positive)


def _is_nonneg(c) -> bool:
    c = complex(c)
    return c.imag == 0 and c.real >= 0


def _check_positive(w, tol=1e-12):
    w = np.asarray(w, dtype=complex)
    if w.size == 0:
        return
    scale = max(1.0, float(np.abs(w).max()))
    if np.any(np.abs(w.imag) > tol * scale) or np.any(w.real < -tol * scale):
        raise ValueError("positive measure has a weight that is not real and >= 0")


# ---------------------------------------------------------------------------
# density measures


class TailModel:
    """Analytic tail for monomial integrands beyond a horizon.

    ``tail(power, absolute, T, side)`` returns the integral of ``x**power``
    (``|x|**power`` if ``absolute``) times the density over ``[T, inf)``
    (``side=+1``) or ``(-inf, -T]`` (``side=-1``), or ``None`` when the model
    does not give a finite tail.
    """

    def tail(self, power, absolute, T, side):  # pragma: no cover - interface
        raise NotImplementedError


@dataclass(frozen=True)
class QuadraturePolicy:
    nodes: int = 10
    panel_width: Optional[float] = None
    doublings: int = 4
    horizons: Optional[tuple] = None
    period: Optional[float] = None
    tail_model: bool = True
    tol: float = 1e-5
    margin: float = 5.0
    decay_tol: float = 0.1


@dataclass(frozen=True)
class SeriesPolicy:
    first_horizon: int = 1024
    n_max: Optional[int] = None
    tol: float = 1e-8
    margin: float = 5.0
    decay_tol: float = 0.1


@dataclass(frozen=True, eq=False)
class DensityComplexMeasure:
    """Measure ``density(x) dx`` on ``support`` (an interval, possibly unbounded).

    ``frequency`` is the largest angular frequency the integrands oscillate
    with; panels are kept to a quarter period.  ``x_max`` is the cutoff for
    unbounded supports.
    """

    density: Callable
    support: tuple = (-math.inf, math.inf)
    x_max: float = 100.0
    frequency: Optional[float] = None
    policy: QuadraturePolicy = field(default_factory=QuadraturePolicy)
    tail: Optional[TailModel] = None
    positive: bool = False

    def __post_init__(self):
        lo, hi = self.support
        if not lo < hi:
            raise ValueError("support must be a nonempty interval")
        if self.x_max <= 0:
            raise ValueError("x_max must be positive")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.support[0]) and math.isfinite(self.support[1])

    def evaluate(self, x):
        values = evaluate(self.density, x)
        if self.positive:
            scale = max(1e-300, float(np.abs(values).max()) if values.size else 0.0)
            if np.any(values.real < -1e-10 * scale) or np.any(np.abs(values.imag) > 1e-10 * scale):
                raise ValueError("positive density has values that are not real and >= 0")
        return values

    def abs(self):
        dens = self.density
        return replace(self, density=lambda x: np.abs(dens(x)), positive=True,
                       tail=self.tail if self.positive else None)

    def panel_width(self, policy=None) -> float:
        policy = policy or self.policy
        if policy.panel_width is not None:
            return policy.panel_width
        if self.frequency:
            return math.pi / (2.0 * self.frequency)
        return 0.5


@dataclass(frozen=True)
class PowerLawTail(TailModel):
    """Fitted ``|density| ~ C x**(-p)`` on one side; tail integral is analytic."""

    coefficient: float
    exponent: float
    side: int

    @classmethod
    def fit(cls, measure: DensityComplexMeasure, T: float, side: int, windows=8, nodes=10):
        # geometric windows on [T/2, T]: for an exact power law the window
        # integrals are exactly log-linear in the window index
        r = 2.0 ** (1.0 / windows)
        edges = 0.5 * T * r ** np.arange(windows + 1)
        width = measure.panel_width()
        masses = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            xs, ws = _panels(lo, hi, width, nodes)
            masses.append(float(np.sum(np.abs(measure.evaluate(side * xs)) * ws)))
        masses = np.array(masses)
        if np.any(masses <= 0):
            return None
        slope, intercept = np.polyfit(np.arange(windows), np.log(masses), 1)
        q = slope / math.log(r)  # 1 - p
        p = 1.0 - q
        if abs(q) < 1e-12:
            return None
        coefficient = math.exp(intercept) * q / ((0.5 * T) ** q * (r**q - 1.0))
        return cls(coefficient=float(coefficient), exponent=float(p), side=side)

    def tail(self, power, absolute, T, side):
        if side != self.side:
            return None
        p = self.exponent - power
        if p <= 1.0:
            return None
        value = self.coefficient * T ** (1.0 - p) / (p - 1.0)
        if side < 0 and not absolute and power % 2 == 1:
            value = -value
        return value


# ---------------------------------------------------------------------------
# quadrature helpers

_LEGGAUSS = {}


def _leggauss(n):
    if n not in _LEGGAUSS:
        _LEGGAUSS[n] = np.polynomial.legendre.leggauss(n)
    return _LEGGAUSS[n]


def _panels(a, b, width, nodes):
    """Gauss-Legendre nodes/weights on ``[a, b]`` split into panels of at most ``width``."""
    if b <= a:
        return np.zeros(0), np.zeros(0)
    count = max(1, int(math.ceil((b - a) / width - 1e-12)))
    edges = np.linspace(a, b, count + 1)
    s, w = _leggauss(nodes)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    return (mid + half * s).ravel(), (half * w).ravel()


def default_horizons(x_max, doublings, period=None):
    top = float(x_max)
    if period:
        unit = period * 2**doublings
        top = math.ceil(top / unit) * unit
    return tuple(top / 2 ** (doublings - j) for j in range(doublings + 1))


# ---------------------------------------------------------------------------
# convergence / divergence classification


def _relative_change_ok(prev_s, s, prev_a, a, tol):
    scale = max(abs(s), a)
    if scale == 0.0:
        return True
    return abs(s - prev_s) <= tol * scale and abs(a - prev_a) <= tol * max(a, 1e-300)


def classify_divergence(horizons, abs_partials, margin=5.0, decay_tol=0.1, min_doublings=3):
    """Return ``(Status, LogFit | None)`` for a growing sequence of absolute partials.

    Divergent requires a positive slope against ``log T`` exceeding ``margin``
    times the fit's RMS residual (or the same for ``log A`` when the growth is
    algebraic), over at least ``min_doublings`` doublings, and increments that
    do not decay.
    """
    h = np.asarray(horizons, dtype=float)
    A = np.asarray(abs_partials, dtype=float)
    if h.size < 2 or np.log2(h[-1] / h[0]) < min_doublings - 1e-9:
        return Status.INCONCLUSIVE, None
    u = np.log(h)
    fit = _linfit(u, A, "log")
    inc = np.diff(A)
    positive = inc > 0
    if positive.sum() < 2:
        return Status.INCONCLUSIVE, fit
    steps = np.log2(h[1:] / h[:-1])[positive]
    idx = np.cumsum(steps)
    decay = np.polyfit(idx, np.log2(inc[positive] / steps), 1)[0]
    if decay < -decay_tol:
        return Status.INCONCLUSIVE, fit
    if fit.slope > 0 and fit.slope > margin * fit.residual:
        return Status.DIVERGENT, fit
    if np.all(A > 0):
        pfit = _linfit(u, np.log(A), "power")
        if pfit.slope > 0 and pfit.slope > margin * pfit.residual:
            return Status.DIVERGENT, pfit
    return Status.INCONCLUSIVE, fit


def _linfit(u, y, model):
    slope, intercept = np.polyfit(u, y, 1)
    resid = y - (slope * u + intercept)
    return LogFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))), model)


# ---------------------------------------------------------------------------
# public operations


def integrate(f, mu, policy=None) -> IntegrationVerdict:
    """Integral of ``f`` against an atomic or density measure."""
    if isinstance(mu, AtomicComplexMeasure):
        if mu.is_finite:
            return _integrate_finite(f, mu)
        return _integrate_sequence(f, mu, policy or SeriesPolicy())
    if isinstance(mu, DensityComplexMeasure):
        return _integrate_density(f, mu, policy or mu.policy)
    raise TypeError(f"unsupported measure type {type(mu).__name__}")


def total_variation(mu):
    """Atom-wise absolute values (``|mu|``); densities map to ``|density|``."""
    if isinstance(mu, AtomicComplexMeasure):
        return mu.map_weights(np.abs, positive=True)
    if isinstance(mu, DensityComplexMeasure):
        return mu.abs()
    raise TypeError(f"unsupported measure type {type(mu).__name__}")


def integrability_test(f, mu, policy=None) -> IntegrationVerdict:
    """Integrate ``|f|`` against ``|mu|``; Converged means ``f`` is ``mu``-integrable."""
    return integrate(abs_function(f), total_variation(mu), policy)


def _integrate_finite(f, mu):
    if mu.weights.size == 0:
        z = np.zeros(1)
        return IntegrationVerdict(0j, Status.CONVERGED, z, z.astype(complex), z)
    vals = evaluate(f, mu.locations)
    terms = vals * mu.weights
    value = complex(terms.sum())
    a = float(np.abs(terms).sum())
    return IntegrationVerdict(value, Status.CONVERGED, np.array([float(mu.weights.size)]),
                              np.array([value]), np.array([a]))


def _integrate_sequence(f, mu, policy):
    n_max = policy.n_max or mu.n_max
    horizons, partials, abs_partials = [], [], []
    s, a, start, N = 0j, 0.0, 0, min(policy.first_horizon, n_max)
    while True:
        j = np.arange(start, N)
        if j.size:
            terms = evaluate(f, mu.locations_at(j)) * mu.weights_at(j)
            s += complex(terms.sum())
            a += float(np.abs(terms).sum())
        horizons.append(N)
        partials.append(s)
        abs_partials.append(a)
        if len(partials) >= 2 and _relative_change_ok(partials[-2], s, abs_partials[-2], a, policy.tol):
            return IntegrationVerdict(s, Status.CONVERGED, np.array(horizons, float),
                                      np.array(partials), np.array(abs_partials))
        if N >= n_max:
            break
        start, N = N, min(2 * N, n_max)
    status, fit = classify_divergence(horizons, abs_partials, policy.margin, policy.decay_tol)
    note = "" if status is Status.DIVERGENT else f"horizon {n_max} exhausted"
    return IntegrationVerdict(s, status, np.array(horizons, float), np.array(partials),
                              np.array(abs_partials), fit=fit, note=note)


def _integrate_density(f, mu, policy):
    width = mu.panel_width(policy)
    lo, hi = mu.support
    if mu.bounded:
        xs, ws = _panels(lo, hi, width, policy.nodes)
        terms = evaluate(f, xs) * mu.evaluate(xs) * ws
        value = complex(terms.sum())
        a = float(np.abs(terms).sum())
        xs2, ws2 = _panels(lo, hi, width, 2 * policy.nodes)
        terms2 = evaluate(f, xs2) * mu.evaluate(xs2) * ws2
        value2 = complex(terms2.sum())
        ok = abs(value2 - value) <= policy.tol * max(abs(value2), a, 1e-300) or a == 0.0
        status = Status.CONVERGED if ok else Status.INCONCLUSIVE
        return IntegrationVerdict(value2, status, np.array([hi - lo]), np.array([value, value2]),
                                  np.array([a, float(np.abs(terms2).sum())]))

    horizons = policy.horizons or default_horizons(mu.x_max, policy.doublings, policy.period)
    horizons = np.asarray(horizons, dtype=float)
    nh = horizons.size
    S = np.zeros(nh, dtype=complex)
    A = np.zeros(nh)
    S_ext = np.zeros(nh, dtype=complex)
    A_ext = np.zeros(nh)
    tails_ok = True
    unbounded_sides = 0
    power = getattr(f, "power", None)
    absolute = getattr(f, "absolute", False)
    for side in (1, -1):
        # side +1 covers [max(lo, 0), min(hi, T)], side -1 covers [max(lo, -T), min(hi, 0)]
        if side > 0:
            start, end = max(lo, 0.0), hi
        else:
            start, end = -min(hi, 0.0), -lo
        if start >= end:
            continue
        unbounded_sides += math.isinf(end)
        s_cum, a_cum, prev = 0j, 0.0, start
        s_side = np.zeros(nh, dtype=complex)
        a_side = np.zeros(nh)
        for i, T in enumerate(horizons):
            b = min(T, end)
            if b > prev:
                xs, ws = _panels(prev, b, width, policy.nodes)
                xs = side * xs
                terms = evaluate(f, xs) * mu.evaluate(xs) * ws
                s_cum += complex(terms.sum())
                a_cum += float(np.abs(terms).sum())
                prev = b
            s_side[i], a_side[i] = s_cum, a_cum
        S += s_side
        A += a_side
        s_tail = np.zeros(nh, dtype=complex)
        a_tail = np.zeros(nh)
        if math.isinf(end) and policy.tail_model:
            for i, T in enumerate(horizons):
                model = _tail_model_for(mu, power, T, side)
                ts = model.tail(power, absolute, T, side) if model is not None else None
                ta = model.tail(power, True, T, side) if model is not None else None
                if ts is None or ta is None:
                    tails_ok = False
                    break
                s_tail[i], a_tail[i] = ts, abs(ta)
        elif math.isinf(end):
            tails_ok = False
        S_ext += s_side + s_tail
        A_ext += a_side + a_tail

    extrapolated = S_ext if tails_ok else None
    if tails_ok and nh >= 2 and _relative_change_ok(S_ext[-2], S_ext[-1], A_ext[-2], A_ext[-1], policy.tol):
        return IntegrationVerdict(complex(S_ext[-1]), Status.CONVERGED, horizons, S, A,
                                  extrapolated=extrapolated, note="tail model applied")
    if not tails_ok and nh >= 2 and _relative_change_ok(S[-2], S[-1], A[-2], A[-1], policy.tol):
        return IntegrationVerdict(complex(S[-1]), Status.CONVERGED, horizons, S, A)
    # the fit is reported per unbounded half-line
    status, fit = classify_divergence(horizons, A / max(unbounded_sides, 1), policy.margin,
                                      policy.decay_tol)
    value = complex(S_ext[-1]) if tails_ok else complex(S[-1])
    return IntegrationVerdict(value, status, horizons, S, A, extrapolated=extrapolated, fit=fit)


def _tail_model_for(mu, power, T, side):
    if power is None:
        return None
    if mu.tail is not None:
        return mu.tail
    if mu.positive:
        return PowerLawTail.fit(mu, T, side)
    return None
