"""POVMs and positive form-valued measures on finite-dimensional model spaces.

Measures available:

* :class:`DiscretePOVM` -- finitely many effects ``E_i`` at real locations.
* :class:`SequencePOVM` -- effects indexed by ``j = 0, 1, ...`` from a generator.
* :class:`ScalarIdentityPOVM` -- ``E = mu * I`` for a positive scalar measure.
* :class:`DiagonalFormMeasure` -- ``E_{phi_n, phi_m} = delta_nm mu_n``.

The last three may have unbounded first moments; their scalar measures are
sequence measures whose integrals go through :func:`opint.measures.integrate`.
"""
import json
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from opint.errors import DecompositionFailure, DimensionMismatch, IoFailure
from opint.measures import N_MAX_DEFAULT, AtomicComplexMeasure, evaluate

TOL_PSD = 1e-10
TOL_HERM = 1e-12


@dataclass(frozen=True)
class ModelSpace:
    dimension: int
    labels: tuple = ()
    is_domain_truncation: bool = False

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ValueError("dimension must be a positive integer")
        labels = tuple(self.labels) or tuple(f"e{i}" for i in range(self.dimension))
        if len(labels) != self.dimension or len(set(labels)) != len(labels):
            raise ValueError("need one distinct label per basis vector")
        object.__setattr__(self, "labels", labels)

    def basis(self):
        return np.eye(self.dimension, dtype=complex)

    def check(self, v):
        v = np.asarray(v, dtype=complex)
        if v.shape != (self.dimension,):
            raise DimensionMismatch(f"vector of shape {v.shape} in a space of dimension {self.dimension}")
        return v


def _as_space(space_or_dim):
    return space_or_dim if isinstance(space_or_dim, ModelSpace) else ModelSpace(int(space_or_dim))


def hermitian_part(a):
    return 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))


@dataclass(frozen=True, eq=False)
class DiscretePOVM:
    """Effects ``E_i`` (array of shape ``(k, d, d)``) at real locations ``omega_i``.

    Effects must be Hermitian and positive to ``TOL_PSD``; they are rejected, never
    clipped.  ``normalized`` and ``projection_valued`` are checked when set.
    """

    space: ModelSpace
    locations: np.ndarray
    effects: np.ndarray
    labels: tuple = ()
    normalized: bool = False
    projection_valued: bool = False
    tol: float = TOL_PSD

    def __post_init__(self):
        space = _as_space(self.space)
        E = np.asarray(self.effects, dtype=complex)
        loc = np.asarray(self.locations, dtype=float)
        d = space.dimension
        if E.ndim != 3 or E.shape[1:] != (d, d):
            raise DimensionMismatch(f"effects of shape {E.shape} for dimension {d}")
        if loc.shape != (E.shape[0],):
            raise DimensionMismatch("need one location per effect")
        if not np.all(np.isfinite(E)) or not np.all(np.isfinite(loc)):
            raise ValueError("effects and locations must be finite")
        scale = max(1.0, float(np.abs(E).max(initial=0.0)))
        if np.abs(E - np.conj(np.swapaxes(E, 1, 2))).max(initial=0.0) > TOL_HERM * scale:
            raise ValueError("effects must be Hermitian")
        E = hermitian_part(E)
        if E.shape[0] and np.linalg.eigvalsh(E).min() < -self.tol:
            raise ValueError("effects must be positive semidefinite")
        labels = tuple(self.labels) or tuple(f"w{i}" for i in range(E.shape[0]))
        if len(labels) != E.shape[0]:
            raise ValueError("need one label per effect")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "effects", E)
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "labels", labels)
        report = validate_povm(self)
        if self.normalized and report.normalization_defect > self.tol:
            raise ValueError(f"normalization defect {report.normalization_defect:.3g}")
        if self.projection_valued and max(report.projection_defect, report.orthogonality_defect) > self.tol:
            raise ValueError("effects are not mutually orthogonal projections")

    @property
    def dimension(self):
        return self.space.dimension

    @property
    def size(self):
        return self.effects.shape[0]

    def total(self):
        return self.effects.sum(axis=0)


@dataclass(frozen=True)
class POVMReport:
    positivity_margin: float
    normalization_defect: float
    projection_defect: float
    orthogonality_defect: float
    hermiticity_defect: float

    @property
    def positive(self):
        return self.positivity_margin >= -TOL_PSD

    @property
    def normalized(self):
        return self.normalization_defect <= TOL_PSD

    @property
    def projection_valued(self):
        return max(self.projection_defect, self.orthogonality_defect) <= TOL_PSD


def _norm2(a):
    return float(np.linalg.norm(a, 2)) if a.size else 0.0


def validate_povm(E):
    """Positivity margin, normalization, projection and orthogonality defects (spectral norms)."""
    eff = np.asarray(E.effects)
    d = E.space.dimension
    if eff.shape[0] == 0:
        return POVMReport(0.0, 1.0, 0.0, 0.0, 0.0)
    margin = float(np.linalg.eigvalsh(hermitian_part(eff)).min())
    norm_def = _norm2(eff.sum(axis=0) - np.eye(d))
    proj = max(_norm2(e @ e - e) for e in eff)
    orth = 0.0
    for i in range(eff.shape[0]):
        for j in range(i + 1, eff.shape[0]):
            orth = max(orth, _norm2(eff[i] @ eff[j]))
    herm = max(_norm2(e - e.conj().T) for e in eff)
    return POVMReport(margin, norm_def, proj, orth, herm)


# ---------------------------------------------------------------------------
# measures with possibly unbounded moments


@dataclass(frozen=True, eq=False)
class SequencePOVM:
    """Effects ``effect_fn(j) -> (n, d, d)`` at ``location_fn(j)`` for ``j = 0, 1, ...``."""

    space: ModelSpace
    effect_fn: Callable
    location_fn: Callable
    n_max: int = N_MAX_DEFAULT

    def __post_init__(self):
        object.__setattr__(self, "space", _as_space(self.space))

    @property
    def dimension(self):
        return self.space.dimension

    def truncate(self, n):
        j = np.arange(n)
        return DiscretePOVM(self.space, self.location_fn(j), self.effect_fn(j))


@dataclass(frozen=True, eq=False)
class ScalarIdentityPOVM:
    """``E(X) = mu(X) I`` for a positive scalar measure ``mu``."""

    mu: AtomicComplexMeasure
    space: ModelSpace

    def __post_init__(self):
        object.__setattr__(self, "space", _as_space(self.space))
        if not self.mu.positive:
            raise ValueError("mu must be a positive measure")

    @property
    def dimension(self):
        return self.space.dimension


@dataclass(frozen=True, eq=False)
class DiagonalFormMeasure:
    """``E_{phi_n, phi_m} = delta_nm mu_n`` against an orthonormal basis.

    Either a finite list ``mus`` of positive measures, or point masses
    ``mu_n = sum_r mass_fn(n)[r] * delta_{location_fn(n)[r]}`` built with
    :meth:`point_masses` (``atoms`` point masses per index, the functions then
    return arrays with a trailing axis of that length).  With ``dim=None`` the
    point-mass family is infinite and vectors are coefficient functions
    ``n -> phi_n``.
    """

    mus: Optional[tuple] = None
    location_fn: Optional[Callable] = None
    mass_fn: Optional[Callable] = None
    dim: Optional[int] = None
    n_max: int = N_MAX_DEFAULT
    atoms: int = 1

    def __post_init__(self):
        if self.mus is not None:
            mus = tuple(self.mus)
            if not mus:
                raise ValueError("need at least one measure")
            if not all(m.positive for m in mus):
                raise ValueError("diagonal entries must be positive measures")
            object.__setattr__(self, "mus", mus)
            object.__setattr__(self, "dim", len(mus))
        elif self.location_fn is None or self.mass_fn is None:
            raise ValueError("either mus or location_fn and mass_fn are required")

    @classmethod
    def point_masses(cls, location_fn, mass_fn=None, dim=None, n_max=N_MAX_DEFAULT, atoms=1):
        if mass_fn is None:
            shape = (lambda n: np.shape(n)) if atoms == 1 else (lambda n: np.shape(n) + (atoms,))
            mass_fn = lambda n: np.ones(shape(n))
        return cls(location_fn=location_fn, mass_fn=mass_fn, dim=dim, n_max=n_max, atoms=atoms)

    def atoms_at(self, n):
        """Locations and masses of ``mu_n`` as arrays of shape ``(len(n), atoms)``."""
        n = np.asarray(n)
        shape = (n.size, self.atoms)
        locs = np.asarray(self.location_fn(n), dtype=float).reshape(shape)
        masses = np.asarray(self.mass_fn(n), dtype=float).reshape(shape)
        if np.any(masses < 0):
            raise ValueError("point masses must be nonnegative")
        return locs, masses

    @property
    def infinite(self):
        return self.dim is None

    @property
    def space(self):
        if self.infinite:
            raise ValueError("infinite family has no finite model space; truncate first")
        return ModelSpace(self.dim, is_domain_truncation=True)

    @property
    def dimension(self):
        return self.dim

    def truncate(self, n):
        if self.mus is not None:
            return DiagonalFormMeasure(mus=self.mus[:n])
        return DiagonalFormMeasure(location_fn=self.location_fn, mass_fn=self.mass_fn, dim=int(n),
                                   atoms=self.atoms)

    def entry(self, n, m):
        """Scalar measure for the pair ``(phi_n, phi_m)``."""
        if n != m:
            return AtomicComplexMeasure.finite([], [], positive=True)
        if self.mus is not None:
            return self.mus[n]
        locs, masses = self.atoms_at(np.array([n]))
        return AtomicComplexMeasure.finite(locs[0], masses[0], positive=True)

    def diagonal_values(self, f, n, absolute=False):
        """``f_m = int f d mu_m`` (or ``int |f| d mu_m``) for ``m = 0..n-1``; point masses only."""
        locs, masses = self.atoms_at(np.arange(n))
        values = evaluate(f, locs)
        if absolute:
            values = np.abs(values)
        return (values * masses).sum(axis=1)


# ---------------------------------------------------------------------------
# scalar and vector measures


def _vec(space, v):
    return space.check(v)


def scalar_measure(E, psi, phi):
    """``X -> <psi, E(X) phi>`` as an atomic complex measure (antilinear in ``psi``)."""
    if isinstance(E, DiscretePOVM):
        psi, phi = _vec(E.space, psi), _vec(E.space, phi)
        w = np.einsum("i,kij,j->k", np.conj(psi), E.effects, phi)
        return AtomicComplexMeasure.finite(E.locations, w, labels=E.labels)
    if isinstance(E, SequencePOVM):
        psi, phi = _vec(E.space, psi), _vec(E.space, phi)
        fn = E.effect_fn
        return AtomicComplexMeasure.sequence(
            lambda j: np.einsum("i,kij,j->k", np.conj(psi), fn(j), phi),
            E.location_fn, n_max=E.n_max)
    if isinstance(E, ScalarIdentityPOVM):
        psi, phi = _vec(E.space, psi), _vec(E.space, phi)
        return E.mu.scaled(complex(np.vdot(psi, phi)))
    if isinstance(E, DiagonalFormMeasure):
        return _diagonal_scalar_measure(E, psi, phi)
    raise TypeError(f"unsupported measure type {type(E).__name__}")


def _diagonal_scalar_measure(E, psi, phi):
    if E.infinite:
        if not (callable(psi) and callable(phi)):
            raise DimensionMismatch("infinite diagonal family needs coefficient functions")
        a = E.atoms

        def weight_fn(J):
            n, r = np.divmod(np.asarray(J), a)
            _, masses = E.atoms_at(n)
            return np.conj(psi(n)) * phi(n) * masses[np.arange(n.size), r].reshape(n.shape)

        def location_fn(J):
            n, r = np.divmod(np.asarray(J), a)
            locs, _ = E.atoms_at(n)
            return locs[np.arange(n.size), r].reshape(n.shape)

        return AtomicComplexMeasure.sequence(weight_fn, location_fn, n_max=E.n_max * a,
                                             positive=psi is phi)
    psi, phi = _vec(E.space, psi), _vec(E.space, phi)
    c = np.conj(psi) * phi
    if E.mus is not None:
        return AtomicComplexMeasure.combine(c, E.mus)
    locs, masses = E.atoms_at(np.arange(E.dim))
    w = (c[:, None] * masses).ravel()
    locs = locs.ravel()
    uniq, inv = np.unique(locs, return_inverse=True)
    if uniq.size == locs.size:
        order = np.argsort(locs, kind="stable")
        return AtomicComplexMeasure.finite(locs[order], w[order])
    merged = np.zeros(uniq.size, dtype=complex)
    np.add.at(merged, inv, w)
    return AtomicComplexMeasure.finite(uniq, merged)


def vector_measure(E, phi):
    """Vectors ``E_i phi`` (rows of the returned ``(k, d)`` array)."""
    if not isinstance(E, DiscretePOVM):
        raise TypeError("vector measures are available for discrete POVMs")
    phi = _vec(E.space, phi)
    return E.effects @ phi


def multiplier_vector_measure(g, phi):
    """``M({n}) phi = g_n phi_n e_n`` on a truncation of ``l2``; rows are the atom values."""
    g = np.asarray(g, dtype=complex)
    phi = np.asarray(phi, dtype=complex)
    if g.shape != phi.shape:
        raise DimensionMismatch("g and phi must have the same length")
    return np.diag(g * phi)


@dataclass(frozen=True)
class ScatteringReport:
    max_offdiagonal: float
    lam: np.ndarray
    parseval_defect: Optional[float] = None

    @property
    def orthogonal(self):
        scale = max(1.0, float(self.lam.max(initial=0.0)))
        return self.max_offdiagonal <= 1e-12 * scale


def orthogonally_scattered_check(vectors, f_values=None):
    """Pairings ``<mu(X_i), mu(X_j)>`` and ``lambda(X_i) = ||mu(X_i)||**2``.

    With ``f_values`` also reports ``| ||sum f_i mu(X_i)||**2 - sum |f_i|**2 lambda_i |``.
    """
    mu = np.asarray(vectors, dtype=complex)
    gram = np.conj(mu) @ mu.T
    lam = np.real(np.diag(gram)).copy()
    off = gram - np.diag(np.diag(gram))
    max_off = float(np.abs(off).max(initial=0.0))
    defect = None
    if f_values is not None:
        f = np.asarray(f_values, dtype=complex)
        lhs = float(np.linalg.norm(f @ mu) ** 2)
        rhs = float(np.sum(np.abs(f) ** 2 * lam))
        defect = abs(lhs - rhs)
    return ScatteringReport(max_off, lam, defect)


def bounded_integral(f, E):
    """``sum_i f(omega_i) E_i``."""
    values = evaluate(f, E.locations)
    return np.einsum("k,kij->ij", values, E.effects)


# ---------------------------------------------------------------------------
# Naimark dilation


@dataclass(frozen=True, eq=False)
class NaimarkDilation:
    """``E_i = V* F_i V`` with ``F_i`` the coordinate projection on ``blocks[i]``."""

    V: np.ndarray
    blocks: tuple
    minimal: bool = True

    @property
    def dilation_dim(self):
        return self.V.shape[0]

    def projection(self, i):
        P = np.zeros((self.dilation_dim, self.dilation_dim))
        start, stop = self.blocks[i]
        P[start:stop, start:stop] = np.eye(stop - start)
        return P

    @property
    def F(self):
        return [self.projection(i) for i in range(len(self.blocks))]

    def spectral_integral(self, values):
        """``sum_i f_i F_i`` as a diagonal matrix on the dilation space."""
        diag = np.zeros(self.dilation_dim, dtype=complex)
        for v, (start, stop) in zip(values, self.blocks):
            diag[start:stop] = v
        return np.diag(diag)

    def compress(self, values):
        """``V* (sum_i f_i F_i) V``."""
        diag = np.zeros(self.dilation_dim, dtype=complex)
        for v, (start, stop) in zip(values, self.blocks):
            diag[start:stop] = v
        return self.V.conj().T @ (diag[:, None] * self.V)


def naimark_dilate(E):
    """Minimal Naimark dilation of a discrete POVM by per-effect eigendecomposition.

    Block ``i`` of ``V`` is ``diag(sqrt(lam)) U*`` over the eigenpairs of ``E_i`` above
    the rank threshold ``max(d * eps, RANK_RTOL) * lam_max``; the dilation dimension is the sum of ranks.
    """
    d = E.dimension
    rows, blocks, start = [], [], 0
    for e in E.effects:
        try:
            lam, U = np.linalg.eigh(e)
        except np.linalg.LinAlgError as exc:
            raise DecompositionFailure(str(exc)) from exc
        if not np.all(np.isfinite(lam)):
            raise DecompositionFailure("non-finite eigenvalues")
        keep = _rank_mask(lam, d)
        block = np.sqrt(lam[keep])[:, None] * U[:, keep].conj().T
        rows.append(block)
        blocks.append((start, start + block.shape[0]))
        start += block.shape[0]
    V = np.vstack(rows) if start else np.zeros((0, d), dtype=complex)
    return NaimarkDilation(V, tuple(blocks), minimal=True)


RANK_RTOL = 1e-12


def _rank_mask(lam, d):
    # singular values of a PSD matrix are its eigenvalues; the floor RANK_RTOL
    # keeps rounding noise in exact null spaces out of the rank
    top = float(np.abs(lam).max(initial=0.0))
    if top == 0.0:
        return np.zeros(lam.shape, bool)
    return lam > max(d * np.finfo(float).eps, RANK_RTOL) * top


def effect_ranks(E):
    return [int(_rank_mask(np.linalg.eigvalsh(e), E.dimension).sum()) for e in E.effects]


@dataclass(frozen=True)
class DilationReport:
    isometry_defect: float
    compression_defect: float
    orthogonality_defect: float
    completeness_defect: float
    rank_sum: int
    dilation_dim: int

    @property
    def minimal(self):
        return self.rank_sum == self.dilation_dim


def verify_dilation(E, dil, normalized=True):
    V = dil.V
    d = E.dimension
    iso = _norm2(V.conj().T @ V - np.eye(d)) if normalized else 0.0
    comp = max(_norm2(dil.compress(np.eye(E.size)[i]) - E.effects[i]) for i in range(E.size))
    F = dil.F
    orth = 0.0
    for i, Fi in enumerate(F):
        for j, Fj in enumerate(F):
            target = Fi if i == j else np.zeros_like(Fi)
            orth = max(orth, _norm2(Fi @ Fj - target))
    complete = _norm2(sum(F) - np.eye(dil.dilation_dim)) if F else 0.0
    return DilationReport(iso, comp, orth, complete, sum(effect_ranks(E)), dil.dilation_dim)


def dilation_integral_check(f, E, dil):
    """``|| int f dE - V* (int f dF) V ||`` in spectral norm."""
    values = evaluate(f, E.locations)
    return _norm2(bounded_integral(f, E) - dil.compress(values))


# ---------------------------------------------------------------------------
# random generation


def random_povm(rng, d, k, locations=None, full_rank=False):
    """Seeded POVM: ``E_i = S^{-1/2} A_i* A_i S^{-1/2}`` with Gaussian ``A_i``.

    Unless ``full_rank`` is set, ``A_i`` has a random number of rows so effects
    have random ranks.
    """
    mats = []
    ranks = [d if full_rank else int(rng.integers(1, d + 1)) for _ in range(k)]
    if sum(ranks) < d:
        ranks[-1] = d
    for r in ranks:
        A = rng.standard_normal((r, d)) + 1j * rng.standard_normal((r, d))
        mats.append(A.conj().T @ A)
    S = sum(mats)
    lam, U = np.linalg.eigh(S)
    root = U @ np.diag(lam**-0.5) @ U.conj().T
    effects = hermitian_part(np.array([root @ m @ root for m in mats]))
    if locations is None:
        locations = np.sort(rng.uniform(-2.0, 2.0, size=k))
    return DiscretePOVM(ModelSpace(d), locations, effects, normalized=True)


def random_hermitian(rng, d):
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (G + G.conj().T)


def spectral_measure(H):
    """PVM of eigenprojections of a Hermitian matrix, located at its eigenvalues."""
    H = np.asarray(H, dtype=complex)
    lam, U = np.linalg.eigh(hermitian_part(H))
    effects = np.einsum("ik,jk->kij", U, U.conj())
    return DiscretePOVM(ModelSpace(H.shape[0]), lam, hermitian_part(effects), normalized=True,
                        projection_valued=True)


def random_pvm(rng, d):
    return spectral_measure(random_hermitian(rng, d))


def random_vector(rng, d, normalize=True):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v) if normalize else v


# ---------------------------------------------------------------------------
# JSON interchange


def _matrix_to_pairs(a):
    return [[float(z.real), float(z.imag)] for z in np.asarray(a).ravel()]


def _pairs_to_matrix(pairs, shape):
    arr = np.asarray(pairs, dtype=float)
    if arr.shape != (int(np.prod(shape)), 2):
        raise ValueError(f"expected {int(np.prod(shape))} [re, im] pairs")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(shape)


def povm_to_dict(E):
    d = E.dimension
    return {
        "dimension": d,
        "outcomes": [
            {"label": lab, "location": float(loc), "effect": _matrix_to_pairs(eff)}
            for lab, loc, eff in zip(E.labels, E.locations, E.effects)
        ],
    }


def povm_from_dict(data, normalized=False):
    d = int(data["dimension"])
    outcomes = data["outcomes"]
    effects = np.array([_pairs_to_matrix(o["effect"], (d, d)) for o in outcomes]).reshape(-1, d, d)
    return DiscretePOVM(ModelSpace(d), [o["location"] for o in outcomes], effects,
                        labels=tuple(o["label"] for o in outcomes), normalized=normalized)


def dilation_to_dict(dil, E=None):
    labels = E.labels if E is not None else tuple(f"w{i}" for i in range(len(dil.blocks)))
    return {
        "dimension": dil.dilation_dim,
        "source_dimension": int(dil.V.shape[1]),
        "minimal": bool(dil.minimal),
        "V": {"rows": dil.V.shape[0], "cols": dil.V.shape[1], "entries": _matrix_to_pairs(dil.V)},
        "outcomes": [
            {"label": lab, "block": [int(a), int(b)], "projection": _matrix_to_pairs(dil.projection(i))}
            for i, (lab, (a, b)) in enumerate(zip(labels, dil.blocks))
        ],
    }


def dilation_from_dict(data):
    v = data["V"]
    V = _pairs_to_matrix(v["entries"], (v["rows"], v["cols"]))
    blocks = tuple((o["block"][0], o["block"][1]) for o in data["outcomes"])
    return NaimarkDilation(V, blocks, bool(data.get("minimal", True)))


def save_json(obj, path):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=1, sort_keys=True)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
