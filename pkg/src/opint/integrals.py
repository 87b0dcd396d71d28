"""Operator integrals of scalar functions against POVMs and form measures.

Three operators are built on a finite truncation, each from its own domain:

* ``Tilde`` -- vectors with ``int |f|**2 dE_{phi,phi} < inf``; action
  ``int f dE_phi`` through the vector measure.
* ``Strong`` -- vectors with ``int |f| d|E_{psi,phi}| < inf`` for every ``psi``;
  action by Riesz representation against the basis.
* ``WeakSym`` -- a separating subspace ``D_s`` with ``D_s x D_s`` inside the
  integrability set; action from the coefficient columns
  ``c_nm = int f dE_{phi_n, phi_m}``.  ``MaxWeakSym`` takes ``D_s`` to be the
  form domain ``{phi : int |f| dE_{phi,phi} < inf}``.

Domain membership is three-valued.  A closed-form rule is used when the
measure has one (``E = mu I``, diagonal families); the numeric series test is
then attached as corroboration.
"""
import enum
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from opint.errors import DimensionMismatch, DomainViolation, SeparatingSubspaceTooSmall
from opint.measures import (
    Status,
    abs_function,
    abs_squared_function,
    evaluate,
    integrability_test,
    integrate,
    total_variation,
)
from opint.povm import (
    DiagonalFormMeasure,
    DiscretePOVM,
    ScalarIdentityPOVM,
    SequencePOVM,
    bounded_integral,
    scalar_measure,
)

ACTION_TOL = 1e-10


class DomainKind(str, enum.Enum):
    SQUARE_INTEGRABILITY = "SquareIntegrability"
    STRONG = "Strong"
    FORM_DOMAIN = "FormDomain"
    WEAK_SYM = "WeakSym"


class Verdict(str, enum.Enum):
    MEMBER = "Member"
    NON_MEMBER = "NonMember"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class DomainCertificate:
    vector_id: str
    kind: DomainKind
    verdict: Verdict
    evidence: tuple = ()
    rule: str = "series-test"
    corroboration: tuple = ()

    def __post_init__(self):
        statuses = [v.status for v in self.evidence]
        if self.verdict is Verdict.MEMBER and any(s is not Status.CONVERGED for s in statuses):
            raise ValueError("a Member certificate needs only Converged evidence")
        if self.verdict is Verdict.NON_MEMBER and Status.DIVERGENT not in statuses:
            raise ValueError("a NonMember certificate needs Divergent evidence")

    @property
    def member(self):
        return self.verdict is Verdict.MEMBER

    def to_dict(self):
        return {
            "vector": self.vector_id,
            "kind": self.kind.value,
            "verdict": self.verdict.value,
            "rule": self.rule,
            "evidence": [_verdict_dict(v) for v in self.evidence],
            "corroboration": [_verdict_dict(v) for v in self.corroboration],
        }


def _verdict_dict(v):
    return {
        "status": v.status.value,
        "value": [float(v.value.real), float(v.value.imag)],
        "horizons": [float(h) for h in v.horizons],
        "slope": None if v.fit is None else v.fit.slope,
    }


def _from_evidence(vector_id, kind, evidence, rule="series-test", corroboration=()):
    evidence = tuple(evidence)
    statuses = [v.status for v in evidence]
    if Status.DIVERGENT in statuses:
        verdict = Verdict.NON_MEMBER
    elif all(s is Status.CONVERGED for s in statuses):
        verdict = Verdict.MEMBER
    else:
        verdict = Verdict.INCONCLUSIVE
    return DomainCertificate(vector_id, kind, verdict, evidence, rule, tuple(corroboration))


def _is_zero(phi):
    return not callable(phi) and not np.any(np.asarray(phi))


def _vid(phi, vector_id):
    if vector_id is not None:
        return str(vector_id)
    if callable(phi):
        return getattr(phi, "__name__", "sequence")
    v = np.asarray(phi)
    nz = np.flatnonzero(v)
    if nz.size == 1 and v[nz[0]] == 1:
        return f"e{nz[0]}"
    return "vector"


# ---------------------------------------------------------------------------
# domain certificates


def sq_domain_member(f, E, phi, vector_id=None, policy=None):
    """Is ``int |f|**2 dE_{phi,phi}`` finite."""
    vid = _vid(phi, vector_id)
    kind = DomainKind.SQUARE_INTEGRABILITY
    if _is_zero(phi):
        return DomainCertificate(vid, kind, Verdict.MEMBER, (), "zero-vector")
    g = abs_squared_function(f)
    if isinstance(E, ScalarIdentityPOVM):
        # E_{phi,phi} = ||phi||**2 mu: membership is integrability of |f|**2 against mu
        rule_v = integrability_test(g, E.mu, policy)
        return _from_evidence(vid, kind, [rule_v], "scalar-identity",
                              [integrability_test(g, scalar_measure(E, phi, phi), policy)])
    return _from_evidence(vid, kind, [integrability_test(g, scalar_measure(E, phi, phi), policy)])


def form_domain_member(f, E, phi, vector_id=None, policy=None):
    """Is ``int |f| dE_{phi,phi}`` finite."""
    vid = _vid(phi, vector_id)
    kind = DomainKind.FORM_DOMAIN
    if _is_zero(phi):
        return DomainCertificate(vid, kind, Verdict.MEMBER, (), "zero-vector")
    if isinstance(E, ScalarIdentityPOVM):
        return _from_evidence(vid, kind, [integrability_test(f, E.mu, policy)], "scalar-identity",
                              [integrability_test(f, scalar_measure(E, phi, phi), policy)])
    return _from_evidence(vid, kind, [integrability_test(f, scalar_measure(E, phi, phi), policy)])


def strong_domain_member(f, E, phi, vector_id=None, rng=None, probes=4, policy=None):
    """Is ``int |f| d|E_{psi,phi}|`` finite for every ``psi``.

    * ``E = mu I``: exactly when ``f`` is ``mu``-integrable.
    * diagonal point masses: ``sum_m |psi_m| |f_m phi_m| < inf`` for all ``psi`` in
      ``l2`` exactly when ``sum_m |f_m phi_m|**2 < inf``.
    * otherwise (finite model space): the basis vectors decide, since
      ``|E_{psi,phi}| <= sum_n |psi_n| |E_{e_n,phi}|``; random unit ``psi`` are
      attached as a uniformity probe.
    """
    vid = _vid(phi, vector_id)
    kind = DomainKind.STRONG
    if _is_zero(phi):
        return DomainCertificate(vid, kind, Verdict.MEMBER, (), "zero-vector")
    if isinstance(E, ScalarIdentityPOVM):
        return _from_evidence(vid, kind, [integrability_test(f, E.mu, policy)], "scalar-identity")
    if isinstance(E, DiagonalFormMeasure) and E.mus is None:
        return _diagonal_strong(f, E, phi, vid, policy)
    rng = rng if rng is not None else np.random.default_rng(0)
    d = E.dimension
    basis = [integrability_test(f, scalar_measure(E, e, phi), policy) for e in np.eye(d, dtype=complex)]
    probe = []
    for _ in range(probes):
        psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        probe.append(integrability_test(f, scalar_measure(E, psi / np.linalg.norm(psi), phi)))
    return _from_evidence(vid, kind, basis, "basis-triangle", probe)


def _diagonal_strong(f, E, phi, vid, policy=None):
    from opint.measures import AtomicComplexMeasure

    absf = abs_function(f)

    def weights(n, coeffs):
        locs, masses = E.atoms_at(n)
        return np.abs((evaluate(absf, locs) * masses).sum(axis=1) * coeffs) ** 2

    if E.infinite:
        mu = AtomicComplexMeasure.sequence(lambda j: weights(np.asarray(j), phi(np.asarray(j))),
                                           lambda j: np.asarray(j, dtype=float), n_max=E.n_max,
                                           positive=True)
    else:
        j = np.arange(E.dim)
        mu = AtomicComplexMeasure.finite(j, weights(j, np.asarray(phi)), positive=True)
    verdict = integrate(lambda x: np.ones_like(x), mu, policy)
    return _from_evidence(vid, DomainKind.STRONG, [verdict], "diagonal-l2-duality")


# ---------------------------------------------------------------------------
# operators


@dataclass(frozen=True, eq=False)
class OperatorIntegral:
    """Operator given by its images ``Y = L B`` of an orthonormal certified basis ``B``."""

    kind: str
    basis: np.ndarray
    images: np.ndarray
    symmetric: bool = False
    certificates: tuple = ()
    excluded: tuple = ()
    note: str = ""

    @property
    def rank(self):
        return self.basis.shape[1]

    def coordinates(self, phi, tol=ACTION_TOL):
        phi = np.asarray(phi, dtype=complex)
        if phi.shape != (self.basis.shape[0],):
            raise DimensionMismatch("vector dimension does not match the operator")
        c = self.basis.conj().T @ phi
        if np.linalg.norm(phi - self.basis @ c) > tol * max(1.0, np.linalg.norm(phi)):
            raise DomainViolation(f"vector is outside the certified domain of the {self.kind} integral")
        return c

    def contains(self, phi, tol=ACTION_TOL):
        try:
            self.coordinates(phi, tol)
        except DomainViolation:
            return False
        return True

    def apply(self, phi):
        return self.images @ self.coordinates(phi)

    def block(self):
        """Matrix of the operator compressed to its certified domain."""
        return self.basis.conj().T @ self.images

    def full_matrix(self):
        """Ambient matrix ``Y B*`` (zero on the complement of the domain)."""
        return self.images @ self.basis.conj().T

    def to_dict(self):
        return {
            "kind": self.kind,
            "symmetric": bool(self.symmetric),
            "rank": int(self.rank),
            "certificates": [c.to_dict() for c in self.certificates],
            "excluded": list(self.excluded),
            "block": [[[float(z.real), float(z.imag)] for z in row] for row in self.block()],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _basis_vectors(E, basis):
    d = E.dimension
    if basis is None:
        return np.eye(d, dtype=complex)
    B = np.asarray(basis, dtype=complex)
    if B.ndim == 1:
        B = B[:, None]
    if B.shape[0] != d:
        raise DimensionMismatch("basis vectors must be columns of length d")
    return B


def _orthonormal(B):
    if B.shape[1] == 0:
        return B
    Q, R = np.linalg.qr(B)
    keep = np.abs(np.diag(R)) > 1e-12 * max(1.0, np.abs(R).max())
    return Q[:, keep]


def _certify(B, test, f, E):
    certs, keep, excluded = [], [], []
    for i in range(B.shape[1]):
        cert = test(f, E, B[:, i], vector_id=f"b{i}")
        certs.append(cert)
        (keep if cert.member else excluded).append(i)
    return certs, keep, excluded


def _expected_value(f, E, psi, phi):
    v = integrate(f, scalar_measure(E, psi, phi))
    if v.status is not Status.CONVERGED:
        raise DomainViolation(f"integral is {v.status.value}")
    return v.value


def _gram(f, E, B):
    """``G[n, m] = int f dE_{b_n, b_m}``."""
    if isinstance(E, DiscretePOVM):
        values = evaluate(f, E.locations)
        return B.conj().T @ np.einsum("k,kij->ij", values, E.effects) @ B
    if isinstance(E, ScalarIdentityPOVM):
        c = integrate(f, E.mu)
        if c.status is not Status.CONVERGED:
            raise DomainViolation(f"integral against mu is {c.status.value}")
        return c.value * (B.conj().T @ B)
    if isinstance(E, DiagonalFormMeasure):
        fn = _diagonal_values(f, E)
        return B.conj().T @ (fn[:, None] * B)
    r = B.shape[1]
    G = np.empty((r, r), dtype=complex)
    for n in range(r):
        for m in range(r):
            G[n, m] = _expected_value(f, E, B[:, n], B[:, m])
    return G


def _diagonal_values(f, E):
    """``f_n = int f d mu_n`` for a truncated diagonal family."""
    if E.mus is None:
        return E.diagonal_values(f, E.dim)
    out = np.empty(E.dim, dtype=complex)
    for n, mu in enumerate(E.mus):
        v = integrate(f, mu)
        if v.status is not Status.CONVERGED:
            raise DomainViolation(f"f_{n} is {v.status.value}")
        out[n] = v.value
    return out


def tilde_integral(f, E, basis=None, dilation=None):
    """``L~(f, E)`` on the square-integrability certified part of ``basis``.

    With a dilation the action is also computed as ``V* L~(f, F) V`` and the
    largest difference is returned in ``note``.
    """
    B = _basis_vectors(E, basis)
    certs, keep, excluded = _certify(B, sq_domain_member, f, E)
    Q = _orthonormal(B[:, keep])
    if isinstance(E, DiscretePOVM):
        A = bounded_integral(f, E)
        images = A @ Q
    else:
        images = Q @ _gram(f, E, Q) if Q.shape[1] else Q
    note = ""
    if dilation is not None and isinstance(E, DiscretePOVM):
        via = dilation.compress(evaluate(f, E.locations)) @ Q
        note = f"dilation defect {float(np.abs(via - images).max(initial=0.0)):.3e}"
    return OperatorIntegral("Tilde", Q, images, _is_real(f, E), tuple(certs), tuple(excluded), note)


def strong_integral(f, E, basis=None):
    """``L(f, E)``: ``<e_n | L phi> = int f dE_{e_n, phi}`` on strong-certified vectors."""
    B = _basis_vectors(E, basis)
    certs, keep, excluded = _certify(B, strong_domain_member, f, E)
    Q = _orthonormal(B[:, keep])
    d = E.dimension
    if isinstance(E, DiscretePOVM):
        images = bounded_integral(f, E) @ Q
    elif isinstance(E, ScalarIdentityPOVM):
        c = integrate(f, E.mu).value
        images = c * Q
    elif isinstance(E, DiagonalFormMeasure):
        images = _diagonal_values(f, E)[:, None] * Q
    else:
        eye = np.eye(d, dtype=complex)
        images = np.array([[_expected_value(f, E, eye[n], Q[:, m]) for m in range(Q.shape[1])]
                           for n in range(d)], dtype=complex).reshape(d, Q.shape[1])
    return OperatorIntegral("Strong", Q, images, _is_real(f, E), tuple(certs), tuple(excluded))


def weak_sym_integral(f, E, ds_basis, kind="WeakSym", certificates=None):
    """Symmetric weak integral determined by ``D_s = span(ds_basis)``.

    ``D_s x D_s`` must lie in the integrability set; this is certified by
    form-domain membership of every basis vector.  On a finite truncation each
    coefficient column ``c(m)`` is finite, so the domain is all of ``D_s``.
    """
    B = _basis_vectors(E, ds_basis)
    if B.shape[1] == 0:
        raise SeparatingSubspaceTooSmall("D_s basis is empty")
    if certificates is None:
        certificates = [form_domain_member(f, E, B[:, i], vector_id=f"b{i}") for i in range(B.shape[1])]
    bad = [c.vector_id for c in certificates if not c.member]
    if bad:
        raise DomainViolation(f"D_s x D_s is not inside the integrability set (vectors {bad})")
    Q = _orthonormal(B)
    C = _gram(f, E, Q)
    norms = np.linalg.norm(C, axis=0)
    if not np.all(np.isfinite(norms)):
        raise DomainViolation("coefficient column is not square-summable")
    images = Q @ C
    symmetric = _is_real(f, E)
    if symmetric:
        scale = max(1.0, float(np.abs(C).max(initial=0.0)))
        if np.abs(C - C.conj().T).max(initial=0.0) > ACTION_TOL * scale:
            raise DomainViolation("weak integral of a real function is not symmetric")
    return OperatorIntegral(kind, Q, images, symmetric, tuple(certificates))


def max_weak_sym_integral(f, E, candidates=None):
    """Weak integral with ``D_s`` the form-domain certified part of ``candidates``."""
    B = _basis_vectors(E, candidates)
    certs, keep, excluded = _certify(B, form_domain_member, f, E)
    if not keep:
        raise SeparatingSubspaceTooSmall("no candidate vector lies in the form domain")
    op = weak_sym_integral(f, E, B[:, keep], kind="MaxWeakSym",
                           certificates=[certs[i] for i in keep])
    return OperatorIntegral(op.kind, op.basis, op.images, op.symmetric, tuple(certs), tuple(excluded))


def _is_real(f, E):
    locs = _sample_locations(E)
    if locs is None:
        return False
    return bool(np.all(np.abs(evaluate(f, locs).imag) == 0))


def _sample_locations(E):
    if isinstance(E, DiscretePOVM):
        return E.locations
    if isinstance(E, ScalarIdentityPOVM):
        mu = E.mu
        return mu.locations if mu.is_finite else mu.locations_at(np.arange(1024))
    if isinstance(E, DiagonalFormMeasure):
        if E.mus is not None:
            return np.concatenate([m.locations if m.is_finite else m.locations_at(np.arange(1024))
                                   for m in E.mus])
        return E.atoms_at(np.arange(E.dim or 1024))[0].ravel()
    if isinstance(E, SequencePOVM):
        return E.location_fn(np.arange(1024))
    return None


# ---------------------------------------------------------------------------
# forms


def decompose_function(f):
    """``f = f1 - f2 + i (f3 - f4)`` with nonnegative parts of disjoint support."""

    def part(g):
        return lambda x: np.maximum(g(evaluate(f, x)), 0.0)

    return (part(lambda v: v.real), part(lambda v: -v.real),
            part(lambda v: v.imag), part(lambda v: -v.imag))


def form_integral(f, E, psi, phi, check=True):
    """``int f dE_{psi,phi}`` for ``psi``, ``phi`` in the form domain of ``f``."""
    if check:
        for name, v in (("psi", psi), ("phi", phi)):
            cert = form_domain_member(f, E, v, vector_id=name)
            if not cert.member:
                raise DomainViolation(f"{name} is not certified in the form domain ({cert.verdict.value})")
    return _expected_value(f, E, psi, phi)


@dataclass(frozen=True, eq=False)
class QuadraticFormRecord:
    """Sesquilinear form ``q(psi, phi) = psi* G phi`` on the span of ``basis``.

    ``G`` is the Gram matrix in the coordinates of the orthonormal ``basis``.
    """

    basis: np.ndarray
    gram: np.ndarray
    positive: bool = False

    def __call__(self, psi, phi):
        return complex(self._coords(psi).conj() @ self.gram @ self._coords(phi))

    def _coords(self, v):
        v = np.asarray(v, dtype=complex)
        c = self.basis.conj().T @ v
        if np.linalg.norm(v - self.basis @ c) > ACTION_TOL * max(1.0, np.linalg.norm(v)):
            raise DomainViolation("vector is outside the form's domain")
        return c

    @property
    def symmetric(self):
        scale = max(1.0, float(np.abs(self.gram).max(initial=0.0)))
        return bool(np.abs(self.gram - self.gram.conj().T).max(initial=0.0) <= 1e-12 * scale)

    def adjoint(self):
        """``q*(psi, phi) = conj(q(phi, psi))``."""
        return QuadraticFormRecord(self.basis, self.gram.conj().T, self.positive)

    def real_part(self):
        return QuadraticFormRecord(self.basis, 0.5 * (self.gram + self.gram.conj().T), self.positive)

    def imag_part(self):
        return QuadraticFormRecord(self.basis, (self.gram - self.gram.conj().T) / 2j)

    def operator(self):
        """Matrix of the associated operator on the ambient space."""
        return self.basis @ self.gram @ self.basis.conj().T


def form_record(f, E, basis=None):
    B = _basis_vectors(E, basis)
    certs, keep, _ = _certify(B, form_domain_member, f, E)
    Q = _orthonormal(B[:, keep])
    G = _gram(f, E, Q)
    locs = _sample_locations(E)
    positive = locs is not None and bool(np.all(evaluate(f, locs).real >= 0)) and _is_real(f, E)
    return QuadraticFormRecord(Q, G, positive)


def variance_form(E, psi, phi):
    """``int x**2 dE_{psi,phi} - <E~[1] psi | E~[1] phi>``."""
    sq = lambda x: np.asarray(x, dtype=float) ** 2
    ident = lambda x: np.asarray(x, dtype=float)
    for name, v in (("psi", psi), ("phi", phi)):
        cert = sq_domain_member(ident, E, v, vector_id=name)
        if not cert.member:
            raise DomainViolation(f"{name} is not certified in the domain of the first moment")
    second = _expected_value(sq, E, psi, phi)
    if isinstance(E, DiscretePOVM):
        A = bounded_integral(ident, E)
        return complex(second - np.vdot(A @ psi, A @ phi))
    if isinstance(E, ScalarIdentityPOVM):
        mean = integrate(ident, E.mu).value
        return complex(second - abs(mean) ** 2 * np.vdot(psi, phi))
    op = tilde_integral(ident, E, np.column_stack([psi, phi]))
    return complex(second - np.vdot(op.apply(psi), op.apply(phi)))


def kato_operator_from_form(A, q=None, basis=None):
    """``T = A* A``; with a form ``q`` also returns the largest ``|q(b_i, b_j) - <b_i|T b_j>|``."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise DimensionMismatch("A must be a matrix")
    T = A.conj().T @ A
    T = 0.5 * (T + T.conj().T)
    if q is None:
        return T
    B = np.eye(A.shape[1], dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
    if B.shape[0] != A.shape[1]:
        raise DimensionMismatch("basis does not match the columns of A")
    defect = 0.0
    for i in range(B.shape[1]):
        for j in range(B.shape[1]):
            defect = max(defect, abs(q(B[:, i], B[:, j]) - np.vdot(B[:, i], T @ B[:, j])))
    return T, defect


def dilation_root(f, E, dilation):
    """``A = L~(sqrt f, F) V`` on the dilation space, for ``f >= 0``."""
    values = evaluate(f, E.locations)
    if np.any(values.real < 0) or np.any(values.imag != 0):
        raise ValueError("f must be real and nonnegative on the atoms")
    root = np.sqrt(values.real)
    return dilation.spectral_integral(root) @ dilation.V


@dataclass(frozen=True, eq=False)
class MomentOperators:
    k: int
    tilde: OperatorIntegral
    strong: OperatorIntegral
    weak: Optional[OperatorIntegral]
    chain_ok: bool
    action_defect: float


def moment_operators(E, k, basis=None):
    """``Tilde``, ``Strong`` and ``MaxWeakSym`` integrals of ``x**k`` with chain check.

    ``chain_ok`` holds when every Tilde-certified basis vector is also Strong
    and MaxWeakSym certified; ``action_defect`` is the largest difference of the
    three actions on the Tilde domain.
    """
    f = lambda x: np.asarray(x, dtype=float) ** k
    tilde = tilde_integral(f, E, basis)
    strong = strong_integral(f, E, basis)
    try:
        weak = max_weak_sym_integral(f, E, basis)
    except SeparatingSubspaceTooSmall:
        weak = None
    chain_ok, defect = True, 0.0
    for i in range(tilde.rank):
        v = tilde.basis[:, i]
        if not strong.contains(v) or weak is None or not weak.contains(v):
            chain_ok = False
            continue
        t = tilde.apply(v)
        defect = max(defect, float(np.abs(t - strong.apply(v)).max()),
                     float(np.abs(t - weak.apply(v)).max()))
    return MomentOperators(k, tilde, strong, weak, chain_ok, defect)


# ---------------------------------------------------------------------------
# strong/weak gap


@dataclass(frozen=True)
class GapProbe:
    radii: np.ndarray
    sup_estimates: np.ndarray
    arg_sup: tuple
    vanishing: bool

    def rows(self):
        return [(float(r), float(s), a) for r, s, a in zip(self.radii, self.sup_estimates, self.arg_sup)]


def strong_weak_gap_probe(f, E, phi, radii, psi_sample=None, rng=None, n_random=8, floor=1e-8):
    """``sup_psi int_{|x| >= R_n} |f| d|E_{psi,phi}|`` over a sample of unit ``psi``.

    The sample is the basis, ``n_random`` random unit vectors, and the vector
    aligned with ``|f| |E_{e_n,phi}|`` on each tail (which attains the sup when
    ``E`` is diagonal).  ``vanishing`` is False when the estimates stay above
    ``floor`` relative to the first one: evidence that the strong integral is
    strictly smaller than the weak one at ``phi``.
    """
    phi = np.asarray(phi, dtype=complex)
    d = phi.size
    rng = rng if rng is not None else np.random.default_rng(0)
    sample = []
    if psi_sample is None:
        sample += [(f"e{i}", np.eye(d, dtype=complex)[i]) for i in range(min(d, 64))]
        for j in range(n_random):
            v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            sample.append((f"random{j}", v / np.linalg.norm(v)))
    else:
        sample += [(f"psi{j}", np.asarray(v, dtype=complex) / np.linalg.norm(v))
                   for j, v in enumerate(psi_sample)]
    absf = abs_function(f)
    radii = np.asarray(radii, dtype=float)
    sups, args = [], []
    for R in radii:
        outside = lambda x, R=R: np.abs(x) >= R
        best, arg = 0.0, ""
        row_weights = _aligned(f, E, phi, outside)
        extra = [("aligned", row_weights)] if row_weights is not None else []
        for name, psi in sample + extra:
            mu = total_variation(scalar_measure(E, psi, phi)).restrict(outside)
            val = integrate(absf, mu).value.real
            if val > best:
                best, arg = val, name
        sups.append(best)
        args.append(arg)
    sups = np.array(sups)
    vanishing = bool(sups[-1] <= floor * max(1.0, sups[0]))
    return GapProbe(radii, sups, tuple(args), vanishing)


def _aligned(f, E, phi, outside):
    d = phi.size
    absf = abs_function(f)
    if isinstance(E, DiagonalFormMeasure) and E.mus is not None:
        # E_{e_n, phi} = phi_n mu_n
        weights = np.array([abs(phi[n]) * integrate(absf, mu.restrict(outside)).value.real
                            for n, mu in enumerate(E.mus)])
    elif isinstance(E, DiagonalFormMeasure):
        j = np.arange(d)
        locs, masses = E.atoms_at(j)
        weights = np.abs((evaluate(absf, locs) * masses * outside(locs)).sum(axis=1) * phi)
    else:
        weights = np.array([_aligned_weight(absf, E, phi, n, outside) for n in range(d)])
    norm = np.linalg.norm(weights)
    return None if norm == 0 else weights / norm


def _aligned_weight(absf, E, phi, n, outside):
    e = np.zeros(phi.size, dtype=complex)
    e[n] = 1.0
    mu = total_variation(scalar_measure(E, e, phi)).restrict(outside)
    return integrate(absf, mu).value.real
