import json
import math

import mpmath
import numpy as np
import pytest

from opint.errors import DomainViolation, SeparatingSubspaceTooSmall
from opint.integrals import (
    DomainCertificate,
    DomainKind,
    QuadraticFormRecord,
    Verdict,
    decompose_function,
    dilation_root,
    form_domain_member,
    form_integral,
    form_record,
    kato_operator_from_form,
    max_weak_sym_integral,
    moment_operators,
    sq_domain_member,
    strong_domain_member,
    strong_integral,
    strong_weak_gap_probe,
    tilde_integral,
    variance_form,
    weak_sym_integral,
)
from opint.measures import AtomicComplexMeasure, Monomial, SeriesPolicy
from opint.povm import (
    DiagonalFormMeasure,
    ModelSpace,
    ScalarIdentityPOVM,
    naimark_dilate,
    random_povm,
    random_pvm,
    random_vector,
)

ZETA3 = float(mpmath.zeta(3))


def square(x):
    return np.asarray(x, dtype=float) ** 2


@pytest.fixture
def trivial():
    mu = AtomicComplexMeasure.sequence(lambda j: (np.asarray(j) + 1.0) ** -5,
                                       lambda j: np.asarray(j) + 1.0, positive=True)
    return ScalarIdentityPOVM(mu, ModelSpace(3))


def witness_family():
    """mu_m = (delta_m + delta_{-m}) / 2 for m = n + 1."""
    return DiagonalFormMeasure.point_masses(lambda n: np.stack([n + 1.0, -(n + 1.0)], -1),
                                            lambda n: np.full(np.shape(n) + (2,), 0.5), atoms=2)


class TestCertificates:
    def test_trivial_povm_domains(self, trivial):
        phi = np.array([1.0, 2.0, -1j])
        assert sq_domain_member(square, trivial, phi).verdict is Verdict.NON_MEMBER
        assert form_domain_member(square, trivial, phi).verdict is Verdict.MEMBER
        assert strong_domain_member(square, trivial, phi).verdict is Verdict.MEMBER

    def test_zero_vector_is_member(self, trivial):
        cert = sq_domain_member(Monomial(4), trivial, np.zeros(3))
        assert cert.member and cert.rule == "zero-vector"

    def test_certificate_invariants(self):
        with pytest.raises(ValueError):
            DomainCertificate("v", DomainKind.STRONG, Verdict.NON_MEMBER, ())

    def test_form_domain_strictly_larger_than_strong(self):
        E = witness_family()
        phi = lambda n: (np.asarray(n) + 1.0) ** -1.5
        policy = SeriesPolicy(tol=1e-5)
        ident = lambda x: np.asarray(x, dtype=float)
        form = form_domain_member(ident, E, phi, "phi", policy=policy)
        strong = strong_domain_member(ident, E, phi, "phi", policy=policy)
        assert form.verdict is Verdict.MEMBER
        assert strong.verdict is Verdict.NON_MEMBER and strong.rule == "diagonal-l2-duality"

    def test_certificate_serializes(self, trivial):
        cert = sq_domain_member(square, trivial, np.ones(3), vector_id="ones")
        data = json.loads(json.dumps(cert.to_dict()))
        assert data["verdict"] == "NonMember" and data["vector"] == "ones"
        assert data["evidence"][0]["status"] == "Divergent"


class TestOperators:
    def test_trivial_povm_integrals(self, trivial):
        assert tilde_integral(square, trivial).rank == 0
        strong = strong_integral(square, trivial)
        assert strong.rank == 3
        weak = max_weak_sym_integral(square, trivial)
        assert np.allclose(weak.full_matrix(), ZETA3 * np.eye(3), atol=1e-8)

    def test_weak_needs_nonempty_subspace(self, trivial):
        with pytest.raises(SeparatingSubspaceTooSmall):
            weak_sym_integral(square, trivial, np.zeros((3, 0)))
        with pytest.raises(SeparatingSubspaceTooSmall):
            max_weak_sym_integral(Monomial(6), trivial)

    def test_weak_rejects_subspace_outside_form_domain(self, trivial):
        with pytest.raises(DomainViolation):
            weak_sym_integral(Monomial(4), trivial, np.eye(3))

    def test_apply_outside_domain(self, rng):
        E = random_povm(rng, 3, 4)
        op = weak_sym_integral(lambda x: x, E, np.eye(3)[:, :2])
        assert op.contains(np.array([1.0, 1.0, 0.0]))
        with pytest.raises(DomainViolation):
            op.apply(np.array([0.0, 0.0, 1.0]))

    def test_bounded_chain(self, rng):
        E = random_povm(rng, 4, 6)
        mo = moment_operators(E, 2)
        assert mo.chain_ok and mo.action_defect < 1e-12
        assert json.loads(mo.weak.to_json())["rank"] == 4

    def test_pvm_tilde_is_functional_calculus(self, rng):
        E = random_pvm(rng, 4)
        H = sum(x * e for x, e in zip(E.locations, E.effects))
        dil = naimark_dilate(E)
        op = tilde_integral(square, E, dilation=dil)
        assert np.allclose(op.full_matrix(), H @ H)
        assert float(op.note.split()[-1]) < 1e-12

    def test_diagonal_truncation_action(self):
        E = DiagonalFormMeasure.point_masses(lambda n: np.asarray(n, dtype=float) + 1.0, dim=6)
        op = strong_integral(lambda x: x**2, E)
        assert np.allclose(op.full_matrix(), np.diag(np.arange(1, 7) ** 2.0))


class TestForms:
    def test_decomposition_parts(self):
        f = lambda x: np.array([1 - 2j, -3 + 0.5j, 0j])
        parts = [p(np.zeros(3)) for p in decompose_function(f)]
        assert parts[0].tolist() == [1, 0, 0]
        assert parts[1].tolist() == [0, 3, 0]
        assert parts[2].tolist() == [0, 0.5, 0]
        assert parts[3].tolist() == [2, 0, 0]

    def test_form_integral_domain_checked(self, trivial):
        with pytest.raises(DomainViolation):
            form_integral(Monomial(6), trivial, np.ones(3), np.ones(3))
        assert form_integral(square, trivial, np.ones(3), np.ones(3)) == pytest.approx(3 * ZETA3, abs=1e-7)

    def test_record_parts(self, rng):
        E = random_povm(rng, 3, 5)
        q = form_record(lambda x: (1 + 2j) * x, E)
        assert not q.symmetric
        assert q.real_part().symmetric and q.imag_part().symmetric
        psi, phi = random_vector(rng, 3), random_vector(rng, 3)
        assert q(psi, phi) == pytest.approx(q.real_part()(psi, phi) + 1j * q.imag_part()(psi, phi))

    def test_record_rejects_vectors_outside(self):
        q = QuadraticFormRecord(np.eye(3)[:, :1], np.ones((1, 1)))
        with pytest.raises(DomainViolation):
            q(np.array([0.0, 1.0, 0.0]), np.array([1.0, 0.0, 0.0]))

    def test_kato_defect_and_dilation_root(self, rng):
        E = random_povm(rng, 4, 6)
        g = lambda x: np.asarray(x, dtype=float) ** 2 + 1.0
        A = dilation_root(g, E, naimark_dilate(E))
        T, defect = kato_operator_from_form(A, form_record(g, E))
        assert defect < 1e-12
        assert np.allclose(T, max_weak_sym_integral(g, E).full_matrix())
        with pytest.raises(ValueError):
            dilation_root(lambda x: x - 10.0, E, naimark_dilate(E))

    def test_variance_form_positive_for_povm(self, rng):
        # a genuine POVM is not variance-free: the form is positive semidefinite
        E = random_povm(rng, 3, 6, full_rank=True)
        phi = random_vector(rng, 3)
        assert variance_form(E, phi, phi).real > 1e-6


class TestGap:
    def test_witness_tail_does_not_vanish(self):
        E = witness_family().truncate(256)
        phi = (np.arange(256) + 1.0) ** -1.5
        probe = strong_weak_gap_probe(lambda x: x, E, phi, [4, 16, 64])
        assert not probe.vanishing
        # sup over psi is the l2 norm of the tail: sqrt(sum_{m >= R} 1/m)
        m = np.arange(1, 257)
        assert probe.sup_estimates[-1] == pytest.approx(math.sqrt(np.sum(1.0 / m[m >= 64])), rel=1e-12)

    def test_bounded_tail_vanishes(self, rng):
        E = random_povm(rng, 3, 4, locations=np.array([-1.0, 0.0, 0.5, 1.0]))
        probe = strong_weak_gap_probe(lambda x: x, E, random_vector(rng, 3), [0.5, 2.0], rng=rng)
        assert probe.vanishing and probe.sup_estimates[-1] == 0.0
