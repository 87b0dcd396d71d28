import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opint.errors import DimensionMismatch, IoFailure
from opint.measures import Monomial, Status, integrate
from opint.povm import (
    DiagonalFormMeasure,
    DiscretePOVM,
    ModelSpace,
    ScalarIdentityPOVM,
    SequencePOVM,
    bounded_integral,
    dilation_from_dict,
    dilation_integral_check,
    dilation_to_dict,
    effect_ranks,
    load_json,
    multiplier_vector_measure,
    naimark_dilate,
    orthogonally_scattered_check,
    povm_from_dict,
    povm_to_dict,
    random_povm,
    random_pvm,
    random_vector,
    save_json,
    scalar_measure,
    validate_povm,
    vector_measure,
    verify_dilation,
)
from opint.measures import AtomicComplexMeasure


def halves():
    return DiscretePOVM(ModelSpace(1), [0.0, 1.0], np.full((2, 1, 1), 0.5), normalized=True)


class TestValidation:
    def test_rejects_negative_effect(self):
        with pytest.raises(ValueError, match="positive"):
            DiscretePOVM(ModelSpace(2), [0.0], np.diag([1.0, -0.1])[None])

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            DiscretePOVM(ModelSpace(2), [0.0], np.array([[[1.0, 1.0], [0.0, 1.0]]]))

    def test_rejects_unnormalized_when_flagged(self):
        with pytest.raises(ValueError, match="normalization"):
            DiscretePOVM(ModelSpace(1), [0.0], [[[0.5]]], normalized=True)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            DiscretePOVM(ModelSpace(2), [0.0], np.eye(3)[None])
        with pytest.raises(DimensionMismatch):
            ModelSpace(2).check(np.ones(3))

    def test_report(self, rng):
        E = random_povm(rng, 4, 5)
        rep = validate_povm(E)
        assert rep.positive and rep.normalized and not rep.projection_valued
        assert validate_povm(random_pvm(rng, 4)).projection_valued


class TestDilation:
    def test_two_halves(self):
        dil = naimark_dilate(halves())
        assert dil.dilation_dim == 2
        assert np.allclose(np.abs(dil.V.ravel()), [1 / math.sqrt(2)] * 2)
        for i in range(2):
            assert np.allclose(dil.V.conj().T @ dil.projection(i) @ dil.V, 0.5)

    def test_pvm_dilation_is_unitary(self, rng):
        E = random_pvm(rng, 5)
        dil = naimark_dilate(E)
        assert dil.dilation_dim == 5
        assert np.allclose(dil.V @ dil.V.conj().T, np.eye(5))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(1, 8))
    def test_invariants(self, seed, d, k):
        rng = np.random.default_rng(seed)
        E = random_povm(rng, d, k)
        dil = naimark_dilate(E)
        rep = verify_dilation(E, dil)
        assert max(rep.isometry_defect, rep.compression_defect, rep.orthogonality_defect,
                   rep.completeness_defect) <= 1e-10
        assert rep.minimal
        assert dilation_integral_check(lambda x: x**2 - 3 * x, E, dil) <= 1e-10

    def test_rank_deficient_effects(self, rng):
        E = random_povm(rng, 5, 6)
        ranks = effect_ranks(E)
        assert sum(ranks) == naimark_dilate(E).dilation_dim
        assert ranks == [np.linalg.matrix_rank(e, tol=1e-8) for e in E.effects]


class TestIntegrals:
    def test_bounded_integral_of_spectral_measure(self, rng):
        E = random_pvm(rng, 4)
        H = sum(x * e for x, e in zip(E.locations, E.effects))
        assert np.allclose(bounded_integral(lambda x: x**3, E), H @ H @ H)

    def test_scalar_measure_matches_effects(self, rng):
        E = random_povm(rng, 3, 4)
        psi, phi = random_vector(rng, 3), random_vector(rng, 3)
        mu = scalar_measure(E, psi, phi)
        assert np.allclose(mu.weights, [np.vdot(psi, e @ phi) for e in E.effects])
        assert mu.total_mass() == pytest.approx(np.vdot(psi, phi))

    def test_vector_measure_and_scattering(self, rng):
        E = random_pvm(rng, 4)
        phi = random_vector(rng, 4)
        vecs = vector_measure(E, phi)
        f = rng.standard_normal(4)
        rep = orthogonally_scattered_check(vecs, f)
        assert rep.orthogonal and rep.parseval_defect < 1e-12
        assert not orthogonally_scattered_check(vector_measure(random_povm(rng, 4, 3), phi)).orthogonal

    def test_multiplier_vector_measure(self):
        g = np.array([1.0, 2.0, 3.0])
        phi = np.array([1.0, -1.0, 0.5])
        rep = orthogonally_scattered_check(multiplier_vector_measure(g, phi), np.ones(3))
        assert rep.orthogonal
        assert rep.lam.tolist() == [1.0, 4.0, 2.25]

    def test_scalar_identity(self):
        mu = AtomicComplexMeasure.finite([1.0, 2.0], [0.25, 0.75], positive=True)
        E = ScalarIdentityPOVM(mu, ModelSpace(2))
        m = scalar_measure(E, np.array([1.0, 1j]), np.array([2.0, 0.0]))
        assert integrate(Monomial(1), m).value == pytest.approx(2.0 * 1.75)

    def test_sequence_povm_truncation(self):
        P = lambda j: np.array([[[1.0, 0.0], [0.0, 0.0]]] * len(j)) * ((np.asarray(j) + 1.0) ** -2)[:, None, None]
        E = SequencePOVM(ModelSpace(2), P, lambda j: np.asarray(j, dtype=float))
        mu = scalar_measure(E, np.array([1.0, 0.0]), np.array([1.0, 0.0]))
        assert integrate(Monomial(0), mu).value.real == pytest.approx(math.pi**2 / 6, abs=1e-3)
        assert E.truncate(5).size == 5


class TestDiagonal:
    def test_point_masses_entries(self):
        E = DiagonalFormMeasure.point_masses(lambda n: np.asarray(n, dtype=float) + 1.0, dim=4)
        assert E.diagonal_values(lambda x: x**2, 4).real.tolist() == [1.0, 4.0, 9.0, 16.0]
        assert E.entry(2, 2).locations.tolist() == [3.0]

    def test_multiple_atoms(self):
        E = DiagonalFormMeasure.point_masses(lambda n: np.stack([n + 1.0, -(n + 1.0)], -1),
                                             lambda n: np.full(np.shape(n) + (2,), 0.5), dim=3, atoms=2)
        assert E.diagonal_values(lambda x: x, 3).real.tolist() == [0.0, 0.0, 0.0]
        assert E.diagonal_values(lambda x: x, 3, absolute=True).real.tolist() == [1.0, 2.0, 3.0]
        mu = scalar_measure(E, np.ones(3), np.ones(3))
        assert integrate(Monomial(2), mu).value.real == pytest.approx(1 + 4 + 9)

    def test_infinite_family_needs_functions(self):
        E = DiagonalFormMeasure.point_masses(lambda n: np.asarray(n, dtype=float))
        with pytest.raises(DimensionMismatch):
            scalar_measure(E, np.ones(3), np.ones(3))
        phi = lambda n: (n + 1.0) ** -2
        v = integrate(Monomial(0), scalar_measure(E, phi, phi))
        assert v.status is Status.CONVERGED
        assert v.value.real == pytest.approx(math.pi**4 / 90, abs=1e-9)

    def test_measure_list(self):
        mus = (AtomicComplexMeasure.finite([0.0, 1.0], [0.5, 0.5], positive=True),
               AtomicComplexMeasure.finite([2.0], [1.0], positive=True))
        E = DiagonalFormMeasure(mus=mus)
        m = scalar_measure(E, np.array([1.0, 1.0]), np.array([2.0, 3.0]))
        assert integrate(Monomial(1), m).value == pytest.approx(2.0 * 0.5 + 3.0 * 2.0)


class TestJson:
    def test_round_trip(self, rng, tmp_path):
        E = random_povm(rng, 3, 4)
        dil = naimark_dilate(E)
        save_json(povm_to_dict(E), tmp_path / "povm.json")
        save_json(dilation_to_dict(dil, E), tmp_path / "dil.json")
        E2 = povm_from_dict(load_json(tmp_path / "povm.json"), normalized=True)
        dil2 = dilation_from_dict(load_json(tmp_path / "dil.json"))
        assert np.array_equal(E2.effects, E.effects) and E2.labels == E.labels
        assert np.array_equal(dil2.V, dil.V) and dil2.blocks == dil.blocks

    def test_io_failure(self, tmp_path):
        with pytest.raises(IoFailure):
            load_json(tmp_path / "missing.json")
        with pytest.raises(IoFailure):
            save_json({}, tmp_path / "no" / "such" / "dir.json")
