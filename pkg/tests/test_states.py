"""
Tests for state construction, Pauli expectations and Haar sampling.
"""

import math

import numpy as np
import pytest
from scipy import stats

from app.core.exceptions import DimensionMismatchException, InvalidStateException
from app.quantum.linalg import is_unitary
from app.quantum.states import (
    bloch_angles,
    density_matrix,
    expectation,
    haar_random_pure,
    haar_random_pure_batch,
    haar_random_unitary,
    orthogonal_partner,
    pauli,
    purity,
    to_vector,
    validate_density_matrix,
)
from app.schemas.quantum_schema import PureQubitState


class TestPureQubitState:
    def test_poles(self) -> None:
        np.testing.assert_allclose(to_vector(PureQubitState(theta=0.0)), [1, 0])
        np.testing.assert_allclose(to_vector(PureQubitState(theta=math.pi)), [0, 1], atol=1e-15)

    def test_equator(self) -> None:
        v = to_vector(PureQubitState(theta=math.pi / 2, phi=math.pi / 2))
        np.testing.assert_allclose(v, [1 / math.sqrt(2), 1j / math.sqrt(2)], atol=1e-15)

    def test_polar_angle_past_south_pole_is_reduced(self) -> None:
        s = PureQubitState(theta=3 * math.pi / 2, phi=0.0)
        assert s.theta == pytest.approx(math.pi / 2)
        assert s.phi == pytest.approx(math.pi)

    def test_azimuth_wraps(self) -> None:
        assert PureQubitState(theta=1.0, phi=-math.pi / 2).phi == pytest.approx(3 * math.pi / 2)

    def test_orthogonal_partner(self, rng: np.random.Generator) -> None:
        for theta, phi in rng.uniform([0, 0], [math.pi, 2 * math.pi], size=(50, 2)):
            s = PureQubitState(theta=theta, phi=phi)
            assert abs(np.vdot(to_vector(s), orthogonal_partner(s))) < 1e-15

    def test_bloch_angles_inverts_to_vector(self) -> None:
        s = PureQubitState.from_degrees(60.0, 30.0)
        back = bloch_angles(np.exp(0.4j) * to_vector(s))
        assert back.theta == pytest.approx(s.theta)
        assert back.phi == pytest.approx(s.phi)

    @pytest.mark.parametrize("theta_deg", [0.0, 45.0, 90.0, 135.0])
    def test_sigma_z_mean_is_cos_theta(self, theta_deg: float) -> None:
        s = PureQubitState.from_degrees(theta_deg, 17.0)
        mean = expectation(pauli("Z"), to_vector(s))
        assert mean.real == pytest.approx(math.cos(math.radians(theta_deg)), abs=1e-12)
        assert abs(mean.imag) < 1e-15


class TestDensityMatrices:
    def test_expectation_agrees_for_vector_and_density(self) -> None:
        v = to_vector(PureQubitState.from_degrees(40.0, 75.0))
        for axis in ("X", "Y", "Z"):
            assert expectation(pauli(axis), v) == pytest.approx(
                expectation(pauli(axis), density_matrix(v))
            )

    def test_expectation_dimension_check(self) -> None:
        with pytest.raises(DimensionMismatchException):
            expectation(np.eye(4), np.array([1, 0]))

    def test_purity_bounds(self) -> None:
        assert purity(np.eye(4) / 4) == pytest.approx(0.25)
        assert purity(density_matrix([1, 1j])) == pytest.approx(1.0)

    def test_validate_rejects_bad_trace(self) -> None:
        with pytest.raises(InvalidStateException):
            validate_density_matrix(np.eye(2))

    def test_validate_rejects_negative(self) -> None:
        with pytest.raises(InvalidStateException):
            validate_density_matrix(np.diag([1.5, -0.5]))

    def test_normalize_zero(self) -> None:
        with pytest.raises(InvalidStateException):
            density_matrix([0, 0])


class TestHaar:
    def test_single_state_is_normalized(self) -> None:
        v = haar_random_pure(3, seed=7)
        assert np.linalg.norm(v) == pytest.approx(1.0)

    def test_same_seed_same_state(self) -> None:
        np.testing.assert_array_equal(haar_random_pure(2, seed=11), haar_random_pure(2, seed=11))

    def test_qubit_z_component_is_uniform(self) -> None:
        # Haar states cover the Bloch sphere uniformly, so ⟨σ_Z⟩ ~ U(-1, 1)
        vecs = haar_random_pure_batch(2, 20_000, seed=3)
        z = np.abs(vecs[:, 0]) ** 2 - np.abs(vecs[:, 1]) ** 2
        assert stats.kstest(z, stats.uniform(loc=-1, scale=2).cdf).pvalue > 0.001

    def test_qudit_overlap_distribution(self) -> None:
        # |⟨0|ψ⟩|² is Beta(1, d-1) for Haar ψ in dimension d
        vecs = haar_random_pure_batch(3, 20_000, seed=5)
        overlaps = np.abs(vecs[:, 0]) ** 2
        assert stats.kstest(overlaps, stats.beta(1, 2).cdf).pvalue > 0.001

    def test_unitary(self) -> None:
        assert is_unitary(haar_random_unitary(4, seed=1), tol=1e-12)

    def test_dim_one_rejected(self) -> None:
        with pytest.raises(DimensionMismatchException):
            haar_random_pure(1, seed=0)
