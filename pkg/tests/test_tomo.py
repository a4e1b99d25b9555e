"""
Tests for measurement bases, count simulation and maximum-likelihood
reconstruction.
"""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from app.core.exceptions import IncompleteBasisSetException, ValidationException
from app.quantum.metrics import fidelity
from app.quantum.ortho import z_filter
from app.quantum.states import density_matrix, haar_random_pure, to_vector
from app.quantum.tomo import (
    born_probabilities,
    dump_counts,
    load_counts,
    log_likelihood,
    measurement_basis,
    mle_reconstruct,
    simulate_counts,
    simulate_filtered_counts,
    tomographic_bases,
)
from app.schemas.quantum_schema import CountsRecord, PureQubitState
from tests.conftest import random_density


def _exact_records(rho: np.ndarray, n_qubits: int, scale: float = 1e12) -> list[CountsRecord]:
    """Born probabilities scaled up to (rounded) counts."""
    records = []
    for basis in tomographic_bases(n_qubits):
        counts = np.round(born_probabilities(rho, basis) * scale).astype(int).tolist()
        records.append(CountsRecord(basis=basis.labels, counts=counts, shots=sum(counts)))
    return records


class TestBases:
    def test_counts_of_settings(self) -> None:
        assert len(tomographic_bases(1)) == 3
        assert len(tomographic_bases(2)) == 9

    @pytest.mark.parametrize("labels", [("HV",), ("DA",), ("RL",), ("DA", "RL")])
    def test_projectors_resolve_identity(self, labels: tuple[str, ...]) -> None:
        basis = measurement_basis(labels)
        np.testing.assert_allclose(sum(basis.projectors), np.eye(basis.dim), atol=1e-12)

    def test_eigenstate_has_deterministic_outcome(self) -> None:
        p = born_probabilities(np.diag([1.0, 0.0]), measurement_basis(("HV",)))
        np.testing.assert_allclose(p, [1.0, 0.0])


class TestSimulation:
    def test_eigenstate_counts(self) -> None:
        records = simulate_counts(np.diag([1.0, 0.0]), [measurement_basis(("HV",))], 1000, seed=1)
        assert records[0].counts == [1000, 0]

    def test_two_qubit_eigenstate_counts(self) -> None:
        rho = np.zeros((4, 4))
        rho[0, 0] = 1.0
        records = simulate_counts(rho, [measurement_basis(("HV", "HV"))], 500, seed=1)
        assert records[0].counts == [500, 0, 0, 0]

    def test_maximally_mixed_counts_within_three_sigma(self) -> None:
        records = simulate_counts(np.eye(2) / 2, tomographic_bases(1), 100_000, seed=2)
        for record in records:
            for count in record.counts:
                assert abs(count - 50_000) < 3 * 158

    def test_same_seed_same_counts(self) -> None:
        rho = density_matrix(haar_random_pure(2, seed=3))
        first = simulate_counts(rho, tomographic_bases(1), 1000, seed=42)
        second = simulate_counts(rho, tomographic_bases(1), 1000, seed=42)
        assert first == second

    def test_shots_must_be_positive(self) -> None:
        with pytest.raises(ValidationException):
            simulate_counts(np.eye(2) / 2, tomographic_bases(1), 0, seed=0)

    @pytest.mark.parametrize("theta_deg", [22.5, 45.0, 67.5, 90.0])
    def test_filtered_success_rate(self, theta_deg: float) -> None:
        theta = math.radians(theta_deg)
        shots = 100_000
        rho = density_matrix(to_vector(PureQubitState(theta=theta)))
        records, p_est = simulate_filtered_counts(rho, z_filter(theta), tomographic_bases(1), shots, seed=6)
        expected = math.tan(theta / 2) ** 2
        sigma = math.sqrt(expected * (1 - expected) / (3 * shots))
        assert abs(p_est - expected) <= 3 * sigma + 1e-12
        assert all(r.shots <= shots for r in records)


class TestReconstruction:
    def test_exact_frequencies_of_pure_state(self) -> None:
        truth = density_matrix(to_vector(PureQubitState(theta=math.pi / 4)))
        result = mle_reconstruct(_exact_records(truth, 1), dim=2)
        assert fidelity(truth, result.rho) > 1 - 1e-4

    def test_exact_frequencies_of_mixed_state(self) -> None:
        truth = 0.9 * density_matrix(to_vector(PureQubitState(theta=math.pi / 4))) + 0.1 * np.eye(2) / 2
        result = mle_reconstruct(_exact_records(truth, 1), dim=2)
        assert result.converged
        assert fidelity(truth, result.rho) > 1 - 1e-8

    def test_shot_noise_limited(self) -> None:
        truth = density_matrix(to_vector(PureQubitState(theta=math.pi / 4)))
        records = simulate_counts(truth, tomographic_bases(1), 100_000, seed=8)
        assert fidelity(truth, mle_reconstruct(records, dim=2).rho) > 0.999

    def test_equal_counts_give_maximally_mixed(self) -> None:
        records = [CountsRecord(basis=b.labels, counts=[250] * 4, shots=1000) for b in tomographic_bases(2)]
        result = mle_reconstruct(records, dim=4)
        np.testing.assert_allclose(result.rho, np.eye(4) / 4, atol=1e-10)
        assert result.converged

    def test_likelihood_never_decreases(self, rng: np.random.Generator) -> None:
        truth = random_density(rng, 4)
        records = simulate_counts(truth, tomographic_bases(2), 2000, seed=10)
        result = mle_reconstruct(records, dim=4, max_iterations=300)
        assert np.all(np.diff(result.log_likelihoods) >= -1e-9)
        assert result.log_likelihoods[-1] == pytest.approx(log_likelihood(result.rho, records))

    def test_output_is_a_state(self, rng: np.random.Generator) -> None:
        records = simulate_counts(random_density(rng, 2), tomographic_bases(1), 50, seed=11)
        rho = mle_reconstruct(records, dim=2).rho
        assert np.trace(rho).real == pytest.approx(1.0)
        assert np.linalg.eigvalsh(rho).min() >= -1e-12

    def test_high_statistics_single_qubit(self) -> None:
        for k in range(20):
            truth = density_matrix(haar_random_pure(2, seed=100 + k))
            mixed = 0.95 * truth + 0.05 * np.eye(2) / 2
            records = simulate_counts(mixed, tomographic_bases(1), 1_000_000, seed=200 + k)
            assert fidelity(mixed, mle_reconstruct(records, dim=2).rho) > 0.9999

    def test_high_statistics_two_qubit(self) -> None:
        for k in range(5):
            truth = density_matrix(haar_random_pure(4, seed=300 + k))
            mixed = 0.95 * truth + 0.05 * np.eye(4) / 4
            records = simulate_counts(mixed, tomographic_bases(2), 1_000_000, seed=400 + k)
            assert fidelity(mixed, mle_reconstruct(records, dim=4).rho) > 0.9999

    def test_missing_setting(self) -> None:
        records = simulate_counts(np.eye(2) / 2, tomographic_bases(1)[:2], 100, seed=0)
        with pytest.raises(IncompleteBasisSetException):
            mle_reconstruct(records, dim=2)

    def test_no_counts_at_all(self) -> None:
        records = [CountsRecord(basis=b.labels, counts=[0, 0], shots=0) for b in tomographic_bases(1)]
        with pytest.raises(ValidationException):
            mle_reconstruct(records, dim=2)

    def test_iteration_cap_reports_not_converged(self, rng: np.random.Generator) -> None:
        records = simulate_counts(random_density(rng, 4), tomographic_bases(2), 1000, seed=12)
        result = mle_reconstruct(records, dim=4, max_iterations=2, tolerance=1e-15)
        assert not result.converged
        assert result.iterations == 2


class TestCountsRecord:
    def test_counts_must_sum_to_shots(self) -> None:
        with pytest.raises(ValueError):
            CountsRecord(basis=("HV",), counts=[3, 4], shots=10)

    def test_outcome_count_matches_basis(self) -> None:
        with pytest.raises(ValueError):
            CountsRecord(basis=("HV", "DA"), counts=[5, 5], shots=10)

    def test_file_round_trip(self, tmp_path: Path) -> None:
        records = simulate_counts(np.eye(4) / 4, tomographic_bases(2), 100, seed=5)
        path = dump_counts(records, tmp_path / "counts.json")
        assert json.loads(path.read_text())[0]["basis"] == ["HV", "HV"]
        assert load_counts(path) == records

    def test_malformed_file(self, tmp_path: Path) -> None:
        path = tmp_path / "bad.json"
        path.write_text('[{"basis": ["XY"], "counts": [1, 1], "shots": 2}]')
        with pytest.raises(ValidationException):
            load_counts(path)

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(ValidationException):
            load_counts(tmp_path / "absent.json")
