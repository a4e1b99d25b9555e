"""
End-to-end tests for the experiment services.

Shot counts are kept as high as the statistical assertions need and no
higher; the two-qubit runs dominate the suite's runtime.
"""

import math

import pytest

from app.config import Settings
from app.quantum.metrics import pure_entropy
from app.quantum.tomo import tomographic_bases
from app.schemas.experiment_schema import (
    DEFAULT_QUADRUPLES,
    AngleQuadruple,
    BoundsParams,
    SingleQubitParams,
    TwoQubitParams,
)
from app.services.bounds_service import BoundsExperiment, clock_unitary
from app.services.single_qubit_service import SingleQubitExperiment
from app.services.two_qubit_service import TwoQubitExperiment

_TWO_QUBIT_SETTINGS = len(tomographic_bases(2))


def _shot_noise_floor(shots: int, p_success: float) -> float:
    """
    3σ bound on the overlap of two reconstructions of the same pure state.

    The overlap grows linearly with how far each reconstructed Bloch vector
    falls short of unit length, which is of order 1/√N for N copies per
    setting; the output side only has shots · p_success survivors.
    """
    return 3.0 * (1.0 / math.sqrt(shots) + 1.0 / math.sqrt(shots * p_success))


class TestSingleQubitExperiment:
    def test_ideal_filter_orthogonalizes(self, settings: Settings) -> None:
        params = SingleQubitParams(thetas_deg=[22.0, 44.0, 66.0, 88.0], phis_deg=[0.0, 90.0], shots=1_000_000)
        response = SingleQubitExperiment(settings).run(params)

        assert response.total_count == 8
        for row in response.rows:
            assert row.overlap is not None
            assert row.overlap < _shot_noise_floor(params.shots, row.p_success)
            assert row.purity_in > 0.99
            assert row.purity_out > 0.99

    def test_success_rate_follows_attenuation(self, settings: Settings) -> None:
        params = SingleQubitParams(thetas_deg=[44.0, 66.0, 88.0], phis_deg=[0.0], shots=100_000)
        response = SingleQubitExperiment(settings).run(params)
        for row in response.rows:
            expected = math.tan(math.radians(row.theta) / 2) ** 2
            assert row.p_success == pytest.approx(expected, rel=0.02)

    def test_attenuation_error_hurts_small_angles_most(self, settings: Settings) -> None:
        params = SingleQubitParams(
            thetas_deg=[22.0, 44.0, 66.0],
            phis_deg=[0.0],
            shots=1_000_000,
            attenuation_error=0.02,
        )
        overlaps = [row.overlap for row in SingleQubitExperiment(settings).run(params).rows]
        assert overlaps[0] > overlaps[1]
        assert overlaps[0] > overlaps[2]

    def test_measured_mean_value(self, settings: Settings) -> None:
        params = SingleQubitParams(thetas_deg=[66.0], phis_deg=[0.0], shots=1_000_000, mean_source="measured")
        (row,) = SingleQubitExperiment(settings).run(params).rows
        assert row.overlap is not None
        assert row.overlap < 5e-3

    def test_cell_at_the_pole_is_reported_not_raised(self, settings: Settings) -> None:
        params = SingleQubitParams(thetas_deg=[0.1], phis_deg=[0.0], shots=100, mean_source="measured")
        (row,) = SingleQubitExperiment(settings).run(params).rows
        assert row.overlap is None
        assert row.p_success is None
        assert row.purity_in > 0.9

    def test_same_seed_same_rows(self, settings: Settings) -> None:
        params = SingleQubitParams(thetas_deg=[44.0], phis_deg=[0.0, 180.0], shots=2000, seed=5)
        first = SingleQubitExperiment(settings).run(params)
        second = SingleQubitExperiment(settings).run(params)
        assert first.rows == second.rows

    def test_metadata_and_states(self, settings: Settings) -> None:
        params = SingleQubitParams(thetas_deg=[44.0], phis_deg=[0.0], shots=2000, dump_states=True)
        response = SingleQubitExperiment(settings).run(params)
        assert response.metadata.command == "single"
        assert response.metadata.flags["shots"] == 2000
        assert [s.role for s in response.states] == ["input", "output"]
        assert len(response.states[0].real) == 2


class TestTwoQubitExperiment:
    def test_perfect_gate(self, settings: Settings) -> None:
        params = TwoQubitParams(shots=1_000_000, visibility=1.0)
        response = TwoQubitExperiment(settings).run(params)

        assert response.total_count == len(DEFAULT_QUADRUPLES)
        for row in response.rows:
            expected = pure_entropy(math.radians(row.theta1), math.radians(row.theta2))
            assert row.F < 1e-3
            assert row.Ef_I == pytest.approx(expected, abs=0.01)
            assert row.Ef_O == pytest.approx(row.Ef_I, abs=0.01)

    def test_limited_visibility(self, settings: Settings) -> None:
        params = TwoQubitParams(
            quadruples=[
                AngleQuadruple(theta1=67.5, phi1=0.0, theta2=90.0, phi2=0.0),
                AngleQuadruple(theta1=67.5, phi1=0.0, theta2=45.0, phi2=0.0),
            ],
            shots=100_000,
            visibility=0.94,
        )
        strong, weak = TwoQubitExperiment(settings).run(params).rows
        assert 0.93 <= strong.P_I <= 0.98
        assert weak.F < 0.05
        assert weak.F_prime < 0.05

    def test_success_probability_follows_attenuation(self, settings: Settings) -> None:
        params = TwoQubitParams(
            quadruples=[AngleQuadruple(theta1=t, theta2=90.0) for t in (22.5, 67.5, 90.0)],
            shots=100_000,
            visibility=0.94,
        )
        trials = _TWO_QUBIT_SETTINGS * params.shots
        for row in TwoQubitExperiment(settings).run(params).rows:
            theta = math.radians(row.theta1)
            expected = math.tan(theta / 2) ** 2
            binomial = math.sqrt(expected * (1 - expected) / trials)
            assert abs(row.p_success - expected) <= 3 * binomial + 1e-12

            # the measured mean adds its own spread through the filter setting
            estimate = expected * math.sin(theta) / (math.cos(theta / 2) ** 2 * math.sqrt(params.shots))
            assert abs(row.p_success_prime - expected) <= 3 * math.hypot(binomial, estimate) + 1e-12

    def test_mean_source_picks_unprimed_columns(self, settings: Settings) -> None:
        quadruples = [AngleQuadruple(theta1=45.0, theta2=90.0)]
        (known,) = TwoQubitExperiment(settings).run(TwoQubitParams(quadruples=quadruples, shots=5000)).rows
        (measured,) = (
            TwoQubitExperiment(settings)
            .run(TwoQubitParams(quadruples=quadruples, shots=5000, mean_source="measured"))
            .rows
        )
        assert measured.F == known.F_prime
        assert measured.F_prime == known.F
        assert measured.p_success == known.p_success_prime
        assert measured.Ef_O == known.Ef_O_prime
        assert measured.P_I == known.P_I

    def test_dump_states_roles(self, settings: Settings) -> None:
        params = TwoQubitParams(
            quadruples=[AngleQuadruple(theta1=45.0, theta2=90.0)],
            shots=5000,
            dump_states=True,
        )
        response = TwoQubitExperiment(settings).run(params)
        assert [s.role for s in response.states] == ["input", "output", "output_measured"]
        assert len(response.states[0].imag) == 4


class TestBoundsExperiment:
    def test_sweep(self, settings: Settings) -> None:
        params = BoundsParams(theta_step_deg=15.0, random_maps=50, haar_samples=2000, seed=3)
        response = BoundsExperiment(settings).run(params)

        assert [row.theta for row in response.rows] == [15.0, 30.0, 45.0, 60.0, 75.0, 90.0]
        for row in response.rows:
            assert row.chi_opt_overlap == pytest.approx(row.f_min, abs=1e-12)
            assert row.random_min_overlap >= row.f_min - 1e-9
            assert row.certificate_min_eigenvalue >= -1e-10

    def test_explicit_angles(self, settings: Settings) -> None:
        params = BoundsParams(thetas_deg=[88.0], random_maps=5, haar_samples=100)
        (row,) = BoundsExperiment(settings).run(params).rows
        assert row.f_min == pytest.approx(math.cos(math.radians(88.0)) ** 2)

    def test_haar_benchmark(self, settings: Settings) -> None:
        params = BoundsParams(thetas_deg=[45.0], random_maps=5, haar_samples=20_000, seed=7)
        haar = BoundsExperiment(settings).run(params).haar

        assert [(h.channel, h.dim) for h in haar] == [
            ("universal_inverter", 2),
            ("traceless_unitary", 2),
            ("universal_inverter", 3),
            ("traceless_unitary", 3),
        ]
        for h in haar:
            assert abs(h.mean - h.bound) <= 4 * h.stderr + 1e-12

    def test_clock_unitary_is_traceless(self) -> None:
        for d in (2, 3, 4):
            assert abs(clock_unitary(d).trace()) < 1e-12
