"""
Two-qubit experiment: local orthogonalization of CZ-entangled pairs.

Each row prepares U_CZ|ψ₁⟩|ψ₂⟩ through a CZ gate of limited visibility,
reconstructs it, filters the first qubit with the known θ₁ and with θ₁
estimated from H/V counts, and reconstructs both outputs. ``mean_source``
picks the filter reported in the unprimed columns; the other one fills the
primed columns.
"""

import time
from collections.abc import Sequence

import numpy as np

from app.config import Settings
from app.core.exceptions import FilterException, ValidationException
from app.core.logging import get_logger
from app.quantum.metrics import entanglement_of_formation, fidelity
from app.quantum.ortho import (
    estimate_mean_z,
    lift_filter,
    noisy_cz,
    simulate_mean_z,
    theta_from_mean,
    z_filter,
)
from app.quantum.states import density_matrix, purity, to_vector
from app.quantum.tomo import (
    mle_reconstruct,
    simulate_counts,
    simulate_filtered_counts,
    tomographic_bases,
)
from app.schemas.experiment_schema import (
    AngleQuadruple,
    RunMetadata,
    StateDump,
    TwoQubitParams,
    TwoQubitResponse,
    TwoQubitRow,
)
from app.schemas.quantum_schema import CountsRecord, PureQubitState
from app.utils.helpers import spawn_generators, state_dump

logger = get_logger(__name__)

_Filtered = tuple[np.ndarray | None, float | None]


class TwoQubitExperiment:
    """Run the two-qubit pipeline for a list of preparation angles."""

    command = "two-qubit"

    def __init__(self, settings: Settings) -> None:
        self._settings = settings
        self._bases = tomographic_bases(2)

    def run(self, params: TwoQubitParams) -> TwoQubitResponse:
        logger.info(
            "Two-qubit run started",
            extra={
                "rows": len(params.quadruples),
                "shots": params.shots,
                "visibility": params.visibility,
                "mean_source": params.mean_source,
            },
        )
        started = time.perf_counter()
        channel = noisy_cz(params.visibility)

        rows: list[TwoQubitRow] = []
        states: list[StateDump] = []
        generators = spawn_generators(params.seed, len(params.quadruples))
        for angles, rng in zip(params.quadruples, generators):
            s1 = PureQubitState.from_degrees(angles.theta1, angles.phi1)
            s2 = PureQubitState.from_degrees(angles.theta2, angles.phi2)
            product = density_matrix(np.kron(to_vector(s1), to_vector(s2)))
            rho_true = channel.apply(product)

            rho_in = self._reconstruct(simulate_counts(rho_true, self._bases, params.shots, rng))
            known = self._filtered(rho_true, s1.theta, params.shots, rng)

            counts0, counts1 = simulate_mean_z(rho_true, params.shots, rng)
            theta_measured = theta_from_mean(estimate_mean_z(counts0, counts1))
            measured = self._filtered(rho_true, theta_measured, params.shots, rng)

            if params.mean_source == "known":
                rows.append(self._row(angles, rho_in, known, measured))
            else:
                rows.append(self._row(angles, rho_in, measured, known))
            if params.dump_states:
                label = (
                    f"theta1={angles.theta1:g},phi1={angles.phi1:g},"
                    f"theta2={angles.theta2:g},phi2={angles.phi2:g}"
                )
                states.append(state_dump(label, "input", rho_in))
                for role, (rho, _) in (("output", known), ("output_measured", measured)):
                    if rho is not None:
                        states.append(state_dump(label, role, rho))

        logger.info(
            "Two-qubit run finished",
            extra={"rows": len(rows), "duration_s": round(time.perf_counter() - started, 3)},
        )
        return TwoQubitResponse(
            total_count=len(rows),
            rows=rows,
            states=states,
            metadata=RunMetadata(
                command=self.command,
                library_version=self._settings.app_version,
                seed=params.seed,
                flags=params.model_dump(mode="json"),
            ),
        )

    def _filtered(
        self,
        rho_true: np.ndarray,
        theta1: float,
        shots: int,
        rng: np.random.Generator,
    ) -> _Filtered:
        """Reconstructed output and estimated success probability, or (None, None)."""
        try:
            f = lift_filter(z_filter(theta1))
            records, p_success = simulate_filtered_counts(rho_true, f, self._bases, shots, rng)
            return self._reconstruct(records), p_success
        except (FilterException, ValidationException) as exc:
            logger.warning(
                "Pair could not be orthogonalized",
                extra={"theta1": theta1, "error_code": exc.error_code},
            )
            return None, None

    @staticmethod
    def _row(
        angles: AngleQuadruple,
        rho_in: np.ndarray,
        primary: _Filtered,
        secondary: _Filtered,
    ) -> TwoQubitRow:
        rho_out, p_success = primary
        rho_out_prime, p_success_prime = secondary

        def _overlap(rho: np.ndarray | None) -> float | None:
            return None if rho is None else fidelity(rho_in, rho)

        def _purity(rho: np.ndarray | None) -> float | None:
            return None if rho is None else purity(rho)

        def _ef(rho: np.ndarray | None) -> float | None:
            return None if rho is None else entanglement_of_formation(rho)

        return TwoQubitRow(
            theta1=angles.theta1,
            phi1=angles.phi1,
            theta2=angles.theta2,
            phi2=angles.phi2,
            F=_overlap(rho_out),
            F_prime=_overlap(rho_out_prime),
            P_I=purity(rho_in),
            P_O=_purity(rho_out),
            P_O_prime=_purity(rho_out_prime),
            Ef_I=entanglement_of_formation(rho_in),
            Ef_O=_ef(rho_out),
            Ef_O_prime=_ef(rho_out_prime),
            p_success=p_success,
            p_success_prime=p_success_prime,
        )

    def _reconstruct(self, records: Sequence[CountsRecord]) -> np.ndarray:
        result = mle_reconstruct(
            records,
            dim=4,
            max_iterations=self._settings.mle_max_iterations,
            tolerance=self._settings.mle_tolerance,
        )
        return result.rho
