"""
Single-qubit experiment: tomography → filter → tomography → overlap.

For each (θ, φ) cell the input state is reconstructed from simulated MUB
counts, the σ_Z filter is built from the known or the measured mean value,
the filtered copies are counted behind the filter and reconstructed again.
"""

import time
from collections.abc import Sequence

import numpy as np

from app.config import Settings
from app.core.exceptions import FilterException, ValidationException
from app.core.logging import get_logger
from app.quantum.metrics import fidelity
from app.quantum.ortho import (
    estimate_mean_z,
    simulate_mean_z,
    theta_from_mean,
    with_attenuation_error,
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
    RunMetadata,
    SingleQubitParams,
    SingleQubitResponse,
    SingleQubitRow,
    StateDump,
)
from app.schemas.quantum_schema import CountsRecord, PureQubitState
from app.utils.helpers import spawn_generators, state_dump

logger = get_logger(__name__)


class SingleQubitExperiment:
    """Run the single-qubit pipeline over a (θ, φ) grid."""

    command = "single"

    def __init__(self, settings: Settings) -> None:
        self._settings = settings
        self._bases = tomographic_bases(1)

    def run(self, params: SingleQubitParams) -> SingleQubitResponse:
        cells = [(t, p) for t in params.thetas_deg for p in params.phis_deg]
        logger.info(
            "Single-qubit run started",
            extra={"cells": len(cells), "shots": params.shots, "mean_source": params.mean_source},
        )
        started = time.perf_counter()

        rows: list[SingleQubitRow] = []
        states: list[StateDump] = []
        for (theta_deg, phi_deg), rng in zip(cells, spawn_generators(params.seed, len(cells))):
            row, rho_in, rho_out = self._run_cell(theta_deg, phi_deg, params, rng)
            rows.append(row)
            if params.dump_states:
                label = f"theta={theta_deg:g},phi={phi_deg:g}"
                states.append(state_dump(label, "input", rho_in))
                if rho_out is not None:
                    states.append(state_dump(label, "output", rho_out))

        logger.info(
            "Single-qubit run finished",
            extra={"rows": len(rows), "duration_s": round(time.perf_counter() - started, 3)},
        )
        return SingleQubitResponse(
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

    def _run_cell(
        self,
        theta_deg: float,
        phi_deg: float,
        params: SingleQubitParams,
        rng: np.random.Generator,
    ) -> tuple[SingleQubitRow, np.ndarray, np.ndarray | None]:
        state = PureQubitState.from_degrees(theta_deg, phi_deg)
        rho_true = density_matrix(to_vector(state))

        rho_in = self._reconstruct(simulate_counts(rho_true, self._bases, params.shots, rng))

        theta_filter = state.theta
        if params.mean_source == "measured":
            counts0, counts1 = simulate_mean_z(rho_true, params.shots, rng)
            theta_filter = theta_from_mean(estimate_mean_z(counts0, counts1))

        try:
            f = with_attenuation_error(z_filter(theta_filter), params.attenuation_error)
            records, p_success = simulate_filtered_counts(
                rho_true, f, self._bases, params.shots, rng
            )
            rho_out = self._reconstruct(records)
        except (FilterException, ValidationException) as exc:
            logger.warning(
                "Cell could not be orthogonalized",
                extra={"theta": theta_deg, "phi": phi_deg, "error_code": exc.error_code},
            )
            row = SingleQubitRow(
                theta=theta_deg,
                phi=phi_deg,
                overlap=None,
                purity_in=purity(rho_in),
                purity_out=None,
                p_success=None,
            )
            return row, rho_in, None

        row = SingleQubitRow(
            theta=theta_deg,
            phi=phi_deg,
            overlap=fidelity(rho_in, rho_out),
            purity_in=purity(rho_in),
            purity_out=purity(rho_out),
            p_success=p_success,
        )
        return row, rho_in, rho_out

    def _reconstruct(self, records: Sequence[CountsRecord]) -> np.ndarray:
        result = mle_reconstruct(
            records,
            dim=2,
            max_iterations=self._settings.mle_max_iterations,
            tolerance=self._settings.mle_tolerance,
        )
        return result.rho
