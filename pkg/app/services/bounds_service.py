"""
Bounds sweep: minimum deterministic overlap versus θ, checked against the
optimal map, random channels and the positivity certificate, plus the Haar
benchmark of the universal inverter and of traceless unitaries.
"""

import math
import time

import numpy as np

from app.config import Settings
from app.core.logging import get_logger
from app.quantum.bounds import (
    average_overlap,
    certificate_m,
    chi_opt,
    f_min,
    r_theta,
    random_cptp,
)
from app.quantum.channels import BaseChannel, UnitaryChannel, UniversalInverter
from app.quantum.metrics import haar_average_overlap
from app.schemas.experiment_schema import BoundsParams, BoundsResponse, BoundsRow, HaarRow, RunMetadata
from app.utils.helpers import angle_grid

logger = get_logger(__name__)

HAAR_DIMS = (2, 3)


def clock_unitary(dim: int) -> np.ndarray:
    """diag(1, ω, …, ω^{d−1}), ω = e^{2πi/d}; traceless for every d ≥ 2."""
    return np.diag(np.exp(2j * math.pi * np.arange(dim) / dim))


class BoundsExperiment:
    """Optimality sweep over θ and the Haar benchmark."""

    command = "bounds"

    def __init__(self, settings: Settings) -> None:
        self._settings = settings

    def run(self, params: BoundsParams) -> BoundsResponse:
        thetas = params.thetas_deg or angle_grid(params.theta_step_deg)
        logger.info(
            "Bounds run started",
            extra={"thetas": len(thetas), "random_maps": params.random_maps},
        )
        started = time.perf_counter()
        maps_seq, haar_seq = np.random.SeedSequence(params.seed).spawn(2)

        rng = np.random.default_rng(maps_seq)
        random_chis = np.stack(
            [random_cptp(2, 2, rng).matrix for _ in range(params.random_maps)]
        )

        rows = []
        for theta_deg in thetas:
            theta = math.radians(theta_deg)
            # Tr[R_θ χ] for every sampled map at once
            random_overlaps = np.einsum("ij,nji->n", r_theta(theta), random_chis).real
            _, eigenvalues = certificate_m(theta)
            rows.append(
                BoundsRow(
                    theta=theta_deg,
                    f_min=f_min(theta),
                    chi_opt_overlap=average_overlap(chi_opt(theta), theta),
                    random_min_overlap=float(random_overlaps.min()),
                    certificate_min_eigenvalue=float(eigenvalues[0]),
                )
            )

        haar = self._haar_rows(params.haar_samples, haar_seq)

        logger.info(
            "Bounds run finished",
            extra={"rows": len(rows), "duration_s": round(time.perf_counter() - started, 3)},
        )
        return BoundsResponse(
            total_count=len(rows),
            rows=rows,
            haar=haar,
            metadata=RunMetadata(
                command=self.command,
                library_version=self._settings.app_version,
                seed=params.seed,
                flags=params.model_dump(mode="json"),
            ),
        )

    @staticmethod
    def _haar_rows(samples: int, seed_seq: np.random.SeedSequence) -> list[HaarRow]:
        channels: list[tuple[str, BaseChannel]] = []
        for dim in HAAR_DIMS:
            channels.append(("universal_inverter", UniversalInverter(dim)))
            channels.append(("traceless_unitary", UnitaryChannel(clock_unitary(dim))))

        rows = []
        for (name, channel), child in zip(channels, seed_seq.spawn(len(channels))):
            mean, stderr = haar_average_overlap(
                channel, channel.dim, samples, np.random.default_rng(child)
            )
            rows.append(
                HaarRow(
                    channel=name,
                    dim=channel.dim,
                    mean=mean,
                    stderr=stderr,
                    bound=1.0 / (channel.dim + 1),
                )
            )
        return rows
