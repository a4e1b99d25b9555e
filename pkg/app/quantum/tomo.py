"""
Polarization tomography: mutually unbiased measurement bases, shot-noise
simulation and maximum-likelihood reconstruction.

Single-qubit outcomes are ordered H, V / D, A / R, L; multi-qubit outcomes
follow ``itertools.product`` over the per-qubit outcomes, which matches the
Kronecker ordering of the projectors.
"""

import itertools
import math
from collections.abc import Sequence
from functools import reduce
from pathlib import Path

import numpy as np
import numpy.typing as npt
from pydantic import TypeAdapter
from pydantic import ValidationError as PydanticValidationError

from app.core.exceptions import (
    DimensionMismatchException,
    IncompleteBasisSetException,
    OutputWriteException,
    ValidationException,
)
from app.core.logging import get_logger
from app.quantum.linalg import RealVector, as_matrix, hermitian_eig, identity
from app.quantum.ortho import apply_filter_to_density
from app.quantum.states import DensityMatrix, SeedLike, make_rng
from app.schemas.quantum_schema import (
    BasisLabel,
    CountsRecord,
    MeasurementBasis,
    MLEResult,
    QuantumFilter,
)

logger = get_logger(__name__)

_R2 = 1.0 / math.sqrt(2.0)

_KETS: dict[str, tuple[np.ndarray, np.ndarray]] = {
    "HV": (np.array([1.0, 0.0]), np.array([0.0, 1.0])),
    "DA": (np.array([_R2, _R2]), np.array([_R2, -_R2])),
    "RL": (np.array([_R2, 1j * _R2]), np.array([_R2, -1j * _R2])),
}

_LABELS: tuple[BasisLabel, ...] = ("HV", "DA", "RL")

# Born probabilities below this are clamped when the outcome was observed
_PROBABILITY_FLOOR = 1e-12

# Halving the mixing weight more often than this means no step improves the likelihood
_MAX_DILUTIONS = 40

_records_adapter = TypeAdapter(list[CountsRecord])


# ── Bases ──────────────────────────────────────────────────────────────


def measurement_basis(labels: Sequence[BasisLabel]) -> MeasurementBasis:
    """Product basis, one MUB label per qubit."""
    kets = []
    for outcome in itertools.product(*(_KETS[label] for label in labels)):
        kets.append(reduce(np.kron, outcome).astype(np.complex128))
    return MeasurementBasis(
        labels=tuple(labels),
        projectors=[np.outer(k, k.conj()) for k in kets],
    )


def tomographic_bases(n_qubits: int) -> list[MeasurementBasis]:
    """All 3ⁿ product settings, an informationally complete set."""
    return [measurement_basis(labels) for labels in itertools.product(_LABELS, repeat=n_qubits)]


def _n_qubits(dim: int) -> int:
    n = int(round(math.log2(dim))) if dim > 0 else 0
    if n < 1 or 2**n != dim:
        raise DimensionMismatchException(message=f"Tomography needs a qubit register, got dim {dim}.")
    return n


def born_probabilities(rho: npt.ArrayLike, basis: MeasurementBasis) -> RealVector:
    """Tr[Π_j ρ], clipped at zero and renormalized against round-off."""
    m = as_matrix(rho)
    if m.shape != (basis.dim, basis.dim):
        raise DimensionMismatchException(
            message=f"Basis of dim {basis.dim} cannot measure state of shape {m.shape}.",
        )
    p = np.clip(np.einsum("kij,ji->k", np.stack(basis.projectors), m).real, 0.0, None)
    return p / p.sum()


# ── Simulation ─────────────────────────────────────────────────────────


def simulate_counts(
    rho: npt.ArrayLike,
    bases: Sequence[MeasurementBasis],
    shots_per_basis: int,
    seed: SeedLike,
) -> list[CountsRecord]:
    """Multinomial counts for every basis setting."""
    if shots_per_basis < 1:
        raise ValidationException(
            message="shots_per_basis must be positive.",
            details={"shots": shots_per_basis},
        )
    rng = make_rng(seed)
    records = []
    for basis in bases:
        counts = rng.multinomial(shots_per_basis, born_probabilities(rho, basis))
        records.append(
            CountsRecord(basis=basis.labels, counts=counts.tolist(), shots=shots_per_basis)
        )
    return records


def simulate_filtered_counts(
    rho: npt.ArrayLike,
    f: QuantumFilter,
    bases: Sequence[MeasurementBasis],
    shots_per_basis: int,
    seed: SeedLike,
) -> tuple[list[CountsRecord], float]:
    """
    Counts behind a probabilistic filter.

    For each setting ``shots_per_basis`` copies hit the filter, the survivors
    (Binomial(shots, p)) are measured. The success probability is estimated
    as the coincidence ratio Σ survivors / (settings · shots).

    Returns:
        (records of the filtered state, estimated success probability)
    """
    rho_out, p_success = apply_filter_to_density(f, rho)
    rng = make_rng(seed)
    records = []
    survivors_total = 0
    for basis in bases:
        survivors = int(rng.binomial(shots_per_basis, min(p_success, 1.0)))
        survivors_total += survivors
        counts = rng.multinomial(survivors, born_probabilities(rho_out, basis))
        records.append(CountsRecord(basis=basis.labels, counts=counts.tolist(), shots=survivors))
    return records, survivors_total / (len(bases) * shots_per_basis)


# ── Reconstruction ─────────────────────────────────────────────────────


def _stack(records: Sequence[CountsRecord], dim: int) -> tuple[np.ndarray, np.ndarray]:
    n = _n_qubits(dim)
    seen = {r.basis for r in records}
    missing = ["".join(labels) for labels in itertools.product(_LABELS, repeat=n) if labels not in seen]
    if missing:
        raise IncompleteBasisSetException(missing=missing)

    projectors, counts = [], []
    for record in records:
        if len(record.basis) != n:
            raise DimensionMismatchException(
                message=f"Record for {len(record.basis)} qubits in a {n}-qubit reconstruction.",
            )
        projectors.extend(measurement_basis(record.basis).projectors)
        counts.extend(record.counts)
    counts_arr = np.asarray(counts, dtype=np.float64)
    if counts_arr.sum() <= 0:
        raise ValidationException(message="Reconstruction needs at least one count.")
    return np.stack(projectors), counts_arr


def _probabilities(rho: DensityMatrix, projectors: np.ndarray) -> np.ndarray:
    return np.einsum("kij,ji->k", projectors, rho).real


def _log_likelihood(rho: DensityMatrix, projectors: np.ndarray, counts: np.ndarray) -> float:
    p = np.maximum(_probabilities(rho, projectors), _PROBABILITY_FLOOR)
    observed = counts > 0
    return float(np.sum(counts[observed] * np.log(p[observed])))


def log_likelihood(rho: npt.ArrayLike, records: Sequence[CountsRecord]) -> float:
    """Σ_j n_j log Tr[Π_j ρ] over every outcome of every record."""
    m = as_matrix(rho)
    projectors, counts = _stack(records, m.shape[0])
    return _log_likelihood(m, projectors, counts)


def _trace_distance_below(delta: DensityMatrix, tolerance: float) -> bool:
    """
    Whether ½‖Δ‖₁ < tolerance, eigendecomposing only when the Frobenius
    bounds ½‖Δ‖_F ≤ ½‖Δ‖₁ ≤ (√d/2)‖Δ‖_F leave the answer open.
    """
    frobenius = float(np.linalg.norm(delta))
    if 0.5 * frobenius >= tolerance:
        return False
    if 0.5 * math.sqrt(delta.shape[0]) * frobenius < tolerance:
        return True
    eigenvalues, _ = hermitian_eig(delta)
    return 0.5 * float(np.sum(np.abs(eigenvalues))) < tolerance


def mle_reconstruct(
    records: Sequence[CountsRecord],
    dim: int,
    max_iterations: int = 5000,
    tolerance: float = 1e-10,
) -> MLEResult:
    """
    Maximum-likelihood density matrix by the diluted RρR iteration.

    Starting from I/d, each step moves to N[(1−ε)ρ + ε·RρR] with
    R = Σ_j (n_j / p_j) Π_j. ε starts at 1 and is halved until the
    likelihood does not decrease. Iteration stops when successive
    iterates are closer than ``tolerance`` in trace distance.

    Raises:
        IncompleteBasisSetException: If a product setting is missing.
        ValidationException:         If the records hold no counts at all.
    """
    projectors, counts = _stack(records, dim)
    weights_total = counts.sum()

    rho = identity(dim) / dim
    current = _log_likelihood(rho, projectors, counts)
    trace = [current]
    converged = False
    last_step = np.zeros_like(rho)
    iterations = 0

    for iterations in range(1, max_iterations + 1):
        p = _probabilities(rho, projectors)
        ratios = np.where(counts > 0, counts / np.maximum(p, _PROBABILITY_FLOOR), 0.0)
        r = np.einsum("k,kij->ij", ratios / weights_total, projectors)
        target = r @ rho @ r
        target /= np.trace(target).real

        epsilon = 1.0
        for _ in range(_MAX_DILUTIONS):
            candidate = (1.0 - epsilon) * rho + epsilon * target
            candidate = 0.5 * (candidate + candidate.conj().T)
            candidate /= np.trace(candidate).real
            likelihood = _log_likelihood(candidate, projectors, counts)
            if likelihood >= current:
                break
            epsilon /= 2.0
        else:
            # No likelihood-improving step left at machine precision
            converged = True
            logger.debug("MLE stalled", extra={"iterations": iterations})
            break

        last_step = candidate - rho
        rho, current = candidate, likelihood
        trace.append(current)
        if _trace_distance_below(last_step, tolerance):
            converged = True
            break

    eigenvalues, _ = hermitian_eig(last_step)
    final_change = 0.5 * float(np.sum(np.abs(eigenvalues)))

    if converged:
        logger.debug(
            "MLE converged",
            extra={"iterations": iterations, "dim": dim, "final_change": final_change},
        )
    else:
        logger.warning(
            "MLE did not converge",
            extra={"iterations": iterations, "dim": dim, "final_change": final_change},
        )

    return MLEResult(
        rho=rho,
        iterations=iterations,
        converged=converged,
        log_likelihoods=trace,
        final_change=final_change,
    )


# ── Persistence ────────────────────────────────────────────────────────


def dump_counts(records: Sequence[CountsRecord], path: str | Path) -> Path:
    """Write records as a JSON list of ``{basis, counts, shots}`` objects."""
    target = Path(path)
    try:
        target.write_bytes(_records_adapter.dump_json(list(records), indent=2))
    except OSError as exc:
        raise OutputWriteException(path=str(target), reason=str(exc)) from exc
    return target


def load_counts(path: str | Path) -> list[CountsRecord]:
    """
    Read records written by ``dump_counts`` or recorded from an experiment.

    Raises:
        ValidationException: If the file is missing or malformed.
    """
    source = Path(path)
    try:
        return _records_adapter.validate_json(source.read_bytes())
    except OSError as exc:
        raise ValidationException(
            message=f"Counts file '{source}' could not be read.",
            details={"path": str(source), "reason": str(exc)},
        ) from exc
    except PydanticValidationError as exc:
        raise ValidationException(
            message=f"Counts file '{source}' is malformed.",
            details={"path": str(source), "errors": str(exc)},
        ) from exc
