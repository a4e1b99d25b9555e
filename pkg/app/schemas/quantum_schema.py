"""
Pydantic value types for the quantum library.

Operators are carried as ``complex128`` numpy arrays (``arbitrary_types_allowed``);
models are frozen so they can be shared across threads and Monte Carlo
workers without copying.
"""

import math
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.exceptions import InvalidStateException
from app.quantum.linalg import (
    HERMITIAN_TOL,
    PSD_CLAMP_TOL,
    ComplexMatrix,
    hermitian_eig,
    is_hermitian,
    partial_trace,
)

BasisLabel = Literal["HV", "DA", "RL"]

_TWO_PI = 2.0 * math.pi


# ── Pure qubit states ──────────────────────────────────────────────────


class PureQubitState(BaseModel):
    """
    Point on the Poincaré sphere: cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩.

    Angles are reduced canonically at construction (θ into [0, π],
    φ into [0, 2π)); a polar angle past the south pole moves the azimuth
    by π.
    """

    model_config = ConfigDict(frozen=True)

    theta: float = Field(..., description="Polar angle θ in radians, [0, π]")
    phi: float = Field(default=0.0, description="Azimuth φ in radians, [0, 2π)")

    @model_validator(mode="before")
    @classmethod
    def _canonical_angles(cls, data: Any) -> Any:
        if not isinstance(data, dict) or "theta" not in data:
            return data
        theta = math.fmod(float(data["theta"]), _TWO_PI)
        if theta < 0.0:
            theta += _TWO_PI
        phi = float(data.get("phi", 0.0))
        if theta > math.pi:
            theta = _TWO_PI - theta
            phi += math.pi
        phi = math.fmod(phi, _TWO_PI)
        if phi < 0.0:
            phi += _TWO_PI
        if phi >= _TWO_PI:
            phi = 0.0
        return {**data, "theta": theta, "phi": phi}

    @classmethod
    def from_degrees(cls, theta_deg: float, phi_deg: float = 0.0) -> "PureQubitState":
        return cls(theta=math.radians(theta_deg), phi=math.radians(phi_deg))


# ── Filters ────────────────────────────────────────────────────────────


class QuantumFilter(BaseModel):
    """
    Normalized filter (A − a·I)/λ.

    ``lam`` is λ = max singular value of A − aI; it is unrelated to the
    operator λ of the optimality certificate in ``app.quantum.bounds``.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    operator: np.ndarray = Field(..., description="(A - aI)/λ, max singular value 1")
    lam: float = Field(..., gt=0.0, description="λ = max_j |ΔA_j| divided out")
    mean_value: complex = Field(..., description="The mean value a used")
    source_operator: np.ndarray = Field(..., description="The operator A")
    mean_in_range: bool = Field(default=True, description="|a| <= max singular value of A")
    reflected: bool = Field(
        default=False,
        description="Built for the southern hemisphere by bit-flip conjugation",
    )

    @property
    def dim(self) -> int:
        return int(self.operator.shape[0])


class TwoStepDecomposition(BaseModel):
    """
    Attenuation of the |0⟩ amplitude followed by a π phase shift.

    ``attenuation`` is the factor tan²(θ/2) applied to the |0⟩ amplitude;
    ``waveplate_angle`` ϑ satisfies cos 2ϑ = tan(θ/2) = √attenuation.
    """

    model_config = ConfigDict(frozen=True)

    theta: float = Field(..., gt=0.0, le=math.pi / 2 + 1e-12)
    attenuation: float = Field(..., ge=0.0, le=1.0)
    phase_shift: float = Field(default=math.pi)
    waveplate_angle: float = Field(..., ge=0.0, le=math.pi / 4 + 1e-12)

    def attenuation_matrix(self) -> ComplexMatrix:
        return np.diag([self.attenuation, 1.0]).astype(np.complex128)

    def phase_matrix(self) -> ComplexMatrix:
        return np.diag([1.0, np.exp(1j * self.phase_shift)]).astype(np.complex128)

    def composed(self) -> ComplexMatrix:
        """Phase step after attenuation step."""
        return self.phase_matrix() @ self.attenuation_matrix()

    def map_angles(self, state: PureQubitState) -> PureQubitState:
        """Image of a state on the θ circle: θ → π − θ, φ → φ + π."""
        return PureQubitState(theta=math.pi - state.theta, phi=state.phi + self.phase_shift)


# ── Channels ───────────────────────────────────────────────────────────


class ChoiOperator(BaseModel):
    """
    Choi matrix of a deterministic (CPTP) channel.

    Basis ordering is input-major (``|i_in, j_out⟩`` at ``i_in * d_out + j_out``),
    transposition is taken in the computational basis, and the channel acts as
    ρ_out = Tr_in[(ρ_in^T ⊗ I_out) χ]. Construction enforces χ ≥ 0 and
    Tr_out χ = I_in.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    d_in: int = Field(..., ge=1)
    d_out: int = Field(..., ge=1)
    matrix: np.ndarray

    @model_validator(mode="after")
    def _check_invariants(self) -> "ChoiOperator":
        size = self.d_in * self.d_out
        if self.matrix.shape != (size, size):
            raise InvalidStateException(
                message=f"Choi matrix must be {size}x{size}, got {self.matrix.shape}.",
            )
        if not is_hermitian(self.matrix, HERMITIAN_TOL):
            raise InvalidStateException(message="Choi matrix is not Hermitian.")
        eigenvalues, _ = hermitian_eig(self.matrix)
        if eigenvalues[0] < -PSD_CLAMP_TOL:
            raise InvalidStateException(
                message="Choi matrix is not positive semidefinite.",
                details={"min_eigenvalue": float(eigenvalues[0])},
            )
        reduced = partial_trace(self.matrix, (self.d_in, self.d_out), keep="A")
        residual = float(np.max(np.abs(reduced - np.eye(self.d_in))))
        if residual > HERMITIAN_TOL:
            raise InvalidStateException(
                message="Choi matrix is not trace preserving (Tr_out χ != I).",
                details={"residual": residual},
            )
        return self


# ── Tomography ─────────────────────────────────────────────────────────


class MeasurementBasis(BaseModel):
    """Projective measurement given by one MUB label per qubit."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    labels: tuple[BasisLabel, ...] = Field(..., min_length=1)
    projectors: list[np.ndarray]

    @property
    def dim(self) -> int:
        return int(self.projectors[0].shape[0])


class CountsRecord(BaseModel):
    """
    Detector counts for one basis setting.

    Serializes to JSON as ``{"basis": ["HV", "DA"], "counts": [...], "shots": N}``
    so recorded experimental data can be fed to the reconstruction.
    """

    model_config = ConfigDict(frozen=True)

    basis: tuple[BasisLabel, ...] = Field(..., min_length=1)
    counts: list[int]
    shots: int = Field(..., ge=0)

    @field_validator("counts")
    @classmethod
    def _non_negative(cls, counts: list[int]) -> list[int]:
        if any(c < 0 for c in counts):
            raise ValueError("counts must be non-negative")
        return counts

    @model_validator(mode="after")
    def _counts_sum_to_shots(self) -> "CountsRecord":
        if sum(self.counts) != self.shots:
            raise ValueError(f"counts sum {sum(self.counts)} != shots {self.shots}")
        if len(self.counts) != 2 ** len(self.basis):
            raise ValueError(
                f"{len(self.basis)}-qubit basis needs {2 ** len(self.basis)} outcomes, "
                f"got {len(self.counts)}"
            )
        return self


class MLEResult(BaseModel):
    """Maximum-likelihood reconstruction with convergence diagnostics."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    rho: np.ndarray
    iterations: int
    converged: bool
    log_likelihoods: list[float] = Field(default_factory=list)
    final_change: float = Field(..., description="Trace distance of the last accepted step")
