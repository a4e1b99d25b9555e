"""
Experiment parameters, result rows and run metadata.

The same models back the CLI (flags are validated into ``*Params``) and the
HTTP API (request bodies). Angles are in degrees at this layer; the library
works in radians.
"""

from typing import Any, Literal

from pydantic import BaseModel, Field, field_validator, model_validator

MeanSource = Literal["known", "measured"]

SCHEMA_VERSION = 1

# Even grid, not the angles of any particular measurement run
DEFAULT_THETAS_DEG = [22.0, 44.0, 66.0, 88.0]
DEFAULT_PHIS_DEG = [0.0, 90.0, 180.0, 270.0]


def _polar_in_range(values: list[float]) -> list[float]:
    for theta in values:
        if not 0.0 < theta < 180.0:
            raise ValueError(f"polar angle {theta} must lie strictly between 0 and 180 degrees")
    return values


# ── Parameters ─────────────────────────────────────────────────────────


class SingleQubitParams(BaseModel):
    """Single-qubit orthogonalization run over a (θ, φ) grid."""

    thetas_deg: list[float] = Field(default_factory=lambda: list(DEFAULT_THETAS_DEG), min_length=1)
    phis_deg: list[float] = Field(default_factory=lambda: list(DEFAULT_PHIS_DEG), min_length=1)
    shots: int = Field(default=100_000, ge=1, description="Copies per basis setting")
    attenuation_error: float = Field(
        default=0.0, ge=-1.0, le=1.0,
        description="Additive error on the attenuation factor tan²(θ/2)",
    )
    mean_source: MeanSource = Field(
        default="known",
        description="Take ⟨σ_Z⟩ from the preparation or from simulated H/V counts",
    )
    seed: int = Field(default=2014, ge=0)
    dump_states: bool = False

    @field_validator("thetas_deg")
    @classmethod
    def _thetas_in_range(cls, values: list[float]) -> list[float]:
        return _polar_in_range(values)

    @model_validator(mode="after")
    def _measured_needs_northern(self) -> "SingleQubitParams":
        # H/V counts only fix cos θ up to the hemisphere, which is taken as northern
        if self.mean_source == "measured" and any(t > 90.0 for t in self.thetas_deg):
            raise ValueError("mean_source=measured needs polar angles of at most 90 degrees")
        return self


class AngleQuadruple(BaseModel):
    """Preparation angles of U_CZ|ψ₁⟩|ψ₂⟩, degrees."""

    theta1: float = Field(..., gt=0.0, le=90.0, description="Northern hemisphere, the filtered qubit")
    phi1: float = 0.0
    theta2: float = Field(..., ge=0.0, le=180.0)
    phi2: float = 0.0


DEFAULT_QUADRUPLES = [
    AngleQuadruple(theta1=45.0, phi1=0.0, theta2=90.0, phi2=0.0),
    AngleQuadruple(theta1=67.5, phi1=0.0, theta2=90.0, phi2=0.0),
    AngleQuadruple(theta1=45.0, phi1=0.0, theta2=45.0, phi2=0.0),
    AngleQuadruple(theta1=67.5, phi1=0.0, theta2=45.0, phi2=0.0),
    AngleQuadruple(theta1=67.5, phi1=90.0, theta2=45.0, phi2=90.0),
]


class TwoQubitParams(BaseModel):
    """Local orthogonalization of CZ-entangled pairs."""

    quadruples: list[AngleQuadruple] = Field(
        default_factory=lambda: [q.model_copy() for q in DEFAULT_QUADRUPLES],
        min_length=1,
    )
    shots: int = Field(default=100_000, ge=1)
    visibility: float = Field(default=0.94, ge=0.0, le=1.0)
    mean_source: MeanSource = Field(
        default="known",
        description="Mean value behind the unprimed columns; the other source fills the primed ones",
    )
    seed: int = Field(default=2014, ge=0)
    dump_states: bool = False


class BoundsParams(BaseModel):
    """Deterministic-bound sweep and Haar benchmark."""

    theta_step_deg: float = Field(default=5.0, gt=0.0, le=90.0)
    thetas_deg: list[float] | None = Field(
        default=None,
        description="Explicit θ values; overrides the stepped grid",
    )
    random_maps: int = Field(default=1000, ge=1)
    haar_samples: int = Field(default=100_000, ge=2)
    seed: int = Field(default=2014, ge=0)

    @field_validator("thetas_deg")
    @classmethod
    def _thetas_in_range(cls, values: list[float] | None) -> list[float] | None:
        if values is None:
            return None
        for theta in values:
            if not 0.0 <= theta <= 90.0:
                raise ValueError(f"bound angle {theta} must lie in [0, 90] degrees")
        return values


# ── Rows ───────────────────────────────────────────────────────────────


class SingleQubitRow(BaseModel):
    """Filter-dependent columns are None when the cell could not be filtered."""

    theta: float
    phi: float
    overlap: float | None
    purity_in: float
    purity_out: float | None
    p_success: float | None


class TwoQubitRow(BaseModel):
    """
    Unprimed columns use the mean value chosen by ``mean_source`` (the known
    one by default), primed columns the other source.
    Output columns are None when the pair could not be filtered.
    """

    theta1: float
    phi1: float
    theta2: float
    phi2: float
    F: float | None
    F_prime: float | None
    P_I: float
    P_O: float | None
    P_O_prime: float | None
    Ef_I: float
    Ef_O: float | None
    Ef_O_prime: float | None
    p_success: float | None
    p_success_prime: float | None


class BoundsRow(BaseModel):
    theta: float
    f_min: float
    chi_opt_overlap: float
    random_min_overlap: float
    certificate_min_eigenvalue: float


class HaarRow(BaseModel):
    channel: str
    dim: int
    mean: float
    stderr: float
    bound: float


class StateDump(BaseModel):
    """Reconstructed density matrix, split into real and imaginary parts."""

    label: str
    role: Literal["input", "output", "output_measured"]
    real: list[list[float]]
    imag: list[list[float]]


# ── Envelopes ──────────────────────────────────────────────────────────


class RunMetadata(BaseModel):
    """Written as ``metadata.json``; carries no timestamps so reruns are identical."""

    schema_version: int = SCHEMA_VERSION
    command: str
    library_version: str
    seed: int
    flags: dict[str, Any] = Field(default_factory=dict)


class SingleQubitResponse(BaseModel):
    status: str = Field(default="ok")
    total_count: int = Field(default=0)
    rows: list[SingleQubitRow] = Field(default_factory=list)
    states: list[StateDump] = Field(default_factory=list)
    metadata: RunMetadata


class TwoQubitResponse(BaseModel):
    status: str = Field(default="ok")
    total_count: int = Field(default=0)
    rows: list[TwoQubitRow] = Field(default_factory=list)
    states: list[StateDump] = Field(default_factory=list)
    metadata: RunMetadata


class BoundsResponse(BaseModel):
    status: str = Field(default="ok")
    total_count: int = Field(default=0)
    rows: list[BoundsRow] = Field(default_factory=list)
    haar: list[HaarRow] = Field(default_factory=list)
    metadata: RunMetadata
