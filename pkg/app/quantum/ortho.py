"""
Conditional orthogonalization by quantum filtering.

Knowing only a = ⟨ψ|A|ψ⟩ is enough to prepare a state orthogonal to ψ:
the filter (A − aI)/λ succeeds with probability ‖(A − aI)ψ‖²/λ² and its
output has zero overlap with ψ. For A = σ_Z and a = cos θ the filter is
diag(tan²(θ/2), −1), realizable as an attenuation of the |0⟩ amplitude
followed by a π phase shift. Applied to one qubit of a bipartite state,
the same filter orthogonalizes the whole state.
"""

import math

import numpy as np
import numpy.typing as npt

from app.core.exceptions import (
    DegenerateFilterException,
    DimensionMismatchException,
    FilteredToZeroException,
    ValidationException,
)
from app.core.logging import get_logger
from app.quantum.channels import BaseChannel
from app.quantum.linalg import (
    ComplexMatrix,
    as_matrix,
    hermitian_eig,
    identity,
    tensor,
)
from app.quantum.states import (
    DensityMatrix,
    SeedLike,
    StateVector,
    expectation,
    make_rng,
    pauli,
    to_vector,
    validate_density_matrix,
)
from app.schemas.quantum_schema import PureQubitState, QuantumFilter, TwoStepDecomposition

logger = get_logger(__name__)

# Below this the filter or its output is treated as zero
_DEGENERATE_TOL = 1e-14

_BIT_FLIP = pauli("X")


def max_singular_value(m: npt.ArrayLike) -> float:
    a = as_matrix(m)
    eigenvalues, _ = hermitian_eig(a.conj().T @ a)
    return math.sqrt(max(float(eigenvalues[-1]), 0.0))


# ── Filter construction ────────────────────────────────────────────────


def build_filter(a_op: npt.ArrayLike, mean: complex) -> QuantumFilter:
    """
    Normalized filter (A − aI)/λ, λ the largest singular value of A − aI.

    A mean value outside the operator's range still yields a filter, flagged
    with ``mean_in_range=False``.

    Raises:
        DimensionMismatchException: If ``a_op`` is not square.
        DegenerateFilterException:  If A − aI vanishes.
    """
    a = as_matrix(a_op)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatchException(message=f"Filter operator must be square, got {a.shape}.")

    delta = a - mean * identity(a.shape[0])
    lam = max_singular_value(delta)
    if lam < _DEGENERATE_TOL:
        raise DegenerateFilterException(details={"mean": [complex(mean).real, complex(mean).imag]})

    in_range = abs(mean) <= max_singular_value(a) + 1e-12
    if not in_range:
        logger.warning(
            "Filter mean value exceeds the operator norm",
            extra={"mean_abs": abs(mean)},
        )

    return QuantumFilter(
        operator=delta / lam,
        lam=lam,
        mean_value=complex(mean),
        source_operator=a,
        mean_in_range=in_range,
    )


def z_filter(theta: float) -> QuantumFilter:
    """
    σ_Z filter for states with ⟨σ_Z⟩ = cos θ: diag(tan²(θ/2), −1).

    Southern-hemisphere angles (π/2 < θ < π) are handled by reflecting to
    π − θ and conjugating with a bit flip, then flipping the sign so the
    operator stays (σ_Z − cos θ·I)/λ; the result is marked ``reflected``.

    Raises:
        DegenerateFilterException: For θ at a pole (success probability 0).
    """
    if not 0.0 < theta < math.pi:
        raise DegenerateFilterException(
            message="σ_Z filter is undefined at the poles of the Poincaré sphere.",
            details={"theta": theta},
        )

    reflected = theta > math.pi / 2
    base = math.pi - theta if reflected else theta
    operator = np.diag([math.tan(base / 2) ** 2, -1.0]).astype(np.complex128)
    if reflected:
        operator = -(_BIT_FLIP @ operator @ _BIT_FLIP)

    return QuantumFilter(
        operator=operator,
        lam=1.0 + abs(math.cos(theta)),
        mean_value=complex(math.cos(theta)),
        source_operator=pauli("Z"),
        reflected=reflected,
    )


def with_attenuation_error(f: QuantumFilter, delta: float) -> QuantumFilter:
    """
    Filter whose attenuated diagonal element is off by ``delta``.

    The attenuated element (the one with modulus below 1) has its modulus
    shifted by ``delta`` and clipped to [0, 1], keeping its sign; this models
    an imprecise setting of the attenuator.
    """
    if delta == 0.0:
        return f
    diagonal = np.diag(f.operator).copy()
    k = int(np.argmin(np.abs(diagonal)))
    element = diagonal[k].real
    sign = -1.0 if element < 0.0 else 1.0
    diagonal[k] = sign * float(np.clip(abs(element) + delta, 0.0, 1.0))
    return f.model_copy(update={"operator": np.diag(diagonal).astype(np.complex128)})


# ── Filter application ─────────────────────────────────────────────────


def apply_filter(f: QuantumFilter, state: npt.ArrayLike) -> tuple[StateVector, float]:
    """
    Apply a filter to a pure state.

    Returns:
        (normalized output, success probability ‖Fψ‖²)

    Raises:
        DimensionMismatchException: If sizes differ.
        FilteredToZeroException:    If ‖Fψ‖² < 1e-14.
    """
    psi = np.asarray(state, dtype=np.complex128)
    if psi.shape != (f.dim,):
        raise DimensionMismatchException(
            message=f"Filter of dim {f.dim} cannot act on state of shape {psi.shape}.",
        )
    out = f.operator @ psi
    p_success = float(np.vdot(out, out).real)
    if p_success < _DEGENERATE_TOL:
        raise FilteredToZeroException(details={"p_success": p_success})
    return out / math.sqrt(p_success), p_success


def apply_filter_to_density(f: QuantumFilter, rho: npt.ArrayLike) -> tuple[DensityMatrix, float]:
    """Mixed-state version: FρF†/Tr(FρF†) with success probability Tr(FρF†)."""
    m = as_matrix(rho)
    if m.shape != (f.dim, f.dim):
        raise DimensionMismatchException(
            message=f"Filter of dim {f.dim} cannot act on state of shape {m.shape}.",
        )
    out = f.operator @ m @ f.operator.conj().T
    p_success = float(np.trace(out).real)
    if p_success < _DEGENERATE_TOL:
        raise FilteredToZeroException(details={"p_success": p_success})
    return out / p_success, p_success


def success_probability(a_op: npt.ArrayLike, psi: npt.ArrayLike) -> float:
    """Closed form (⟨A†A⟩ − |a|²)/λ² with a = ⟨ψ|A|ψ⟩."""
    a = as_matrix(a_op)
    mean = expectation(a, psi)
    lam = max_singular_value(a - mean * identity(a.shape[0]))
    return (expectation(a.conj().T @ a, psi).real - abs(mean) ** 2) / lam**2


def two_step(theta: float) -> TwoStepDecomposition:
    """
    Split the σ_Z filter into attenuation of |0⟩ by tan²(θ/2) and a π phase.

    Raises:
        DegenerateFilterException: For θ outside (0, π/2].
    """
    if not 0.0 < theta <= math.pi / 2 + 1e-12:
        raise DegenerateFilterException(
            message="Two-step decomposition needs 0 < θ <= π/2.",
            details={"theta": theta},
        )
    half_tan = min(math.tan(theta / 2), 1.0)
    return TwoStepDecomposition(
        theta=theta,
        attenuation=half_tan**2,
        phase_shift=math.pi,
        waveplate_angle=0.5 * math.acos(half_tan),
    )


# ── Two-qubit states ───────────────────────────────────────────────────


def cz_gate() -> ComplexMatrix:
    """U_CZ|jk⟩ = (−1)^{jk}|jk⟩."""
    return np.diag([1.0, 1.0, 1.0, -1.0]).astype(np.complex128)


def prepare_entangled(s1: PureQubitState, s2: PureQubitState) -> StateVector:
    """U_CZ |ψ₁⟩|ψ₂⟩ = cos(θ₁/2)|0⟩|ψ⁺⟩ + e^{iφ₁} sin(θ₁/2)|1⟩|ψ⁻⟩."""
    return cz_gate() @ np.kron(to_vector(s1), to_vector(s2))


def local_orthogonalize(
    psi: npt.ArrayLike,
    theta1: float,
    tolerance: float | None = None,
    attenuation_error: float = 0.0,
) -> tuple[StateVector, float]:
    """
    Orthogonalize a two-qubit state by filtering the first qubit only.

    Args:
        psi:               Two-qubit state vector.
        theta1:            Angle defining the filter, ⟨σ_Z ⊗ I⟩ = cos θ₁. May
                           differ from the true value to study estimation errors.
        tolerance:         When given, ⟨σ_Z ⊗ I⟩ on ``psi`` must match cos θ₁
                           within it.
        attenuation_error: Additive error on the attenuated filter element.

    Raises:
        ValidationException: If ``tolerance`` is given and the mean does not match.
    """
    state = np.asarray(psi, dtype=np.complex128)
    if state.shape != (4,):
        raise DimensionMismatchException(message=f"Expected a two-qubit state, got {state.shape}.")
    if tolerance is not None:
        mean = expectation(tensor(pauli("Z"), identity(2)), state).real
        if abs(mean - math.cos(theta1)) > tolerance:
            raise ValidationException(
                message="⟨σ_Z ⊗ I⟩ of the state does not match cos θ₁.",
                details={"measured": mean, "expected": math.cos(theta1)},
            )
    local = with_attenuation_error(z_filter(theta1), attenuation_error)
    return apply_filter(lift_filter(local), state)


def lift_filter(f: QuantumFilter) -> QuantumFilter:
    """F ⊗ I acting on the first qubit of a pair."""
    return f.model_copy(
        update={
            "operator": tensor(f.operator, identity(2)),
            "source_operator": tensor(f.source_operator, identity(2)),
        }
    )


class NoisyCZChannel(BaseChannel):
    """
    CZ gate with limited two-photon interference visibility.

    ρ → V·UρU† + (1−V)·D(UρU†), where D removes the coherences between |11⟩
    and the other computational basis states. This dephasing model is a
    reconstruction: only the |1⟩ arm of the first photon meets the second
    photon on the partially polarizing beam splitter.
    """

    def __init__(self, visibility: float) -> None:
        if not 0.0 <= visibility <= 1.0:
            raise ValidationException(
                message="Visibility must lie in [0, 1].",
                details={"visibility": visibility},
            )
        self.visibility = visibility
        self._unitary = cz_gate()
        mask = np.ones((4, 4))
        mask[3, :3] = mask[:3, 3] = visibility
        self._coherence_mask = mask

    @property
    def dim(self) -> int:
        return 4

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        m = as_matrix(rho)
        if m.shape != (4, 4):
            raise DimensionMismatchException(message=f"CZ acts on 4x4 states, got {m.shape}.")
        rotated = self._unitary @ m @ self._unitary.conj().T
        return rotated * self._coherence_mask


def noisy_cz(visibility: float) -> NoisyCZChannel:
    return NoisyCZChannel(visibility)


# ── Estimating the mean value ──────────────────────────────────────────


def estimate_mean_z(counts0: int, counts1: int) -> float:
    """
    ⟨σ_Z⟩ from H/V counts, clamped to the northern hemisphere [0, 1].

    Raises:
        ValidationException: If no counts were recorded.
    """
    total = counts0 + counts1
    if counts0 < 0 or counts1 < 0 or total == 0:
        raise ValidationException(
            message="Mean estimate needs a positive number of counts.",
            details={"counts0": counts0, "counts1": counts1},
        )
    return min(max((counts0 - counts1) / total, 0.0), 1.0)


def simulate_mean_z(rho: npt.ArrayLike, shots: int, seed: SeedLike) -> tuple[int, int]:
    """H/V counts on the first qubit of ``rho`` (state vector or density matrix)."""
    state = np.asarray(rho, dtype=np.complex128)
    if state.ndim == 1:
        state = np.outer(state, state.conj())
    else:
        state = validate_density_matrix(state)
    dim = state.shape[0]
    z_first = tensor(pauli("Z"), identity(dim // 2)) if dim > 2 else pauli("Z")
    p0 = float(np.clip((1.0 + expectation(z_first, state).real) / 2.0, 0.0, 1.0))
    counts0 = int(make_rng(seed).binomial(shots, p0))
    return counts0, shots - counts0


def theta_from_mean(mean: float) -> float:
    """Polar angle with cos θ = mean, mean clamped to [0, 1]."""
    return math.acos(min(max(mean, 0.0), 1.0))
