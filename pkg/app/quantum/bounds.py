"""
Deterministic orthogonalization bounds in the Choi representation.

A channel E on qubits is a positive operator χ on input ⊗ output
(input-major, computational-basis transpose) with Tr_out χ = I. For inputs
spread uniformly in φ on the circle of polar angle θ the average overlap
between input and output is Tr[R_θ χ]. The best deterministic map χ_opt(θ)
and its minimum overlap F_min(θ) are given in closed form; optimality is
certified by the positive operator M = R_θ − λ ⊗ I.

Notation: c = cos(θ/2), s = sin(θ/2).
"""

import math
from collections.abc import Sequence

import numpy as np
import numpy.typing as npt

from app.core.exceptions import (
    DimensionMismatchException,
    NotPositiveSemidefiniteException,
    ValidationException,
)
from app.core.logging import get_logger
from app.quantum.linalg import (
    ComplexMatrix,
    RealVector,
    as_matrix,
    hermitian_eig,
    identity,
    partial_trace,
    psd_inverse_sqrt,
    tensor,
)
from app.quantum.states import DensityMatrix, SeedLike, make_rng, pauli
from app.schemas.quantum_schema import ChoiOperator

logger = get_logger(__name__)

_MAX_RESAMPLES = 100


def threshold_angle() -> float:
    """θ_T = 2·arcsin(1/√3), where cos θ_T = 1/3 and the optimal map becomes unitary."""
    return 2.0 * math.asin(1.0 / math.sqrt(3.0))


def _half_angles(theta: float) -> tuple[float, float]:
    return math.cos(theta / 2), math.sin(theta / 2)


def _require_northern(theta: float) -> None:
    if not 0.0 <= theta <= math.pi / 2 + 1e-12:
        raise ValidationException(
            message="θ must lie in [0, π/2].",
            details={"theta": theta},
        )


# ── Choi constructions ─────────────────────────────────────────────────


def apply_choi(chi: ChoiOperator, rho: npt.ArrayLike) -> DensityMatrix:
    """
    ρ_out = Tr_in[(ρ^T ⊗ I) χ].

    Raises:
        DimensionMismatchException: If ``rho`` is not d_in × d_in.
    """
    m = as_matrix(rho)
    if m.shape != (chi.d_in, chi.d_in):
        raise DimensionMismatchException(
            message=f"Choi operator expects {chi.d_in}x{chi.d_in} input, got {m.shape}.",
        )
    joint = tensor(m.T, identity(chi.d_out)) @ chi.matrix
    return partial_trace(joint, (chi.d_in, chi.d_out), keep="B")


def choi_from_kraus(kraus_ops: Sequence[npt.ArrayLike]) -> ChoiOperator:
    """χ = Σ_k (I ⊗ K_k)|Ω⟩⟨Ω|(I ⊗ K_k)†, Ω = Σ_i |ii⟩."""
    ops = [as_matrix(k) for k in kraus_ops]
    d_out, d_in = ops[0].shape
    matrix = np.zeros((d_in * d_out, d_in * d_out), dtype=np.complex128)
    for k in ops:
        # (I ⊗ K)|Ω⟩ has amplitude K[j, i] at |i, j⟩
        v = k.T.reshape(-1)
        matrix += np.outer(v, v.conj())
    return ChoiOperator(d_in=d_in, d_out=d_out, matrix=matrix)


def identity_choi(dim: int = 2) -> ChoiOperator:
    return choi_from_kraus([identity(dim)])


def unitary_choi(unitary: npt.ArrayLike) -> ChoiOperator:
    return choi_from_kraus([unitary])


def dephasing_choi() -> ChoiOperator:
    """Measure σ_Z and re-prepare the outcome: χ = |00⟩⟨00| + |11⟩⟨11|."""
    return choi_from_kraus([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])


def random_cptp(dim_in: int, dim_out: int, seed: SeedLike) -> ChoiOperator:
    """
    Random channel: X = GG† for a Ginibre G, then
    χ = (T^{-1/2} ⊗ I) X (T^{-1/2} ⊗ I) with T = Tr_out X.

    A singular T is resampled.
    """
    if dim_in < 2 or dim_out < 2:
        raise ValidationException(
            message="Random channels need dims >= 2.",
            details={"dim_in": dim_in, "dim_out": dim_out},
        )
    rng = make_rng(seed)
    n = dim_in * dim_out
    for attempt in range(_MAX_RESAMPLES):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        x = g @ g.conj().T
        try:
            root = psd_inverse_sqrt(partial_trace(x, (dim_in, dim_out), keep="A"))
        except NotPositiveSemidefiniteException:
            logger.debug("Singular partial trace, resampling", extra={"attempt": attempt})
            continue
        k = tensor(root, identity(dim_out))
        chi = k @ x @ k
        return ChoiOperator(d_in=dim_in, d_out=dim_out, matrix=0.5 * (chi + chi.conj().T))
    raise ValidationException(message="Could not sample a random channel.")


# ── Figure of merit ────────────────────────────────────────────────────


def r_theta(theta: float) -> ComplexMatrix:
    """φ-average of ψ^T ⊗ ψ over the circle of polar angle θ."""
    c, s = _half_angles(theta)
    cs = c * c * s * s
    r = np.diag([c**4, cs, cs, s**4]).astype(np.complex128)
    r[0, 3] = r[3, 0] = cs
    return r


def average_overlap(chi: ChoiOperator, theta: float) -> float:
    """
    Tr[R_θ χ]: mean overlap between inputs on the θ circle and their images.

    Raises:
        DimensionMismatchException: For anything but a qubit channel.
    """
    if chi.d_in != 2 or chi.d_out != 2:
        raise DimensionMismatchException(
            message="Average overlap is defined for qubit channels.",
            details={"d_in": chi.d_in, "d_out": chi.d_out},
        )
    return float(np.trace(r_theta(theta) @ chi.matrix).real)


# ── Optimal deterministic map ──────────────────────────────────────────


def optimal_a(theta: float) -> float:
    """sin²(θ/2)/cos θ below θ_T, 1 above; continuous at θ_T."""
    _require_northern(theta)
    if theta > threshold_angle():
        return 1.0
    return math.sin(theta / 2) ** 2 / math.cos(theta)


def chi_opt(theta: float) -> ChoiOperator:
    """
    Optimal deterministic orthogonalizer for the θ circle.

    χ = (a|00⟩ − |11⟩)(a⟨00| − ⟨11|) + (1 − a²)|01⟩⟨01|. For θ in (π/2, π)
    the map for π − θ is conjugated by bit flips on input and output.
    """
    if math.pi / 2 < theta < math.pi:
        flip = tensor(pauli("X"), pauli("X"))
        base = chi_opt(math.pi - theta)
        return ChoiOperator(d_in=2, d_out=2, matrix=flip @ base.matrix @ flip)

    a = optimal_a(theta)
    v = np.array([a, 0.0, 0.0, -1.0], dtype=np.complex128)
    matrix = np.outer(v, v.conj())
    matrix[1, 1] += 1.0 - a * a
    return ChoiOperator(d_in=2, d_out=2, matrix=matrix)


def f_min(theta: float) -> float:
    """
    Minimum average overlap reachable by a deterministic map:
    ¼ sin²θ − s⁶/cos θ up to θ_T, cos²θ beyond.
    """
    if math.pi / 2 < theta <= math.pi:
        return f_min(math.pi - theta)
    _require_northern(theta)
    if theta > threshold_angle():
        return math.cos(theta) ** 2
    s = math.sin(theta / 2)
    return 0.25 * math.sin(theta) ** 2 - s**6 / math.cos(theta)


def lambda_operator(theta: float) -> ComplexMatrix:
    """
    Dual operator λ with Tr λ = F_min(θ).

    Not to be confused with the normalization λ of a quantum filter.
    """
    _require_northern(theta)
    c, s = _half_angles(theta)
    if theta > threshold_angle():
        diagonal = [math.cos(theta) * c * c, -math.cos(theta) * s * s]
    else:
        diagonal = [0.25 * math.sin(theta) ** 2, -(s**6) / math.cos(theta)]
    return np.diag(diagonal).astype(np.complex128)


def certificate_m(theta: float) -> tuple[ComplexMatrix, RealVector]:
    """
    M = R_θ − λ ⊗ I and its ascending eigenvalues.

    M ≥ 0 together with Tr[Mχ] = Tr[R_θχ] − Tr λ for every trace-preserving χ
    proves that no deterministic map goes below F_min.
    """
    m = r_theta(theta) - tensor(lambda_operator(theta), identity(2))
    eigenvalues, _ = hermitian_eig(m)
    if eigenvalues[0] < -1e-10:
        logger.warning(
            "Certificate has a negative eigenvalue",
            extra={"theta": theta, "min_eigenvalue": float(eigenvalues[0])},
        )
    return m, eigenvalues


# ── Universal inverter ─────────────────────────────────────────────────


def universal_inverter(rho: npt.ArrayLike, dim: int) -> DensityMatrix:
    """(dI − ρ)/(d² − 1); pure inputs keep overlap 1/(d + 1)."""
    m = as_matrix(rho)
    if m.shape != (dim, dim) or dim < 2:
        raise DimensionMismatchException(
            message=f"Inverter of dim {dim} cannot act on {m.shape}.",
        )
    return (dim * identity(dim) - m) / (dim * dim - 1)
