"""
Qubit and qudit states: Poincaré-sphere parametrization, Pauli operators,
expectation values, Haar-random sampling and purity.

State vectors and density matrices are plain ``complex128`` arrays
(1-D and 2-D respectively). Randomness always comes from an explicit
``numpy.random.Generator`` (PCG64) or an integer seed for one, never from
global state.
"""

import math
from typing import Literal

import numpy as np
import numpy.typing as npt

from app.core.exceptions import DimensionMismatchException, InvalidStateException
from app.quantum.linalg import (
    HERMITIAN_TOL,
    PSD_CLAMP_TOL,
    ComplexMatrix,
    as_matrix,
    hermitian_eig,
    is_hermitian,
)
from app.schemas.quantum_schema import PureQubitState

StateVector = npt.NDArray[np.complex128]
DensityMatrix = ComplexMatrix
SeedLike = int | np.random.Generator

PauliAxis = Literal["X", "Y", "Z"]

_PAULI: dict[str, ComplexMatrix] = {
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def make_rng(seed: SeedLike) -> np.random.Generator:
    """PCG64 generator for an integer seed; generators pass through unchanged."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


# ── Pure qubit states ──────────────────────────────────────────────────


def to_vector(s: PureQubitState) -> StateVector:
    """(cos(θ/2), e^{iφ} sin(θ/2))."""
    return np.array(
        [math.cos(s.theta / 2), np.exp(1j * s.phi) * math.sin(s.theta / 2)],
        dtype=np.complex128,
    )


def orthogonal_partner(s: PureQubitState) -> StateVector:
    """sin(θ/2)|0⟩ − e^{iφ} cos(θ/2)|1⟩, orthogonal to ``to_vector(s)``."""
    return np.array(
        [math.sin(s.theta / 2), -np.exp(1j * s.phi) * math.cos(s.theta / 2)],
        dtype=np.complex128,
    )


def bloch_angles(vec: npt.ArrayLike) -> PureQubitState:
    """Inverse of ``to_vector`` up to global phase."""
    v = normalize(vec)
    if v.shape != (2,):
        raise DimensionMismatchException(message="Bloch angles need a qubit vector.")
    theta = 2.0 * math.atan2(abs(v[1]), abs(v[0]))
    phi = float(np.angle(v[1]) - np.angle(v[0])) if abs(v[0]) > 0 and abs(v[1]) > 0 else 0.0
    return PureQubitState(theta=theta, phi=phi)


def pauli(axis: PauliAxis) -> ComplexMatrix:
    return _PAULI[axis].copy()


# ── Generic vectors / density matrices ────────────────────────────────


def normalize(vec: npt.ArrayLike) -> StateVector:
    v = np.asarray(vec, dtype=np.complex128)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise InvalidStateException(message="Cannot normalize the zero vector.")
    return v / norm


def density_matrix(vec: npt.ArrayLike) -> DensityMatrix:
    """Projector |ψ⟩⟨ψ| of a (normalized) state vector."""
    v = normalize(vec)
    return np.outer(v, v.conj())


def validate_density_matrix(rho: npt.ArrayLike, tol: float = HERMITIAN_TOL) -> DensityMatrix:
    """
    Check Hermiticity, positivity (with clamping tolerance) and unit trace.

    Raises:
        InvalidStateException: On any violated invariant.
    """
    m = as_matrix(rho)
    if m.shape[0] != m.shape[1]:
        raise InvalidStateException(message=f"Density matrix must be square, got {m.shape}.")
    if not is_hermitian(m, tol):
        raise InvalidStateException(message="Density matrix is not Hermitian.")
    trace = complex(np.trace(m))
    if abs(trace - 1.0) > tol:
        raise InvalidStateException(
            message="Density matrix does not have unit trace.",
            details={"trace": [trace.real, trace.imag]},
        )
    eigenvalues, _ = hermitian_eig(m)
    if eigenvalues[0] < -PSD_CLAMP_TOL:
        raise InvalidStateException(
            message="Density matrix is not positive semidefinite.",
            details={"min_eigenvalue": float(eigenvalues[0])},
        )
    return m


def expectation(op: npt.ArrayLike, state: npt.ArrayLike) -> complex:
    """
    ⟨ψ|A|ψ⟩ for a state vector, Tr[Aρ] for a density matrix.

    Raises:
        DimensionMismatchException: If the operator and state sizes differ.
    """
    a = as_matrix(op)
    s = np.asarray(state, dtype=np.complex128)
    if s.shape[0] != a.shape[1] or (s.ndim == 2 and s.shape != a.shape):
        raise DimensionMismatchException(
            message=f"Operator {a.shape} does not act on state {s.shape}.",
        )
    if s.ndim == 1:
        return complex(np.vdot(s, a @ s))
    return complex(np.trace(a @ s))


def purity(rho: npt.ArrayLike) -> float:
    """Tr(ρ²), in [1/d, 1] for a valid density matrix."""
    m = as_matrix(rho)
    # Tr(ρ²) = Σ|ρ_ij|² for Hermitian ρ
    return float(np.sum(np.abs(m) ** 2))


# ── Haar sampling ──────────────────────────────────────────────────────


def haar_random_pure(dim: int, seed: SeedLike) -> StateVector:
    """
    Haar-distributed pure state: 2·dim standard normals as real and
    imaginary parts, normalized.
    """
    if dim < 2:
        raise DimensionMismatchException(message=f"Haar sampling needs dim >= 2, got {dim}.")
    rng = make_rng(seed)
    raw = rng.standard_normal(2 * dim)
    return normalize(raw[:dim] + 1j * raw[dim:])


def haar_random_pure_batch(dim: int, samples: int, seed: SeedLike) -> npt.NDArray[np.complex128]:
    """``samples`` Haar states as rows, same construction as ``haar_random_pure``."""
    if dim < 2:
        raise DimensionMismatchException(message=f"Haar sampling needs dim >= 2, got {dim}.")
    rng = make_rng(seed)
    raw = rng.standard_normal((samples, 2 * dim))
    vecs = raw[:, :dim] + 1j * raw[:, dim:]
    return vecs / np.linalg.norm(vecs, axis=1, keepdims=True)


def haar_random_unitary(dim: int, seed: SeedLike) -> ComplexMatrix:
    """Haar unitary from the QR decomposition of a Ginibre matrix, phases fixed."""
    rng = make_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
