"""
Figures of merit: Uhlmann fidelity, entropies, Wootters concurrence,
entanglement of formation and Haar-averaged channel overlaps.

Entropies are in bits.
"""

import math

import numpy as np
import numpy.typing as npt
from scipy.special import entr

from app.core.exceptions import (
    DimensionMismatchException,
    NotPositiveSemidefiniteException,
    ValidationException,
)
from app.quantum.channels import BaseChannel
from app.quantum.linalg import PSD_CLAMP_TOL, as_matrix, hermitian_eig, psd_sqrt, tensor
from app.quantum.states import (
    DensityMatrix,
    SeedLike,
    density_matrix,
    haar_random_pure_batch,
    pauli,
)

_LN2 = math.log(2.0)

_SPIN_FLIP = tensor(pauli("Y"), pauli("Y"))

# Eigenvalues of a state at or below this are round-off
_RANK_TOL = 1e-14


def _as_density(state: npt.ArrayLike) -> DensityMatrix:
    arr = np.asarray(state, dtype=np.complex128)
    return density_matrix(arr) if arr.ndim == 1 else as_matrix(arr)


def fidelity(rho1: npt.ArrayLike, rho2: npt.ArrayLike) -> float:
    """
    Uhlmann fidelity (Tr √(√ρ₁ ρ₂ √ρ₁))², which is |⟨ψ₁|ψ₂⟩|² for pure states.

    State vectors are accepted in place of density matrices.

    Raises:
        DimensionMismatchException: If the dimensions differ.
    """
    a, b = _as_density(rho1), _as_density(rho2)
    if a.shape != b.shape:
        raise DimensionMismatchException(
            message=f"Cannot compare states of shapes {a.shape} and {b.shape}.",
        )
    root = psd_sqrt(a)
    inner = root @ b @ root
    eigenvalues, _ = hermitian_eig(0.5 * (inner + inner.conj().T))
    value = float(np.sum(np.sqrt(np.clip(eigenvalues, 0.0, None)))) ** 2
    return min(max(value, 0.0), 1.0)


def trace_distance(rho1: npt.ArrayLike, rho2: npt.ArrayLike) -> float:
    """½‖ρ₁ − ρ₂‖₁."""
    a, b = _as_density(rho1), _as_density(rho2)
    if a.shape != b.shape:
        raise DimensionMismatchException(
            message=f"Cannot compare states of shapes {a.shape} and {b.shape}.",
        )
    eigenvalues, _ = hermitian_eig(a - b)
    return 0.5 * float(np.sum(np.abs(eigenvalues)))


# ── Entropies ──────────────────────────────────────────────────────────


def binary_entropy(x: float) -> float:
    """h(x) = −x log₂ x − (1−x) log₂(1−x), 0 at both ends."""
    if not -1e-12 <= x <= 1.0 + 1e-12:
        raise ValidationException(message="Binary entropy needs x in [0, 1].", details={"x": x})
    x = min(max(x, 0.0), 1.0)
    return float((entr(x) + entr(1.0 - x)) / _LN2)


def von_neumann_entropy(rho: npt.ArrayLike) -> float:
    eigenvalues, _ = hermitian_eig(_as_density(rho))
    return float(np.sum(entr(np.clip(eigenvalues, 0.0, None))) / _LN2)


def pure_entropy(theta1: float, theta2: float) -> float:
    """
    Entanglement entropy of U_CZ|ψ₁⟩|ψ₂⟩:
    h(x) with x = ½(1 + √(1 − sin²θ₁ sin²θ₂)).
    """
    product = (math.sin(theta1) * math.sin(theta2)) ** 2
    return binary_entropy(0.5 * (1.0 + math.sqrt(max(1.0 - product, 0.0))))


# ── Entanglement ───────────────────────────────────────────────────────


def concurrence(rho: npt.ArrayLike) -> float:
    """
    Wootters concurrence max(0, μ₁ − μ₂ − μ₃ − μ₄).

    With ρ = W W†, W = [√λᵢ vᵢ] over the non-zero eigenpairs, the μᵢ are
    the singular values of τ = Wᵀ(σ_Y ⊗ σ_Y)W. They are read off the
    Hermitian dilation [[0, τ], [τ†, 0]], whose spectrum is ±μᵢ, so
    rank-deficient states give exact zeros instead of square roots of
    round-off.

    Raises:
        DimensionMismatchException:        If ``rho`` is not a two-qubit state.
        NotPositiveSemidefiniteException:  If ``rho`` has a negative eigenvalue.
    """
    m = _as_density(rho)
    if m.shape != (4, 4):
        raise DimensionMismatchException(message=f"Concurrence needs a two-qubit state, got {m.shape}.")
    eigenvalues, vectors = hermitian_eig(m)
    if eigenvalues[0] < -PSD_CLAMP_TOL:
        raise NotPositiveSemidefiniteException(details={"min_eigenvalue": float(eigenvalues[0])})

    support = eigenvalues > _RANK_TOL
    w = vectors[:, support] * np.sqrt(eigenvalues[support])
    tau = w.T @ _SPIN_FLIP @ w
    rank = tau.shape[0]
    if rank == 0:
        return 0.0
    zeros = np.zeros((rank, rank), dtype=np.complex128)
    dilation = np.block([[zeros, tau], [tau.conj().T, zeros]])
    mu = hermitian_eig(dilation)[0][::-1][:rank]
    return float(min(max(mu[0] - np.sum(mu[1:]), 0.0), 1.0))


def entanglement_of_formation(rho: npt.ArrayLike) -> float:
    c = concurrence(rho)
    return binary_entropy(0.5 * (1.0 + math.sqrt(max(1.0 - c * c, 0.0))))


# ── Channel averages ───────────────────────────────────────────────────


def haar_average_overlap(
    channel: BaseChannel,
    dim: int,
    samples: int,
    seed: SeedLike,
) -> tuple[float, float]:
    """
    Monte Carlo mean of ⟨ψ|E(ψ)|ψ⟩ over Haar-random pure states.

    Returns:
        (mean, standard error of the mean)
    """
    if channel.dim != dim:
        raise DimensionMismatchException(
            message=f"Channel acts on dim {channel.dim}, asked to average over dim {dim}.",
        )
    if samples < 2:
        raise ValidationException(message="Haar averaging needs at least two samples.")
    vecs = haar_random_pure_batch(dim, samples, seed)
    outputs = channel.apply_many(np.einsum("ni,nj->nij", vecs, vecs.conj()))
    overlaps = np.einsum("ni,nij,nj->n", vecs.conj(), outputs, vecs).real
    return float(overlaps.mean()), float(overlaps.std(ddof=1) / math.sqrt(samples))


def process_to_average_fidelity(f_chi: float, dim: int) -> float:
    """Average state fidelity (d·F_χ + 1)/(d + 1) of a process with fidelity F_χ."""
    return (dim * f_chi + 1.0) / (dim + 1.0)


def unitary_process_fidelity(unitary: npt.ArrayLike) -> float:
    """Process fidelity of U with the identity, |Tr U|²/d²."""
    u = as_matrix(unitary)
    return float(abs(np.trace(u)) ** 2 / u.shape[0] ** 2)
