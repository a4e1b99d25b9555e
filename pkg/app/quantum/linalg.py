"""
Dense complex linear algebra for small operators (dimension <= 16).

Every operator in the toolkit (Pauli matrices, filters, the CZ gate, Choi
operators, the certificate M) is a ``complex128`` numpy array. This module
adds the pieces numpy does not spell out directly: checked products,
partial traces with an explicit subsystem convention, a cyclic Jacobi
eigensolver for Hermitian matrices, and PSD matrix functions with
round-off clamping.

Subsystem convention: for a bipartite operator on A ⊗ B the first tensor
factor (A) is the major index, i.e. ``|a b>`` sits at row ``a * d_B + b``.
"""

import math
from collections.abc import Callable
from functools import reduce
from typing import Literal

import numpy as np
import numpy.typing as npt

from app.core.exceptions import (
    DimensionMismatchException,
    NotHermitianException,
    NotPositiveSemidefiniteException,
    ValidationException,
)
from app.core.logging import get_logger

logger = get_logger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]
RealVector = npt.NDArray[np.float64]

HERMITIAN_TOL = 1e-10
PSD_CLAMP_TOL = 1e-10

# Jacobi stops when the off-diagonal Frobenius norm drops below this
# (relative to max(1, ||m||_F)) or after JACOBI_MAX_SWEEPS sweeps.
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100

Subsystem = Literal["A", "B"]


def as_matrix(m: npt.ArrayLike) -> ComplexMatrix:
    """Coerce to a finite 2-D complex128 array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionMismatchException(
            message=f"Expected a 2-D matrix, got shape {arr.shape}.",
            details={"shape": list(arr.shape)},
        )
    if not np.all(np.isfinite(arr)):
        raise ValidationException(message="Matrix has non-finite entries.")
    return arr


def identity(dim: int) -> ComplexMatrix:
    return np.eye(dim, dtype=np.complex128)


def adjoint(m: npt.ArrayLike) -> ComplexMatrix:
    return as_matrix(m).conj().T


def matmul(a: npt.ArrayLike, b: npt.ArrayLike) -> ComplexMatrix:
    """
    Matrix product ``a @ b``.

    Raises:
        DimensionMismatchException: If ``a.cols != b.rows``.
    """
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatchException(
            message=f"Cannot multiply {a.shape} by {b.shape}.",
            details={"left": list(a.shape), "right": list(b.shape)},
        )
    return a @ b


def tensor(a: npt.ArrayLike, b: npt.ArrayLike) -> ComplexMatrix:
    """Kronecker product with ``a``'s indices major."""
    return np.kron(as_matrix(a), as_matrix(b))


def tensor_all(*factors: npt.ArrayLike) -> ComplexMatrix:
    return reduce(tensor, factors)


def partial_trace(
    m: npt.ArrayLike,
    dims: tuple[int, int],
    keep: Subsystem,
) -> ComplexMatrix:
    """
    Trace out one factor of a bipartite operator on A ⊗ B.

    Args:
        m:    (d_A·d_B) × (d_A·d_B) operator.
        dims: (d_A, d_B).
        keep: "A" to return Tr_B(m), "B" to return Tr_A(m).

    Raises:
        DimensionMismatchException: If ``m`` is not (d_A·d_B)-square.
    """
    m = as_matrix(m)
    d_a, d_b = dims
    if m.shape != (d_a * d_b, d_a * d_b):
        raise DimensionMismatchException(
            message=f"Operator of shape {m.shape} does not match subsystem dims {dims}.",
            details={"shape": list(m.shape), "dims": [d_a, d_b]},
        )
    blocks = m.reshape(d_a, d_b, d_a, d_b)
    if keep == "A":
        return np.einsum("ijkj->ik", blocks)
    return np.einsum("ijil->jl", blocks)


# ─── Predicates ──────────────────────────────────────────────────────


def is_hermitian(m: npt.ArrayLike, tol: float = HERMITIAN_TOL) -> bool:
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        return False
    return bool(np.max(np.abs(arr - arr.conj().T), initial=0.0) <= tol)


def is_psd(m: npt.ArrayLike, tol: float = PSD_CLAMP_TOL) -> bool:
    if not is_hermitian(m):
        return False
    eigenvalues, _ = hermitian_eig(m)
    return bool(eigenvalues[0] >= -tol)


def is_unitary(m: npt.ArrayLike, tol: float = HERMITIAN_TOL) -> bool:
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        return False
    return bool(np.max(np.abs(arr.conj().T @ arr - np.eye(arr.shape[0]))) <= tol)


# ─── Eigendecomposition ──────────────────────────────────────────────


def hermitian_eig(
    m: npt.ArrayLike,
    tol: float = HERMITIAN_TOL,
) -> tuple[RealVector, ComplexMatrix]:
    """
    Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns:
        (eigenvalues, V): eigenvalues ascending, ``V`` unitary with the
        matching eigenvectors as columns, so ``m = V diag(eigenvalues) V†``.
        Vectors inside a degenerate cluster are not uniquely determined.

    Raises:
        NotHermitianException: If ``m`` deviates from ``m†`` by more than ``tol``.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatchException(
            message=f"Eigendecomposition needs a square matrix, got {m.shape}.",
        )
    deviation = float(np.max(np.abs(m - m.conj().T), initial=0.0))
    if deviation > tol:
        raise NotHermitianException(details={"max_deviation": deviation})

    a = 0.5 * (m + m.conj().T)
    n = a.shape[0]
    v = identity(n)
    threshold = JACOBI_TOL * max(1.0, float(np.linalg.norm(a)))

    for _ in range(JACOBI_MAX_SWEEPS):
        if _off_diagonal_norm(a) < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(a, v, p, q)
    else:
        residual = _off_diagonal_norm(a)
        if residual >= threshold:
            logger.warning(
                "Jacobi sweep limit reached before convergence",
                extra={"sweeps": JACOBI_MAX_SWEEPS, "off_diagonal_norm": residual, "dim": n},
            )

    eigenvalues = np.real(np.diag(a)).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], v[:, order]


def _off_diagonal_norm(a: ComplexMatrix) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def _rotate(a: ComplexMatrix, v: ComplexMatrix, p: int, q: int) -> None:
    """Annihilate a[p, q] in place with a complex Givens rotation."""
    b = a[p, q]
    r = abs(b)
    if r == 0.0:
        return
    phase = np.conj(b) / r  # e^{-iα}
    angle = 0.5 * math.atan2(2.0 * r, a[p, p].real - a[q, q].real)
    c, s = math.cos(angle), math.sin(angle)

    # G = diag(1, e^{-iα}) · [[c, -s], [s, c]]
    g = np.array([[c, -s], [phase * s, phase * c]], dtype=np.complex128)
    idx = [p, q]
    a[:, idx] = a[:, idx] @ g
    a[idx, :] = g.conj().T @ a[idx, :]
    a[p, q] = a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real
    v[:, idx] = v[:, idx] @ g


# ─── PSD matrix functions ────────────────────────────────────────────


def psd_function(
    m: npt.ArrayLike,
    fn: Callable[[RealVector], RealVector],
    clamp_tol: float = PSD_CLAMP_TOL,
) -> ComplexMatrix:
    """
    Apply ``fn`` to the spectrum of a Hermitian PSD matrix.

    Eigenvalues in [-clamp_tol, 0) are clamped to 0 before ``fn`` sees them.

    Raises:
        NotPositiveSemidefiniteException: If an eigenvalue is below ``-clamp_tol``.
    """
    eigenvalues, vectors = hermitian_eig(m)
    if eigenvalues[0] < -clamp_tol:
        raise NotPositiveSemidefiniteException(
            details={"min_eigenvalue": float(eigenvalues[0])},
        )
    clamped = np.clip(eigenvalues, 0.0, None)
    return (vectors * fn(clamped)) @ vectors.conj().T


def psd_sqrt(m: npt.ArrayLike, clamp_tol: float = PSD_CLAMP_TOL) -> ComplexMatrix:
    """Principal square root of a Hermitian PSD matrix."""
    return psd_function(m, np.sqrt, clamp_tol)


def psd_inverse_sqrt(m: npt.ArrayLike, floor: float = 1e-12) -> ComplexMatrix:
    """
    ``m^{-1/2}`` for a positive definite matrix.

    Raises:
        NotPositiveSemidefiniteException: If the smallest eigenvalue is below ``floor``.
    """
    eigenvalues, vectors = hermitian_eig(m)
    if eigenvalues[0] < floor:
        raise NotPositiveSemidefiniteException(
            message="Matrix is singular or indefinite; inverse square root undefined.",
            details={"min_eigenvalue": float(eigenvalues[0])},
        )
    return (vectors / np.sqrt(eigenvalues)) @ vectors.conj().T
