"""
Abstract quantum channel.

Every channel implements ``apply`` (single density matrix) and ``apply_many``
(batch). Averaging routines such as ``metrics.haar_average_overlap`` only
rely on this contract.
"""

from abc import ABC, abstractmethod

import numpy as np
import numpy.typing as npt

from app.core.exceptions import DimensionMismatchException, ValidationException
from app.quantum.bounds import apply_choi, universal_inverter
from app.quantum.linalg import as_matrix, is_unitary
from app.quantum.states import DensityMatrix
from app.schemas.quantum_schema import ChoiOperator


class BaseChannel(ABC):
    """Contract that every channel must fulfil."""

    @property
    @abstractmethod
    def dim(self) -> int:
        """Input (and output) dimension."""
        ...

    @abstractmethod
    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        """
        Map one density matrix.

        Raises:
            DimensionMismatchException: If ``rho`` does not match ``dim``.
        """
        ...

    def apply_many(self, states: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        """
        Map a stack of density matrices with shape (n, d, d).

        Override for vectorized behaviour; default iterates one by one.
        """
        return np.stack([self.apply(rho) for rho in np.asarray(states)])

    def _check_dim(self, rho: npt.ArrayLike) -> DensityMatrix:
        m = as_matrix(rho)
        if m.shape != (self.dim, self.dim):
            raise DimensionMismatchException(
                message=f"{type(self).__name__} acts on {self.dim}x{self.dim} states, got {m.shape}.",
            )
        return m


class IdentityChannel(BaseChannel):
    def __init__(self, dim: int) -> None:
        self._dim = dim

    @property
    def dim(self) -> int:
        return self._dim

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        return self._check_dim(rho).copy()

    def apply_many(self, states: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        return np.array(states, dtype=np.complex128)


class UnitaryChannel(BaseChannel):
    """ρ → UρU†."""

    def __init__(self, unitary: npt.ArrayLike) -> None:
        u = as_matrix(unitary)
        if not is_unitary(u):
            raise ValidationException(message="UnitaryChannel needs a unitary matrix.")
        self.unitary = u

    @property
    def dim(self) -> int:
        return int(self.unitary.shape[0])

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        return self.unitary @ self._check_dim(rho) @ self.unitary.conj().T

    def apply_many(self, states: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        stack = np.asarray(states, dtype=np.complex128)
        return self.unitary @ stack @ self.unitary.conj().T


class UniversalInverter(BaseChannel):
    """ρ → (dI − ρ)/(d² − 1), the best deterministic orthogonalizer without prior knowledge."""

    def __init__(self, dim: int) -> None:
        self._dim = dim

    @property
    def dim(self) -> int:
        return self._dim

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        return universal_inverter(self._check_dim(rho), self._dim)

    def apply_many(self, states: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        d = self._dim
        stack = np.asarray(states, dtype=np.complex128)
        return (d * np.eye(d) - stack) / (d * d - 1)


class ChoiChannel(BaseChannel):
    """Channel given by its Choi operator, ρ_out = Tr_in[(ρ^T ⊗ I) χ]."""

    def __init__(self, chi: ChoiOperator) -> None:
        if chi.d_in != chi.d_out:
            raise DimensionMismatchException(
                message="ChoiChannel needs equal input and output dimensions.",
                details={"d_in": chi.d_in, "d_out": chi.d_out},
            )
        self.chi = chi

    @property
    def dim(self) -> int:
        return self.chi.d_in

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        return apply_choi(self.chi, self._check_dim(rho))
