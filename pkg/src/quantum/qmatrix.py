"""Dense complex matrix kernel.

Construction and validation of density matrices, Kronecker structure,
partial traces, Hermitian spectra and qubit Bloch-vector conversions.
Matrices are plain ``numpy`` arrays; validated states are wrapped in
:class:`DensityMatrix`, which is immutable once built.
"""

import logging
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.special import entr

from .errors import DimensionError, StateValidationError

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9
MAX_DIMENSION = 25

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA1, SIGMA2, SIGMA3)


class Subsystem(str, Enum):
    A = "A"
    B = "B"


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a 2-D complex array with at least one row and column."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    return arr


def frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, copy=True)
    out.setflags(write=False)
    return out


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def hermiticity_deviation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - dagger(m))))


def projector(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    return np.outer(v, np.conj(v))


class DensityMatrix(BaseModel):
    """Hermitian, positive semidefinite, unit-trace matrix.

    ``dims`` optionally declares a bipartite split ``(d_A, d_B)``.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mat: np.ndarray
    dims: Optional[Tuple[int, int]] = None
    tol: float = Field(default=DEFAULT_TOLERANCE, exclude=True, repr=False)

    @field_validator("mat", mode="before")
    @classmethod
    def _square_complex(cls, value):
        arr = as_matrix(value)
        if arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"density matrix must be square, got {arr.shape}")
        if arr.shape[0] > MAX_DIMENSION:
            raise DimensionError(
                f"dimension {arr.shape[0]} exceeds the supported maximum {MAX_DIMENSION}"
            )
        return frozen(arr)

    @model_validator(mode="after")
    def _check_invariants(self):
        d = self.mat.shape[0]
        if self.dims is not None and self.dims[0] * self.dims[1] != d:
            raise DimensionError(f"declared dims {self.dims} do not multiply to {d}")
        if not np.all(np.isfinite(self.mat)):
            raise StateValidationError("finiteness", "matrix has NaN or infinite entries")

        herm = hermiticity_deviation(self.mat)
        if herm > self.tol:
            raise StateValidationError("hermiticity", f"max |M - M^dagger| = {herm:.3e}", herm)

        trace_dev = abs(np.trace(self.mat) - 1.0)
        if trace_dev > self.tol:
            raise StateValidationError("unit-trace", f"|tr M - 1| = {trace_dev:.3e}", trace_dev)

        lowest = float(np.linalg.eigvalsh(self.mat)[0])
        if lowest < -self.tol:
            raise StateValidationError(
                "positivity", f"smallest eigenvalue {lowest:.3e}", -lowest
            )
        return self

    @classmethod
    def from_array(
        cls, m, dims: Optional[Sequence[int]] = None, tol: float = DEFAULT_TOLERANCE
    ) -> "DensityMatrix":
        return cls(mat=m, dims=tuple(dims) if dims is not None else None, tol=tol)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    def with_dims(self, dims: Sequence[int]) -> "DensityMatrix":
        return DensityMatrix(mat=self.mat, dims=tuple(dims), tol=self.tol)


def pure_state(vec, dims: Optional[Sequence[int]] = None) -> DensityMatrix:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    return DensityMatrix.from_array(projector(v), dims)


def maximally_mixed(d: int, dims: Optional[Sequence[int]] = None) -> DensityMatrix:
    return DensityMatrix.from_array(np.eye(d, dtype=complex) / d, dims)


def tensor_state(rho_a: DensityMatrix, rho_b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix.from_array(kron(rho_a.mat, rho_b.mat), (rho_a.dim, rho_b.dim))


def partial_trace(rho: DensityMatrix, keep: Subsystem) -> DensityMatrix:
    """Reduced state of the kept subsystem of a bipartite ``rho``."""
    if rho.dims is None:
        raise DimensionError("partial trace needs a state with declared dims (d_A, d_B)")
    d_a, d_b = rho.dims
    blocks = rho.mat.reshape(d_a, d_b, d_a, d_b)
    if Subsystem(keep) is Subsystem.A:
        reduced = np.einsum("ibjb->ij", blocks)
    else:
        reduced = np.einsum("aiaj->ij", blocks)
    return DensityMatrix.from_array(reduced, tol=rho.tol)


def eig_hermitian(m, tol: float = DEFAULT_TOLERANCE) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and the matching orthonormal eigenvectors (columns)."""
    arr = as_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"eigensolver needs a square matrix, got {arr.shape}")
    herm = hermiticity_deviation(arr)
    if herm > tol:
        raise StateValidationError("hermiticity", f"max |M - M^dagger| = {herm:.3e}", herm)
    values, vectors = np.linalg.eigh((arr + dagger(arr)) / 2)
    return values[::-1].copy(), vectors[:, ::-1].copy()


def spectrum_entropy(eigenvalues: np.ndarray) -> np.ndarray:
    """Shannon entropy in bits along the last axis; tiny negative values count as zero."""
    p = np.clip(np.real(eigenvalues), 0.0, None)
    return np.sum(entr(p), axis=-1) / np.log(2)


def vn_entropy(rho: DensityMatrix) -> float:
    bits = float(spectrum_entropy(np.linalg.eigvalsh(rho.mat)))
    return min(max(bits, 0.0), float(np.log2(rho.dim)))


def binary_entropy(x) -> np.ndarray:
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return (entr(x) + entr(1.0 - x)) / np.log(2)


class BlochVector(BaseModel):
    model_config = ConfigDict(frozen=True)

    r1: float
    r2: float
    r3: float

    @model_validator(mode="after")
    def _inside_ball(self):
        norm_sq = self.r1**2 + self.r2**2 + self.r3**2
        if norm_sq > 1 + DEFAULT_TOLERANCE:
            raise StateValidationError("bloch-ball", f"|r|^2 = {norm_sq:.12f} exceeds 1", norm_sq - 1)
        return self

    @classmethod
    def from_array(cls, r) -> "BlochVector":
        r1, r2, r3 = (float(x) for x in r)
        return cls(r1=r1, r2=r2, r3=r3)

    def as_array(self) -> np.ndarray:
        return np.array([self.r1, self.r2, self.r3])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


def bloch_to_state(r: BlochVector) -> DensityMatrix:
    mat = 0.5 * (IDENTITY2 + r.r1 * SIGMA1 + r.r2 * SIGMA2 + r.r3 * SIGMA3)
    return DensityMatrix.from_array(mat)


def state_to_bloch(rho: DensityMatrix) -> BlochVector:
    if rho.dim != 2:
        raise DimensionError(f"Bloch vectors exist only for qubits, got dimension {rho.dim}")
    return BlochVector.from_array([np.real(np.trace(rho.mat @ s)) for s in PAULIS])


def encode_matrix(m: np.ndarray) -> List[List[List[float]]]:
    """Row-major nested ``[re, im]`` pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def decode_matrix(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except ValueError as exc:
        raise DimensionError(f"ragged complex matrix: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise DimensionError(f"complex matrix must be rows x cols x [re, im], got shape {arr.shape}")
    return as_matrix(arr[..., 0] + 1j * arr[..., 1])
