"""Mutually unbiased bases.

Qubit triples in an arbitrarily rotated frame, and complete families of
d+1 bases in the supported prime-power dimensions. Basis vectors are the
columns of ``Basis.vectors``.

Ordering contract: for qubits the triple is (x, y, z), matching
sigma_1, sigma_2, sigma_3. For d >= 3 the first basis is computational and
the rest follow the construction order.
"""

import functools
import json
import logging
import os
from typing import Dict, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .errors import DimensionError, StateValidationError, UnsupportedDimensionError
from .gf import build_tables, field_for_dimension
from .qmatrix import IDENTITY2, SIGMA1, SIGMA2, SIGMA3, as_matrix, dagger, frozen

logger = logging.getLogger(__name__)

SUPPORTED_DIMENSIONS = (2, 3, 4, 5, 7, 8, 9, 25)
ORTHONORMAL_TOLERANCE = 1e-9
UNBIASED_TOLERANCE = 1e-9


class Basis(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    vectors: np.ndarray

    @field_validator("vectors", mode="before")
    @classmethod
    def _orthonormal(cls, value):
        arr = as_matrix(value)
        if arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"a basis of C^d needs d vectors, got shape {arr.shape}")
        deviation = float(np.max(np.abs(dagger(arr) @ arr - np.eye(arr.shape[0]))))
        if deviation > ORTHONORMAL_TOLERANCE:
            raise StateValidationError("orthonormality", f"max |<v_i|v_j> - delta_ij| = {deviation:.3e}", deviation)
        return frozen(arr)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def projectors(self) -> np.ndarray:
        """Stack of rank-one projectors, shape (d, d, d), indexed by outcome first."""
        v = self.vectors
        return np.einsum("ia,ja->aij", v, np.conj(v))


class MubFamily(BaseModel):
    """An ordered list of bases of a common dimension.

    Unbiasedness is checked by :func:`verify_unbiased`, not on construction,
    so deliberately broken families can still be built and inspected.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dim: int
    bases: Tuple[Basis, ...]

    @model_validator(mode="after")
    def _common_dimension(self):
        if not self.bases:
            raise DimensionError("a family needs at least one basis")
        for basis in self.bases:
            if basis.dim != self.dim:
                raise DimensionError(f"basis of dimension {basis.dim} in a family of dimension {self.dim}")
        return self

    @classmethod
    def from_matrices(cls, matrices: Sequence[np.ndarray]) -> "MubFamily":
        bases = tuple(Basis(vectors=m) for m in matrices)
        return cls(dim=bases[0].dim, bases=bases)

    def __len__(self) -> int:
        return len(self.bases)

    def stacked(self) -> np.ndarray:
        """Basis matrices stacked into shape (n, d, d)."""
        return np.stack([b.vectors for b in self.bases])

    def replace(self, index: int, basis: Basis) -> "MubFamily":
        bases = list(self.bases)
        bases[index] = basis
        return MubFamily(dim=self.dim, bases=tuple(bases))

    def canonical_phases(self) -> "MubFamily":
        return MubFamily.from_matrices([canonical_phase_columns(b.vectors) for b in self.bases])

    def to_json(self) -> Dict:
        fam = self.canonical_phases()
        return {
            "dim": self.dim,
            "bases": [
                [[[float(z.real), float(z.imag)] for z in vec] for vec in basis.vectors.T]
                for basis in fam.bases
            ],
        }


class UnbiasedReport(BaseModel):
    dim: int
    bases: int
    max_deviation: float
    ok: bool


def canonical_phase_columns(vectors: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """Rotate each column so its first nonzero amplitude is real and nonnegative."""
    out = np.array(vectors, dtype=complex, copy=True)
    for a in range(out.shape[1]):
        col = out[:, a]
        lead = col[np.argmax(np.abs(col) > eps)]
        if abs(lead) > eps:
            out[:, a] = col * (np.conj(lead) / abs(lead))
    return out


def rotated_qubit_mubs(theta: float, phi: float) -> MubFamily:
    """Eigenbases of sigma_1, sigma_2, sigma_3 rotated into the (theta, phi) frame."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    phase = np.exp(1j * phi)
    zero = np.array([c, phase * s], dtype=complex)
    one = np.array([s, -phase * c], dtype=complex)
    x_basis = np.column_stack([zero + one, zero - one]) / np.sqrt(2)
    y_basis = np.column_stack([zero + 1j * one, zero - 1j * one]) / np.sqrt(2)
    z_basis = np.column_stack([zero, one])
    return MubFamily.from_matrices([x_basis, y_basis, z_basis])


def pauli_observable(basis: Basis) -> np.ndarray:
    """sum_a (-1)^a |e_a><e_a| of a qubit basis."""
    proj = basis.projectors()
    return proj[0] - proj[1]


def _odd_prime_power_bases(d: int) -> List[np.ndarray]:
    # |v_(a,b)> = d^(-1/2) sum_x omega^tr(a x^2 + b x) |x>
    spec = field_for_dimension(d)
    tables = build_tables(spec)
    mul = np.array(tables.mul)
    trace = np.array(tables.trace)
    squares = mul[np.arange(d), np.arange(d)]
    omega = np.exp(2j * np.pi / spec.p)
    linear = trace[mul]  # linear[b, x] = tr(b x)
    bases = [np.eye(d, dtype=complex)]
    for a in range(d):
        quadratic = trace[mul[a, squares]]
        exponents = (quadratic[np.newaxis, :] + linear) % spec.p
        bases.append((omega**exponents).T / np.sqrt(d))
    return bases


@functools.lru_cache(maxsize=None)
def _binary_tables() -> Dict[str, Dict]:
    data_file = os.path.join(os.path.dirname(__file__), "..", "data", "mub_tables.json")
    with open(data_file, "r") as f:
        return json.load(f)["tables"]


def _stabilizer_basis(symmetric: np.ndarray) -> np.ndarray:
    """Joint eigenbasis of the commuting generators X^(e_i) Z^(S e_i)."""
    n = symmetric.shape[0]
    d = 2**n
    generators = []
    for i in range(n):
        factors = []
        for q in range(n):
            if q == i:
                factors.append(SIGMA2 if symmetric[i, i] else SIGMA1)
            else:
                factors.append(SIGMA3 if symmetric[q, i] else IDENTITY2)
        op = factors[0]
        for f in factors[1:]:
            op = np.kron(op, f)
        generators.append(op)

    columns = []
    for signs in range(d):
        proj = np.eye(d, dtype=complex)
        for i, g in enumerate(generators):
            sign = -1.0 if (signs >> (n - 1 - i)) & 1 else 1.0
            proj = proj @ (np.eye(d) + sign * g) / 2
        col = proj[:, np.argmax(np.linalg.norm(proj, axis=0))]
        columns.append(col / np.linalg.norm(col))
    return np.column_stack(columns)


def _binary_bases(d: int) -> List[np.ndarray]:
    table = _binary_tables()[str(d)]
    bases = [np.eye(d, dtype=complex)]
    for matrix in table["symmetric_matrices"]:
        bases.append(_stabilizer_basis(np.array(matrix, dtype=int)))
    return bases


@functools.lru_cache(maxsize=None)
def mubs_prime_power(d: int) -> MubFamily:
    """Complete family of d+1 mutually unbiased bases."""
    if d not in SUPPORTED_DIMENSIONS:
        raise UnsupportedDimensionError(d, SUPPORTED_DIMENSIONS)
    if d == 2:
        return rotated_qubit_mubs(0.0, 0.0).canonical_phases()
    if d in (4, 8):
        matrices = _binary_bases(d)
    else:
        matrices = _odd_prime_power_bases(d)
    logger.debug(f"Constructed {len(matrices)} MUBs in dimension {d}")
    return MubFamily.from_matrices([canonical_phase_columns(m) for m in matrices])


def verify_unbiased(fam: MubFamily) -> UnbiasedReport:
    d = fam.dim
    stacked = fam.stacked()
    max_deviation = 0.0
    for i in range(len(fam)):
        for j in range(i + 1, len(fam)):
            overlaps = np.abs(dagger(stacked[i]) @ stacked[j]) ** 2
            max_deviation = max(max_deviation, float(np.max(np.abs(overlaps - 1.0 / d))))
    return UnbiasedReport(
        dim=d,
        bases=len(fam),
        max_deviation=max_deviation,
        ok=max_deviation <= UNBIASED_TOLERANCE,
    )
