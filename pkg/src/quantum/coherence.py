"""Coherence of a state with respect to a basis.

Two measures: the l1-norm (sum of off-diagonal magnitudes, optionally
divided by d-1) and the relative entropy of coherence S(diag rho) - S(rho).
"""

import logging
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict

from .errors import BoundNotEstablishedError, DimensionError
from .mub import Basis, MubFamily
from .qmatrix import BlochVector, DensityMatrix, binary_entropy, dagger, spectrum_entropy

logger = logging.getLogger(__name__)

ZERO_CLAMP = 1e-12


class CoherenceKind(str, Enum):
    L1 = "l1"
    RELATIVE_ENTROPY = "relent"


class CoherenceMeasure(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: CoherenceKind
    normalized: bool = False

    @classmethod
    def l1(cls, normalized: bool = False) -> "CoherenceMeasure":
        return cls(kind=CoherenceKind.L1, normalized=normalized)

    @classmethod
    def relent(cls) -> "CoherenceMeasure":
        return cls(kind=CoherenceKind.RELATIVE_ENTROPY)

    def for_dimension(self, d: int) -> "CoherenceMeasure":
        """The variant used for S: l1 is normalized from d = 3 on (a no-op for qubits)."""
        if self.kind is CoherenceKind.L1:
            return CoherenceMeasure.l1(normalized=self.normalized or d >= 3)
        return self

    def divisor(self, d: int) -> float:
        if self.kind is CoherenceKind.L1 and self.normalized and d > 1:
            return float(d - 1)
        return 1.0


class OmegaBound(BaseModel):
    measure: CoherenceMeasure
    dim: int
    value: float


def omega(measure: CoherenceMeasure, d: int) -> OmegaBound:
    """Single-system ceiling on sum_i C_i^2 over a complete MUB family."""
    if d == 2:
        value = 2.0
    elif measure.kind is CoherenceKind.L1:
        value = float(d) if measure.normalized else float(d * (d - 1) ** 2)
    else:
        raise BoundNotEstablishedError(f"no complementarity ceiling for relative entropy at d = {d}")
    return OmegaBound(measure=measure, dim=d, value=value)


def _clamp(values: np.ndarray) -> np.ndarray:
    return np.where(np.abs(values) < ZERO_CLAMP, 0.0, values)


def _from_rotated(rotated: np.ndarray, measure: CoherenceMeasure, state_entropy) -> np.ndarray:
    d = rotated.shape[-1]
    if measure.kind is CoherenceKind.L1:
        total = np.sum(np.abs(rotated), axis=(-2, -1))
        diagonal = np.sum(np.abs(np.diagonal(rotated, axis1=-2, axis2=-1)), axis=-1)
        values = (total - diagonal) / measure.divisor(d)
    else:
        populations = np.real(np.diagonal(rotated, axis1=-2, axis2=-1))
        values = spectrum_entropy(populations) - state_entropy
    return _clamp(values)


def coherence(rho: DensityMatrix, basis: Basis, measure: CoherenceMeasure) -> float:
    if basis.dim != rho.dim:
        raise DimensionError(f"basis of dimension {basis.dim} for a state of dimension {rho.dim}")
    u = basis.vectors
    rotated = dagger(u) @ rho.mat @ u
    entropy = 0.0
    if measure.kind is CoherenceKind.RELATIVE_ENTROPY:
        entropy = spectrum_entropy(np.linalg.eigvalsh(rho.mat))
    return float(_from_rotated(rotated, measure, entropy))


def coherence_profile(states: np.ndarray, fam: MubFamily, measure: CoherenceMeasure) -> np.ndarray:
    """Coherence of every state in a stack against every basis of ``fam``.

    ``states`` has shape (..., d, d); the result has shape (..., len(fam)).
    """
    states = np.asarray(states, dtype=complex)
    if states.shape[-1] != fam.dim:
        raise DimensionError(f"family of dimension {fam.dim} for states of dimension {states.shape[-1]}")
    w = fam.stacked()
    rotated = np.einsum("kmi,...mn,knj->...kij", np.conj(w), states, w)
    entropy = 0.0
    if measure.kind is CoherenceKind.RELATIVE_ENTROPY:
        entropy = spectrum_entropy(np.linalg.eigvalsh(states))[..., np.newaxis]
    return _from_rotated(rotated, measure, entropy)


def qubit_l1_closed_form(r: BlochVector, axis: int) -> float:
    """sqrt(r_j^2 + r_k^2) for the eigenbasis of sigma_axis, axis in {1, 2, 3}."""
    v = r.as_array()
    return float(np.sqrt(np.sum(v**2) - v[axis - 1] ** 2))


def qubit_relent_closed_form(r: BlochVector, axis: int) -> float:
    """H((1 + r_axis)/2) - H((1 + |r|)/2)."""
    v = r.as_array()
    value = binary_entropy((1 + v[axis - 1]) / 2) - binary_entropy((1 + r.norm) / 2)
    return float(_clamp(np.asarray(value)))


def complementarity_sum(rho: DensityMatrix, fam: MubFamily, measure: CoherenceMeasure) -> float:
    """sum_i C_i(rho)^2 over the bases of ``fam``."""
    values = coherence_profile(rho.mat, fam, measure)
    return float(np.sum(values**2))


def pairwise_product_sum(rho: DensityMatrix, fam: MubFamily, measure: CoherenceMeasure) -> float:
    """sum_(i<j) C_i C_j, bounded above by :func:`complementarity_sum`."""
    values = coherence_profile(rho.mat, fam, measure)
    return float((np.sum(values) ** 2 - np.sum(values**2)) / 2)


def purity_bound(rho: DensityMatrix) -> float:
    """d (d P - 1) / (d - 1): purity-resolved ceiling of the normalized l1 sum."""
    d = rho.dim
    return d * (d * rho.purity - 1) / (d - 1)
