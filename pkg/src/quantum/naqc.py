"""The NAQC functional S and its bounds.

S = sum_(a,b) sum_((i,j,k) in pattern) p(a|i) p(b|j) C_k(rho'_a|i) C_k(rho'_b|j)

Summing over outcomes first, S = sum A[i,k] A[j,k] with
A[i,k] = sum_a p(a|i) C_k(rho'_a|i), which is how it is evaluated here.
Setting index i is Alice's basis, k is Bob's coherence basis; both run over
the same family ordering.
"""

import logging
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from .assemblage import Assemblage, ModelEnsemble, conditional_arrays, realize
from .coherence import CoherenceKind, CoherenceMeasure, coherence_profile, omega
from .errors import BoundNotEstablishedError, DimensionError
from .mub import MubFamily
from .qmatrix import DensityMatrix

logger = logging.getLogger(__name__)


class IndexPattern(str, Enum):
    DISTINCT = "i!=j!=k"
    SAME_SETTING = "i=j,k"
    CROSS_JK = "i!=j=k"
    CROSS_IK = "i=k!=j"
    FULL = "i,j,k"

    @classmethod
    def parse(cls, text: str) -> "IndexPattern":
        try:
            return cls(text)
        except ValueError:
            pass
        try:
            return cls[text.upper()]
        except KeyError:
            known = ", ".join(f"{p.value} ({p.name.lower()})" for p in cls)
            raise ValueError(f"unknown index pattern {text!r}; choose from {known}") from None


DISJOINT_PATTERNS = (
    IndexPattern.SAME_SETTING,
    IndexPattern.CROSS_JK,
    IndexPattern.CROSS_IK,
    IndexPattern.DISTINCT,
)


class BoundKind(str, Enum):
    LHS = "lhs"
    SQI1 = "sqi1"
    QUANTUM = "quantum"
    FULL_PATTERN = "full_pattern"
    PATTERN = "pattern"


class NaqcBounds(BaseModel):
    lhs: Optional[float] = None
    sqi: Optional[float] = None
    quantum: Optional[float] = None
    full_pattern: Optional[float] = None


class NaqcReport(BaseModel):
    s_value: float
    patterns: Dict[str, float]
    measure: CoherenceMeasure
    dim: int
    bounds: NaqcBounds
    pattern: IndexPattern = IndexPattern.DISTINCT
    theta: Optional[float] = None
    phi: Optional[float] = None
    theta_b: Optional[float] = None
    phi_b: Optional[float] = None


def pattern_mask(pattern: IndexPattern, n: int) -> np.ndarray:
    i, j, k = np.indices((n, n, n))
    if pattern is IndexPattern.DISTINCT:
        return (i != j) & (j != k) & (i != k)
    if pattern is IndexPattern.SAME_SETTING:
        return i == j
    if pattern is IndexPattern.CROSS_JK:
        return (i != j) & (j == k)
    if pattern is IndexPattern.CROSS_IK:
        return (i == k) & (i != j)
    return np.ones((n, n, n), dtype=bool)


def _check_compatible(asm: Assemblage, fam: MubFamily) -> None:
    if asm.settings != len(fam):
        raise DimensionError(f"assemblage has {asm.settings} settings, family has {len(fam)} bases")
    if asm.dim != fam.dim:
        raise DimensionError(f"assemblage dimension {asm.dim} differs from family dimension {fam.dim}")


def weighted_coherence_arrays(sigma: np.ndarray, fam: MubFamily, measure: CoherenceMeasure) -> np.ndarray:
    """A[..., i, k] for a raw (..., settings, outcomes, d, d) table."""
    states, live, p = conditional_arrays(sigma)
    values = coherence_profile(states, fam, measure.for_dimension(fam.dim))
    return np.einsum("...xa,...xak->...xk", np.where(live, p, 0.0), values)


def s_from_weighted(a: np.ndarray, pattern: IndexPattern = IndexPattern.DISTINCT) -> np.ndarray:
    """Per-k parts of S from A[..., i, k]; sum over the last axis for S."""
    mask = pattern_mask(IndexPattern(pattern), a.shape[-1])
    return np.einsum("ijk,...ik,...jk->...k", mask, a, a)


def weighted_coherence(asm: Assemblage, fam: MubFamily, measure: CoherenceMeasure) -> np.ndarray:
    """A[i, k] = sum_a p(a|i) C_k(rho'_a|i); null outcomes contribute 0."""
    _check_compatible(asm, fam)
    return weighted_coherence_arrays(asm.sigma, fam, measure)


def s_per_k(
    asm: Assemblage,
    fam: MubFamily,
    measure: CoherenceMeasure,
    pattern: IndexPattern = IndexPattern.DISTINCT,
) -> np.ndarray:
    """Contribution of each coherence basis k to S."""
    return s_from_weighted(weighted_coherence(asm, fam, measure), pattern)


def s_quantity(
    asm: Assemblage,
    fam: MubFamily,
    measure: CoherenceMeasure,
    pattern: IndexPattern = IndexPattern.DISTINCT,
) -> float:
    return float(np.sum(s_per_k(asm, fam, measure, pattern)))


def _optional_bound(kind: BoundKind, d: int, measure: CoherenceMeasure) -> Optional[float]:
    try:
        return bound(kind, d, measure)
    except BoundNotEstablishedError:
        return None


def s_report(
    asm: Assemblage,
    fam: MubFamily,
    measure: CoherenceMeasure,
    pattern: IndexPattern = IndexPattern.DISTINCT,
    theta: Optional[float] = None,
    phi: Optional[float] = None,
    theta_b: Optional[float] = None,
    phi_b: Optional[float] = None,
) -> NaqcReport:
    """Every pattern value of one assemblage; ``s_value`` is the selected pattern."""
    pattern = IndexPattern(pattern)
    a = weighted_coherence(asm, fam, measure)
    d = fam.dim
    patterns = {p.value: float(np.sum(s_from_weighted(a, p))) for p in IndexPattern}
    bounds = NaqcBounds(
        lhs=_optional_bound(BoundKind.LHS, d, measure),
        sqi=_optional_bound(BoundKind.SQI1, d, measure),
        quantum=_optional_bound(BoundKind.QUANTUM, d, measure),
        full_pattern=_optional_bound(BoundKind.FULL_PATTERN, d, measure),
    )
    return NaqcReport(
        s_value=patterns[pattern.value],
        patterns=patterns,
        measure=measure.for_dimension(d),
        dim=d,
        bounds=bounds,
        pattern=pattern,
        theta=theta,
        phi=phi,
        theta_b=theta_b,
        phi_b=phi_b,
    )


def bound(
    kind: BoundKind,
    d: int,
    measure: CoherenceMeasure,
    pattern: Optional[IndexPattern] = None,
) -> float:
    """Ceilings on S and on its index-pattern parts, in units of Omega.

    LHS d(d-1) Omega, 1SQI (d^2-1) Omega, every quantum state (i,j,k) (d+1)^2 Omega.
    Pattern parts: (i=j,k) (d+1) Omega, (i!=j=k) and (i=k!=j) d Omega,
    (i!=j!=k) d(d-1) Omega; they add up to the full-pattern value.
    """
    kind = BoundKind(kind)
    measure = measure.for_dimension(d)
    if d > 2 and measure.kind is CoherenceKind.RELATIVE_ENTROPY:
        raise BoundNotEstablishedError(
            f"{kind.value} bound for relative entropy is not established for d = {d}"
        )
    big_omega = omega(measure, d).value

    if kind is BoundKind.LHS:
        return d * (d - 1) * big_omega
    if kind in (BoundKind.SQI1, BoundKind.QUANTUM):
        if kind is BoundKind.QUANTUM and d > 2:
            logger.debug(f"Quantum ceiling at d = {d} equals the 1SQI bound by observation only")
        return (d * d - 1) * big_omega
    if kind is BoundKind.FULL_PATTERN:
        return (d + 1) ** 2 * big_omega

    if pattern is None:
        raise ValueError("PATTERN bound needs an index pattern")
    pattern = IndexPattern(pattern)
    factors = {
        IndexPattern.FULL: (d + 1) ** 2,
        IndexPattern.SAME_SETTING: d + 1,
        IndexPattern.CROSS_JK: d,
        IndexPattern.CROSS_IK: d,
        IndexPattern.DISTINCT: d * (d - 1),
    }
    return factors[pattern] * big_omega


def responses_from_state(rho: DensityMatrix, fam: MubFamily) -> np.ndarray:
    """p(a|i) of measuring ``rho`` in every basis of ``fam``, shape (len(fam), d)."""
    if rho.dim != fam.dim:
        raise DimensionError(f"state of dimension {rho.dim} for a family of dimension {fam.dim}")
    w = fam.stacked()
    return np.real(np.einsum("kma,mn,kna->ka", np.conj(w), rho.mat, w))


def f_sum(responses: np.ndarray, k: int, d: Optional[int] = None) -> float:
    """sum_a sum_(i != k) p(a|i)^2 for one hidden value; k is 1-based."""
    responses = np.asarray(responses, dtype=float)
    if d is not None and responses.shape != (d + 1, d):
        raise DimensionError(f"expected a ({d + 1}, {d}) response table, got {responses.shape}")
    if not 1 <= k <= responses.shape[0]:
        raise DimensionError(f"basis index {k} outside 1..{responses.shape[0]}")
    kept = np.delete(responses, k - 1, axis=0)
    return float(np.sum(kept**2))


def f_bound(d: int) -> float:
    return (d + 1) / 2


def strategy_value(
    ensembles: Sequence[ModelEnsemble],
    fam: MubFamily,
    measure: CoherenceMeasure,
    pattern: IndexPattern = IndexPattern.DISTINCT,
) -> Tuple[float, List[float]]:
    """S of a hidden-variable strategy and its per-k parts.

    One ensemble is an ordinary model. ``len(fam)`` ensembles let the model
    pick a different ensemble for each coherence basis k.
    """
    n = len(fam)
    if len(ensembles) == 1:
        per_k = s_per_k(realize(ensembles[0], n), fam, measure, pattern)
    elif len(ensembles) == n:
        per_k = np.array(
            [s_per_k(realize(ens, n), fam, measure, pattern)[k] for k, ens in enumerate(ensembles)]
        )
    else:
        raise DimensionError(f"a strategy needs 1 or {n} ensembles, got {len(ensembles)}")
    return float(np.sum(per_k)), [float(v) for v in per_k]
