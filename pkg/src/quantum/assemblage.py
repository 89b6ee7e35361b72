"""Bob's side of a steering scenario.

An assemblage is the table of unnormalized conditional states
sigma[x, a] with p(a|x) = tr sigma[x, a]. It can come from a quantum state
measured by Alice (:func:`steer`) or from an explicit hidden-variable
ensemble (:func:`realize`): LHS models share one hidden state per lambda,
1SQI models may let the hidden state depend on Alice's outcome.
"""

import logging
from enum import Enum
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from .errors import DimensionError, StateValidationError
from .mub import Basis, MubFamily
from .qmatrix import DEFAULT_TOLERANCE, DensityMatrix, dagger, decode_matrix, encode_matrix, frozen

logger = logging.getLogger(__name__)

SIGNALING_TOLERANCE = 1e-8
NULL_OUTCOME = 1e-12


class ModelKind(str, Enum):
    LHS = "lhs"
    SQI1 = "sqi1"


class ValidationMode(str, Enum):
    STRICT = "strict"
    SQI = "sqi"


class Assemblage(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    sigma: np.ndarray  # (settings, outcomes, d, d)

    @field_validator("sigma", mode="before")
    @classmethod
    def _table_shape(cls, value):
        arr = np.asarray(value, dtype=complex)
        if arr.ndim != 4 or arr.shape[2] != arr.shape[3]:
            raise DimensionError(f"assemblage must have shape (settings, outcomes, d, d), got {arr.shape}")
        return frozen(arr)

    @property
    def settings(self) -> int:
        return self.sigma.shape[0]

    @property
    def outcomes(self) -> int:
        return self.sigma.shape[1]

    @property
    def dim(self) -> int:
        return self.sigma.shape[2]

    @property
    def p(self) -> np.ndarray:
        """p(a|x), shape (settings, outcomes)."""
        return np.real(np.trace(self.sigma, axis1=-2, axis2=-1))

    def marginals(self) -> np.ndarray:
        return np.sum(self.sigma, axis=1)

    def conditional_states(self) -> Tuple[np.ndarray, np.ndarray]:
        states, live, _ = conditional_arrays(self.sigma)
        return states, live

    def scaled(self, factor: float) -> "Assemblage":
        return Assemblage(sigma=self.sigma * factor)

    def __add__(self, other: "Assemblage") -> "Assemblage":
        return Assemblage(sigma=self.sigma + other.sigma)

    def to_json(self) -> Dict:
        return {
            "dim": self.dim,
            "settings": self.settings,
            "outcomes": self.outcomes,
            "sigma": [[encode_matrix(s) for s in row] for row in self.sigma],
        }

    @classmethod
    def from_json(cls, data: Dict) -> "Assemblage":
        return cls(sigma=[[decode_matrix(s) for s in row] for row in data["sigma"]])


class ModelEnsemble(BaseModel):
    """Hidden-variable model: weights P_lambda, responses p(a|x, lambda) and hidden states.

    ``states`` has shape (n, d, d) for LHS and (n, outcomes, d, d) for 1SQI.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: ModelKind
    weights: np.ndarray
    responses: np.ndarray  # (n, settings, outcomes)
    states: np.ndarray
    tol: float = Field(default=DEFAULT_TOLERANCE, exclude=True, repr=False)

    @field_validator("weights", "responses", mode="before")
    @classmethod
    def _real_array(cls, value):
        return frozen(np.asarray(value, dtype=float))

    @field_validator("states", mode="before")
    @classmethod
    def _complex_array(cls, value):
        return frozen(np.asarray(value, dtype=complex))

    @model_validator(mode="after")
    def _check_model(self):
        if self.weights.ndim != 1 or self.weights.shape[0] < 1:
            raise DimensionError("weights must be a non-empty vector")
        n = self.weights.shape[0]
        if np.min(self.weights) < -self.tol or abs(np.sum(self.weights) - 1) > self.tol:
            raise StateValidationError("weights", "P_lambda must be a probability distribution")
        if self.responses.ndim != 3 or self.responses.shape[0] != n:
            raise DimensionError(f"responses must have shape (n, settings, outcomes), got {self.responses.shape}")
        if np.min(self.responses) < -self.tol:
            raise StateValidationError("responses", "negative response probability")
        stochastic = float(np.max(np.abs(np.sum(self.responses, axis=2) - 1)))
        if stochastic > self.tol:
            raise StateValidationError("responses", "p(a|x, lambda) does not sum to 1 over a", stochastic)

        expected = (n,) if self.kind is ModelKind.LHS else (n, self.responses.shape[2])
        if self.states.shape[:-2] != expected or self.states.shape[-1] != self.states.shape[-2]:
            raise DimensionError(f"{self.kind.value} states must have leading shape {expected}, got {self.states.shape}")
        _check_states(self.states, self.tol)
        return self

    @property
    def hidden_values(self) -> int:
        return self.weights.shape[0]

    @property
    def settings(self) -> int:
        return self.responses.shape[1]

    @property
    def outcomes(self) -> int:
        return self.responses.shape[2]

    @property
    def dim(self) -> int:
        return self.states.shape[-1]


def _check_states(states: np.ndarray, tol: float) -> None:
    if not np.all(np.isfinite(states)):
        raise StateValidationError("finiteness", "hidden state has NaN or infinite entries")
    herm = float(np.max(np.abs(states - dagger(states))))
    if herm > tol:
        raise StateValidationError("hermiticity", "hidden state is not Hermitian", herm)
    traces = np.real(np.trace(states, axis1=-2, axis2=-1))
    trace_dev = float(np.max(np.abs(traces - 1)))
    if trace_dev > tol:
        raise StateValidationError("unit-trace", "hidden state trace differs from 1", trace_dev)
    lowest = float(np.min(np.linalg.eigvalsh(states)))
    if lowest < -tol:
        raise StateValidationError("positivity", f"hidden state eigenvalue {lowest:.3e}", -lowest)


def conditional_arrays(sigma: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Normalized states sigma/p, the mask of outcomes with p above the null threshold, and p.

    Works on any leading batch shape. Null outcomes get the maximally mixed
    state so batched routines stay well defined; callers weight them by 0.
    """
    d = sigma.shape[-1]
    p = np.real(np.trace(sigma, axis1=-2, axis2=-1))
    live = p >= NULL_OUTCOME
    safe = np.where(live, p, 1.0)[..., np.newaxis, np.newaxis]
    states = np.where(live[..., np.newaxis, np.newaxis], sigma / safe, np.eye(d) / d)
    return states, live, p


def steer_arrays(blocks: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Batched steering kernel.

    ``blocks`` is rho reshaped to (..., d_A, d_B, d_A, d_B); ``vectors`` holds
    Alice's bases as columns, shape (settings, d_A, outcomes).
    """
    return np.einsum("xia,xja,...jbic->...xabc", vectors, np.conj(vectors), blocks)


def steer(rho_ab: DensityMatrix, alice_bases: Union[MubFamily, Sequence[Basis]]) -> Assemblage:
    """sigma[x, a] = tr_A[(|e^x_a><e^x_a| (x) I) rho_ab] for rank-one projective measurements."""
    bases = alice_bases.bases if isinstance(alice_bases, MubFamily) else tuple(alice_bases)
    if rho_ab.dims is None:
        raise DimensionError("steering needs a bipartite state with declared dims")
    d_a, d_b = rho_ab.dims
    for basis in bases:
        if basis.dim != d_a:
            raise DimensionError(f"Alice's basis has dimension {basis.dim}, her subsystem {d_a}")
    v = np.stack([b.vectors for b in bases])
    blocks = rho_ab.mat.reshape(d_a, d_b, d_a, d_b)
    return Assemblage(sigma=steer_arrays(blocks, v))


def realize(model: ModelEnsemble, settings: int) -> Assemblage:
    if settings > model.settings:
        raise DimensionError(f"response table covers {model.settings} settings, {settings} requested")
    responses = model.responses[:, :settings, :]
    if model.kind is ModelKind.LHS:
        sigma = np.einsum("l,lxa,lbc->xabc", model.weights, responses, model.states)
    else:
        sigma = np.einsum("l,lxa,labc->xabc", model.weights, responses, model.states)
    return Assemblage(sigma=sigma)


class ValidationReport(BaseModel):
    mode: ValidationMode
    hermiticity_deviation: float
    psd_deviation: float
    normalization_deviation: float
    signaling_deviation: float
    failures: List[str]

    @computed_field
    @property
    def ok(self) -> bool:
        return not self.failures


def validate(
    asm: Assemblage, mode: ValidationMode = ValidationMode.STRICT, tol: float = DEFAULT_TOLERANCE
) -> ValidationReport:
    mode = ValidationMode(mode)
    sigma = asm.sigma
    herm = float(np.max(np.abs(sigma - dagger(sigma))))
    lowest = float(np.min(np.linalg.eigvalsh((sigma + dagger(sigma)) / 2)))
    psd = max(0.0, -lowest)
    normalization = float(np.max(np.abs(np.sum(asm.p, axis=1) - 1)))
    marginals = asm.marginals()
    signaling = float(np.max(np.abs(marginals - marginals[0]))) if asm.settings > 1 else 0.0

    failures = []
    if herm > tol:
        failures.append(f"hermiticity deviation {herm:.3e}")
    if psd > tol:
        failures.append(f"positivity deviation {psd:.3e}")
    if normalization > tol:
        failures.append(f"normalization deviation {normalization:.3e}")
    if mode is ValidationMode.STRICT and signaling > SIGNALING_TOLERANCE:
        failures.append(f"no-signaling deviation {signaling:.3e}")
    if failures:
        logger.debug(f"Assemblage failed {mode.value} validation: {failures}")

    return ValidationReport(
        mode=mode,
        hermiticity_deviation=herm,
        psd_deviation=psd,
        normalization_deviation=normalization,
        signaling_deviation=signaling,
        failures=failures,
    )
