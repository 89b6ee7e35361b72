"""Brute-force generators and reference constructions.

Random states and hidden-variable ensembles come from
``numpy.random.default_rng`` (PCG64); a trial with index t of a run seeded
with s uses the generator seeded with s + t, so serial and parallel runs
agree trial by trial.
"""

import logging
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .assemblage import ModelEnsemble, ModelKind, ValidationMode, realize, steer, validate
from .coherence import CoherenceMeasure
from .errors import DimensionError
from .mub import mubs_prime_power, rotated_qubit_mubs
from .naqc import s_quantity, strategy_value
from .qmatrix import DEFAULT_TOLERANCE, DensityMatrix, dagger, projector, pure_state, tensor_state

logger = logging.getLogger(__name__)

MAX_HIDDEN_VALUES = 8


class StateKind(str, Enum):
    HAAR_PURE = "haar_pure"
    GINIBRE_MIXED = "ginibre_mixed"


class LhsDemo(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    state: DensityMatrix
    measure: CoherenceMeasure
    s_value: float


class SqiDemo(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    ensembles: Tuple[ModelEnsemble, ...]
    measure: CoherenceMeasure
    s_value: float
    per_k: List[float]
    lhs_forced: float


class SweepSummary(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: ModelKind
    d: int
    trials: int
    seed: int
    max_s: float
    measure: CoherenceMeasure
    # trial index of the maximizer, None when the injected construction wins
    argmax: Optional[int] = None
    # trials whose realized assemblage failed validation
    invalid_trials: List[int] = []
    values: np.ndarray = Field(exclude=True, repr=False)
    ensemble: Optional[ModelEnsemble] = Field(default=None, exclude=True)


def _gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def haar_vectors(rng: np.random.Generator, d: int, shape=()) -> np.ndarray:
    v = _gaussian(rng, tuple(shape) + (d,))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def ginibre_states(rng: np.random.Generator, d: int, shape=()) -> np.ndarray:
    g = _gaussian(rng, tuple(shape) + (d, d))
    rho = g @ dagger(g)
    return rho / np.real(np.trace(rho, axis1=-2, axis2=-1))[..., np.newaxis, np.newaxis]


def pure_states(rng: np.random.Generator, d: int, shape=()) -> np.ndarray:
    v = haar_vectors(rng, d, shape)
    return np.einsum("...i,...j->...ij", v, np.conj(v))


def random_state(
    d: int,
    kind: StateKind = StateKind.HAAR_PURE,
    seed: int = 0,
    dims: Optional[Sequence[int]] = None,
) -> DensityMatrix:
    rng = np.random.default_rng(seed)
    if StateKind(kind) is StateKind.HAAR_PURE:
        return pure_state(haar_vectors(rng, d), dims)
    return DensityMatrix.from_array(ginibre_states(rng, d), dims)


def random_ensemble(
    kind: ModelKind,
    d: int,
    settings: int,
    rng: np.random.Generator,
    deterministic: Optional[bool] = None,
    pure: Optional[bool] = None,
    tol: float = DEFAULT_TOLERANCE,
) -> ModelEnsemble:
    """Random LHS or 1SQI model with 1..8 hidden values.

    Responses are deterministic or stochastic, hidden states pure or mixed;
    left unset, each is drawn with probability 1/2.
    """
    kind = ModelKind(kind)
    n = int(rng.integers(1, MAX_HIDDEN_VALUES + 1))
    weights = rng.dirichlet(np.ones(n))
    if deterministic is None:
        deterministic = bool(rng.random() < 0.5)
    if pure is None:
        pure = bool(rng.random() < 0.5)

    if deterministic:
        responses = np.eye(d)[rng.integers(0, d, size=(n, settings))]
    else:
        responses = rng.dirichlet(np.ones(d), size=(n, settings))

    shape = (n,) if kind is ModelKind.LHS else (n, d)
    states = pure_states(rng, d, shape) if pure else ginibre_states(rng, d, shape)
    return ModelEnsemble(kind=kind, weights=weights, responses=responses, states=states, tol=tol)


def lhs_tightness_demo(
    measure: Optional[CoherenceMeasure] = None,
    theta: float = 0.0,
    phi: float = 0.0,
) -> LhsDemo:
    """|0><0| (x) |+><+| evaluated with the qubit triple rotated to (theta, phi)."""
    measure = measure or CoherenceMeasure.l1()
    zero = pure_state([1, 0])
    plus = pure_state(np.array([1, 1]) / np.sqrt(2))
    state = tensor_state(zero, plus)
    if theta == 0.0 and phi == 0.0:
        fam = mubs_prime_power(2)
    else:
        fam = rotated_qubit_mubs(theta, phi)
    value = s_quantity(steer(state, fam), fam, measure)
    return LhsDemo(state=state, measure=measure, s_value=value)


def lhs_tightness_ensemble() -> ModelEnsemble:
    """The product-state demo as an explicit LHS model: one hidden value carrying |+>."""
    plus = projector(np.array([1, 1]) / np.sqrt(2))
    responses = [[[0.5, 0.5], [0.5, 0.5], [1.0, 0.0]]]
    return ModelEnsemble(kind=ModelKind.LHS, weights=[1.0], responses=responses, states=[plus])


def _constant_sqi_ensemble(vec) -> ModelEnsemble:
    """One hidden value, outcome 0 for every setting, the same state for every outcome."""
    rho = projector(np.asarray(vec, dtype=complex) / np.linalg.norm(vec))
    responses = [[[1.0, 0.0]] * 3]
    return ModelEnsemble(kind=ModelKind.SQI1, weights=[1.0], responses=responses, states=[[rho, rho]])


def sqi_tightness_ensembles() -> Tuple[ModelEnsemble, ...]:
    """Per-k 1SQI ensembles: each hidden state is unbiased with respect to coherence basis k."""
    zero = np.array([1, 0])
    plus = np.array([1, 1]) / np.sqrt(2)
    return (_constant_sqi_ensemble(zero), _constant_sqi_ensemble(zero), _constant_sqi_ensemble(plus))


def sqi_tightness_demo(measure: Optional[CoherenceMeasure] = None) -> SqiDemo:
    measure = measure or CoherenceMeasure.l1()
    fam = mubs_prime_power(2)
    ensembles = sqi_tightness_ensembles()
    value, per_k = strategy_value(ensembles, fam, measure)

    first = ensembles[0]
    forced = ModelEnsemble(
        kind=ModelKind.LHS, weights=first.weights, responses=first.responses, states=first.states[:, 0]
    )
    lhs_forced, _ = strategy_value([forced], fam, measure)
    return SqiDemo(ensembles=ensembles, measure=measure, s_value=value, per_k=per_k, lhs_forced=lhs_forced)


def sweep_models(
    kind: ModelKind,
    d: int,
    trials: int,
    seed: int = 0,
    inject: bool = False,
    measure: Optional[CoherenceMeasure] = None,
    tol: float = DEFAULT_TOLERANCE,
) -> SweepSummary:
    """Largest S over ``trials`` random models realized in the complete MUB family of dimension d.

    Every realized assemblage is also validated (strict for LHS, per-setting
    for 1SQI). An injected construction wins ties within ``tol``.
    """
    if trials < 1:
        raise ValueError("a sweep needs at least one trial")
    kind = ModelKind(kind)
    measure = (measure or CoherenceMeasure.l1()).for_dimension(d)
    mode = ValidationMode.STRICT if kind is ModelKind.LHS else ValidationMode.SQI
    fam = mubs_prime_power(d)
    settings = len(fam)

    values = np.empty(trials)
    invalid = []
    best, argmax, best_ensemble = -np.inf, None, None
    for trial in range(trials):
        rng = np.random.default_rng(seed + trial)
        ensemble = random_ensemble(kind, d, settings, rng, tol=tol)
        asm = realize(ensemble, settings)
        if not validate(asm, mode, tol).ok:
            invalid.append(trial)
        values[trial] = s_quantity(asm, fam, measure)
        if values[trial] > best:
            best, argmax, best_ensemble = values[trial], trial, ensemble

    if inject:
        if d != 2:
            raise DimensionError(f"tightness constructions exist for qubits only, got d = {d}")
        if kind is ModelKind.LHS:
            injected = lhs_tightness_ensemble()
            value, _ = strategy_value([injected], fam, measure)
        else:
            value = sqi_tightness_demo(measure).s_value
            injected = None
        if value >= best - tol:
            best, argmax, best_ensemble = max(best, value), None, injected

    if invalid:
        logger.warning(f"{len(invalid)} {kind.value} models failed {mode.value} validation, first at seed {seed + invalid[0]}")
    logger.info(f"Swept {trials} {kind.value} models at d = {d}: max S = {best:.9f}")
    return SweepSummary(
        kind=kind,
        d=d,
        trials=trials,
        seed=seed,
        max_s=float(best),
        measure=measure,
        argmax=argmax,
        invalid_trials=invalid,
        values=values,
        ensemble=best_ensemble,
    )
