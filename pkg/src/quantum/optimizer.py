"""Maximize S over measurement frames, scan Werner states, locate thresholds.

A frame (theta, phi) is the unitary U = [|0_theta,phi>, |1_theta,phi>] whose
columns are the rotated z basis; the rotated x, y, z bases are U @ V_ref.
Instead of rebuilding bases per frame the state is pulled back,
rho -> (U_A^dagger (x) U_B^dagger) rho (U_A (x) U_B), and measured in the fixed
reference bases, which lets a whole grid of frames go through numpy at once.
"""

import functools
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel
from scipy.optimize import minimize

from .assemblage import steer, steer_arrays
from .coherence import CoherenceMeasure
from .errors import DimensionError
from .mub import MubFamily, rotated_qubit_mubs
from .naqc import (
    BoundKind,
    IndexPattern,
    NaqcBounds,
    bound,
    s_from_weighted,
    s_quantity,
    weighted_coherence_arrays,
)
from .qmatrix import DEFAULT_TOLERANCE, DensityMatrix, dagger, pure_state

logger = logging.getLogger(__name__)

DEFAULT_GRID_THETA = 64
DEFAULT_GRID_PHI = 32
INDEPENDENT_GRID = 8
MAX_REFINE_EVALUATIONS = 2000
REFINE_TOLERANCE = 1e-8
THRESHOLD_TOLERANCE = 1e-4
NO_CROSSING = 1e-9


class OptResult(BaseModel):
    s_max: float
    theta: float
    phi: float
    evaluations: int
    theta_b: Optional[float] = None
    phi_b: Optional[float] = None


class ScanRecord(BaseModel):
    p_w: float
    opt: OptResult
    bounds: NaqcBounds
    s_full_pattern: float


class ThresholdResult(BaseModel):
    measure: CoherenceMeasure
    bound_kind: BoundKind
    bound: float
    p_star: Optional[float] = None
    iterations: int


def singlet() -> DensityMatrix:
    return pure_state(np.array([0, 1, -1, 0]) / np.sqrt(2), dims=(2, 2))


def werner_state(p_w: float, tol: float = DEFAULT_TOLERANCE) -> DensityMatrix:
    """(1 - p_w)/4 I + p_w |psi-><psi-|."""
    if not 0.0 <= p_w <= 1.0:
        raise ValueError(f"Werner weight must lie in [0, 1], got {p_w}")
    mat = (1 - p_w) / 4 * np.eye(4) + p_w * singlet().mat
    return DensityMatrix.from_array(mat, dims=(2, 2), tol=tol)


@functools.lru_cache(maxsize=None)
def reference_family() -> MubFamily:
    x = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    y = np.array([[1, 1], [1j, -1j]]) / np.sqrt(2)
    return MubFamily.from_matrices([x, y, np.eye(2)])


def frame_unitaries(theta, phi) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    phase = np.exp(1j * phi)
    u = np.empty(np.broadcast(theta, phi).shape + (2, 2), dtype=complex)
    u[..., 0, 0] = c
    u[..., 1, 0] = phase * s
    u[..., 0, 1] = s
    u[..., 1, 1] = -phase * c
    return u


def wrap_angles(theta: float, phi: float) -> Tuple[float, float]:
    """Map to theta in [0, pi], phi in [0, 2 pi); (2 pi - theta, phi + pi) names the same frame."""
    theta = float(np.mod(theta, 2 * np.pi))
    if theta > np.pi:
        theta, phi = 2 * np.pi - theta, phi + np.pi
    return theta, float(np.mod(phi, 2 * np.pi))


def s_for_states(
    mats: np.ndarray,
    u_a: np.ndarray,
    u_b: np.ndarray,
    measure: CoherenceMeasure,
    pattern: IndexPattern = IndexPattern.DISTINCT,
) -> np.ndarray:
    """S of a stack of two-qubit matrices (..., 4, 4) in frames (..., 2, 2), broadcast together."""
    u = np.einsum("...ij,...kl->...ikjl", u_a, u_b)
    u = u.reshape(u.shape[:-4] + (4, 4))
    pulled = dagger(u) @ mats @ u
    blocks = pulled.reshape(pulled.shape[:-2] + (2, 2, 2, 2))
    ref = reference_family()
    sigma = steer_arrays(blocks, ref.stacked())
    a = weighted_coherence_arrays(sigma, ref, measure)
    return np.sum(s_from_weighted(a, pattern), axis=-1)


def s_at_frames(
    rho: DensityMatrix,
    theta,
    phi,
    measure: CoherenceMeasure,
    pattern: IndexPattern = IndexPattern.DISTINCT,
    theta_b=None,
    phi_b=None,
) -> np.ndarray:
    """Batched S over frames; Bob's frame defaults to Alice's."""
    rho = _two_qubit(rho)
    u_a = frame_unitaries(theta, phi)
    u_b = u_a if theta_b is None else frame_unitaries(theta_b, phi_b)
    return s_for_states(rho.mat, u_a, u_b, measure, pattern)


def s_at_frame(
    rho: DensityMatrix,
    theta: float,
    phi: float,
    measure: CoherenceMeasure,
    pattern: IndexPattern = IndexPattern.DISTINCT,
    theta_b: Optional[float] = None,
    phi_b: Optional[float] = None,
) -> float:
    """S with explicitly rotated bases: Alice measures the frame's triple, Bob's coherence uses his."""
    rho = _two_qubit(rho)
    alice = rotated_qubit_mubs(theta, phi)
    bob = alice if theta_b is None else rotated_qubit_mubs(theta_b, phi_b)
    return s_quantity(steer(rho, alice), bob, measure, pattern)


def _two_qubit(rho: DensityMatrix) -> DensityMatrix:
    if rho.dim != 4 or (rho.dims is not None and tuple(rho.dims) != (2, 2)):
        raise DimensionError(f"frame optimization needs a two-qubit state, got dims {rho.dims or rho.dim}")
    return rho if rho.dims is not None else rho.with_dims((2, 2))


def _refine(objective, start: np.ndarray, steps: np.ndarray, max_evaluations: int, xatol: float):
    simplex = np.vstack([start, start + np.diag(steps)])
    return minimize(
        objective,
        start,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "xatol": xatol,
            "fatol": np.inf,
            "maxfev": max_evaluations,
        },
    )


def optimize_s(
    rho: DensityMatrix,
    measure: CoherenceMeasure,
    pattern: IndexPattern = IndexPattern.DISTINCT,
    grid_theta: int = DEFAULT_GRID_THETA,
    grid_phi: int = DEFAULT_GRID_PHI,
    independent_frames: bool = False,
    max_evaluations: int = MAX_REFINE_EVALUATIONS,
    xatol: float = REFINE_TOLERANCE,
) -> OptResult:
    """Grid search over frames, then Nelder-Mead from the best grid point."""
    rho = _two_qubit(rho)
    if independent_frames:
        return _optimize_independent(rho, measure, pattern, max_evaluations, xatol)

    thetas = np.linspace(0.0, np.pi, grid_theta)
    phis = np.arange(grid_phi) * (2 * np.pi / grid_phi)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    values = s_at_frames(rho, tt, pp, measure, pattern)
    best = np.unravel_index(int(np.argmax(values)), values.shape)
    start = np.array([tt[best], pp[best]])

    def objective(x):
        return -float(s_at_frames(rho, x[0], x[1], measure, pattern))

    steps = np.array([np.pi / max(grid_theta - 1, 1), 2 * np.pi / grid_phi])
    res = _refine(objective, start, steps, max_evaluations, xatol)
    x = res.x if -res.fun >= values[best] else start
    theta, phi = wrap_angles(x[0], x[1])
    s_max = s_at_frame(rho, theta, phi, measure, pattern)
    logger.debug(f"Grid best {values[best]:.9f}, refined {s_max:.9f} after {res.nfev} evaluations")
    return OptResult(s_max=s_max, theta=theta, phi=phi, evaluations=values.size + res.nfev)


def _optimize_independent(
    rho: DensityMatrix,
    measure: CoherenceMeasure,
    pattern: IndexPattern,
    max_evaluations: int,
    xatol: float,
) -> OptResult:
    thetas = np.linspace(0.0, np.pi, INDEPENDENT_GRID)
    phis = np.arange(INDEPENDENT_GRID) * (2 * np.pi / INDEPENDENT_GRID)
    grid = np.meshgrid(thetas, phis, thetas, phis, indexing="ij")
    values = s_at_frames(rho, grid[0], grid[1], measure, pattern, grid[2], grid[3])
    best = np.unravel_index(int(np.argmax(values)), values.shape)
    start = np.array([g[best] for g in grid])

    def objective(x):
        return -float(s_at_frames(rho, x[0], x[1], measure, pattern, x[2], x[3]))

    step_theta, step_phi = np.pi / (INDEPENDENT_GRID - 1), 2 * np.pi / INDEPENDENT_GRID
    steps = np.array([step_theta, step_phi, step_theta, step_phi])
    res = _refine(objective, start, steps, max_evaluations, xatol)
    x = res.x if -res.fun >= values[best] else start
    theta, phi = wrap_angles(x[0], x[1])
    theta_b, phi_b = wrap_angles(x[2], x[3])
    s_max = s_at_frame(rho, theta, phi, measure, pattern, theta_b, phi_b)
    return OptResult(
        s_max=s_max,
        theta=theta,
        phi=phi,
        theta_b=theta_b,
        phi_b=phi_b,
        evaluations=values.size + res.nfev,
    )


def scan_werner(
    measure: CoherenceMeasure,
    p_grid: Sequence[float],
    grid_theta: int = DEFAULT_GRID_THETA,
    grid_phi: int = DEFAULT_GRID_PHI,
    independent_frames: bool = False,
    max_evaluations: int = MAX_REFINE_EVALUATIONS,
    xatol: float = REFINE_TOLERANCE,
    tol: float = DEFAULT_TOLERANCE,
) -> List[ScanRecord]:
    bounds = NaqcBounds(lhs=bound(BoundKind.LHS, 2, measure), sqi=bound(BoundKind.SQI1, 2, measure))
    logger.info(f"Scanning {len(p_grid)} Werner states with the {measure.kind.value} measure")
    records = []
    for p_w in p_grid:
        rho = werner_state(float(p_w), tol)
        opt = optimize_s(
            rho,
            measure,
            grid_theta=grid_theta,
            grid_phi=grid_phi,
            independent_frames=independent_frames,
            max_evaluations=max_evaluations,
            xatol=xatol,
        )
        full = s_at_frame(rho, opt.theta, opt.phi, measure, IndexPattern.FULL, opt.theta_b, opt.phi_b)
        records.append(ScanRecord(p_w=float(p_w), opt=opt, bounds=bounds, s_full_pattern=full))
        logger.debug(f"p_w = {p_w:.6f}: S = {opt.s_max:.9f}")
    return records


def find_threshold(
    measure: CoherenceMeasure,
    bound_kind: BoundKind,
    tolerance: float = THRESHOLD_TOLERANCE,
    grid_theta: int = DEFAULT_GRID_THETA,
    grid_phi: int = DEFAULT_GRID_PHI,
    tol: float = DEFAULT_TOLERANCE,
) -> ThresholdResult:
    """Smallest Werner weight whose optimized S exceeds the bound, by bisection."""
    bound_kind = BoundKind(bound_kind)
    ceiling = bound(bound_kind, 2, measure)

    def excess(p_w: float) -> float:
        return optimize_s(werner_state(p_w, tol), measure, grid_theta=grid_theta, grid_phi=grid_phi).s_max - ceiling

    if excess(1.0) <= NO_CROSSING:
        logger.info(f"No Werner state exceeds the {bound_kind.value} bound of {ceiling:g}")
        return ThresholdResult(measure=measure, bound_kind=bound_kind, bound=ceiling, iterations=0)

    lo, hi, iterations = 0.0, 1.0, 0
    while hi - lo >= tolerance:
        mid = (lo + hi) / 2
        if excess(mid) > 0:
            hi = mid
        else:
            lo = mid
        iterations += 1
    p_star = (lo + hi) / 2
    logger.info(f"Threshold against the {bound_kind.value} bound: p_w = {p_star:.6f}")
    return ThresholdResult(
        measure=measure, bound_kind=bound_kind, bound=ceiling, p_star=p_star, iterations=iterations
    )
