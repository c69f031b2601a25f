"""Foot-trajectory synthesis from phase-indexed polynomial basis functions.

A gait stores one 6-weight row per leg and axis.  Evaluating the basis at a
leg's phase and taking the dot product with the weight rows yields the desired
foot endpoint; the analytic phase derivative feeds the endpoint filter's
feed-forward term.  Turning scales the forward-backward component per leg.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cpg import NUM_LEGS, TAU, _require_finite
from .errors import ConfigurationError, FitError, InvalidInputError

BASIS_SIZE = 6

TURN_TARGETS = {
    "left": np.array([1.0, 0.0, 0.0, 1.0]),
    "right": np.array([0.0, 1.0, 1.0, 0.0]),
    "none": np.array([1.0, 1.0, 1.0, 1.0]),
}


def basis_matrix(phis) -> np.ndarray:
    """Rows of basis values [1, p, p^2, ..., p^5], p = phi/(2*pi), for wrapped phases."""
    arr = np.atleast_1d(np.asarray(phis, dtype=float))
    _require_finite(phi=arr)
    if np.any(arr < 0.0) or np.any(arr >= TAU):
        raise InvalidInputError("phase must be wrapped to [0, 2*pi) before basis evaluation")
    p = arr / TAU
    return np.vander(p, BASIS_SIZE, increasing=True)


def basis_derivative_matrix(phis) -> np.ndarray:
    """Rows of d/dphi of the basis: [0, 1, 2p, ..., 5p^4] / (2*pi)."""
    arr = np.atleast_1d(np.asarray(phis, dtype=float))
    _require_finite(phi=arr)
    if np.any(arr < 0.0) or np.any(arr >= TAU):
        raise InvalidInputError("phase must be wrapped to [0, 2*pi) before basis evaluation")
    p = arr / TAU
    out = np.zeros((arr.size, BASIS_SIZE))
    powers = np.vander(p, BASIS_SIZE - 1, increasing=True)
    for j in range(1, BASIS_SIZE):
        out[:, j] = j * powers[:, j - 1] / TAU
    return out


def eval_basis(phi: float) -> np.ndarray:
    """Basis vector at a single wrapped phase."""
    return basis_matrix(phi)[0]


@dataclass(frozen=True)
class GaitDefinition:
    """A named gait: per-leg weight rows, target phase offsets, and the
    nominal frequency the gait was designed for (rad/s)."""

    name: str
    weights_x: np.ndarray
    weights_y: np.ndarray
    target_offsets: np.ndarray
    nominal_frequency: float

    def __post_init__(self):
        wx = np.array(self.weights_x, dtype=float)
        wy = np.array(self.weights_y, dtype=float)
        offs = np.array(self.target_offsets, dtype=float)
        object.__setattr__(self, "weights_x", wx)
        object.__setattr__(self, "weights_y", wy)
        object.__setattr__(self, "target_offsets", offs)
        if wx.shape != (NUM_LEGS, BASIS_SIZE) or wy.shape != (NUM_LEGS, BASIS_SIZE):
            raise ConfigurationError(
                f"gait {self.name!r}: weight matrices must be 4x6, got {wx.shape} and {wy.shape}")
        _require_finite(weights_x=wx, weights_y=wy, target_offsets=offs,
                        nominal_frequency=self.nominal_frequency)
        if offs.shape != (NUM_LEGS,) or np.any(offs < 0.0) or np.any(offs >= TAU):
            raise ConfigurationError(f"gait {self.name!r}: offsets must be 4 angles in [0, 2*pi)")
        if self.nominal_frequency < 0.0:
            raise ConfigurationError(f"gait {self.name!r}: nominal frequency must be >= 0")


def eval_endpoint(gait: GaitDefinition, leg: int, phi: float) -> tuple[float, float]:
    """Desired foot endpoint (x, y) of one leg at a wrapped phase. Legs are 0-indexed."""
    if not 0 <= leg < NUM_LEGS:
        raise InvalidInputError(f"leg index must be in 0..3, got {leg}")
    f = eval_basis(phi)
    return float(gait.weights_x[leg] @ f), float(gait.weights_y[leg] @ f)


def eval_endpoint_derivative(gait: GaitDefinition, leg: int, phi: float) -> tuple[float, float]:
    """Analytic d(x, y)/dphi of one leg's desired endpoint."""
    if not 0 <= leg < NUM_LEGS:
        raise InvalidInputError(f"leg index must be in 0..3, got {leg}")
    df = basis_derivative_matrix(phi)[0]
    return float(gait.weights_x[leg] @ df), float(gait.weights_y[leg] @ df)


def eval_endpoints(weights_x, weights_y, phases) -> tuple[np.ndarray, np.ndarray]:
    """All-leg desired endpoints (4, 2) and derivatives (4, 2) at the given phases."""
    basis = basis_matrix(phases)
    dbasis = basis_derivative_matrix(phases)
    xy = np.stack([np.sum(weights_x * basis, axis=1),
                   np.sum(weights_y * basis, axis=1)], axis=1)
    dxy = np.stack([np.sum(weights_x * dbasis, axis=1),
                    np.sum(weights_y * dbasis, axis=1)], axis=1)
    return xy, dxy


def fit_weights(samples) -> tuple[np.ndarray, np.ndarray, float]:
    """Least-squares fit of (phi, x, y) samples onto the basis for one leg.

    Returns (weights_x, weights_y, max_residual).  This fit is the provenance
    oracle for the shipped gait weights; the residual it reports is frozen in
    the gait library golden data.
    """
    rows = list(samples)
    if len(rows) < BASIS_SIZE:
        raise FitError(f"need at least {BASIS_SIZE} samples, got {len(rows)}")
    phis = np.array([r[0] for r in rows], dtype=float)
    data = np.array([[r[1], r[2]] for r in rows], dtype=float)
    _require_finite(samples=data)
    a = basis_matrix(phis)
    if np.linalg.matrix_rank(a) < BASIS_SIZE:
        raise FitError("sample phases are rank-deficient for the basis")
    solution, _, rank, _ = np.linalg.lstsq(a, data, rcond=None)
    if rank < BASIS_SIZE:
        raise FitError("least-squares system is rank-deficient")
    residual = float(np.max(np.abs(a @ solution - data)))
    return solution[:, 0].copy(), solution[:, 1].copy(), residual


@dataclass
class TurnState:
    """Per-leg stride-suppression coefficients and the commanded direction."""

    coefficients: np.ndarray = field(default_factory=lambda: np.ones(NUM_LEGS))
    target: str = "none"

    def __post_init__(self):
        coeffs = np.array(self.coefficients, dtype=float)
        _require_finite(coefficients=coeffs)
        if coeffs.shape != (NUM_LEGS,) or np.any(coeffs < 0.0) or np.any(coeffs > 1.0):
            raise ConfigurationError("turn coefficients must be 4 values in [0, 1]")
        if self.target not in TURN_TARGETS:
            raise ConfigurationError(f"turn target must be left/right/none, got {self.target!r}")
        self.coefficients = coeffs

    @property
    def target_vector(self) -> np.ndarray:
        return TURN_TARGETS[self.target]


def apply_turning(x_targets, turn: TurnState) -> np.ndarray:
    """Scale each leg's forward-backward target by its turn coefficient."""
    x = np.asarray(x_targets, dtype=float)
    _require_finite(x_targets=x)
    return turn.coefficients * x


def step_turn_filter(turn: TurnState, dt: float, gain: float) -> TurnState:
    """Exponential approach of the turn coefficients toward the commanded vector."""
    _require_finite(dt=dt, gain=gain)
    if dt <= 0.0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    if gain < 0.0:
        raise InvalidInputError(f"gain must be >= 0, got {gain}")
    target = turn.target_vector
    factor = -np.expm1(-gain * dt)
    coeffs = turn.coefficients + (target - turn.coefficients) * factor
    return TurnState(coefficients=np.clip(coeffs, 0.0, 1.0), target=turn.target)
