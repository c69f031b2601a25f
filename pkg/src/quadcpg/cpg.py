"""Coupled phase-oscillator core and its first-order filters.

Four phase oscillators, one per leg, advance at a shared frequency while
pairwise coupling pulls their phase differences toward a configured offset
pattern.  Frequency, phase offsets, turn coefficients and foot endpoints are
each smoothed by first-order low-pass filters so operator commands never
produce discontinuous motion.

Every function here is a pure map from inputs to outputs: no shared mutable
state, safe to call from any thread, bit-deterministic for identical inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, InvalidInputError

TAU = 2.0 * math.pi

NUM_LEGS = 4


def _require_finite(**values):
    for name, value in values.items():
        if not np.all(np.isfinite(value)):
            raise InvalidInputError(f"{name} must be finite, got {value!r}")


def wrap_phase(phi):
    """Wrap an angle (scalar or array) to [0, 2*pi)."""
    arr = np.asarray(phi, dtype=float)
    _require_finite(phi=arr)
    wrapped = np.mod(arr, TAU)
    # np.mod of a tiny negative can round up to exactly 2*pi; fold it back.
    wrapped = np.where(wrapped >= TAU, wrapped - TAU, wrapped)
    if arr.ndim == 0:
        return float(wrapped)
    return wrapped


def wrap_signed(dphi):
    """Wrap an angle difference to (-pi, pi], the shortest angular path."""
    arr = np.asarray(dphi, dtype=float)
    _require_finite(dphi=arr)
    wrapped = math.pi - np.mod(math.pi - arr, TAU)
    wrapped = np.where(wrapped <= -math.pi, wrapped + TAU, wrapped)
    if arr.ndim == 0:
        return float(wrapped)
    return wrapped


def step_frequency(omega: float, omega_target: float, alpha_omega: float, dt: float) -> float:
    """One step of the frequency low-pass  d(omega)/dt = alpha * (target - omega).

    Uses the exact exponential solution over dt, so the update is stable for
    any step size and lands on the continuous-time trajectory.
    """
    _require_finite(omega=omega, omega_target=omega_target, alpha_omega=alpha_omega, dt=dt)
    if dt <= 0.0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    if alpha_omega < 0.0:
        raise InvalidInputError(f"alpha_omega must be >= 0, got {alpha_omega}")
    return omega + (omega_target - omega) * -math.expm1(-alpha_omega * dt)


def phase_rates(phases, omega, coupling, offsets, coupling_sign: float = -1.0):
    """Instantaneous phase velocities of the coupled oscillator network.

    d(phi_i)/dt = omega + sign * sum_j K[i,j] * sin(phi_i - phi_j + Off_i - Off_j)

    With the default sign of -1 the configured offset pattern is an
    asymptotically stable phase-locked state (the standard attractive
    convention); with +1 the same pattern is an unstable fixed point.
    Accepts a batch of phase vectors with shape (..., 4).
    """
    shifted = np.asarray(phases, dtype=float) + np.asarray(offsets, dtype=float)
    diff = shifted[..., :, None] - shifted[..., None, :]
    return omega + coupling_sign * np.sum(coupling * np.sin(diff), axis=-1)


def step_phases(phases, omega, coupling, offsets, dt, coupling_sign: float = -1.0):
    """Advance the oscillator phases by one RK4 step, then wrap to [0, 2*pi).

    Accepts a single phase vector of shape (4,) or a batch of shape (N, 4);
    the batch form runs the identical arithmetic row-wise.
    """
    ph = np.asarray(phases, dtype=float)
    _require_finite(phases=ph, omega=omega, coupling=coupling, offsets=offsets, dt=dt)
    if dt <= 0.0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    k1 = phase_rates(ph, omega, coupling, offsets, coupling_sign)
    k2 = phase_rates(ph + 0.5 * dt * k1, omega, coupling, offsets, coupling_sign)
    k3 = phase_rates(ph + 0.5 * dt * k2, omega, coupling, offsets, coupling_sign)
    k4 = phase_rates(ph + dt * k3, omega, coupling, offsets, coupling_sign)
    return wrap_phase(ph + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))


def step_endpoint_filter(endpoints, desired, desired_dphi, rates, alpha, delta, dt):
    """One explicit Euler step of the endpoint tracking filter.

    dX/dt = dphi/dt * dXd/dphi + alpha * (Xd - X) + delta

    The feed-forward term lets the periodic desired signal pass through at
    any gait frequency while additive high-frequency disturbances on Xd see
    only the plain first-order roll-off.
    """
    x = np.asarray(endpoints, dtype=float)
    xd = np.asarray(desired, dtype=float)
    xdp = np.asarray(desired_dphi, dtype=float)
    _require_finite(endpoints=x, desired=xd, desired_dphi=xdp, rates=rates,
                    alpha=alpha, delta=delta, dt=dt)
    if dt <= 0.0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    rate = np.asarray(rates, dtype=float)[..., None]
    return x + dt * (rate * xdp + alpha * (xd - x) + delta)


def step_offset_filter(offsets, target_offsets, alpha_offset, dt):
    """Move the per-leg phase offsets toward their targets along the shortest
    angular path, with the exact exponential update of the first-order filter.
    Result is wrapped to [0, 2*pi)."""
    cur = np.asarray(offsets, dtype=float)
    tgt = np.asarray(target_offsets, dtype=float)
    _require_finite(offsets=cur, target_offsets=tgt, alpha_offset=alpha_offset, dt=dt)
    if dt <= 0.0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    if alpha_offset < 0.0:
        raise InvalidInputError(f"alpha_offset must be >= 0, got {alpha_offset}")
    err = wrap_signed(tgt - cur)
    return wrap_phase(cur + err * -math.expm1(-alpha_offset * dt))


def default_coupling(strength: float = 4.0) -> np.ndarray:
    """All-to-all coupling matrix with the given magnitude and zero diagonal."""
    return strength * (np.ones((NUM_LEGS, NUM_LEGS)) - np.eye(NUM_LEGS))


@dataclass(frozen=True)
class CpgConfig:
    """Oscillator network parameters.

    omega_target   target angular frequency, rad/s
    alpha_omega    frequency filter gain, 1/s
    coupling       4x4 matrix of coupling magnitudes, 1/s (zero diagonal)
    phase_offsets  per-leg target phase offsets, rad, each in [0, 2*pi)
    alpha_endpoint endpoint filter gain, 1/s
    alpha_offset   offset-transition filter gain, 1/s
    coupling_sign  global sign applied to the coupling sum; -1 makes the
                   configured offsets attracting
    """

    omega_target: float = 0.0
    alpha_omega: float = 10.0
    coupling: np.ndarray = field(default_factory=default_coupling)
    phase_offsets: np.ndarray = field(default_factory=lambda: np.zeros(NUM_LEGS))
    alpha_endpoint: float = 25.0
    # 1.0/s keeps the fastest offset swing (pi rad on a gait change) slow
    # enough that filtered endpoints stay under 5 mm per 20 ms frame.
    alpha_offset: float = 1.0
    coupling_sign: float = -1.0

    def __post_init__(self):
        coupling = np.array(self.coupling, dtype=float)
        offsets = np.array(self.phase_offsets, dtype=float)
        object.__setattr__(self, "coupling", coupling)
        object.__setattr__(self, "phase_offsets", offsets)
        _require_finite(omega_target=self.omega_target, coupling=coupling,
                        phase_offsets=offsets)
        for name in ("alpha_omega", "alpha_endpoint", "alpha_offset"):
            gain = getattr(self, name)
            if not math.isfinite(gain) or gain < 0.0:
                raise ConfigurationError(f"{name} must be a finite gain >= 0, got {gain}")
        if coupling.shape != (NUM_LEGS, NUM_LEGS):
            raise ConfigurationError(f"coupling must be 4x4, got shape {coupling.shape}")
        if np.any(np.diag(coupling) != 0.0):
            raise ConfigurationError("coupling diagonal must be zero")
        if offsets.shape != (NUM_LEGS,):
            raise ConfigurationError(f"phase_offsets must have 4 entries, got {offsets.shape}")
        if np.any(offsets < 0.0) or np.any(offsets >= TAU):
            raise ConfigurationError("phase_offsets must lie in [0, 2*pi)")
        if self.coupling_sign not in (-1.0, 1.0):
            raise ConfigurationError(f"coupling_sign must be -1 or +1, got {self.coupling_sign}")


@dataclass
class CpgState:
    """Evolving oscillator state: frequency, phases, filtered endpoints,
    in-transition offsets, and the per-tick event input."""

    omega: float
    phases: np.ndarray
    endpoints: np.ndarray
    current_offsets: np.ndarray
    delta_input: np.ndarray

    @classmethod
    def at_rest(cls, offsets, endpoints) -> "CpgState":
        """State phase-locked to the given offsets with zero frequency."""
        offs = wrap_phase(np.asarray(offsets, dtype=float))
        return cls(
            omega=0.0,
            phases=wrap_phase(-offs),
            endpoints=np.array(endpoints, dtype=float),
            current_offsets=offs.copy(),
            delta_input=np.zeros((NUM_LEGS, 2)),
        )

    def validate(self):
        _require_finite(omega=self.omega, phases=self.phases,
                        endpoints=self.endpoints,
                        current_offsets=self.current_offsets,
                        delta_input=self.delta_input)
