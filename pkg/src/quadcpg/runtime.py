"""50 Hz gait pipeline: oscillators -> endpoints -> leg kinematics -> servo commands.

The runtime advances the oscillator network at a fine internal step and emits
one telemetry frame per command period.  Every frame runs the full chain:
evaluate the desired endpoints and their phase derivatives, track them with
the endpoint filter, scale the forward component by the turn coefficients,
solve the leg IK, map to motor angles, clamp against position and speed
limits, and convert to servo pulse widths.

A single logical owner advances the runtime; commands are plain method calls
applied between ticks.  The math never reads the wall clock, so identical
configs and command histories produce bit-identical telemetry.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

from .cpg import NUM_LEGS, TAU, CpgConfig, CpgState, wrap_phase
from .errors import CommandError, ConfigurationError, InvalidInputError
from .gaits import LEG_NAMES, STANDING_HEIGHT, default_library
from .kinematics import (
    JointCalibration,
    JointLimits,
    LegGeometry,
    clamp_joint_command,
    inverse_kinematics,
    joints_to_motor,
    motor_to_pwm,
    project_to_workspace,
)
from .trajectory import GaitDefinition, TurnState, eval_endpoints, step_turn_filter

TURN_DIRECTIONS = ("left", "right", "none")

# Weight matrices cross-fade over this many offset-filter time constants when
# the gait changes, so the desired endpoints morph instead of jumping.
FADE_TIME_CONSTANTS = 3.0


def _scalar_wrap(phi: float) -> float:
    r = math.fmod(phi, TAU)
    if r < 0.0:
        r += TAU
    if r >= TAU:
        r -= TAU
    return r


def _scalar_wrap_signed(dphi: float) -> float:
    r = math.fmod(math.pi - dphi, TAU)
    if r < 0.0:
        r += TAU
    r = math.pi - r
    if r <= -math.pi:
        r += TAU
    return r


def _scalar_phase_rates(ph, omega, coupling_rows, offsets, sign):
    s0 = ph[0] + offsets[0]
    s1 = ph[1] + offsets[1]
    s2 = ph[2] + offsets[2]
    s3 = ph[3] + offsets[3]
    # sin(d_ij) is antisymmetric; six evaluations cover all pairs
    s01 = math.sin(s0 - s1)
    s02 = math.sin(s0 - s2)
    s03 = math.sin(s0 - s3)
    s12 = math.sin(s1 - s2)
    s13 = math.sin(s1 - s3)
    s23 = math.sin(s2 - s3)
    k = coupling_rows
    return (
        omega + sign * (k[0][1] * s01 + k[0][2] * s02 + k[0][3] * s03),
        omega + sign * (-k[1][0] * s01 + k[1][2] * s12 + k[1][3] * s13),
        omega + sign * (-k[2][0] * s02 - k[2][1] * s12 + k[2][3] * s23),
        omega + sign * (-k[3][0] * s03 - k[3][1] * s13 - k[3][2] * s23),
    )


@dataclass(frozen=True)
class RuntimeConfig:
    """Everything that determines the telemetry stream besides the commands."""

    command_rate: float = 50.0
    internal_dt: float = 0.002
    cpg: CpgConfig = field(default_factory=CpgConfig)
    gait_library: dict = field(default_factory=default_library)
    geometry: LegGeometry = field(default_factory=LegGeometry)
    limits: JointLimits = field(default_factory=JointLimits)
    calibration: JointCalibration = field(default_factory=JointCalibration)
    turn_gain: float = 2.5
    frequency_cap_hz: float = 3.0
    initial_gait: str = "trot"
    standing_height: float = STANDING_HEIGHT
    leg_names: tuple = LEG_NAMES
    speed_window_s: float = 1.0

    def __post_init__(self):
        if self.command_rate <= 0.0 or self.internal_dt <= 0.0:
            raise ConfigurationError("command_rate and internal_dt must be positive")
        frame_dt = 1.0 / self.command_rate
        substeps = frame_dt / self.internal_dt
        if abs(substeps - round(substeps)) > 1e-9 or round(substeps) < 1:
            raise ConfigurationError(
                f"internal_dt {self.internal_dt} must divide the {frame_dt} s frame exactly")
        if not self.gait_library:
            raise ConfigurationError("gait library must not be empty")
        if self.initial_gait not in self.gait_library:
            raise ConfigurationError(f"initial gait {self.initial_gait!r} not in library")
        if self.turn_gain < 0.0 or self.frequency_cap_hz < 0.0:
            raise ConfigurationError("turn_gain and frequency_cap_hz must be >= 0")
        if len(self.leg_names) != NUM_LEGS:
            raise ConfigurationError("leg_names must name 4 legs")

    @property
    def frame_dt(self) -> float:
        return 1.0 / self.command_rate

    @property
    def substeps(self) -> int:
        return round(self.frame_dt / self.internal_dt)


@dataclass(frozen=True)
class TelemetryFrame:
    """One command period's complete pipeline snapshot."""

    tick: int
    t: float
    gait: str
    omega: float
    phases: np.ndarray          # (4,) rad
    offsets: np.ndarray         # (4,) rad, offset-filter state
    turn: np.ndarray            # (4,) coefficients
    feet_desired: np.ndarray    # (4, 2) m
    feet: np.ndarray            # (4, 2) m, filtered endpoints
    joints: np.ndarray          # (4, 2) rad, IK output (hip, knee)
    motors: np.ndarray          # (4, 2) rad, clamped motor commands
    pwm: np.ndarray             # (4, 2) us
    clamp_position: np.ndarray  # (4, 2) bool
    clamp_rate: np.ndarray      # (4, 2) bool
    workspace_projected: np.ndarray  # (4,) bool
    speed: float                # m/s, kinematic treadmill estimate


def estimate_body_speed(feet, dt: float, cycle_s: float | None = None) -> float:
    """Kinematic treadmill speed from a window of filtered endpoints.

    feet has shape (T, 4, 2).  A leg sample counts as stance when its y lies
    within 5 mm of that leg's maximum extension over the window; the estimate
    is the mean backward sweep rate -dx/dt over consecutive stance pairs.
    """
    arr = np.asarray(feet, dtype=float)
    if arr.ndim != 3 or arr.shape[1:] != (NUM_LEGS, 2):
        raise InvalidInputError(f"feet window must have shape (T, 4, 2), got {arr.shape}")
    if dt <= 0.0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    window_s = (arr.shape[0] - 1) * dt
    if cycle_s is not None and window_s < cycle_s:
        raise InvalidInputError(
            f"window of {window_s:.3f} s is shorter than one gait cycle ({cycle_s:.3f} s)")
    if arr.shape[0] < 2:
        raise InvalidInputError("need at least two frames to estimate speed")
    x = arr[:, :, 0]
    y = arr[:, :, 1]
    stance = y >= (np.max(y, axis=0) - 0.005)
    pair_stance = stance[:-1] & stance[1:]
    if not np.any(pair_stance):
        return 0.0
    rates = -(x[1:] - x[:-1]) / dt
    return float(np.mean(rates[pair_stance]))


class GaitRuntime:
    """Owns the oscillator state and runs the per-frame pipeline."""

    def __init__(self, config: RuntimeConfig):
        self.config = config
        self._coupling_rows = tuple(tuple(map(float, row)) for row in config.cpg.coupling)
        gait = config.gait_library[config.initial_gait]
        self._gait_name = config.initial_gait
        self._target_offsets = gait.target_offsets.copy()
        self._weights_from = (gait.weights_x, gait.weights_y)
        self._weights_to = (gait.weights_x, gait.weights_y)
        self._fade_elapsed = 0.0
        self._fade_duration = 0.0
        self._omega_target = gait.nominal_frequency
        phases = wrap_phase(-gait.target_offsets)
        endpoints, _ = eval_endpoints(gait.weights_x, gait.weights_y, phases)
        self.state = CpgState.at_rest(gait.target_offsets, endpoints)
        self.turn = TurnState()
        self._tick = 0
        frames = max(2, round(config.speed_window_s * config.command_rate) + 1)
        self._feet_history: deque = deque(maxlen=frames)
        self._feet_history.append(endpoints.copy())
        # Seed the rate limiter with the initial pose so frame 1 starts legal.
        joints = self._solve_joints(self.turn.coefficients * endpoints[:, 0], endpoints[:, 1])[0]
        self._prev_motor = joints_to_motor(joints, config.calibration)

    @property
    def tick_index(self) -> int:
        return self._tick

    @property
    def gait_name(self) -> str:
        return self._gait_name

    @property
    def omega_target(self) -> float:
        return self._omega_target

    # -- commands (applied between ticks) ------------------------------------

    def set_gait(self, name: str):
        """Switch the target gait: offsets migrate through the offset filter
        and the weight matrices cross-fade over a few filter time constants."""
        if name not in self.config.gait_library:
            raise CommandError(f"unknown gait {name!r}")
        if name == self._gait_name:
            return
        gait: GaitDefinition = self.config.gait_library[name]
        self._weights_from = self._effective_weights()
        self._weights_to = (gait.weights_x, gait.weights_y)
        alpha = self.config.cpg.alpha_offset
        self._fade_duration = FADE_TIME_CONSTANTS / alpha if alpha > 0.0 else 0.0
        self._fade_elapsed = 0.0
        self._target_offsets = gait.target_offsets.copy()
        self._gait_name = name

    def set_turn(self, direction: str):
        if direction not in TURN_DIRECTIONS:
            raise CommandError(f"turn direction must be one of {TURN_DIRECTIONS}, got {direction!r}")
        self.turn = TurnState(coefficients=self.turn.coefficients, target=direction)

    def set_frequency(self, hz: float):
        if not math.isfinite(hz) or hz < 0.0 or hz > self.config.frequency_cap_hz:
            raise CommandError(
                f"frequency must lie in [0, {self.config.frequency_cap_hz}] Hz, got {hz}")
        self._omega_target = TAU * hz

    def stop(self):
        self._omega_target = 0.0

    def inject_delta(self, delta):
        """Additive per-leg endpoint velocity (m/s) for the next tick only."""
        arr = np.asarray(delta, dtype=float)
        if arr.shape != (NUM_LEGS, 2):
            raise CommandError(f"delta must have shape (4, 2), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise CommandError("delta must be finite")
        self.state.delta_input = arr.copy()

    def apply_command(self, command: dict):
        """Dispatch a validated wire command. Raises CommandError on bad payloads."""
        kind = command.get("type")
        if kind == "set_gait":
            self.set_gait(command.get("gait"))
        elif kind == "set_turn":
            self.set_turn(command.get("direction"))
        elif kind == "set_frequency":
            hz = command.get("hz")
            if not isinstance(hz, (int, float)):
                raise CommandError("set_frequency requires a numeric 'hz' field")
            self.set_frequency(float(hz))
        elif kind == "stop":
            self.stop()
        elif kind == "inject_delta":
            self.inject_delta(command.get("delta"))
        else:
            raise CommandError(f"unknown command type {kind!r}")

    # -- pipeline -------------------------------------------------------------

    def _effective_weights(self):
        if self._fade_elapsed >= self._fade_duration:
            return self._weights_to
        u = self._fade_elapsed / self._fade_duration
        wx = (1.0 - u) * self._weights_from[0] + u * self._weights_to[0]
        wy = (1.0 - u) * self._weights_from[1] + u * self._weights_to[1]
        return wx, wy

    def _solve_joints(self, x_cmd, y_cmd):
        joints = np.empty((NUM_LEGS, 2))
        projected = np.zeros(NUM_LEGS, dtype=bool)
        for leg in range(NUM_LEGS):
            x, y, was_projected = project_to_workspace(
                float(x_cmd[leg]), float(y_cmd[leg]), self.config.geometry)
            projected[leg] = was_projected
            solution = inverse_kinematics(x, y, self.config.geometry)
            joints[leg, 0] = solution.q_hip
            joints[leg, 1] = solution.q_knee
        return joints, projected

    def tick(self) -> TelemetryFrame:
        """Advance one command period and return the full pipeline snapshot."""
        self._advance_substeps()
        self.state.delta_input = np.zeros((NUM_LEGS, 2))  # event input consumed
        self._tick += 1
        return self._emit_frame()

    def _advance_substeps(self):
        """Scalar inner loop over one command period.

        Runs the same update sequence as the cpg-core operations (the
        composed form is pinned against this one by the equivalence test in
        the runtime suite) but in plain floats: at four oscillators the
        array overhead would dominate the 500 Hz substep budget.
        """
        cfg = self.config
        cpg = cfg.cpg
        state = self.state
        dt = cfg.internal_dt
        sign = cpg.coupling_sign
        alpha_x = cpg.alpha_endpoint
        k = self._coupling_rows
        omega = float(state.omega)
        omega_target = self._omega_target
        ph = [float(v) for v in state.phases]
        off = [float(v) for v in state.current_offsets]
        tgt = [float(v) for v in self._target_offsets]
        ex = [float(v) for v in state.endpoints[:, 0]]
        ey = [float(v) for v in state.endpoints[:, 1]]
        dx_in = [float(v) for v in state.delta_input[:, 0]]
        dy_in = [float(v) for v in state.delta_input[:, 1]]
        turn = [float(v) for v in self.turn.coefficients]
        turn_tgt = [float(v) for v in self.turn.target_vector]
        omega_gain = -math.expm1(-cpg.alpha_omega * dt)
        offset_gain = -math.expm1(-cpg.alpha_offset * dt)
        turn_gain = -math.expm1(-cfg.turn_gain * dt)
        fading = self._fade_elapsed < self._fade_duration
        if not fading:
            wx_rows = [tuple(map(float, row)) for row in self._weights_to[0]]
            wy_rows = [tuple(map(float, row)) for row in self._weights_to[1]]

        for _ in range(cfg.substeps):
            if fading:
                u = min(1.0, self._fade_elapsed / self._fade_duration)
                v = 1.0 - u
                wx_rows = [tuple(v * a + u * b for a, b in zip(ra, rb))
                           for ra, rb in zip(self._weights_from[0], self._weights_to[0])]
                wy_rows = [tuple(v * a + u * b for a, b in zip(ra, rb))
                           for ra, rb in zip(self._weights_from[1], self._weights_to[1])]
                self._fade_elapsed += dt
                fading = self._fade_elapsed < self._fade_duration

            rates = _scalar_phase_rates(ph, omega, k, off, sign)
            # endpoint filter, explicit Euler with the feed-forward term
            for i in range(NUM_LEGS):
                p = ph[i] / TAU
                w = wx_rows[i]
                xd = w[0] + p * (w[1] + p * (w[2] + p * (w[3] + p * (w[4] + p * w[5]))))
                dxd = (w[1] + p * (2.0 * w[2] + p * (3.0 * w[3] + p * (4.0 * w[4] + p * 5.0 * w[5])))) / TAU
                w = wy_rows[i]
                yd = w[0] + p * (w[1] + p * (w[2] + p * (w[3] + p * (w[4] + p * w[5]))))
                dyd = (w[1] + p * (2.0 * w[2] + p * (3.0 * w[3] + p * (4.0 * w[4] + p * 5.0 * w[5])))) / TAU
                ex[i] += dt * (rates[i] * dxd + alpha_x * (xd - ex[i]) + dx_in[i])
                ey[i] += dt * (rates[i] * dyd + alpha_x * (yd - ey[i]) + dy_in[i])
            # RK4 phase step (rates is stage 1)
            half = 0.5 * dt
            p2 = [ph[i] + half * rates[i] for i in range(NUM_LEGS)]
            k2 = _scalar_phase_rates(p2, omega, k, off, sign)
            p3 = [ph[i] + half * k2[i] for i in range(NUM_LEGS)]
            k3 = _scalar_phase_rates(p3, omega, k, off, sign)
            p4 = [ph[i] + dt * k3[i] for i in range(NUM_LEGS)]
            k4 = _scalar_phase_rates(p4, omega, k, off, sign)
            sixth = dt / 6.0
            for i in range(NUM_LEGS):
                ph[i] = _scalar_wrap(ph[i] + sixth * (rates[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            omega += (omega_target - omega) * omega_gain
            for i in range(NUM_LEGS):
                off[i] = _scalar_wrap(off[i] + _scalar_wrap_signed(tgt[i] - off[i]) * offset_gain)
                c = turn[i] + (turn_tgt[i] - turn[i]) * turn_gain
                turn[i] = 0.0 if c < 0.0 else (1.0 if c > 1.0 else c)

        state.omega = omega
        state.phases = np.array(ph)
        state.current_offsets = np.array(off)
        state.endpoints = np.stack([ex, ey], axis=1)
        self.turn = TurnState(coefficients=np.array(turn), target=self.turn.target)

    def _emit_frame(self) -> TelemetryFrame:
        cfg = self.config
        state = self.state
        wx, wy = self._effective_weights()
        desired, _ = eval_endpoints(wx, wy, state.phases)
        feet = state.endpoints.copy()
        x_cmd = self.turn.coefficients * feet[:, 0]
        joints, projected = self._solve_joints(x_cmd, feet[:, 1])
        motors_raw = joints_to_motor(joints, cfg.calibration)
        motors, pos_flags, rate_flags = clamp_joint_command(
            motors_raw, self._prev_motor, cfg.limits, cfg.frame_dt)
        self._prev_motor = motors
        pwm = motor_to_pwm(motors, cfg.calibration)
        self._feet_history.append(feet)
        speed = self._windowed_speed()
        return TelemetryFrame(
            tick=self._tick,
            t=self._tick * cfg.frame_dt,
            gait=self._gait_name,
            omega=state.omega,
            phases=state.phases.copy(),
            offsets=state.current_offsets.copy(),
            turn=self.turn.coefficients.copy(),
            feet_desired=desired,
            feet=feet,
            joints=joints,
            motors=motors,
            pwm=pwm,
            clamp_position=pos_flags,
            clamp_rate=rate_flags,
            workspace_projected=projected,
            speed=speed,
        )

    def _windowed_speed(self) -> float:
        history = self._feet_history
        if len(history) < history.maxlen:
            return 0.0
        return estimate_body_speed(np.array(history), self.config.frame_dt)
