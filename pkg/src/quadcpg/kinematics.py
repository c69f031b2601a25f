"""Closed-form kinematics of the two-link planar leg, joint limits, and servo maps.

Leg frame convention: x forward, y downward from the hip pivot.  Angles are
measured from the +x axis, positive toward +y, so a foot hanging straight
below the hip sits at theta = pi/2.  The knee fold angle kappa is taken in
[0, pi]: zero at full extension, pi fully folded (single assembly mode).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cpg import _require_finite
from .errors import (
    ConfigurationError,
    InvalidInputError,
    SingularInputError,
    WorkspaceError,
)

WORKSPACE_MARGIN = 1e-3  # m, keeps targets off the annulus boundary

# Default servo pulse map: 500..2500 us across -135..+135 deg.
DEFAULT_PWM_MIN_US = 500.0
DEFAULT_PWM_MAX_US = 2500.0
DEFAULT_PWM_ANGLE_MIN = -0.75 * math.pi
DEFAULT_PWM_ANGLE_MAX = 0.75 * math.pi

# Default motor zero offsets, chosen to center the shipped gaits' joint
# excursions inside the +/-45 deg hip and +/-70 deg knee ranges.
DEFAULT_HIP_MOTOR_OFFSET = -2.04
DEFAULT_KNEE_MOTOR_OFFSET = -3.03


@dataclass(frozen=True)
class LegGeometry:
    """Two-link leg: l1 hip link, l2 knee link, meters."""

    l1: float = 0.120
    l2: float = 0.120

    def __post_init__(self):
        if not (math.isfinite(self.l1) and math.isfinite(self.l2)):
            raise ConfigurationError("link lengths must be finite")
        if self.l1 <= 0.0 or self.l2 <= 0.0:
            raise ConfigurationError(f"link lengths must be positive, got {self.l1}, {self.l2}")

    @property
    def inner_radius(self) -> float:
        return abs(self.l1 - self.l2)

    @property
    def outer_radius(self) -> float:
        return self.l1 + self.l2


@dataclass(frozen=True)
class JointLimits:
    """Actuator capabilities: symmetric position ranges and speed caps (motor frame)."""

    hip_range: float = math.radians(45.0)
    knee_range: float = math.radians(70.0)
    hip_speed_max: float = math.radians(461.0)
    knee_speed_max: float = math.radians(461.0)

    def __post_init__(self):
        for name in ("hip_range", "knee_range", "hip_speed_max", "knee_speed_max"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise ConfigurationError(f"{name} must be a positive angle, got {value}")


@dataclass(frozen=True)
class JointCalibration:
    """Per-joint affine joint-to-motor map plus the servo pulse map."""

    hip_scale: float = 1.0
    hip_offset: float = DEFAULT_HIP_MOTOR_OFFSET
    knee_scale: float = 1.0
    knee_offset: float = DEFAULT_KNEE_MOTOR_OFFSET
    pwm_min_us: float = DEFAULT_PWM_MIN_US
    pwm_max_us: float = DEFAULT_PWM_MAX_US
    pwm_angle_min: float = DEFAULT_PWM_ANGLE_MIN
    pwm_angle_max: float = DEFAULT_PWM_ANGLE_MAX

    def __post_init__(self):
        values = [self.hip_scale, self.hip_offset, self.knee_scale, self.knee_offset,
                  self.pwm_min_us, self.pwm_max_us, self.pwm_angle_min, self.pwm_angle_max]
        if not all(math.isfinite(v) for v in values):
            raise ConfigurationError("calibration values must be finite")
        if self.hip_scale == 0.0 or self.knee_scale == 0.0:
            raise ConfigurationError("calibration scale must be nonzero")
        if self.pwm_max_us <= self.pwm_min_us or self.pwm_angle_max <= self.pwm_angle_min:
            raise ConfigurationError("pwm map endpoints must be increasing")


@dataclass(frozen=True)
class JointAngles:
    """IK solution for one leg.  kappa is the knee fold angle (the interior
    IK angle, renamed from the phase-offset symbol), zeta the knee-to-hip
    correction, theta the leg direction, l3 the hip-to-foot distance."""

    q_hip: float
    q_knee: float
    kappa: float
    zeta: float
    theta: float
    l3: float


def workspace_contains(x: float, y: float, geom: LegGeometry) -> bool:
    """True iff (x, y) lies inside the reachable annulus with a 1 mm margin."""
    _require_finite(x=x, y=y)
    r = math.hypot(x, y)
    return geom.inner_radius + WORKSPACE_MARGIN <= r <= geom.outer_radius - WORKSPACE_MARGIN


def project_to_workspace(x: float, y: float, geom: LegGeometry) -> tuple[float, float, bool]:
    """Radially project (x, y) onto the margin annulus.  Returns (x, y, projected)."""
    _require_finite(x=x, y=y)
    r = math.hypot(x, y)
    lo = geom.inner_radius + WORKSPACE_MARGIN
    hi = geom.outer_radius - WORKSPACE_MARGIN
    if lo <= r <= hi:
        return x, y, False
    if r == 0.0:
        # No radial direction at the hip pivot; push straight down.
        return 0.0, lo, True
    scale = (lo if r < lo else hi) / r
    return x * scale, y * scale, True


def inverse_kinematics(x: float, y: float, geom: LegGeometry) -> JointAngles:
    """Closed-form IK of the two-link leg.

    l3 = sqrt(x^2 + y^2), theta = atan2(y, x),
    kappa = arccos((l3^2 - l1^2 - l2^2) / (2 l1 l2)) in [0, pi],
    zeta = atan2(l2 sin kappa, l1 + l2 cos kappa),
    q_hip = theta + zeta, q_knee = kappa + q_hip.

    Raises WorkspaceError when the target is out of reach and
    SingularInputError at the hip pivot, where theta is undefined.
    """
    _require_finite(x=x, y=y)
    l1, l2 = geom.l1, geom.l2
    l3 = math.hypot(x, y)
    if l3 == 0.0:
        raise SingularInputError("foot target at the hip pivot has no defined direction")
    tol = 1e-12 * geom.outer_radius
    if l3 > geom.outer_radius + tol or l3 < geom.inner_radius - tol:
        raise WorkspaceError(
            f"target radius {l3:.6f} m outside [{geom.inner_radius:.6f}, "
            f"{geom.outer_radius:.6f}] m", radius=l3)
    cos_kappa = (l3 * l3 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
    cos_kappa = min(1.0, max(-1.0, cos_kappa))
    kappa = math.acos(cos_kappa)
    theta = math.atan2(y, x)
    zeta = math.atan2(l2 * math.sin(kappa), l1 + l2 * cos_kappa)
    q_hip = theta + zeta
    q_knee = kappa + q_hip
    return JointAngles(q_hip=q_hip, q_knee=q_knee, kappa=kappa, zeta=zeta,
                       theta=theta, l3=l3)


def forward_kinematics(q_hip: float, q_knee: float, geom: LegGeometry) -> tuple[float, float]:
    """Algebraic inverse of the IK equations; serves as the IK oracle.

    kappa = q_knee - q_hip must lie in [0, pi].  At kappa = pi with equal
    links the leg is fully folded onto the hip pivot and (0, 0) is returned;
    that point is singular for the inverse map.
    """
    _require_finite(q_hip=q_hip, q_knee=q_knee)
    kappa = q_knee - q_hip
    tol = 1e-12
    if kappa < -tol or kappa > math.pi + tol:
        raise ConfigurationError(f"knee fold angle {kappa:.6f} outside [0, pi]")
    kappa = min(math.pi, max(0.0, kappa))
    l1, l2 = geom.l1, geom.l2
    cos_kappa = math.cos(kappa)
    sin_kappa = math.sin(kappa)
    zeta = math.atan2(l2 * sin_kappa, l1 + l2 * cos_kappa)
    theta = q_hip - zeta
    l3 = math.sqrt(max(0.0, l1 * l1 + l2 * l2 + 2.0 * l1 * l2 * cos_kappa))
    return l3 * math.cos(theta), l3 * math.sin(theta)


def clamp_joint_command(command, previous, limits: JointLimits, dt: float):
    """Clamp motor-frame (hip, knee) commands to position ranges, then rate
    limit against the previous command so |dq|/dt never exceeds the speed cap.

    command/previous have shape (..., 2) with hip in column 0, knee in 1.
    Returns (clamped, position_flags, rate_flags).
    """
    cmd = np.asarray(command, dtype=float)
    prev = np.asarray(previous, dtype=float)
    _require_finite(command=cmd, previous=prev, dt=dt)
    if dt <= 0.0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    pos_limit = np.array([limits.hip_range, limits.knee_range])
    rate_limit = np.array([limits.hip_speed_max, limits.knee_speed_max]) * dt
    pos_clamped = np.clip(cmd, -pos_limit, pos_limit)
    position_flags = pos_clamped != cmd
    out = np.clip(pos_clamped, prev - rate_limit, prev + rate_limit)
    rate_flags = out != pos_clamped
    return out, position_flags, rate_flags


def joints_to_motor(joints, calibration: JointCalibration) -> np.ndarray:
    """Affine joint-to-motor map, shape (..., 2) with hip in column 0."""
    q = np.asarray(joints, dtype=float)
    _require_finite(joints=q)
    scale = np.array([calibration.hip_scale, calibration.knee_scale])
    offset = np.array([calibration.hip_offset, calibration.knee_offset])
    return q * scale + offset


def motor_to_joints(motors, calibration: JointCalibration) -> np.ndarray:
    """Exact inverse of joints_to_motor."""
    m = np.asarray(motors, dtype=float)
    _require_finite(motors=m)
    scale = np.array([calibration.hip_scale, calibration.knee_scale])
    offset = np.array([calibration.hip_offset, calibration.knee_offset])
    return (m - offset) / scale


def motor_to_pwm(angle, calibration: JointCalibration = JointCalibration()):
    """Linear motor-angle to pulse-width map, saturating at the endpoints."""
    a = np.asarray(angle, dtype=float)
    _require_finite(angle=a)
    span = calibration.pwm_angle_max - calibration.pwm_angle_min
    gain = (calibration.pwm_max_us - calibration.pwm_min_us) / span
    pwm = calibration.pwm_min_us + (a - calibration.pwm_angle_min) * gain
    pwm = np.clip(pwm, calibration.pwm_min_us, calibration.pwm_max_us)
    if a.ndim == 0:
        return float(pwm)
    return pwm
