"""Tabular export of a gait's foot trajectory through the full leg pipeline.

One row per phase sample: the base phase plus, for each leg, the desired
endpoint, its phase derivative, the IK joint angles, and the servo pulse
widths.  Each leg is evaluated at the base phase shifted by its gait offset,
so the table shows the gait's actual coordination.
"""

from __future__ import annotations

import csv

from .cpg import NUM_LEGS, TAU, wrap_phase
from .errors import CommandError, InvalidInputError
from .gaits import LEG_NAMES
from .kinematics import (
    JointCalibration,
    LegGeometry,
    inverse_kinematics,
    joints_to_motor,
    motor_to_pwm,
)
from .trajectory import GaitDefinition, eval_endpoint, eval_endpoint_derivative


def trajectory_header(leg_names=LEG_NAMES) -> list[str]:
    columns = ["phase"]
    for name in leg_names:
        columns += [f"{name}_x", f"{name}_y", f"{name}_dx_dphi", f"{name}_dy_dphi",
                    f"{name}_q_hip", f"{name}_q_knee", f"{name}_pwm_hip", f"{name}_pwm_knee"]
    return columns


def export_trajectory(gait: GaitDefinition, cycles: int, resolution: int,
                      geometry: LegGeometry = LegGeometry(),
                      calibration: JointCalibration = JointCalibration(),
                      leg_names=LEG_NAMES):
    """Yield (header, rows) for the gait table: resolution rows per cycle."""
    if cycles < 1 or resolution < 1:
        raise InvalidInputError("cycles and resolution must be >= 1")
    rows = []
    for k in range(cycles * resolution):
        base = TAU * k / resolution
        row = [base]
        for leg in range(NUM_LEGS):
            # Converged phase locking puts leg i at base - offset_i.
            phi = wrap_phase(base - float(gait.target_offsets[leg]))
            x, y = eval_endpoint(gait, leg, phi)
            dx, dy = eval_endpoint_derivative(gait, leg, phi)
            joints = inverse_kinematics(x, y, geometry)
            motors = joints_to_motor([joints.q_hip, joints.q_knee], calibration)
            pwm_hip = motor_to_pwm(float(motors[0]), calibration)
            pwm_knee = motor_to_pwm(float(motors[1]), calibration)
            row += [x, y, dx, dy, joints.q_hip, joints.q_knee, pwm_hip, pwm_knee]
        rows.append(row)
    return trajectory_header(leg_names), rows


def write_trajectory_csv(path, gait: GaitDefinition, cycles: int, resolution: int,
                         geometry: LegGeometry = LegGeometry(),
                         calibration: JointCalibration = JointCalibration(),
                         leg_names=LEG_NAMES):
    header, rows = export_trajectory(gait, cycles, resolution, geometry,
                                     calibration, leg_names)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return len(rows)


def export_gait_from_library(library: dict, name: str, cycles: int, resolution: int,
                             **kwargs):
    if name not in library:
        raise CommandError(f"unknown gait {name!r}")
    return export_trajectory(library[name], cycles, resolution, **kwargs)
