"""Runtime configuration defaults and YAML load/save."""

from __future__ import annotations

import numpy as np
import yaml

from .cpg import CpgConfig, default_coupling
from .errors import ConfigurationError
from .gaits import default_library, load_library
from .kinematics import JointCalibration, JointLimits, LegGeometry
from .runtime import RuntimeConfig


CALIBRATION_FIELDS = ("hip_scale", "hip_offset", "knee_scale", "knee_offset",
                      "pwm_min_us", "pwm_max_us", "pwm_angle_min", "pwm_angle_max")


def load_calibration(path) -> JointCalibration:
    """Standalone calibration file: per-joint affine coefficients and the
    servo pulse map, either at the top level or under a `calibration:` key."""
    with open(path, "r", encoding="utf-8") as handle:
        doc = yaml.safe_load(handle) or {}
    if not isinstance(doc, dict):
        raise ConfigurationError(f"calibration file {path} must hold a mapping")
    doc = doc.get("calibration", doc)
    defaults = JointCalibration()
    return JointCalibration(**{
        name: float(doc.get(name, getattr(defaults, name)))
        for name in CALIBRATION_FIELDS
    })


def save_calibration(path, calibration: JointCalibration):
    doc = {name: float(getattr(calibration, name)) for name in CALIBRATION_FIELDS}
    with open(path, "w", encoding="utf-8") as handle:
        yaml.safe_dump({"calibration": doc}, handle, sort_keys=False)


def load_config(path=None, gaits_path=None, calibration_path=None, **overrides) -> RuntimeConfig:
    """Build a RuntimeConfig from an optional YAML file plus keyword overrides.

    The file mirrors the dataclass structure; any omitted key keeps its
    default.  Separate gait-library and calibration files take precedence
    over the built-ins and over the main file's `calibration:` section.
    """
    doc = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as handle:
            doc = yaml.safe_load(handle) or {}
        if not isinstance(doc, dict):
            raise ConfigurationError(f"config file {path} must hold a mapping")

    cpg_doc = doc.get("cpg", {})
    coupling = cpg_doc.get("coupling_strength")
    cpg = CpgConfig(
        alpha_omega=float(cpg_doc.get("alpha_omega", 10.0)),
        alpha_endpoint=float(cpg_doc.get("alpha_endpoint", 25.0)),
        alpha_offset=float(cpg_doc.get("alpha_offset", 1.0)),
        coupling=(default_coupling(float(coupling)) if coupling is not None
                  else np.array(cpg_doc["coupling"], dtype=float)
                  if "coupling" in cpg_doc else default_coupling()),
        coupling_sign=float(cpg_doc.get("coupling_sign", -1.0)),
    )

    geom_doc = doc.get("geometry", {})
    geometry = LegGeometry(l1=float(geom_doc.get("l1", 0.120)),
                           l2=float(geom_doc.get("l2", 0.120)))

    limits_doc = doc.get("limits", {})
    limits_defaults = JointLimits()
    limits = JointLimits(
        hip_range=float(limits_doc.get("hip_range", limits_defaults.hip_range)),
        knee_range=float(limits_doc.get("knee_range", limits_defaults.knee_range)),
        hip_speed_max=float(limits_doc.get("hip_speed_max", limits_defaults.hip_speed_max)),
        knee_speed_max=float(limits_doc.get("knee_speed_max", limits_defaults.knee_speed_max)),
    )

    if calibration_path is not None:
        calibration = load_calibration(calibration_path)
    else:
        cal_doc = doc.get("calibration", {})
        cal_defaults = JointCalibration()
        calibration = JointCalibration(**{
            name: float(cal_doc.get(name, getattr(cal_defaults, name)))
            for name in CALIBRATION_FIELDS
        })

    library = load_library(gaits_path) if gaits_path is not None else default_library()

    kwargs = {
        "command_rate": float(doc.get("command_rate", 50.0)),
        "internal_dt": float(doc.get("internal_dt", 0.002)),
        "cpg": cpg,
        "gait_library": library,
        "geometry": geometry,
        "limits": limits,
        "calibration": calibration,
        "turn_gain": float(doc.get("turn_gain", 2.5)),
        "frequency_cap_hz": float(doc.get("frequency_cap_hz", 3.0)),
        "initial_gait": str(doc.get("initial_gait", "trot")),
        "standing_height": float(doc.get("standing_height", 0.22)),
        "leg_names": tuple(doc.get("leg_names", ("fl", "fr", "hl", "hr"))),
        "speed_window_s": float(doc.get("speed_window_s", 1.0)),
    }
    kwargs.update(overrides)
    return RuntimeConfig(**kwargs)


def save_config(path, config: RuntimeConfig):
    """Write the scalar configuration (not the gait library) as YAML."""
    doc = {
        "command_rate": float(config.command_rate),
        "internal_dt": float(config.internal_dt),
        "cpg": {
            "alpha_omega": float(config.cpg.alpha_omega),
            "alpha_endpoint": float(config.cpg.alpha_endpoint),
            "alpha_offset": float(config.cpg.alpha_offset),
            "coupling": [[float(v) for v in row] for row in config.cpg.coupling],
            "coupling_sign": float(config.cpg.coupling_sign),
        },
        "geometry": {"l1": float(config.geometry.l1), "l2": float(config.geometry.l2)},
        "limits": {
            "hip_range": float(config.limits.hip_range),
            "knee_range": float(config.limits.knee_range),
            "hip_speed_max": float(config.limits.hip_speed_max),
            "knee_speed_max": float(config.limits.knee_speed_max),
        },
        "calibration": {
            "hip_scale": float(config.calibration.hip_scale),
            "hip_offset": float(config.calibration.hip_offset),
            "knee_scale": float(config.calibration.knee_scale),
            "knee_offset": float(config.calibration.knee_offset),
            "pwm_min_us": float(config.calibration.pwm_min_us),
            "pwm_max_us": float(config.calibration.pwm_max_us),
            "pwm_angle_min": float(config.calibration.pwm_angle_min),
            "pwm_angle_max": float(config.calibration.pwm_angle_max),
        },
        "turn_gain": float(config.turn_gain),
        "frequency_cap_hz": float(config.frequency_cap_hz),
        "initial_gait": config.initial_gait,
        "standing_height": float(config.standing_height),
        "leg_names": list(config.leg_names),
        "speed_window_s": float(config.speed_window_s),
    }
    with open(path, "w", encoding="utf-8") as handle:
        yaml.safe_dump(doc, handle, sort_keys=False)
