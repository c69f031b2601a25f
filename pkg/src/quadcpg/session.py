"""Deterministic session records: a JSONL header, command log, and telemetry stream.

A record starts with one header line carrying the config and gait-library
fingerprints, followed by command lines (``{"kind":"cmd",...}``) interleaved
with telemetry frame lines in tick order.  Frame lines are exactly the wire
telemetry JSON, so a replayed stream can be compared byte for byte against
the recorded one.
"""

from __future__ import annotations

import hashlib
import json

from .errors import CommandError, SessionError
from .runtime import GaitRuntime, RuntimeConfig, TelemetryFrame

SESSION_FORMAT = "gait-session/1"


def canonical_json(obj) -> str:
    """Compact deterministic JSON: fixed separators, insertion key order."""
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def frame_to_wire(frame: TelemetryFrame) -> dict:
    """Wire telemetry dict with a fixed key order."""
    return {
        "tick": frame.tick,
        "t": float(frame.t),
        "gait": frame.gait,
        "omega": float(frame.omega),
        "phases": [float(v) for v in frame.phases],
        "offsets": [float(v) for v in frame.offsets],
        "turn": [float(v) for v in frame.turn],
        "feet_desired": [[float(v) for v in leg] for leg in frame.feet_desired],
        "feet": [[float(v) for v in leg] for leg in frame.feet],
        "joints": [[float(v) for v in leg] for leg in frame.joints],
        "motors": [[float(v) for v in leg] for leg in frame.motors],
        "pwm": [[float(v) for v in leg] for leg in frame.pwm],
        "clamp": [[int(p) + 2 * int(r) for p, r in zip(pleg, rleg)]
                  for pleg, rleg in zip(frame.clamp_position, frame.clamp_rate)],
        "ws": [int(v) for v in frame.workspace_projected],
        "speed": float(frame.speed),
    }


def frame_to_json(frame: TelemetryFrame) -> str:
    return canonical_json(frame_to_wire(frame))


def _gait_fingerprint_doc(gait) -> dict:
    return {
        "name": gait.name,
        "weights_x": [[float(v) for v in row] for row in gait.weights_x],
        "weights_y": [[float(v) for v in row] for row in gait.weights_y],
        "offsets": [float(v) for v in gait.target_offsets],
        "nominal_frequency": float(gait.nominal_frequency),
    }


def config_fingerprint(config: RuntimeConfig) -> str:
    """SHA-256 over every runtime-affecting parameter, including the gaits."""
    cpg = config.cpg
    doc = {
        "format": SESSION_FORMAT,
        "command_rate": float(config.command_rate),
        "internal_dt": float(config.internal_dt),
        "cpg": {
            "alpha_omega": float(cpg.alpha_omega),
            "alpha_endpoint": float(cpg.alpha_endpoint),
            "alpha_offset": float(cpg.alpha_offset),
            "coupling": [[float(v) for v in row] for row in cpg.coupling],
            "coupling_sign": float(cpg.coupling_sign),
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
        "leg_names": list(config.leg_names),
        "speed_window_s": float(config.speed_window_s),
        "gaits": [_gait_fingerprint_doc(g) for _, g in sorted(config.gait_library.items())],
    }
    return hashlib.sha256(canonical_json(doc).encode("utf-8")).hexdigest()


def header_line(config: RuntimeConfig) -> str:
    # Start time is simulation time: wall-clock stamps would break the
    # byte-identical replay contract.
    return canonical_json({
        "kind": "header",
        "format": SESSION_FORMAT,
        "config_hash": config_fingerprint(config),
        "rate_hz": float(config.command_rate),
        "internal_dt": float(config.internal_dt),
        "start_tick": 0,
        "start_t": 0.0,
    })


def command_line(tick: int, command: dict) -> str:
    doc = {"kind": "cmd", "tick": tick}
    doc.update(command)
    return canonical_json(doc)


class SessionWriter:
    """Appends header, command, and frame lines to a JSONL record."""

    def __init__(self, path, config: RuntimeConfig):
        self._handle = open(path, "w", encoding="utf-8", newline="\n")
        self._handle.write(header_line(config) + "\n")

    def write_command(self, tick: int, command: dict):
        self._handle.write(command_line(tick, command) + "\n")

    def write_frame_json(self, line: str):
        self._handle.write(line + "\n")

    def close(self):
        if not self._handle.closed:
            self._handle.flush()
            self._handle.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_session(path):
    """Parse a session record into (header, commands, frame_lines).

    commands is a list of (tick, command_dict); frame_lines keeps the raw
    JSON strings for byte-exact comparison.  Parse failures report the byte
    offset of the offending line.
    """
    header = None
    commands = []
    frame_lines = []
    offset = 0
    with open(path, "r", encoding="utf-8", newline="\n") as handle:
        for line in handle:
            stripped = line.rstrip("\n")
            if line and not line.endswith("\n"):
                raise SessionError(f"truncated record line at byte {offset} in {path}")
            try:
                doc = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise SessionError(
                    f"unparseable record line at byte {offset} in {path}: {exc}") from exc
            if header is None:
                if not isinstance(doc, dict) or doc.get("kind") != "header":
                    raise SessionError(f"missing header line at byte {offset} in {path}")
                if doc.get("format") != SESSION_FORMAT:
                    raise SessionError(f"unsupported session format {doc.get('format')!r}")
                header = doc
            elif isinstance(doc, dict) and doc.get("kind") == "cmd":
                command = {k: v for k, v in doc.items() if k not in ("kind", "tick")}
                commands.append((int(doc["tick"]), command))
            else:
                frame_lines.append(stripped)
            offset += len(line.encode("utf-8"))
    if header is None:
        raise SessionError(f"empty session record {path}")
    return header, commands, frame_lines


def run_script(config: RuntimeConfig, commands, ticks: int, writer: SessionWriter | None = None):
    """Drive a runtime for the given number of ticks, applying each scripted
    command just before its tick is computed.  Returns the frame JSON lines.

    commands is an iterable of (tick, command_dict); a command at tick N takes
    effect in frame N (the first frame is tick 1).
    """
    runtime = GaitRuntime(config)
    schedule = sorted(commands, key=lambda item: item[0])
    pending = list(schedule)
    lines = []
    for _ in range(ticks):
        next_tick = runtime.tick_index + 1
        while pending and pending[0][0] <= next_tick:
            tick, command = pending.pop(0)
            runtime.apply_command(command)
            if writer is not None:
                writer.write_command(next_tick, command)
        frame = runtime.tick()
        line = frame_to_json(frame)
        lines.append(line)
        if writer is not None:
            writer.write_frame_json(line)
    return lines


def replay(path, config: RuntimeConfig):
    """Re-run a recorded session against the same config.

    Returns (frame_lines, matched) where matched says whether the regenerated
    stream is byte-identical to the recorded one.  Refuses to replay against
    a config whose fingerprint differs from the record header.
    """
    header, commands, recorded = read_session(path)
    expected_hash = config_fingerprint(config)
    if header.get("config_hash") != expected_hash:
        raise SessionError(
            "config fingerprint mismatch: record was taken with "
            f"{header.get('config_hash')!r}, current config is {expected_hash!r}")
    if header.get("rate_hz") != float(config.command_rate) or \
            header.get("internal_dt") != float(config.internal_dt):
        raise SessionError("record header rate/dt do not match the supplied config")
    try:
        lines = run_script(config, commands, ticks=len(recorded))
    except CommandError as exc:
        raise SessionError(f"recorded command no longer applies: {exc}") from exc
    matched = lines == recorded
    return lines, matched
