"""Command-line entry point.

By default this launches the teleop service.  Offline modes cover headless
scripted runs, session replay/verification, trajectory export, and dumping
the built-in configuration and gait library for editing.  A running service
can also be poked with --send, making the CLI a thin client of the HTTP API.
"""

from __future__ import annotations

import argparse
import json
import sys
import urllib.error
import urllib.request

from .config import load_config, save_calibration, save_config
from .errors import GaitEngineError
from .export import write_trajectory_csv
from .gaits import save_library
from .session import SessionWriter, read_session, replay, run_script


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadcpg",
        description="Quadruped CPG gait engine and tele-operation service")
    parser.add_argument("--port", type=int, default=8000, help="service port")
    parser.add_argument("--host", default="127.0.0.1", help="service bind address")
    parser.add_argument("--rate-hz", type=float, default=None,
                        help="override the command rate (Hz)")
    parser.add_argument("--dt", type=float, default=None,
                        help="override the internal integrator step (s)")
    parser.add_argument("--config", default=None, metavar="PATH",
                        help="runtime configuration YAML")
    parser.add_argument("--gaits", default=None, metavar="PATH",
                        help="gait library YAML (defaults to the built-in library)")
    parser.add_argument("--calibration", default=None, metavar="PATH",
                        help="standalone joint calibration YAML")
    parser.add_argument("--record", default=None, metavar="PATH",
                        help="record the session to a JSONL file")
    parser.add_argument("--replay", default=None, metavar="PATH",
                        help="replay a recorded session and verify it byte-for-byte")
    parser.add_argument("--headless", action="store_true",
                        help="run the engine offline (no network) and exit")
    parser.add_argument("--duration", type=float, default=10.0,
                        help="headless run length in simulated seconds")
    parser.add_argument("--script", default=None, metavar="PATH",
                        help="headless command script (JSONL of commands with a 'tick' or 't' field)")
    parser.add_argument("--export", default=None, metavar="GAIT:CYCLES:PATH",
                        help="write a gait trajectory table as CSV and exit")
    parser.add_argument("--resolution", type=int, default=256,
                        help="rows per cycle for --export")
    parser.add_argument("--decimate", type=int, default=1, metavar="N",
                        help="broadcast every Nth telemetry frame")
    parser.add_argument("--out", default=None, metavar="PATH",
                        help="write replayed telemetry to this file")
    parser.add_argument("--dump-config", default=None, metavar="PATH",
                        help="write the effective configuration YAML and exit")
    parser.add_argument("--dump-gaits", default=None, metavar="PATH",
                        help="write the effective gait library YAML and exit")
    parser.add_argument("--dump-calibration", default=None, metavar="PATH",
                        help="write the effective calibration YAML and exit")
    parser.add_argument("--send", default=None, metavar="JSON",
                        help="POST one command to a running service and exit")
    parser.add_argument("--url", default=None,
                        help="service base URL for --send (default http://HOST:PORT)")
    return parser


def _load_script(path, rate_hz: float):
    commands = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            doc = json.loads(line)
            if "tick" in doc:
                tick = int(doc.pop("tick"))
            elif "t" in doc:
                tick = max(1, round(float(doc.pop("t")) * rate_hz))
            else:
                raise GaitEngineError(
                    f"{path}:{lineno}: script command needs a 'tick' or 't' field")
            commands.append((tick, doc))
    return commands


def _run_headless(config, args) -> int:
    ticks = max(1, round(args.duration * config.command_rate))
    commands = _load_script(args.script, config.command_rate) if args.script else []
    writer = SessionWriter(args.record, config) if args.record else None
    try:
        lines = run_script(config, commands, ticks, writer)
    finally:
        if writer is not None:
            writer.close()
    last = json.loads(lines[-1])
    print(f"headless run: {ticks} ticks ({ticks / config.command_rate:.2f} s), "
          f"final gait {last['gait']!r}, speed {last['speed']:.3f} m/s"
          + (f", recorded to {args.record}" if args.record else ""))
    return 0


def _run_replay(config, args) -> int:
    lines, matched = replay(args.replay, config)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
            for line in lines:
                handle.write(line + "\n")
    _, _, recorded = read_session(args.replay)
    if matched:
        print(f"replay verified: {len(lines)} frames byte-identical to {args.replay}")
        return 0
    print(f"replay MISMATCH: regenerated {len(lines)} frames, "
          f"recorded {len(recorded)}; streams differ", file=sys.stderr)
    return 1


def _run_export(config, args) -> int:
    spec = args.export.split(":")
    if len(spec) != 3:
        print("--export expects GAIT:CYCLES:PATH", file=sys.stderr)
        return 2
    name, cycles, path = spec[0], int(spec[1]), spec[2]
    if name not in config.gait_library:
        print(f"unknown gait {name!r}; available: {', '.join(config.gait_library)}",
              file=sys.stderr)
        return 1
    rows = write_trajectory_csv(path, config.gait_library[name], cycles,
                                args.resolution, geometry=config.geometry,
                                calibration=config.calibration,
                                leg_names=config.leg_names)
    print(f"wrote {rows} rows for gait {name!r} to {path}")
    return 0


def _run_send(args) -> int:
    base = args.url or f"http://{args.host}:{args.port}"
    body = args.send.encode("utf-8")
    request = urllib.request.Request(
        base.rstrip("/") + "/api/command", data=body,
        headers={"Content-Type": "application/json"}, method="POST")
    try:
        with urllib.request.urlopen(request, timeout=5.0) as response:
            print(response.read().decode("utf-8"))
            return 0
    except urllib.error.URLError as exc:
        print(f"send failed: {exc}", file=sys.stderr)
        return 1


def _serve(config, args) -> int:
    import uvicorn

    from .service.app import create_app

    app = create_app(config, decimate=args.decimate, record_path=args.record)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.rate_hz is not None:
        overrides["command_rate"] = args.rate_hz
    if args.dt is not None:
        overrides["internal_dt"] = args.dt
    try:
        config = load_config(args.config, args.gaits, args.calibration, **overrides)
        if args.dump_config:
            save_config(args.dump_config, config)
            print(f"wrote configuration to {args.dump_config}")
            return 0
        if args.dump_gaits:
            save_library(args.dump_gaits, config.gait_library)
            print(f"wrote {len(config.gait_library)} gaits to {args.dump_gaits}")
            return 0
        if args.dump_calibration:
            save_calibration(args.dump_calibration, config.calibration)
            print(f"wrote calibration to {args.dump_calibration}")
            return 0
        if args.send:
            return _run_send(args)
        if args.export:
            return _run_export(config, args)
        if args.replay:
            return _run_replay(config, args)
        if args.headless:
            return _run_headless(config, args)
        return _serve(config, args)
    except GaitEngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
