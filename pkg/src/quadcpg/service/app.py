"""FastAPI application: REST command/status endpoints, the duplex telemetry
WebSocket, trajectory export, and static hosting for the browser cockpit."""

from __future__ import annotations

import asyncio
import io
import json
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, Response, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles
from pydantic import ValidationError

from ..cpg import TAU
from ..errors import CommandError, InvalidInputError
from ..export import export_gait_from_library
from ..runtime import RuntimeConfig
from .hub import TelemetryHub
from .models import CommandReply, CommandRequest, GaitInfo, StatusResponse

DEFAULT_STATIC_DIR = Path(__file__).resolve().parents[3] / "frontend" / "dist"


def create_app(config: RuntimeConfig | None = None, *, decimate: int = 1,
               record_path=None, realtime: bool = True,
               static_dir=None) -> FastAPI:
    config = config if config is not None else RuntimeConfig()
    hub = TelemetryHub(config, decimate=decimate, record_path=record_path,
                       realtime=realtime)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        hub.start()
        try:
            yield
        finally:
            hub.stop()

    app = FastAPI(title="quadcpg teleop service", lifespan=lifespan)
    app.state.hub = hub

    @app.get("/api/status", response_model=StatusResponse)
    def status():
        return StatusResponse(
            running=hub.running,
            tick=hub.tick_index,
            gait=hub.latest_gait,
            rate_hz=config.command_rate,
            internal_dt=config.internal_dt,
            frequency_hz=hub.omega_target / TAU,
            clients=hub.client_count,
            config_hash=hub.config_hash,
        )

    @app.get("/api/gaits", response_model=list[GaitInfo])
    def gaits():
        return [
            GaitInfo(
                name=gait.name,
                frequency_hz=gait.nominal_frequency / TAU,
                offsets=[float(o) / TAU for o in gait.target_offsets],
            )
            for gait in config.gait_library.values()
        ]

    @app.post("/api/command", response_model=CommandReply)
    def command(request: CommandRequest):
        client = request.client or "rest"
        reply = hub.submit(request.payload(), request.seq, client)
        return CommandReply(**reply)

    @app.get("/api/telemetry")
    def telemetry():
        line = hub.latest_frame_json
        if line is None:
            return Response(status_code=204)
        return Response(content=line, media_type="application/json")

    @app.get("/api/trajectory/{gait}")
    def trajectory(gait: str, cycles: int = 1, resolution: int = 256):
        try:
            header, rows = export_gait_from_library(
                config.gait_library, gait, cycles, resolution,
                geometry=config.geometry, calibration=config.calibration,
                leg_names=config.leg_names)
        except (CommandError, InvalidInputError) as exc:
            return Response(content=str(exc), status_code=404, media_type="text/plain")
        out = io.StringIO()
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")
        return Response(content=out.getvalue(), media_type="text/csv")

    @app.websocket("/ws")
    async def websocket_endpoint(socket: WebSocket):
        await socket.accept()
        loop = asyncio.get_running_loop()
        token, frames = hub.subscribe(loop)
        client = f"ws-{token}"
        send_lock = asyncio.Lock()

        async def send(text: str):
            async with send_lock:
                await socket.send_text(text)

        async def pump_telemetry():
            while True:
                line = await frames.get()
                if line is None:  # dropped for falling behind
                    await socket.close(code=1013)
                    return
                await send(line)

        pump = asyncio.create_task(pump_telemetry())
        try:
            while True:
                text = await socket.receive_text()
                try:
                    doc = json.loads(text)
                except json.JSONDecodeError as exc:
                    await send(json.dumps(
                        {"ok": False, "reason": f"malformed JSON: {exc}", "seq": None}))
                    continue
                if not isinstance(doc, dict):
                    await send(json.dumps(
                        {"ok": False, "reason": "command must be a JSON object", "seq": None}))
                    continue
                try:
                    request = CommandRequest(**doc)
                except ValidationError as exc:
                    await send(json.dumps(
                        {"ok": False,
                         "reason": f"invalid command: {exc.error_count()} field error(s)",
                         "seq": doc.get("seq")}))
                    continue
                reply = hub.submit(request.payload(), request.seq, request.client or client)
                await send(json.dumps(reply))
        except WebSocketDisconnect:
            pass
        finally:
            pump.cancel()
            hub.unsubscribe(token)

    static_root = Path(static_dir) if static_dir is not None else DEFAULT_STATIC_DIR
    if static_root.is_dir():
        app.mount("/", StaticFiles(directory=static_root, html=True), name="cockpit")

    return app
