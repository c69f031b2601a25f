"""Runtime ownership for the service: one thread ticks the gait engine at the
command rate; everything else talks to it through a serialized command queue
and immutable telemetry snapshots.

Commands are validated synchronously at submission (the gait library and caps
are immutable while running, so validation cannot race the tick thread) and
applied at the next tick boundary.  Telemetry fan-out hands every subscriber
the same pre-serialized JSON line.
"""

from __future__ import annotations

import math
import queue
import threading
import time

import numpy as np

from ..errors import CommandError
from ..runtime import NUM_LEGS, GaitRuntime, RuntimeConfig, TURN_DIRECTIONS
from ..session import SessionWriter, config_fingerprint, frame_to_json


class TelemetryHub:
    """Owns the GaitRuntime thread, the command queue, and telemetry fan-out."""

    def __init__(self, config: RuntimeConfig, decimate: int = 1,
                 record_path=None, realtime: bool = True):
        if decimate < 1:
            raise CommandError(f"decimate must be >= 1, got {decimate}")
        self.config = config
        self.decimate = decimate
        self.config_hash = config_fingerprint(config)
        self._runtime = GaitRuntime(config)
        self._commands: queue.Queue = queue.Queue()
        self._subscribers: dict[int, tuple] = {}
        self._subscriber_lock = threading.Lock()
        self._next_subscriber = 0
        self._last_seq: dict[str, int] = {}
        self._seq_lock = threading.Lock()
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        self._realtime = realtime
        self._record = SessionWriter(record_path, config) if record_path else None
        self.latest_frame_json: str | None = None
        self.latest_gait: str = config.initial_gait

    # -- lifecycle ------------------------------------------------------------

    def start(self):
        if self._thread is not None:
            return
        self._stop.clear()
        self._thread = threading.Thread(target=self._run, name="gait-runtime", daemon=True)
        self._thread.start()

    def stop(self):
        if self._thread is None:
            return
        self._stop.set()
        self._thread.join(timeout=5.0)
        self._thread = None
        # Drain whatever arrived after the last tick so the record is complete.
        self._apply_pending()
        if self._record is not None:
            self._record.close()
            self._record = None

    @property
    def running(self) -> bool:
        return self._thread is not None and self._thread.is_alive()

    @property
    def tick_index(self) -> int:
        return self._runtime.tick_index

    @property
    def omega_target(self) -> float:
        return self._runtime.omega_target

    @property
    def client_count(self) -> int:
        with self._subscriber_lock:
            return len(self._subscribers)

    # -- commands -------------------------------------------------------------

    def validate(self, command: dict, seq: int, client: str) -> str | None:
        """Semantic validation against the immutable config. Returns a reason
        string when the command must be rejected, else None."""
        with self._seq_lock:
            last = self._last_seq.get(client)
            if last is not None and seq <= last:
                return f"sequence number {seq} not greater than {last} for client {client!r}"
            self._last_seq[client] = seq
        kind = command.get("type")
        if kind == "set_gait":
            if command.get("gait") not in self.config.gait_library:
                return f"unknown gait {command.get('gait')!r}"
        elif kind == "set_turn":
            if command.get("direction") not in TURN_DIRECTIONS:
                return f"turn direction must be one of {TURN_DIRECTIONS}"
        elif kind == "set_frequency":
            hz = command.get("hz")
            if not isinstance(hz, (int, float)) or not math.isfinite(hz):
                return "set_frequency requires a finite 'hz' field"
            if hz < 0.0 or hz > self.config.frequency_cap_hz:
                return f"frequency must lie in [0, {self.config.frequency_cap_hz}] Hz"
        elif kind == "inject_delta":
            delta = command.get("delta")
            try:
                arr = np.asarray(delta, dtype=float)
            except (TypeError, ValueError):
                return "inject_delta requires a 4x2 'delta' array"
            if arr.shape != (NUM_LEGS, 2) or not np.all(np.isfinite(arr)):
                return "inject_delta requires a finite 4x2 'delta' array"
        elif kind == "stop":
            pass
        else:
            return f"unknown command type {kind!r}"
        return None

    def submit(self, command: dict, seq: int, client: str) -> dict:
        """Validate and enqueue one command. Returns the wire reply dict."""
        reason = self.validate(command, seq, client)
        if reason is not None:
            return {"ok": False, "reason": reason, "seq": seq}
        if command.get("type") == "set_gait":
            self.latest_gait = command["gait"]
        self._commands.put(command)
        return {"ok": True, "seq": seq}

    def _apply_pending(self):
        while True:
            try:
                command = self._commands.get_nowait()
            except queue.Empty:
                return
            applied_tick = self._runtime.tick_index + 1
            self._runtime.apply_command(command)
            if self._record is not None:
                self._record.write_command(applied_tick, command)

    # -- telemetry fan-out ----------------------------------------------------

    def subscribe(self, loop, maxsize: int = 512):
        """Register an asyncio consumer. Returns (token, asyncio.Queue).

        A consumer that falls maxsize frames behind is disconnected (None is
        enqueued) rather than given a gapped stream.
        """
        import asyncio

        q: asyncio.Queue = asyncio.Queue(maxsize=maxsize)
        with self._subscriber_lock:
            token = self._next_subscriber
            self._next_subscriber += 1
            self._subscribers[token] = (loop, q)
        return token, q

    def unsubscribe(self, token: int):
        with self._subscriber_lock:
            self._subscribers.pop(token, None)

    def _broadcast(self, line: str):
        with self._subscriber_lock:
            targets = list(self._subscribers.items())
        for token, (loop, q) in targets:
            def push(q=q, token=token):
                try:
                    q.put_nowait(line)
                except Exception:
                    self.unsubscribe(token)
                    try:
                        q.put_nowait(None)  # tell the consumer it was dropped
                    except Exception:
                        pass
            try:
                loop.call_soon_threadsafe(push)
            except RuntimeError:
                self.unsubscribe(token)

    # -- tick loop ------------------------------------------------------------

    def _run(self):
        period = self.config.frame_dt
        next_deadline = time.monotonic() + period
        while not self._stop.is_set():
            if self._realtime:
                now = time.monotonic()
                delay = next_deadline - now
                if delay > 0:
                    time.sleep(delay)
                    next_deadline += period
                else:
                    # Late: reschedule from now to avoid a burst of catch-up ticks.
                    next_deadline = now + period
            self._apply_pending()
            frame = self._runtime.tick()
            line = frame_to_json(frame)
            self.latest_frame_json = line
            if self._record is not None:
                self._record.write_frame_json(line)
            if frame.tick % self.decimate == 0:
                self._broadcast(line)
