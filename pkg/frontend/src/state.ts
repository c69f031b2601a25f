// Cockpit state: connection status, the telemetry ring, and command
// bookkeeping.  Everything displayed is sourced from telemetry; the only
// local state is the sequence counter and the last reply, so the cockpit
// always shows the runtime's real (filtered, delayed) response.

import { CommandReply, Inbound, TelemetryFrame } from "./protocol.js";
import { RingBuffer } from "./ring.js";

export type ConnectionStatus = "connecting" | "open" | "closed";

export const HISTORY_FRAMES = 500; // ~10 s of 50 Hz telemetry

export class CockpitState {
  status: ConnectionStatus = "connecting";
  history = new RingBuffer<TelemetryFrame>(HISTORY_FRAMES);
  lastReply: CommandReply | null = null;
  junkCount = 0;
  /** wall-clock ms of the last telemetry arrival, for staleness display */
  lastFrameAt = 0;

  get latest(): TelemetryFrame | undefined {
    return this.history.last();
  }

  /** Latest oscillator frequency in Hz, the base for arrow-key stepping. */
  get currentHz(): number {
    const frame = this.latest;
    return frame ? frame.omega / (2 * Math.PI) : 0;
  }

  onStatus(status: ConnectionStatus): void {
    this.status = status;
    if (status !== "open") {
      this.lastReply = null;
    }
  }

  onMessage(message: Inbound, now: number): void {
    switch (message.kind) {
      case "telemetry":
        this.history.push(message.frame);
        this.lastFrameAt = now;
        break;
      case "reply":
        this.lastReply = message.reply;
        break;
      case "junk":
        this.junkCount += 1;
        break;
    }
  }
}
