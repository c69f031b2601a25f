"use strict";
// Cockpit state: connection status, the telemetry ring, and command
// bookkeeping.  Everything displayed is sourced from telemetry; the only
// local state is the sequence counter and the last reply, so the cockpit
// always shows the runtime's real (filtered, delayed) response.
Object.defineProperty(exports, "__esModule", { value: true });
exports.CockpitState = exports.HISTORY_FRAMES = void 0;
const ring_js_1 = require("./ring.js");
exports.HISTORY_FRAMES = 500; // ~10 s of 50 Hz telemetry
class CockpitState {
    constructor() {
        this.status = "connecting";
        this.history = new ring_js_1.RingBuffer(exports.HISTORY_FRAMES);
        this.lastReply = null;
        this.junkCount = 0;
        /** wall-clock ms of the last telemetry arrival, for staleness display */
        this.lastFrameAt = 0;
    }
    get latest() {
        return this.history.last();
    }
    /** Latest oscillator frequency in Hz, the base for arrow-key stepping. */
    get currentHz() {
        const frame = this.latest;
        return frame ? frame.omega / (2 * Math.PI) : 0;
    }
    onStatus(status) {
        this.status = status;
        if (status !== "open") {
            this.lastReply = null;
        }
    }
    onMessage(message, now) {
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
exports.CockpitState = CockpitState;
