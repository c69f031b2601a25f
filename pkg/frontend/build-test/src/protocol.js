"use strict";
// Wire protocol: one JSON document per WebSocket message.
// Telemetry flows down, commands flow up, replies echo the sequence number.
Object.defineProperty(exports, "__esModule", { value: true });
exports.SequenceSource = void 0;
exports.parseMessage = parseMessage;
exports.encodeCommand = encodeCommand;
const LEGS = 4;
function isNumberArray(value, length) {
    return Array.isArray(value) && value.length === length &&
        value.every((v) => typeof v === "number" && Number.isFinite(v));
}
function isPairArray(value) {
    return Array.isArray(value) && value.length === LEGS &&
        value.every((leg) => isNumberArray(leg, 2));
}
function parseMessage(raw) {
    let doc;
    try {
        doc = JSON.parse(raw);
    }
    catch {
        return { kind: "junk", raw };
    }
    if (typeof doc !== "object" || doc === null) {
        return { kind: "junk", raw };
    }
    const record = doc;
    if (typeof record.ok === "boolean") {
        return {
            kind: "reply",
            reply: {
                ok: record.ok,
                seq: typeof record.seq === "number" ? record.seq : null,
                reason: typeof record.reason === "string" ? record.reason : undefined,
            },
        };
    }
    if (typeof record.tick === "number" &&
        typeof record.t === "number" &&
        typeof record.gait === "string" &&
        typeof record.omega === "number" &&
        typeof record.speed === "number" &&
        isNumberArray(record.phases, LEGS) &&
        isNumberArray(record.offsets, LEGS) &&
        isNumberArray(record.turn, LEGS) &&
        isPairArray(record.feet_desired) &&
        isPairArray(record.feet) &&
        isPairArray(record.joints) &&
        isPairArray(record.motors) &&
        isPairArray(record.pwm) &&
        isPairArray(record.clamp) &&
        isNumberArray(record.ws, LEGS)) {
        return { kind: "telemetry", frame: record };
    }
    return { kind: "junk", raw };
}
/** Monotone per-connection sequence numbers, as the service requires. */
class SequenceSource {
    constructor() {
        this.next = 1;
    }
    issue() {
        return this.next++;
    }
    peek() {
        return this.next;
    }
}
exports.SequenceSource = SequenceSource;
function encodeCommand(command, seq) {
    return JSON.stringify({ ...command, seq });
}
