// Wire protocol: one JSON document per WebSocket message.
// Telemetry flows down, commands flow up, replies echo the sequence number.

export interface TelemetryFrame {
  tick: number;
  t: number;
  gait: string;
  omega: number;
  phases: number[];            // 4 oscillator phases, rad
  offsets: number[];           // 4 active phase offsets, rad
  turn: number[];              // 4 turn coefficients in [0, 1]
  feet_desired: number[][];    // 4 x [x, y] metres
  feet: number[][];            // 4 x [x, y] metres, filtered
  joints: number[][];          // 4 x [hip, knee] rad
  motors: number[][];          // 4 x [hip, knee] rad, clamped motor frame
  pwm: number[][];             // 4 x [hip, knee] microseconds
  clamp: number[][];           // 4 x [hip, knee]: 0 none, 1 position, 2 rate, 3 both
  ws: number[];                // 4 x workspace-projection flag
  speed: number;               // m/s
}

export interface CommandReply {
  ok: boolean;
  seq: number | null;
  reason?: string;
}

export type Command =
  | { type: "set_gait"; gait: string }
  | { type: "set_turn"; direction: "left" | "right" | "none" }
  | { type: "set_frequency"; hz: number }
  | { type: "stop" };

export type Inbound =
  | { kind: "telemetry"; frame: TelemetryFrame }
  | { kind: "reply"; reply: CommandReply }
  | { kind: "junk"; raw: string };

const LEGS = 4;

function isNumberArray(value: unknown, length: number): value is number[] {
  return Array.isArray(value) && value.length === length &&
    value.every((v) => typeof v === "number" && Number.isFinite(v));
}

function isPairArray(value: unknown): value is number[][] {
  return Array.isArray(value) && value.length === LEGS &&
    value.every((leg) => isNumberArray(leg, 2));
}

export function parseMessage(raw: string): Inbound {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    return { kind: "junk", raw };
  }
  if (typeof doc !== "object" || doc === null) {
    return { kind: "junk", raw };
  }
  const record = doc as Record<string, unknown>;
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
  if (
    typeof record.tick === "number" &&
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
    isNumberArray(record.ws, LEGS)
  ) {
    return { kind: "telemetry", frame: record as unknown as TelemetryFrame };
  }
  return { kind: "junk", raw };
}

/** Monotone per-connection sequence numbers, as the service requires. */
export class SequenceSource {
  private next = 1;

  issue(): number {
    return this.next++;
  }

  peek(): number {
    return this.next;
  }
}

export function encodeCommand(command: Command, seq: number): string {
  return JSON.stringify({ ...command, seq });
}
