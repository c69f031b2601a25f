// Keyboard-to-command mapping.
//   1..6        select gait (library order)
//   a / d / s   turn left / turn right / straight
//   ArrowUp/Dn  frequency +/- 0.25 Hz (clamped to the service cap)
//   space       stop

import { Command } from "./protocol.js";

export const GAIT_SLOTS = [
  "trot",
  "gallop",
  "bound",
  "walk",
  "modified_trot_1",
  "modified_trot_2",
];

export const FREQUENCY_STEP_HZ = 0.25;
export const FREQUENCY_CAP_HZ = 3.0;

/** Snap a measured oscillator frequency onto the command grid. */
export function snapFrequency(hz: number): number {
  const snapped = Math.round(hz / FREQUENCY_STEP_HZ) * FREQUENCY_STEP_HZ;
  return Math.min(FREQUENCY_CAP_HZ, Math.max(0, snapped));
}

/**
 * Translate one key press into a command, or null for unmapped keys.
 * currentHz is the latest telemetry-derived frequency; the arrow keys step
 * relative to it so the cockpit never trusts an optimistic local target.
 */
export function keyboardDispatch(key: string, currentHz: number): Command | null {
  const slot = "123456".indexOf(key);
  if (slot >= 0) {
    return { type: "set_gait", gait: GAIT_SLOTS[slot] };
  }
  switch (key) {
    case "a":
      return { type: "set_turn", direction: "left" };
    case "d":
      return { type: "set_turn", direction: "right" };
    case "s":
      return { type: "set_turn", direction: "none" };
    case "ArrowUp":
      return { type: "set_frequency", hz: snapFrequency(snapFrequency(currentHz) + FREQUENCY_STEP_HZ) };
    case "ArrowDown":
      return { type: "set_frequency", hz: snapFrequency(snapFrequency(currentHz) - FREQUENCY_STEP_HZ) };
    case " ":
      return { type: "stop" };
    default:
      return null;
  }
}
