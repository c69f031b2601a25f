"use strict";
// Keyboard-to-command mapping.
//   1..6        select gait (library order)
//   a / d / s   turn left / turn right / straight
//   ArrowUp/Dn  frequency +/- 0.25 Hz (clamped to the service cap)
//   space       stop
Object.defineProperty(exports, "__esModule", { value: true });
exports.FREQUENCY_CAP_HZ = exports.FREQUENCY_STEP_HZ = exports.GAIT_SLOTS = void 0;
exports.snapFrequency = snapFrequency;
exports.keyboardDispatch = keyboardDispatch;
exports.GAIT_SLOTS = [
    "trot",
    "gallop",
    "bound",
    "walk",
    "modified_trot_1",
    "modified_trot_2",
];
exports.FREQUENCY_STEP_HZ = 0.25;
exports.FREQUENCY_CAP_HZ = 3.0;
/** Snap a measured oscillator frequency onto the command grid. */
function snapFrequency(hz) {
    const snapped = Math.round(hz / exports.FREQUENCY_STEP_HZ) * exports.FREQUENCY_STEP_HZ;
    return Math.min(exports.FREQUENCY_CAP_HZ, Math.max(0, snapped));
}
/**
 * Translate one key press into a command, or null for unmapped keys.
 * currentHz is the latest telemetry-derived frequency; the arrow keys step
 * relative to it so the cockpit never trusts an optimistic local target.
 */
function keyboardDispatch(key, currentHz) {
    const slot = "123456".indexOf(key);
    if (slot >= 0) {
        return { type: "set_gait", gait: exports.GAIT_SLOTS[slot] };
    }
    switch (key) {
        case "a":
            return { type: "set_turn", direction: "left" };
        case "d":
            return { type: "set_turn", direction: "right" };
        case "s":
            return { type: "set_turn", direction: "none" };
        case "ArrowUp":
            return { type: "set_frequency", hz: snapFrequency(snapFrequency(currentHz) + exports.FREQUENCY_STEP_HZ) };
        case "ArrowDown":
            return { type: "set_frequency", hz: snapFrequency(snapFrequency(currentHz) - exports.FREQUENCY_STEP_HZ) };
        case " ":
            return { type: "stop" };
        default:
            return null;
    }
}
