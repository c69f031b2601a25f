// Canvas renderer: per-leg foot-path traces (desired vs filtered), the
// four-oscillator phase wheel with target-offset ghosts, motor-angle strip
// charts with limit bands and clamp marks, and the numeric readouts.

import { TelemetryFrame } from "./protocol.js";
import { CockpitState } from "./state.js";

export const LEG_LABELS = ["FL", "FR", "HL", "HR"];
export const LEG_COLORS = ["#4fc3f7", "#ffb74d", "#81c784", "#e57373"];

const HIP_LIMIT_RAD = (45 * Math.PI) / 180;
const KNEE_LIMIT_RAD = (70 * Math.PI) / 180;

const FOOT_X_RANGE: [number, number] = [-0.08, 0.08];
const FOOT_Y_RANGE: [number, number] = [0.13, 0.25];

interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

function panelFrame(ctx: CanvasRenderingContext2D, rect: Rect, title: string): void {
  ctx.strokeStyle = "#37474f";
  ctx.lineWidth = 1;
  ctx.strokeRect(rect.x, rect.y, rect.w, rect.h);
  ctx.fillStyle = "#90a4ae";
  ctx.font = "11px monospace";
  ctx.fillText(title, rect.x + 6, rect.y + 14);
}

function footToCanvas(rect: Rect, x: number, y: number): [number, number] {
  const px = rect.x + ((x - FOOT_X_RANGE[0]) / (FOOT_X_RANGE[1] - FOOT_X_RANGE[0])) * rect.w;
  const py = rect.y + ((y - FOOT_Y_RANGE[0]) / (FOOT_Y_RANGE[1] - FOOT_Y_RANGE[0])) * rect.h;
  return [px, py];
}

function drawFootPanel(ctx: CanvasRenderingContext2D, rect: Rect, leg: number,
                       frames: TelemetryFrame[]): void {
  panelFrame(ctx, rect, `${LEG_LABELS[leg]} foot (x fwd, y down)`);
  if (frames.length === 0) return;
  // desired trace, dim
  ctx.strokeStyle = "#546e7a";
  ctx.lineWidth = 1;
  ctx.beginPath();
  frames.forEach((frame, i) => {
    const [px, py] = footToCanvas(rect, frame.feet_desired[leg][0], frame.feet_desired[leg][1]);
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.stroke();
  // filtered trace, leg colour
  ctx.strokeStyle = LEG_COLORS[leg];
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  frames.forEach((frame, i) => {
    const [px, py] = footToCanvas(rect, frame.feet[leg][0], frame.feet[leg][1]);
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.stroke();
  // current points: hollow desired, filled filtered
  const last = frames[frames.length - 1];
  const [dx, dy] = footToCanvas(rect, last.feet_desired[leg][0], last.feet_desired[leg][1]);
  ctx.strokeStyle = "#b0bec5";
  ctx.beginPath();
  ctx.arc(dx, dy, 4, 0, 2 * Math.PI);
  ctx.stroke();
  const [fx, fy] = footToCanvas(rect, last.feet[leg][0], last.feet[leg][1]);
  ctx.fillStyle = LEG_COLORS[leg];
  ctx.beginPath();
  ctx.arc(fx, fy, 3.5, 0, 2 * Math.PI);
  ctx.fill();
}

function drawPhaseWheel(ctx: CanvasRenderingContext2D, rect: Rect,
                        frame: TelemetryFrame | undefined): void {
  panelFrame(ctx, rect, "phase wheel (solid: phase, hollow: offset target)");
  const cx = rect.x + rect.w / 2;
  const cy = rect.y + rect.h / 2 + 6;
  const radius = Math.min(rect.w, rect.h) / 2 - 26;
  ctx.strokeStyle = "#455a64";
  ctx.beginPath();
  ctx.arc(cx, cy, radius, 0, 2 * Math.PI);
  ctx.stroke();
  if (!frame) return;
  const point = (phase: number, r: number): [number, number] =>
    [cx + r * Math.cos(-phase + Math.PI / 2), cy - r * Math.sin(-phase + Math.PI / 2)];
  for (let leg = 0; leg < 4; leg++) {
    // where the leg would sit when perfectly locked to the active offsets
    const ghost = frame.phases[0] + frame.offsets[0] - frame.offsets[leg];
    const [gx, gy] = point(ghost, radius);
    ctx.strokeStyle = LEG_COLORS[leg];
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.arc(gx, gy, 8, 0, 2 * Math.PI);
    ctx.stroke();
    const [px, py] = point(frame.phases[leg], radius);
    ctx.fillStyle = LEG_COLORS[leg];
    ctx.beginPath();
    ctx.arc(px, py, 5, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = "#eceff1";
    ctx.font = "10px monospace";
    ctx.fillText(LEG_LABELS[leg], px + 7, py - 5);
  }
}

function drawStripChart(ctx: CanvasRenderingContext2D, rect: Rect, title: string,
                        frames: TelemetryFrame[], joint: 0 | 1, limit: number): void {
  panelFrame(ctx, rect, title);
  const y0 = rect.y + rect.h / 2;
  const scale = (rect.h / 2 - 8) / limit;
  // limit bands
  ctx.fillStyle = "rgba(229, 57, 53, 0.12)";
  ctx.fillRect(rect.x, rect.y, rect.w, rect.h / 2 - limit * scale + 0);
  ctx.fillRect(rect.x, y0 + limit * scale, rect.w, rect.y + rect.h - (y0 + limit * scale));
  ctx.strokeStyle = "#e53935";
  ctx.setLineDash([4, 4]);
  for (const sign of [-1, 1]) {
    ctx.beginPath();
    ctx.moveTo(rect.x, y0 - sign * limit * scale);
    ctx.lineTo(rect.x + rect.w, y0 - sign * limit * scale);
    ctx.stroke();
  }
  ctx.setLineDash([]);
  if (frames.length === 0) return;
  const step = rect.w / Math.max(1, frames.length - 1);
  for (let leg = 0; leg < 4; leg++) {
    ctx.strokeStyle = LEG_COLORS[leg];
    ctx.lineWidth = 1;
    ctx.beginPath();
    frames.forEach((frame, i) => {
      const px = rect.x + i * step;
      const py = y0 - frame.motors[leg][joint] * scale;
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
    // clamp marks
    ctx.fillStyle = "#ff1744";
    frames.forEach((frame, i) => {
      if (frame.clamp[leg][joint] !== 0) {
        ctx.fillRect(rect.x + i * step - 1, rect.y + rect.h - 5, 2, 4);
      }
    });
  }
}

export function drawReadouts(ctx: CanvasRenderingContext2D, rect: Rect,
                             state: CockpitState, fps: number): void {
  const frame = state.latest;
  ctx.font = "13px monospace";
  const lines: Array<[string, string]> = [
    ["status", state.status],
    ["gait", frame ? frame.gait : "-"],
    ["freq", frame ? `${(frame.omega / (2 * Math.PI)).toFixed(2)} Hz` : "-"],
    ["speed", frame ? `${frame.speed.toFixed(3)} m/s` : "-"],
    ["tick", frame ? String(frame.tick) : "-"],
    ["turn", frame ? frame.turn.map((v) => v.toFixed(2)).join(" ") : "-"],
    ["render", `${fps.toFixed(0)} fps`],
    ["last reply", state.lastReply
      ? (state.lastReply.ok ? `ok #${state.lastReply.seq}`
        : `REJECTED: ${state.lastReply.reason ?? "?"}`)
      : "-"],
  ];
  let y = rect.y + 18;
  for (const [label, value] of lines) {
    ctx.fillStyle = "#78909c";
    ctx.fillText(label.padEnd(10), rect.x + 6, y);
    ctx.fillStyle = label === "last reply" && state.lastReply && !state.lastReply.ok
      ? "#ff8a80" : "#eceff1";
    ctx.fillText(value, rect.x + 96, y);
    y += 18;
  }
}

export function render(ctx: CanvasRenderingContext2D, width: number, height: number,
                       state: CockpitState, fps: number): void {
  ctx.fillStyle = "#141a1f";
  ctx.fillRect(0, 0, width, height);
  const frames = state.history.toArray();
  const margin = 8;
  const footSize = Math.min((width * 0.42 - 3 * margin) / 2, (height - 5 * margin) / 3.2);
  // four foot panels, robot layout (front row on top)
  const order = [0, 1, 2, 3];
  order.forEach((leg) => {
    const col = leg % 2;
    const row = Math.floor(leg / 2);
    drawFootPanel(ctx, {
      x: margin + col * (footSize + margin),
      y: margin + row * (footSize + margin),
      w: footSize,
      h: footSize,
    }, leg, frames);
  });
  const wheelX = 2 * margin + 2 * (footSize + margin);
  const wheelW = Math.max(180, width * 0.24);
  drawPhaseWheel(ctx, { x: wheelX, y: margin, w: wheelW, h: 2 * footSize + margin }, state.latest);
  drawReadouts(ctx, { x: wheelX + wheelW + margin, y: margin, w: width - wheelX - wheelW - 2 * margin, h: 2 * footSize }, state, fps);
  // strip charts along the bottom
  const stripY = 2 * (footSize + margin) + margin;
  const stripH = Math.max(90, (height - stripY - 3 * margin) / 2);
  drawStripChart(ctx, { x: margin, y: stripY, w: width - 2 * margin, h: stripH },
    "hip motor angle, +/-45 deg band", frames, 0, HIP_LIMIT_RAD);
  drawStripChart(ctx, { x: margin, y: stripY + stripH + margin, w: width - 2 * margin, h: stripH },
    "knee motor angle, +/-70 deg band", frames, 1, KNEE_LIMIT_RAD);

  if (state.status !== "open") {
    ctx.fillStyle = "rgba(183, 28, 28, 0.85)";
    ctx.fillRect(0, height / 2 - 24, width, 48);
    ctx.fillStyle = "#fff";
    ctx.font = "16px monospace";
    ctx.textAlign = "center";
    ctx.fillText(state.status === "connecting"
      ? "connecting to teleop service..."
      : "disconnected - retrying with backoff", width / 2, height / 2 + 5);
    ctx.textAlign = "left";
  }
}
