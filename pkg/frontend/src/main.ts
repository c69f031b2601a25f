// Cockpit entry point: WebSocket with reconnect backoff, keyboard control,
// and a requestAnimationFrame render loop decoupled from message arrival.

import { keyboardDispatch } from "./keymap.js";
import { encodeCommand, parseMessage, SequenceSource } from "./protocol.js";
import { render } from "./render.js";
import { CockpitState } from "./state.js";

const state = new CockpitState();
const seq = new SequenceSource();
let socket: WebSocket | null = null;
let retryMs = 500;

function wsUrl(): string {
  const loc = window.location;
  const scheme = loc.protocol === "https:" ? "wss:" : "ws:";
  return `${scheme}//${loc.host}/ws`;
}

function connect(): void {
  state.onStatus("connecting");
  socket = new WebSocket(wsUrl());
  socket.onopen = () => {
    retryMs = 500;
    state.onStatus("open");
  };
  socket.onmessage = (event) => {
    state.onMessage(parseMessage(String(event.data)), performance.now());
  };
  socket.onclose = () => {
    state.onStatus("closed");
    socket = null;
    setTimeout(connect, retryMs);
    retryMs = Math.min(retryMs * 2, 8000);
  };
  socket.onerror = () => {
    // onclose drives the retry
  };
}

function sendCommand(key: string): void {
  if (!socket || socket.readyState !== WebSocket.OPEN) return;
  const command = keyboardDispatch(key, state.currentHz);
  if (command === null) return;
  socket.send(encodeCommand(command, seq.issue()));
}

function setupKeyboard(): void {
  document.addEventListener("keydown", (event) => {
    if (event.repeat) return;
    if ([" ", "ArrowUp", "ArrowDown"].includes(event.key)) {
      event.preventDefault();
    }
    sendCommand(event.key);
  });
}

function setupCanvas(): void {
  const canvas = document.getElementById("cockpit") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d")!;
  let renderedFrames = 0;
  let fps = 0;
  let fpsWindowStart = performance.now();

  const resize = () => {
    const ratio = window.devicePixelRatio || 1;
    canvas.width = canvas.clientWidth * ratio;
    canvas.height = canvas.clientHeight * ratio;
    ctx.setTransform(ratio, 0, 0, ratio, 0, 0);
  };
  window.addEventListener("resize", resize);
  resize();

  const loop = () => {
    const now = performance.now();
    renderedFrames += 1;
    if (now - fpsWindowStart >= 1000) {
      fps = (renderedFrames * 1000) / (now - fpsWindowStart);
      renderedFrames = 0;
      fpsWindowStart = now;
    }
    render(ctx, canvas.clientWidth, canvas.clientHeight, state, fps);
    requestAnimationFrame(loop);
  };
  requestAnimationFrame(loop);
}

setupKeyboard();
setupCanvas();
connect();
