"use strict";
// Cockpit entry point: WebSocket with reconnect backoff, keyboard control,
// and a requestAnimationFrame render loop decoupled from message arrival.
Object.defineProperty(exports, "__esModule", { value: true });
const keymap_js_1 = require("./keymap.js");
const protocol_js_1 = require("./protocol.js");
const render_js_1 = require("./render.js");
const state_js_1 = require("./state.js");
const state = new state_js_1.CockpitState();
const seq = new protocol_js_1.SequenceSource();
let socket = null;
let retryMs = 500;
function wsUrl() {
    const loc = window.location;
    const scheme = loc.protocol === "https:" ? "wss:" : "ws:";
    return `${scheme}//${loc.host}/ws`;
}
function connect() {
    state.onStatus("connecting");
    socket = new WebSocket(wsUrl());
    socket.onopen = () => {
        retryMs = 500;
        state.onStatus("open");
    };
    socket.onmessage = (event) => {
        state.onMessage((0, protocol_js_1.parseMessage)(String(event.data)), performance.now());
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
function sendCommand(key) {
    if (!socket || socket.readyState !== WebSocket.OPEN)
        return;
    const command = (0, keymap_js_1.keyboardDispatch)(key, state.currentHz);
    if (command === null)
        return;
    socket.send((0, protocol_js_1.encodeCommand)(command, seq.issue()));
}
function setupKeyboard() {
    document.addEventListener("keydown", (event) => {
        if (event.repeat)
            return;
        if ([" ", "ArrowUp", "ArrowDown"].includes(event.key)) {
            event.preventDefault();
        }
        sendCommand(event.key);
    });
}
function setupCanvas() {
    const canvas = document.getElementById("cockpit");
    const ctx = canvas.getContext("2d");
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
        (0, render_js_1.render)(ctx, canvas.clientWidth, canvas.clientHeight, state, fps);
        requestAnimationFrame(loop);
    };
    requestAnimationFrame(loop);
}
setupKeyboard();
setupCanvas();
connect();
