// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <string>

#include "vdi/viewer.hpp"

namespace vdi {

namespace {

const char* const kPage = R"HTML(<!doctype html>
<html>
<head>
<meta charset="utf-8">
<title>VDI viewer</title>
<style>
  body { margin: 0; background: #111; color: #ddd; font: 13px monospace; overflow: hidden; }
  canvas { display: block; margin: 0 auto; image-rendering: pixelated; cursor: grab; }
  #hud { position: fixed; top: 8px; left: 8px; background: rgba(0,0,0,0.6); padding: 6px 10px; }
  #hud .flash { color: #6f6; }
  #status { position: fixed; bottom: 8px; left: 8px; color: #888; }
</style>
</head>
<body>
<canvas id="view" width="256" height="256"></canvas>
<div id="hud">
  <div>fps <span id="fps">-</span> | mode <span id="mode">-</span></div>
  <div>vdi age <span id="age">-</span> ms | deviation <span id="dev">-</span>&deg;</div>
  <div id="newvdi">&nbsp;</div>
</div>
<div id="status">connecting</div>
<script>
"use strict";
const state = {
  orbit: { azimuth: 0.35, elevation: 0.25, radius: 2.6 },
  center: [0, 0, 0],
  seq: 0,
  dirty: true,
  lastMode: null,
  frameMode: null,
};
const canvas = document.getElementById("view");
const ctx = canvas.getContext("2d");
const $ = (id) => document.getElementById(id);
const LIMIT = Math.PI / 2 - 1e-3;

function clampOrbit() {
  const o = state.orbit;
  o.elevation = Math.max(-LIMIT, Math.min(LIMIT, o.elevation));
  o.radius = Math.max(1e-3, o.radius);
}

// Camera on the orbit sphere looking at the center, +y up.
function pose() {
  const o = state.orbit, c = state.center;
  const d = [Math.sin(o.azimuth) * Math.cos(o.elevation), Math.sin(o.elevation),
             Math.cos(o.azimuth) * Math.cos(o.elevation)];
  const pos = [c[0] + o.radius * d[0], c[1] + o.radius * d[1], c[2] + o.radius * d[2]];
  const z = d;  // camera looks down -z
  let x = [z[2], 0, -z[0]];  // up x z with up = +y
  const xl = Math.hypot(x[0], x[1], x[2]) || 1;
  x = x.map((v) => v / xl);
  const y = [z[1] * x[2] - z[2] * x[1], z[2] * x[0] - z[0] * x[2], z[0] * x[1] - z[1] * x[0]];
  const m00 = x[0], m01 = y[0], m02 = z[0];
  const m10 = x[1], m11 = y[1], m12 = z[1];
  const m20 = x[2], m21 = y[2], m22 = z[2];
  const tr = m00 + m11 + m22;
  let q;
  if (tr > 0) {
    const s = Math.sqrt(tr + 1) * 2;
    q = [(m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s, 0.25 * s];
  } else if (m00 > m11 && m00 > m22) {
    const s = Math.sqrt(1 + m00 - m11 - m22) * 2;
    q = [0.25 * s, (m01 + m10) / s, (m02 + m20) / s, (m21 - m12) / s];
  } else if (m11 > m22) {
    const s = Math.sqrt(1 + m11 - m00 - m22) * 2;
    q = [(m01 + m10) / s, 0.25 * s, (m12 + m21) / s, (m02 - m20) / s];
  } else {
    const s = Math.sqrt(1 + m22 - m00 - m11) * 2;
    q = [(m02 + m20) / s, (m12 + m21) / s, 0.25 * s, (m10 - m01) / s];
  }
  return { position: pos, orientation: q };
}

let ws = null, backoff = 250;
function connect() {
  ws = new WebSocket("ws://" + location.host + "/viewer");
  ws.binaryType = "arraybuffer";
  ws.onopen = () => { backoff = 250; $("status").textContent = "connected"; state.dirty = true; };
  ws.onclose = () => {
    $("status").textContent = "disconnected, retry in " + backoff + " ms";
    setTimeout(connect, backoff);
    backoff = Math.min(backoff * 2, 8000);
  };
  ws.onmessage = (ev) => {
    if (typeof ev.data === "string") onText(JSON.parse(ev.data));
    else onFrame(ev.data);
  };
}

function onText(msg) {
  if (msg.type === "hello") {
    if (msg.center) state.center = msg.center;
    if (msg.orbit) Object.assign(state.orbit, msg.orbit);
    clampOrbit();
    state.dirty = true;
    return;
  }
  $("fps").textContent = msg.fps.toFixed(1);
  $("mode").textContent = msg.mode;
  $("age").textContent = msg.vdi_age_ms.toFixed(0);
  $("dev").textContent = msg.deviation_deg.toFixed(1);
  state.lastMode = msg.mode;
  if (msg.new_vdi) {
    const el = $("newvdi");
    el.textContent = "new VDI";
    el.className = "flash";
    setTimeout(() => { el.textContent = " "; el.className = ""; }, 400);
  }
}

let decoding = false, pendingFrame = null;
function onFrame(buf) {
  pendingFrame = buf;  // stale frames are replaced
  if (!decoding) drawNext();
}
function drawNext() {
  const buf = pendingFrame;
  pendingFrame = null;
  if (!buf) return;
  decoding = true;
  const dv = new DataView(buf);
  const w = dv.getUint32(0, true), h = dv.getUint32(4, true), mode = dv.getUint8(8);
  createImageBitmap(new Blob([buf.slice(9)], { type: "image/png" })).then((bmp) => {
    if (canvas.width !== w || canvas.height !== h) { canvas.width = w; canvas.height = h; }
    ctx.drawImage(bmp, 0, 0);
    state.frameMode = mode ? "preview" : "full";
    decoding = false;
    drawNext();
  }, () => { decoding = false; drawNext(); });
}

// Coalesced pose stream: at most one message per tick, only when the orbit changed.
setInterval(() => {
  if (!state.dirty || !ws || ws.readyState !== 1 || ws.bufferedAmount > 0) return;
  state.dirty = false;
  const p = pose();
  ws.send(JSON.stringify({ seq: ++state.seq, position: p.position, orientation: p.orientation }));
}, 1000 / 60);

let drag = null;
canvas.addEventListener("mousedown", (e) => { drag = [e.clientX, e.clientY]; });
window.addEventListener("mouseup", () => { drag = null; });
window.addEventListener("mousemove", (e) => {
  if (!drag) return;
  state.orbit.azimuth -= (e.clientX - drag[0]) * 0.01;
  state.orbit.elevation += (e.clientY - drag[1]) * 0.01;
  drag = [e.clientX, e.clientY];
  clampOrbit();
  state.dirty = true;
});
canvas.addEventListener("wheel", (e) => {
  e.preventDefault();
  state.orbit.radius *= Math.exp(e.deltaY * 0.001);
  clampOrbit();
  state.dirty = true;
}, { passive: false });

connect();
</script>
</body>
</html>
)HTML";

}  // namespace

const std::string& viewer_page_html() {
  static const std::string page(kPage);
  return page;
}

}  // namespace vdi
