import init, { sz_trajectory, rate_curve, harmonic_spectrum } from "./pkg/lfdecay_web.js";

const $ = (id) => document.getElementById(id);
const canvas = $("plot");
const ctx = canvas.getContext("2d");
const SAMPLES = 1200;

function inputs() {
  return {
    x: +$("x").value,
    ratio: +$("ratio").value,
    omega: +$("omega").value,
    phase: +$("phase").value,
    order: $("order").value,
    tend: +$("tend").value,
  };
}

function status(msg, err = false) {
  $("status").textContent = msg;
  $("status").className = err ? "err" : "";
}

// series: [{xs, ys, color, dash}]
function plot(series, xlabel, ylabel, bars = false) {
  const W = canvas.width, H = canvas.height, m = { l: 60, r: 15, t: 15, b: 40 };
  let x0 = Infinity, x1 = -Infinity, y0 = Infinity, y1 = -Infinity;
  for (const s of series) {
    for (const v of s.xs) { x0 = Math.min(x0, v); x1 = Math.max(x1, v); }
    for (const v of s.ys) { y0 = Math.min(y0, v); y1 = Math.max(y1, v); }
  }
  if (bars) y0 = Math.min(y0, 0);
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
  const pad = 0.05 * (y1 - y0);
  y0 -= pad; y1 += pad;
  const sx = (v) => m.l + (v - x0) / (x1 - x0 || 1) * (W - m.l - m.r);
  const sy = (v) => H - m.b - (v - y0) / (y1 - y0) * (H - m.t - m.b);

  ctx.clearRect(0, 0, W, H);
  ctx.strokeStyle = "#888";
  ctx.setLineDash([]);
  ctx.strokeRect(m.l, m.t, W - m.l - m.r, H - m.t - m.b);
  ctx.fillStyle = "#333";
  ctx.font = "12px sans-serif";
  for (let i = 0; i <= 4; i++) {
    const xv = x0 + i / 4 * (x1 - x0), yv = y0 + i / 4 * (y1 - y0);
    ctx.fillText(xv.toPrecision(3), sx(xv) - 12, H - m.b + 15);
    ctx.fillText(yv.toPrecision(3), 5, sy(yv) + 4);
  }
  ctx.fillText(xlabel, W / 2, H - 8);
  ctx.fillText(ylabel, 5, 12);

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dash ? [6, 4] : []);
    ctx.beginPath();
    if (bars) {
      s.xs.forEach((x, i) => { ctx.moveTo(sx(x), sy(0)); ctx.lineTo(sx(x), sy(s.ys[i])); });
    } else {
      s.xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(s.ys[i])) : ctx.moveTo(sx(x), sy(s.ys[i]))));
    }
    ctx.stroke();
  }
}

function run(label, fn) {
  status(`${label}…`);
  setTimeout(() => {
    const t0 = performance.now();
    try {
      fn();
      status(`${label}: ${((performance.now() - t0) / 1000).toFixed(2)} s`);
    } catch (e) {
      status(String(e), true);
    }
  }, 10);
}

function showInversion() {
  const p = inputs();
  const v = sz_trajectory(p.x, p.ratio, p.omega, p.phase, p.order, p.tend, SAMPLES);
  const n = v.length / 3;
  const t = Array.from(v.subarray(0, n));
  plot([
    { xs: t, ys: Array.from(v.subarray(n, 2 * n)), color: "#c9d6ea" },
    { xs: t, ys: Array.from(v.subarray(2 * n)), color: "#1f4e9c" },
    { xs: t, ys: t.map((s) => -0.5 + Math.exp(-s)), color: "#c33", dash: true },
  ], "γt", "⟨S_z⟩");
}

function showRate() {
  const p = inputs();
  const order = p.order === "standard" ? "8" : p.order;
  const g = rate_curve(p.x, p.ratio, p.omega, p.phase, order, p.tend, SAMPLES);
  const t = Array.from(g, (_, i) => p.tend * i / (g.length - 1));
  plot([{ xs: t, ys: Array.from(g), color: "#1f4e9c" }], "γt", "γ̄/γ");
}

function showSpectrum() {
  const p = inputs();
  const order = p.order === "standard" ? "8" : p.order;
  const v = harmonic_spectrum(p.x, p.ratio, order);
  const kMin = v[0];
  const amps = Array.from(v.subarray(1));
  plot([{ xs: amps.map((_, i) => kMin + i), ys: amps, color: "#1f4e9c" }], "k", "A_k", true);
}

await init();
status("ready");
$("sz").onclick = () => run("inversion", showInversion);
$("rate").onclick = () => run("rate", showRate);
$("spectrum").onclick = () => run("spectrum", showSpectrum);
run("inversion", showInversion);
