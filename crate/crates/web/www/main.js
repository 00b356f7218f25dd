import init, { powerCurve, circularityCurve, rateSurface } from "./pkg/relay_web.js";

const $ = (id) => document.getElementById(id);
const COLORS = { total: "#111", hop: [["#1f77b4", "#aec7e8"], ["#d62728", "#ff9896"]] };

function instance() {
  const data = new FormData($("instance"));
  const out = {};
  for (const [k, v] of data.entries()) out[k] = Number(v);
  return JSON.stringify(out);
}

function frame(ctx, w, h, pad) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad / 2, w - 1.5 * pad, h - 1.5 * pad);
}

function drawCurve(canvas, curve, xlabel) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 36;
  frame(ctx, w, h, pad);
  const xs = curve.x;
  const series = [curve.r_total, ...curve.hops.flat()];
  const ymax = Math.max(...series.flat()) * 1.05 || 1;
  const x0 = xs[0], x1 = xs[xs.length - 1];
  const X = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 1.5 * pad);
  const Y = (y) => h - pad - (y / ymax) * (h - 1.5 * pad);
  const line = (ys, color, width, dash = []) => {
    ctx.beginPath();
    ctx.setLineDash(dash);
    ctx.strokeStyle = color;
    ctx.lineWidth = width;
    ys.forEach((y, k) => (k ? ctx.lineTo(X(xs[k]), Y(y)) : ctx.moveTo(X(xs[k]), Y(y))));
    ctx.stroke();
    ctx.setLineDash([]);
  };
  for (let i = 0; i < 2; i++) {
    line(curve.hops[i][0], COLORS.hop[i][0], 1.2);
    line(curve.hops[i][1], COLORS.hop[i][1], 1.2, [5, 3]);
  }
  line(curve.r_total, COLORS.total, 2);
  ctx.fillStyle = "#888";
  for (const [x, y] of curve.candidates) ctx.fillRect(X(x) - 2, Y(y) - 2, 4, 4);
  ctx.fillStyle = "#e377c2";
  ctx.beginPath();
  ctx.arc(X(curve.best_x), Y(curve.best_rate), 5, 0, 2 * Math.PI);
  ctx.fill();
  ctx.fillStyle = "#333";
  ctx.font = "11px sans-serif";
  ctx.fillText(xlabel, w / 2, h - 8);
  ctx.fillText(`${x0.toPrecision(2)}`, pad, h - pad + 12);
  ctx.fillText(`${x1.toPrecision(2)}`, w - pad, h - pad + 12);
  ctx.fillText(`${ymax.toFixed(2)}`, 2, pad / 2 + 10);
  ctx.fillText("solid: first hop, dashed: second hop (blue path 1, red path 2), black: total", pad, h - pad + 24);
}

function heat(v) {
  const t = Math.max(0, Math.min(1, v));
  const r = Math.round(255 * Math.min(1, 1.8 * t));
  const g = Math.round(255 * Math.max(0, 1.6 * t - 0.5));
  const b = Math.round(255 * Math.max(0, 0.6 - t) + 60 * t);
  return `rgb(${r},${g},${b})`;
}

function drawSurface(canvas, s) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 36;
  frame(ctx, w, h, pad);
  const lo = Math.min(...s.rates), hi = Math.max(...s.rates);
  const cw = (w - 1.5 * pad) / s.n_p, ch = (h - 1.5 * pad) / s.n_c;
  for (let m = 0; m < s.n_c; m++) {
    for (let k = 0; k < s.n_p; k++) {
      ctx.fillStyle = heat((s.rates[m * s.n_p + k] - lo) / (hi - lo || 1));
      ctx.fillRect(pad + k * cw, h - pad - (m + 1) * ch, Math.ceil(cw), Math.ceil(ch));
    }
  }
  const X = (p) => pad + (p / s.p_max) * (w - 1.5 * pad);
  const Y = (c) => h - pad - c * (h - 1.5 * pad);
  ["#00e5ff", "#ffffff"].forEach((color, i) => {
    const t = s.descent[i];
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    t.forEach((pt, k) => (k ? ctx.lineTo(X(pt.p_r), Y(pt.c_x)) : ctx.moveTo(X(pt.p_r), Y(pt.c_x))));
    ctx.stroke();
    ctx.fillStyle = color;
    const last = t[t.length - 1];
    ctx.fillRect(X(last.p_r) - 3, Y(last.c_x) - 3, 6, 6);
  });
  const [gp, gc] = s.grid_best;
  ctx.strokeStyle = "#000";
  ctx.beginPath();
  ctx.arc(X(gp), Y(gc), 6, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.fillStyle = "#333";
  ctx.font = "11px sans-serif";
  ctx.fillText("p_r →", w / 2, h - 8);
  ctx.fillText("c_x ↑", 2, h / 2);
}

const fmt = (x) => Number(x).toFixed(4);

function refresh() {
  $("error").textContent = "";
  const inst = instance();
  const cx = Number($("cx").value);
  const prFrac = Number($("pr").value);
  $("cx-val").textContent = cx.toFixed(2);
  $("pr-val").textContent = prFrac.toFixed(2);
  try {
    const pMax = JSON.parse(inst).p_max;
    const pc = JSON.parse(powerCurve(inst, cx, 400));
    drawCurve($("power"), pc, "p_r");
    $("power-out").textContent = `best p_r = ${fmt(pc.best_x)}, R_T = ${fmt(pc.best_rate)} (${pc.candidates.length} candidates)`;

    const cc = JSON.parse(circularityCurve(inst, prFrac * pMax, 400));
    drawCurve($("circ"), cc, "c_x");
    $("circ-out").textContent = `best c_x = ${fmt(cc.best_x)}, R_T = ${fmt(cc.best_rate)} (${cc.candidates.length} candidates)`;

    const s = JSON.parse(rateSurface(inst, 120, 101));
    drawSurface($("surface"), s);
    const end = (t) => t[t.length - 1];
    const [a, b] = s.descent.map(end);
    $("surface-out").textContent =
      `grid: (${fmt(s.grid_best[0])}, ${fmt(s.grid_best[1])}) R_T=${fmt(s.grid_best[2])}\n` +
      `descent from c_x=0 (cyan): (${fmt(a.p_r)}, ${fmt(a.c_x)}) R_T=${fmt(a.r_total)}; ` +
      `from c_x=1 (white): (${fmt(b.p_r)}, ${fmt(b.c_x)}) R_T=${fmt(b.r_total)}`;
  } catch (e) {
    $("error").textContent = String(e.message ?? e);
  }
}

await init();
$("instance").addEventListener("input", refresh);
$("cx").addEventListener("input", refresh);
$("pr").addEventListener("input", refresh);
refresh();
