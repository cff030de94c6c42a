import init, { Model, a0_curves, replicate, sample_paths } from "./pkg/hedgepde_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];

function model() {
  return new Model(num("k"), num("rho"), num("delta"), num("sigma1"), num("mu"), num("sigma0"), num("T"));
}

function timed(msg, f) {
  $(msg).textContent = "";
  $(msg).className = "";
  const t0 = performance.now();
  try {
    f();
    $(msg).textContent = `${((performance.now() - t0) / 1000).toFixed(2)} s`;
  } catch (e) {
    $(msg).textContent = e.message ?? String(e);
    $(msg).className = "err";
  }
}

// series: [{ xs, ys, color, label }]
function plot(canvas, series, { ylabel = "", xlabel = "" } = {}) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 48;
  ctx.clearRect(0, 0, w, h);
  const finite = series.flatMap((s) => s.ys.filter(Number.isFinite));
  if (finite.length === 0) return;
  const xs = series.flatMap((s) => s.xs);
  let [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...finite), Math.max(...finite)];
  if (y0 === y1) { y0 -= 1; y1 += 1; }
  const sx = (x) => pad + ((x - x0) / (x1 - x0)) * (w - 2 * pad);
  const sy = (y) => h - pad + ((y0 - y) / (y1 - y0)) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  for (let i = 0; i <= 4; i++) {
    const y = y0 + ((y1 - y0) * i) / 4, x = x0 + ((x1 - x0) * i) / 4;
    ctx.fillText(y.toPrecision(3), 2, sy(y) + 4);
    ctx.fillText(x.toPrecision(3), sx(x) - 10, h - pad + 14);
  }
  ctx.fillText(ylabel, 2, pad - 8);
  ctx.fillText(xlabel, w - pad - 20, h - 8);

  series.forEach((s, k) => {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = s.width ?? 1.5;
    ctx.beginPath();
    let pen = false;
    s.ys.forEach((y, i) => {
      if (!Number.isFinite(y)) { pen = false; return; }
      pen ? ctx.lineTo(sx(s.xs[i]), sy(y)) : ctx.moveTo(sx(s.xs[i]), sy(y));
      pen = true;
    });
    ctx.stroke();
    if (s.label) {
      ctx.fillStyle = s.color;
      ctx.fillText(s.label, w - pad + 4 - 60, pad + 14 + 14 * k);
    }
  });
}

function curves() {
  const rhos = Float64Array.from($("rhos").value.split(",").map(Number));
  const log = $("curve-log").checked;
  const c = a0_curves(model(), rhos, 1.0, num("curve-nodes"), num("curve-steps"));
  const xs = c.sigma();
  const series = Array.from(rhos, (rho, i) => {
    const ys = log ? c.log_column(i) : c.column(i);
    return {
      xs,
      ys: Array.from(ys),
      color: COLORS[i % COLORS.length],
      label: ys.length ? `ρ=${rho}` : `ρ=${rho} failed`,
    };
  });
  plot($("curves-plot"), series, { ylabel: log ? "ln a(0)" : "a(0)", xlabel: "σ" });
}

function replication() {
  const r = replicate(model(), $("kind").value === "call", num("strike"), num("sigma"), num("price"),
    num("rep-nodes"), num("rep-steps"));
  const rows = [
    ["V₀* (optimal initial wealth)", r.v0],
    ["ε* (minimal replication error)", r.eps],
    ["c(0)", r.c0],
    ["a(0)", r.a0],
    ["θ*(0) (initial stock holding)", r.theta0],
    ["clamped", r.clamped],
  ];
  $("rep-table").innerHTML = rows
    .map(([k, v]) => `<tr><td>${k}</td><td>${typeof v === "number" ? v.toExponential(6) : v}</td></tr>`)
    .join("");
}

function paths() {
  const n = num("n-paths"), steps = num("path-steps");
  const flat = sample_paths(model(), n, steps, num("seed"), num("sigma"), num("price"));
  const t = Array.from({ length: steps + 1 }, (_, i) => (num("T") * i) / steps);
  const sig = [], px = [];
  for (let p = 0; p < n; p++) {
    const base = p * (steps + 1) * 2;
    const color = COLORS[p % COLORS.length];
    sig.push({ xs: t, ys: t.map((_, i) => flat[base + 2 * i]), color, width: 1 });
    px.push({ xs: t, ys: t.map((_, i) => flat[base + 2 * i + 1]), color, width: 1 });
  }
  plot($("sigma-plot"), sig, { ylabel: "σ", xlabel: "t" });
  plot($("price-plot"), px, { ylabel: "P", xlabel: "t" });
}

await init();
$("curves").onclick = () => timed("curves-msg", curves);
$("replicate").onclick = () => timed("rep-msg", replication);
$("paths").onclick = () => timed("paths-msg", paths);
timed("paths-msg", paths);
