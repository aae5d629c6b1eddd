import init, {
  hardware_theta, ground_energy, exact_energy, energy_scan, zne_demo, trex_demo,
} from "./pkg/mitivqe_wasm.js";

const $ = (id) => document.getElementById(id);
const fmt = (v) => (Number.isFinite(v) ? v.toFixed(5) : "failed");

function axes(canvas, xs, ys) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = { l: 70, r: 16, t: 12, b: 28 };
  const finite = ys.filter(Number.isFinite);
  let [y0, y1] = [Math.min(...finite), Math.max(...finite)];
  if (y1 - y0 < 1e-6) { y0 -= 1e-3; y1 += 1e-3; }
  const m = 0.08 * (y1 - y0);
  y0 -= m; y1 += m;
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const px = (x) => pad.l + ((x - x0) / (x1 - x0 || 1)) * (w - pad.l - pad.r);
  const py = (y) => h - pad.b - ((y - y0) / (y1 - y0)) * (h - pad.t - pad.b);
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#9aa3b5";
  ctx.fillStyle = "#4a5368";
  ctx.font = "12px system-ui";
  ctx.beginPath();
  ctx.moveTo(pad.l, pad.t); ctx.lineTo(pad.l, h - pad.b); ctx.lineTo(w - pad.r, h - pad.b);
  ctx.stroke();
  for (let i = 0; i <= 4; i++) {
    const y = y0 + (i / 4) * (y1 - y0);
    ctx.fillText(y.toFixed(3), 4, py(y) + 4);
  }
  ctx.fillText(x0.toFixed(2), pad.l, h - 8);
  ctx.fillText(x1.toFixed(2), w - pad.r - 30, h - 8);
  return { ctx, px, py };
}

function hline(plot, y, x0, x1, color, label) {
  const { ctx, px, py } = plot;
  ctx.strokeStyle = color;
  ctx.setLineDash([5, 4]);
  ctx.beginPath(); ctx.moveTo(px(x0), py(y)); ctx.lineTo(px(x1), py(y)); ctx.stroke();
  ctx.setLineDash([]);
  ctx.fillStyle = color;
  ctx.fillText(label, px(x1) - 110, py(y) - 4);
}

let theta;
const e0 = () => ground_energy();

function drawScan() {
  const index = Number($("scan-index").value);
  const n = 241;
  const ys = Array.from(energy_scan(theta, index, n));
  const xs = ys.map((_, i) => -Math.PI + (2 * Math.PI * i) / (n - 1));
  const plot = axes($("scan"), xs, ys.concat([e0()]));
  const { ctx, px, py } = plot;
  ctx.strokeStyle = "#2c6bd6";
  ctx.lineWidth = 2;
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(ys[i])) : ctx.moveTo(px(x), py(ys[i]))));
  ctx.stroke();
  ctx.lineWidth = 1;
  hline(plot, e0(), xs[0], xs[n - 1], "#c0392b", "exact ground state");
  const t = theta[index];
  ctx.fillStyle = "#1d2330";
  ctx.beginPath(); ctx.arc(px(t), py(exact_energy(theta)), 4, 0, 2 * Math.PI); ctx.fill();
  const best = ys.indexOf(Math.min(...ys));
  $("scan-out").textContent =
    `E(start) = ${fmt(exact_energy(theta))} Ha   scan minimum ${fmt(ys[best])} Ha at ${xs[best].toFixed(3)}   ground ${fmt(e0())} Ha`;
}

function runZne() {
  const p2 = Number($("zne-p2").value);
  $("zne-p2-v").textContent = p2.toFixed(3);
  const shots = Math.max(1, Number($("zne-shots").value) | 0);
  const seed = (Math.random() * 1e6) | 0;
  const [e1, e3, e5, lin, quad, exp, exact] = zne_demo(theta, p2 / 10, p2, shots, seed);
  const xs = [0, 1, 3, 5];
  const plot = axes($("zne"), xs, [e1, e3, e5, lin, quad, exp, exact]);
  const { ctx, px, py } = plot;
  ctx.fillStyle = "#1d2330";
  [[1, e1], [3, e3], [5, e5]].forEach(([x, y]) => {
    ctx.beginPath(); ctx.arc(px(x), py(y), 4, 0, 2 * Math.PI); ctx.fill();
  });
  [[lin, "#2c6bd6"], [quad, "#8e44ad"], [exp, "#16a085"]].forEach(([v, c]) => {
    if (!Number.isFinite(v)) return;
    ctx.strokeStyle = c;
    ctx.beginPath(); ctx.moveTo(px(0), py(v)); ctx.lineTo(px(1), py(e1)); ctx.stroke();
    ctx.fillStyle = c;
    ctx.beginPath(); ctx.arc(px(0), py(v), 4, 0, 2 * Math.PI); ctx.fill();
  });
  hline(plot, exact, 0, 5, "#c0392b", "noiseless energy");
  $("zne-out").textContent =
    `scale 1/3/5   ${fmt(e1)}  ${fmt(e3)}  ${fmt(e5)}\n` +
    `linear ${fmt(lin)}   quadratic ${fmt(quad)}   exponential ${fmt(exp)}   noiseless ${fmt(exact)}`;
}

function runTrex() {
  const eps = Number($("trex-eps").value);
  $("trex-eps-v").textContent = eps.toFixed(3);
  const seed = (Math.random() * 1e6) | 0;
  const [raw, mit, exact, ...lambdas] = trex_demo(theta, eps, 4000, seed);
  const canvas = $("trex");
  const plot = axes(canvas, [0, 4], [raw, mit, exact]);
  const { ctx, px, py } = plot;
  [[raw, 1, "#d35400", "unmitigated"], [mit, 3, "#16a085", "T-REx"]].forEach(([v, x, c, label]) => {
    ctx.fillStyle = c;
    ctx.fillRect(px(x) - 40, py(v), 80, canvas.height - 28 - py(v));
    ctx.fillStyle = "#1d2330";
    ctx.fillText(label, px(x) - 30, py(v) - 6);
  });
  hline(plot, exact, 0, 4, "#c0392b", "noiseless energy");
  const analytic = [1, 2, 3, 4].map((w) => (1 - 2 * eps) ** w);
  $("trex-out").textContent =
    `unmitigated ${fmt(raw)}   T-REx ${fmt(mit)}   noiseless ${fmt(exact)}\n` +
    `λ by Z weight 1..4: ${lambdas.map((l) => l.toFixed(4)).join("  ")}\n` +
    `(1-2ε)^w:            ${analytic.map((l) => l.toFixed(4)).join("  ")}`;
}

await init();
theta = Float64Array.from(hardware_theta());
theta.forEach((_, i) => $("scan-index").add(new Option(`θ${i}`, i)));
$("scan-index").addEventListener("change", drawScan);
$("zne-p2").addEventListener("input", runZne);
$("zne-shots").addEventListener("change", runZne);
$("zne-run").addEventListener("click", runZne);
$("trex-eps").addEventListener("input", runTrex);
$("trex-run").addEventListener("click", runTrex);
drawScan();
runZne();
runTrex();
