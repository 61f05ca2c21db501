// Generated by `wasm-bindgen --target web` into ./pkg (see the README).
import init, { errorCurves, powerCurves, simulateNull } from "./pkg/alphagate_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

// Line chart on [0, xmax] x [0, 1]; series = [{ys, color}] sharing xs.
function plot(canvas, xs, series, xlabel) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 36;
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#555";
  ctx.font = "12px system-ui";
  ctx.beginPath();
  ctx.moveTo(pad, 8);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - 8, h - pad);
  ctx.stroke();
  const x0 = xs[0], x1 = xs[xs.length - 1];
  const sx = (x) => pad + ((x - x0) / Math.max(x1 - x0, 1)) * (w - pad - 8);
  const sy = (y) => h - pad - y * (h - pad - 8);
  for (const y of [0, 0.25, 0.5, 0.75, 1]) ctx.fillText(y.toFixed(2), 2, sy(y) + 4);
  ctx.fillText(String(x0), pad, h - pad + 16);
  ctx.fillText(String(x1), w - 40, h - pad + 16);
  ctx.fillText(xlabel, w / 2, h - 6);
  for (const { ys, color } of series) {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ys.forEach((y, i) => (i ? ctx.lineTo(sx(xs[i]), sy(y)) : ctx.moveTo(sx(xs[i]), sy(y))));
    ctx.stroke();
  }
}

function guard(target, fn) {
  try {
    fn();
  } catch (e) {
    target.innerHTML = `<span class="err">${e}</span>`;
  }
}

function drawRates() {
  guard($("r-readout"), () => {
    const alpha = num("r-alpha");
    const c = JSON.parse(errorCurves(alpha, num("r-k")));
    // per-test alphas are tiny next to the FWER, so show them relative to alpha
    plot($("r-plot"), c.k, [
      { ys: c.fwer, color: "#c0392b" },
      { ys: c.sidak.map((a) => a / alpha), color: "#2471a3" },
      { ys: c.bonferroni.map((a) => a / alpha), color: "#7d3c98" },
    ], "number of tests k (per-test alphas shown as a fraction of alpha)");
    const last = c.k.length - 1;
    $("r-readout").textContent =
      `k = ${c.k[last]}: FWER ${c.fwer[last].toFixed(4)}, ` +
      `Šidák ${c.sidak[last].toExponential(3)}, Bonferroni ${c.bonferroni[last].toExponential(3)}`;
  });
}

function drawPower() {
  guard($("p-readout"), () => {
    const k = num("p-k");
    const c = JSON.parse(powerCurves(num("p-alpha"), num("p-delta"), num("p-n"), k));
    plot($("p-plot"), c.n, [
      { ys: c.power, color: "#2471a3" },
      { ys: c.conjunction, color: "#c0392b" },
    ], "sample size per group");
    const i = c.power.findIndex((p) => p >= 0.8);
    $("p-readout").textContent = i < 0
      ? "per-test power stays below 0.80 in this range"
      : `per-test power reaches 0.80 at n = ${c.n[i]}, where all ${k} succeed with probability ${c.conjunction[i].toFixed(3)}`;
  });
}

function runSimulation() {
  const out = $("s-out");
  guard(out, () => {
    const r = JSON.parse(simulateNull(num("s-k"), num("s-alpha"), $("s-design").value,
      num("s-rho"), $("s-method").value, num("s-reps"), num("s-seed")));
    const rows = [
      ["design", r.design],
      ["replications", r.reps],
      ["FWER (unadjusted)", `${r.fwer.toFixed(4)}  [${r.fwer_ci95[0].toFixed(4)}, ${r.fwer_ci95[1].toFixed(4)}]`],
      ["FWER if independent", r.fwer_formula.toFixed(4)],
      [`joint rejection, ${r.method}`, r.disjunction.toFixed(4)],
      ["FDR", r.fdr.toFixed(4)],
      ["mean false positives", r.mean_false_positives.toFixed(3)],
    ];
    out.innerHTML = rows.map(([k, v]) => `<tr><td>${k}</td><td>${v}</td></tr>`).join("");
  });
}

await init();
for (const id of ["r-alpha", "r-k"]) $(id).addEventListener("input", drawRates);
for (const id of ["p-alpha", "p-delta", "p-n", "p-k"]) $(id).addEventListener("input", drawPower);
$("s-run").addEventListener("click", runSimulation);
drawRates();
drawPower();
