// Built by `wasm-pack build crates/wasm --target web --out-dir www/pkg`.
import init, { simulate, kernelCurve, verify, families } from "./pkg/fracgp_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function spec() {
  const p = $("process").value;
  switch (p) {
    case "fbm":
    case "rl-fbm":
      return { process: p, hurst: num("hurst") };
    case "mbm": {
      const end = Math.max((num("n") - 1) * num("dt"), 1e-9);
      return { process: p, hurst: { form: "linear", v0: num("hurst"), v1: num("hurst1"), t0: 0, t1: end } };
    }
    case "weyl-fou":
    case "rl-fou":
      return { process: p, alpha: num("alpha"), omega: num("omega") };
    case "frbm":
      return { process: p, alpha: num("alpha"), gamma: num("gamma"), omega: num("omega") };
    case "gc":
      return { process: p, alpha: num("alpha"), beta: num("beta") };
  }
}

function plot(canvas, xs, ys) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  let lo = Math.min(...ys), hi = Math.max(...ys);
  if (hi === lo) { hi += 1; lo -= 1; }
  const x0 = xs[0], x1 = xs[xs.length - 1];
  const px = (x) => 4 + ((x - x0) / (x1 - x0)) * (w - 8);
  const py = (y) => h - 4 - ((y - lo) / (hi - lo)) * (h - 8);
  if (lo < 0 && hi > 0) {
    ctx.strokeStyle = "#ddd";
    ctx.beginPath(); ctx.moveTo(0, py(0)); ctx.lineTo(w, py(0)); ctx.stroke();
  }
  ctx.strokeStyle = "#1f5fa8";
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(ys[i])) : ctx.moveTo(px(x), py(ys[i]))));
  ctx.stroke();
}

function guarded(out, f) {
  return () => {
    out.classList.remove("err");
    try {
      f();
    } catch (e) {
      out.classList.add("err");
      out.textContent = String(e.message ?? e);
    }
  };
}

function onSimulate() {
  const t0 = performance.now();
  const sim = JSON.parse(simulate(JSON.stringify(spec()), num("n"), num("dt"), num("seed")));
  plot($("path"), sim.times, sim.values);
  const h = sim.hurst == null ? "n/a" : `${sim.hurst.toFixed(3)} ± ${sim.hurst_radius.toFixed(3)}`;
  const lines = [`method ${sim.method}, ${(performance.now() - t0).toFixed(0)} ms`, `aggregated-variance Hurst estimate ${h}`];
  $("path-out").textContent = lines.concat(sim.warnings).join("\n");
}

function onKernel() {
  const n = 200;
  const a = num("from"), b = num("to");
  const ys = Array.from(kernelCurve(JSON.stringify(spec()), num("anchor"), a, b, n));
  const xs = ys.map((_, i) => a + ((b - a) * i) / (n - 1));
  plot($("curve"), xs, ys);
  $("kernel-out").textContent = `R(${a}, s) = ${ys[0].toPrecision(6)}, R(${b}, s) = ${ys[n - 1].toPrecision(6)}`;
}

function onVerify() {
  const t0 = performance.now();
  const r = JSON.parse(verify($("family").value, num("points"), 0));
  const worst = r.points.reduce((m, p) => Math.max(m, Math.abs((p.closed_form ?? NaN) - (p.oracle ?? NaN))), 0);
  $("verify-out").textContent =
    `${r.passed}/${r.points.length} points agree (${(performance.now() - t0).toFixed(0)} ms)\n` +
    `largest |closed form - oracle| = ${worst.toExponential(2)}`;
}

await init();
for (const f of families()) $("family").add(new Option(f, f));
$("simulate").addEventListener("click", guarded($("path-out"), onSimulate));
$("kernel").addEventListener("click", guarded($("kernel-out"), onKernel));
$("verify").addEventListener("click", guarded($("verify-out"), onVerify));
