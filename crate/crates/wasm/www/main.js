import init, { geometryCheck, solveKoiter, sweepCsv } from "./pkg/koiter_wasm.js";

const $ = (id) => document.getElementById(id);

function guarded(out, fn) {
  return () => {
    out.classList.remove("error");
    out.textContent = "running...";
    // let the browser paint before the blocking call
    setTimeout(() => {
      try {
        fn();
      } catch (e) {
        out.classList.add("error");
        out.textContent = String(e.message ?? e);
      }
    }, 10);
  };
}

function runGeometryCheck() {
  const report = JSON.parse(geometryCheck($("gc-chart").value, +$("gc-points").value, +$("gc-seed").value));
  const lines = [`${report.chart}: ${report.failure ? "FAILED, " + report.failure : "passed"}`,
    `kappa in [${report.kappa_min.toExponential(4)}, ${report.kappa_max.toExponential(4)}]`];
  for (const it of report.items) {
    lines.push(`${it.passed ? "ok  " : "FAIL"} ${it.name}: ${it.worst.toExponential(3)} (tol ${it.tolerance})`);
  }
  $("gc-out").textContent = lines.join("\n");
}

const view = { mesh: null, yaw: 0.6, pitch: 0.5 };

function draw() {
  const canvas = $("ks-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const m = view.mesh;
  if (!m) return;
  const p = m.points, u = m.displacement, nv = p.length / 3;
  let size = 0, umax = 0;
  const lo = [Infinity, Infinity, Infinity], hi = [-Infinity, -Infinity, -Infinity];
  for (let i = 0; i < nv; i++) {
    for (let k = 0; k < 3; k++) {
      lo[k] = Math.min(lo[k], p[3 * i + k]);
      hi[k] = Math.max(hi[k], p[3 * i + k]);
    }
    umax = Math.max(umax, Math.hypot(u[3 * i], u[3 * i + 1], u[3 * i + 2]));
  }
  const mid = lo.map((l, k) => 0.5 * (l + hi[k]));
  for (let k = 0; k < 3; k++) size = Math.max(size, hi[k] - lo[k]);
  // largest displacement drawn as a fraction of the shell size
  const scale = umax > 0 ? (+$("ks-mag").value * 0.25 * size) / umax : 0;
  const [cy, sy, cp, sp] = [Math.cos(view.yaw), Math.sin(view.yaw), Math.cos(view.pitch), Math.sin(view.pitch)];
  const zoom = (0.8 * Math.min(canvas.width, canvas.height)) / (size || 1);
  const proj = new Float64Array(2 * nv), depth = new Float64Array(nv);
  for (let i = 0; i < nv; i++) {
    const x = p[3 * i] + scale * u[3 * i] - mid[0];
    const y = p[3 * i + 1] + scale * u[3 * i + 1] - mid[1];
    const z = p[3 * i + 2] + scale * u[3 * i + 2] - mid[2];
    const x1 = cy * x + sy * y, y1 = -sy * x + cy * y;
    proj[2 * i] = canvas.width / 2 + zoom * x1;
    proj[2 * i + 1] = canvas.height / 2 - zoom * (cp * z - sp * y1);
    depth[i] = sp * z + cp * y1;
  }
  const t = m.triangles, nt = t.length / 3;
  const order = Array.from({ length: nt }, (_, i) => i);
  const tdepth = (i) => depth[t[3 * i]] + depth[t[3 * i + 1]] + depth[t[3 * i + 2]];
  order.sort((a, b) => tdepth(b) - tdepth(a));
  ctx.lineWidth = 0.5;
  ctx.strokeStyle = "#333";
  for (const i of order) {
    let mag = 0;
    ctx.beginPath();
    for (let k = 0; k < 3; k++) {
      const v = t[3 * i + k];
      mag += Math.hypot(u[3 * v], u[3 * v + 1], u[3 * v + 2]) / 3;
      if (k === 0) ctx.moveTo(proj[2 * v], proj[2 * v + 1]);
      else ctx.lineTo(proj[2 * v], proj[2 * v + 1]);
    }
    ctx.closePath();
    const s = umax > 0 ? mag / umax : 0;
    ctx.fillStyle = `hsl(${240 - 240 * s}, 70%, 60%)`;
    ctx.fill();
    ctx.stroke();
  }
}

function runSolve() {
  const result = JSON.parse(solveKoiter($("ks-case").value, +$("ks-eps").value, +$("ks-n").value));
  view.mesh = result;
  const r = result.row;
  $("ks-out").textContent =
    `${r.case}, eps = ${r.eps}: ${r.koiter_dofs} dofs, status ${r.status}\n` +
    `relative error to the limit solution: ${r.err_lk ?? "n/a"}\n` +
    `membrane share of the energy: ${r.membrane_fraction?.toFixed(4) ?? "n/a"}\n` +
    `Koiter residual: ${r.residual_koiter?.toExponential(2) ?? "n/a"}`;
  draw();
}

function runSweep() {
  const eps = $("sw-eps").value.split(",").map((s) => s.trim()).filter(Boolean).map(Number);
  if (eps.some((e) => !(e > 0))) throw new Error("half-thicknesses must be positive numbers");
  const csv = sweepCsv($("sw-case").value, new Float64Array(eps), +$("sw-n").value);
  $("sw-out").textContent = csv;
  const link = $("sw-download");
  link.href = URL.createObjectURL(new Blob([csv], { type: "text/csv" }));
  link.hidden = false;
}

function dragToRotate(canvas) {
  let last = null;
  canvas.addEventListener("pointerdown", (e) => { last = [e.clientX, e.clientY]; canvas.setPointerCapture(e.pointerId); });
  canvas.addEventListener("pointerup", () => { last = null; });
  canvas.addEventListener("pointermove", (e) => {
    if (!last) return;
    view.yaw += 0.01 * (e.clientX - last[0]);
    view.pitch = Math.max(-1.5, Math.min(1.5, view.pitch + 0.01 * (e.clientY - last[1])));
    last = [e.clientX, e.clientY];
    draw();
  });
}

await init();
$("gc-run").addEventListener("click", guarded($("gc-out"), runGeometryCheck));
$("ks-run").addEventListener("click", guarded($("ks-out"), runSolve));
$("sw-run").addEventListener("click", guarded($("sw-out"), runSweep));
$("ks-mag").addEventListener("input", draw);
dragToRotate($("ks-canvas"));
