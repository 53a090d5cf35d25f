import init, { compare, convergence, samplerFrequencies } from "./pkg/mcgame_wasm.js";

const $ = (id) => document.getElementById(id);

function guard(errId, fn) {
  $(errId).textContent = "";
  try {
    fn();
  } catch (e) {
    $(errId).textContent = String(e.message ?? e);
  }
}

function clear(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.font = "12px system-ui, sans-serif";
  return ctx;
}

// Grouped bars: one group per label, one bar per series.
function bars(canvas, labels, series, errors) {
  const ctx = clear(canvas);
  const pad = 40;
  const all = series.flatMap((s, k) =>
    s.values.map((v, i) => v + (errors[k] ? Math.sign(v || 1) * 2 * errors[k][i] : 0)),
  );
  const top = Math.max(0, ...all);
  const bottom = Math.min(0, ...all);
  const span = top - bottom || 1;
  const y = (v) => pad / 2 + ((top - v) / span) * (canvas.height - pad);
  const slot = (canvas.width - pad) / labels.length;
  const width = (slot * 0.7) / series.length;
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, y(0));
  ctx.lineTo(canvas.width, y(0));
  ctx.stroke();
  labels.forEach((label, i) => {
    series.forEach((s, k) => {
      const x = pad + i * slot + slot * 0.15 + k * width;
      ctx.fillStyle = s.color;
      ctx.fillRect(x, Math.min(y(0), y(s.values[i])), width - 2, Math.abs(y(s.values[i]) - y(0)));
      if (errors[k]) {
        const c = x + width / 2 - 1;
        ctx.strokeStyle = "#000";
        ctx.beginPath();
        ctx.moveTo(c, y(s.values[i] - 2 * errors[k][i]));
        ctx.lineTo(c, y(s.values[i] + 2 * errors[k][i]));
        ctx.stroke();
      }
    });
    ctx.fillStyle = "#000";
    ctx.fillText(label, pad + i * slot + slot * 0.15, canvas.height - 4);
  });
  series.forEach((s, k) => {
    ctx.fillStyle = s.color;
    ctx.fillRect(canvas.width - 150, 8 + k * 16, 10, 10);
    ctx.fillStyle = "#000";
    ctx.fillText(s.name, canvas.width - 135, 17 + k * 16);
  });
}

function runCompare() {
  const out = JSON.parse(
    compare(
      $("expr").value,
      $("data").value,
      $("point").value,
      $("partition").value,
      $("value").value,
      Number($("iters").value),
      Number($("seed").value),
    ),
  );
  bars(
    $("compare-plot"),
    out.labels,
    [
      { name: "exact", values: out.exact, color: "#4477aa" },
      { name: "estimate ± 2 se", values: out.estimate, color: "#ee8866" },
    ],
    [null, out.stderr],
  );
  const rows = out.labels.map(
    (l, i) =>
      `<tr><th>${l}</th><td>${out.exact[i].toFixed(6)}</td>` +
      `<td>${out.estimate[i].toFixed(6)}</td><td>${out.stderr[i].toFixed(6)}</td></tr>`,
  );
  $("compare-table").innerHTML =
    "<tr><th></th><th>exact</th><th>estimate</th><th>stderr</th></tr>" + rows.join("");
}

function runConvergence() {
  const s = JSON.parse(
    convergence($("exp").value, Number($("runs").value), Number($("kmax").value), 0),
  );
  const canvas = $("conv-plot");
  const ctx = clear(canvas);
  const pts = s.per_k.map((r) => [Math.log2(r.K), Math.log2(r.mise_mean), r.mise_ci95]);
  const xs = pts.map((p) => p[0]);
  const ys = pts.flatMap((p) => [p[1], Math.log2(Math.max(p[2][0], 1e-300)), Math.log2(p[2][1])]);
  const [x0, x1] = [Math.min(...xs) - 0.3, Math.max(...xs) + 0.3];
  const [y0, y1] = [Math.min(...ys) - 0.5, Math.max(...ys) + 0.5];
  const px = (x) => 50 + ((x - x0) / (x1 - x0)) * (canvas.width - 70);
  const py = (v) => 10 + ((y1 - v) / (y1 - y0)) * (canvas.height - 40);
  ctx.fillStyle = "#000";
  xs.forEach((x) => ctx.fillText(`2^${x}`, px(x) - 10, canvas.height - 8));
  ctx.fillText("log2 MISE", 4, 14);
  // Reference line of slope -1 through the first point.
  ctx.strokeStyle = "#bbb";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(px(xs[0]), py(pts[0][1]));
  ctx.lineTo(px(xs[xs.length - 1]), py(pts[0][1] - (xs[xs.length - 1] - xs[0])));
  ctx.stroke();
  ctx.setLineDash([]);
  ctx.strokeStyle = "#4477aa";
  ctx.beginPath();
  pts.forEach((p, i) => (i ? ctx.lineTo(px(p[0]), py(p[1])) : ctx.moveTo(px(p[0]), py(p[1]))));
  ctx.stroke();
  pts.forEach((p) => {
    ctx.beginPath();
    ctx.moveTo(px(p[0]), py(Math.log2(Math.max(p[2][0], 1e-300))));
    ctx.lineTo(px(p[0]), py(Math.log2(p[2][1])));
    ctx.stroke();
  });
  const slope = s.mise_slope == null ? "n/a" : s.mise_slope.toFixed(3);
  $("conv-info").textContent = ` target ${s.target}, p = ${s.p}, slope ${slope}`;
}

function runSampler() {
  const f = JSON.parse(
    samplerFrequencies(
      $("scheme").value,
      Number($("n").value),
      Number($("player").value) - 1,
      Number($("draws").value),
      0,
    ),
  );
  bars(
    $("sampler-plot"),
    f.sizes.map((s) => `|S| = ${s}`),
    [
      { name: "weight", values: f.expected, color: "#4477aa" },
      { name: "observed", values: f.observed, color: "#ee8866" },
    ],
    [null, null],
  );
}

await init();
$("run-compare").onclick = () => guard("compare-err", runCompare);
$("run-conv").onclick = () => guard("conv-err", runConvergence);
$("run-sampler").onclick = () => guard("sampler-err", runSampler);
guard("compare-err", runCompare);
guard("sampler-err", runSampler);
