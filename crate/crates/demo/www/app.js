import init, { fixture, sweep, stability, trainModel } from "./pkg/attnstab_demo.js";

const $ = (id) => document.getElementById(id);
const COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
  "#bcbd22", "#17becf", "#393b79", "#637939"];

function guarded(errorId, fn) {
  return () => {
    $(errorId).textContent = "";
    try {
      fn();
    } catch (e) {
      $(errorId).textContent = String(e);
    }
  };
}

function model() {
  return $("model").value;
}

function variant() {
  return $("variant").value;
}

function loadFixture() {
  $("model").value = fixture(variant());
}

// Axis-scaled line/bar plotting on a 2D canvas.
function frame(canvas, xs, ys, title) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, pad = { l: 56, r: 12, t: 22, b: 30 };
  ctx.clearRect(0, 0, W, H);
  let [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (x0 === x1) { x0 -= 1; x1 += 1; }
  if (y0 === y1) { y0 -= 1; y1 += 1; }
  const sx = (x) => pad.l + ((x - x0) / (x1 - x0)) * (W - pad.l - pad.r);
  const sy = (y) => H - pad.b - ((y - y0) / (y1 - y0)) * (H - pad.t - pad.b);
  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.beginPath();
  ctx.moveTo(pad.l, pad.t);
  ctx.lineTo(pad.l, H - pad.b);
  ctx.lineTo(W - pad.r, H - pad.b);
  ctx.stroke();
  for (const y of [y0, (y0 + y1) / 2, y1]) ctx.fillText(y.toPrecision(3), 4, sy(y) + 4);
  ctx.fillText(x0.toPrecision(3), pad.l, H - 10);
  ctx.fillText(x1.toPrecision(3), W - pad.r - 30, H - 10);
  ctx.fillText(title, pad.l + 6, 14);
  return { ctx, sx, sy, y0 };
}

function drawLines(canvas, xs, series, title) {
  const all = series.flatMap((s) => s.values.filter((v) => v !== null));
  const { ctx, sx, sy } = frame(canvas, xs, all, title);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = s.bold ? 3 : 1.2;
    ctx.beginPath();
    let pen = false;
    s.values.forEach((v, i) => {
      if (v === null) { pen = false; return; }
      if (pen) ctx.lineTo(sx(xs[i]), sy(v)); else ctx.moveTo(sx(xs[i]), sy(v));
      pen = true;
    });
    ctx.stroke();
  }
  ctx.lineWidth = 1;
}

function drawBars(canvas, values, title, highlight = new Set()) {
  const xs = values.map((_, i) => i);
  const { ctx, sx, sy } = frame(canvas, [-0.5, values.length - 0.5], [0, ...values], title);
  const w = (sx(1) - sx(0)) * 0.7;
  values.forEach((v, i) => {
    ctx.fillStyle = highlight.has(i) ? "#d62728" : "#1f77b4";
    const top = Math.min(sy(v), sy(0));
    ctx.fillRect(sx(xs[i]) - w / 2, top, w, Math.abs(sy(v) - sy(0)));
    ctx.fillStyle = "#444";
    ctx.fillText(String(i), sx(xs[i]) - 3, canvas.height - 18);
  });
}

function runSweep() {
  const out = JSON.parse(sweep(model(), variant(), Number($("dmax").value), Number($("dstep").value), $("mode").value));
  const top = new Set(out.ranking.slice(0, 2));
  const series = out.trajectories.map((t) => ({
    values: t.values,
    color: COLORS[t.node % COLORS.length],
    bold: top.has(t.node),
  }));
  drawLines($("sweep-chart"), out.deltas, series, "largest negative eigenvalue vs delta");
  $("sweep-legend").innerHTML = out.trajectories
    .map((t) => {
      const last = t.values[t.values.length - 1];
      return `<div style="color:${COLORS[t.node % COLORS.length]}">node ${t.node}: ${last === null ? "none" : last.toFixed(4)}${top.has(t.node) ? " (closest to zero)" : ""}</div>`;
    })
    .join("");
}

function runStability() {
  const rows = JSON.parse(stability(model(), variant()));
  const fmt = (v) => (Math.abs(v) < 5e-5 ? "0" : v.toFixed(4));
  const head = "<tr><th>node</th><th>W3</th><th>W4</th><th>W5</th><th>W6</th><th>total cost</th><th>rank</th><th>walks</th><th>NSTC</th><th>rank</th></tr>";
  const body = rows
    .map((r) => `<tr><td>${r.node}</td>${r.w.map((w) => `<td>${fmt(w)}</td>`).join("")}<td>${fmt(r.total_cost)}</td><td>${r.motif_rank}</td><td>${r.n_paths}</td><td>${fmt(r.nstc)}</td><td>${r.nstc_rank}</td></tr>`)
    .join("");
  $("stability-table").innerHTML = `<table>${head}${body}</table>`;
  const top = new Set(rows.filter((r) => r.motif_rank <= 2).map((r) => r.node));
  drawBars($("stability-chart"), rows.map((r) => r.total_cost), "total cost per node", top);
}

function runTrain() {
  const out = JSON.parse(trainModel(model(), variant(), Number($("seed").value), Number($("iters").value),
    Number($("lr").value), Number($("pnode").value), Number($("pfactor").value)));
  drawLines($("loss-chart"), out.loss.map((_, i) => i), [{ values: out.loss, color: "#1f77b4" }], "training loss (MSE)");
  const top = new Set(out.ranking.slice(0, 2));
  drawBars($("attention-chart"), out.attention, "attention received per node", top);
  const rows = out.predictions
    .map((p, i) => `<tr><td>${i}</td><td>${out.labels[i]}</td><td>${p.toFixed(4)}</td></tr>`)
    .join("");
  $("train-summary").innerHTML =
    `<p>final loss ${out.final_loss.toExponential(3)}; most attended nodes: ${out.ranking.slice(0, 2).join(", ")}</p>` +
    `<table><tr><th>node</th><th>label</th><th>prediction</th></tr>${rows}</table>`;
}

await init();
loadFixture();
$("variant").addEventListener("change", guarded("model-error", loadFixture));
$("reset").addEventListener("click", guarded("model-error", loadFixture));
$("run-sweep").addEventListener("click", guarded("sweep-error", runSweep));
$("run-stability").addEventListener("click", guarded("stability-error", runStability));
$("run-train").addEventListener("click", guarded("train-error", runTrain));
guarded("sweep-error", runSweep)();
guarded("stability-error", runStability)();
