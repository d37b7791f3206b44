import init, { DemoConfig, timeDensity, swapMap, sampleHistogram } from "./pkg/freqswap_web.js";

const $ = (id) => document.getElementById(id);

function readConfig() {
  const cfg = new DemoConfig();
  cfg.f_bins = Number($("fBins").value);
  cfg.g_bins = Number($("gBins").value);
  cfg.profile_width = Number($("width").value);
  cfg.omega_iii = Number($("omega").value);
  cfg.window_bins = Number($("window").value);
  cfg.physical = $("physical").checked;
  return cfg;
}

// white -> dark blue
function shade(x) {
  const v = Math.round(255 * (1 - Math.min(1, Math.max(0, x))));
  return `rgb(${v},${v},${Math.round(160 + 95 * (v / 255))})`;
}

function heatmap(canvas, rows, cols, values) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const max = values.reduce((m, v) => Math.max(m, v), 0) || 1;
  const w = canvas.width / cols;
  const h = canvas.height / rows;
  for (let i = 0; i < rows; i++) {
    for (let j = 0; j < cols; j++) {
      ctx.fillStyle = shade(values[i * cols + j] / max);
      // row i at the bottom so the vertical axis increases upward
      ctx.fillRect(j * w, canvas.height - (i + 1) * h, Math.ceil(w), Math.ceil(h));
    }
  }
}

function showError(el, err) {
  el.textContent = String(err.message ?? err);
  el.classList.add("error");
}

function drawDensity() {
  const out = $("densityOut");
  out.classList.remove("error");
  try {
    const d = timeDensity(readConfig(), $("pair").value, 161, 0.5);
    // transpose so t1 runs horizontally
    const n = d.samples;
    const v = d.values;
    const t = new Float64Array(n * n);
    for (let i = 0; i < n; i++) for (let j = 0; j < n; j++) t[j * n + i] = v[i * n + j];
    heatmap($("density"), n, n, t);
    const lo = d.t_start.toFixed(1);
    const hi = (d.t_start + (n - 1) * d.delta_t).toFixed(1);
    out.textContent = `t1, t2 in [${lo}, ${hi}]\ncentral peak FWHM ${isNaN(d.peak_width) ? "not resolved" : d.peak_width.toFixed(3)}`;
  } catch (e) {
    $("density").getContext("2d").clearRect(0, 0, 320, 320);
    showError(out, e);
  }
}

function drawMap() {
  const out = $("mapOut");
  out.classList.remove("error");
  try {
    const v = swapMap(readConfig());
    if (!v.heralded) {
      $("map").getContext("2d").clearRect(0, 0, 320, 320);
      out.textContent = "empty post-selection: the window catches no photon 2-3 pair";
      return;
    }
    const w1 = v.omega_1;
    const w4 = v.omega_4;
    // omega_4 vertical, omega_1 horizontal
    const n1 = w1.length, n4 = w4.length;
    const p = v.probabilities;
    const t = new Float64Array(n1 * n4);
    for (let i = 0; i < n1; i++) for (let j = 0; j < n4; j++) t[j * n1 + i] = p[i * n4 + j];
    heatmap($("map"), n4, n1, t);
    const sums = Array.from(v.branch_sums, (s, k) => `${s.toFixed(2)} (${v.branch_probabilities[k].toFixed(4)})`);
    out.textContent =
      `success probability ${v.success_probability.toFixed(6)}\n` +
      `entropy ${v.entropy.toFixed(4)} nats, Schmidt rank ${v.schmidt_rank}\n` +
      `omega1 + omega4 branches: ${sums.join(", ")}`;
  } catch (e) {
    showError(out, e);
  }
}

function drawHistogram() {
  const out = $("histOut");
  out.classList.remove("error");
  const canvas = $("hist");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  try {
    const h = sampleHistogram(readConfig(), Number($("trials").value), Number($("seed").value));
    const counts = h.counts;
    const expected = h.expected;
    const n4 = h.omega_4.length;
    const cells = [];
    for (let k = 0; k < counts.length; k++) {
      if (expected[k] > 0 || counts[k] > 0) cells.push(k);
    }
    const max = Math.max(...cells.map((k) => Math.max(counts[k], expected[k])), 1);
    const bw = canvas.width / Math.max(cells.length, 1);
    cells.forEach((k, x) => {
      const hc = (counts[k] / max) * (canvas.height - 30);
      ctx.fillStyle = "#3559a8";
      ctx.fillRect(x * bw + 2, canvas.height - 20 - hc, bw - 4, hc);
      const he = (expected[k] / max) * (canvas.height - 30);
      ctx.strokeStyle = "#d33";
      ctx.beginPath();
      ctx.moveTo(x * bw + 1, canvas.height - 20 - he);
      ctx.lineTo(x * bw + bw - 1, canvas.height - 20 - he);
      ctx.stroke();
      ctx.fillStyle = "#222";
      ctx.font = "10px sans-serif";
      ctx.fillText(h.omega_1[Math.floor(k / n4)].toFixed(2), x * bw + 2, canvas.height - 6);
    });
    out.textContent =
      `${h.trials} events over ${cells.length} cells (bars: counts, red: expected)\n` +
      `chi-square ${h.chi_square.toFixed(3)}; labels are omega1`;
  } catch (e) {
    showError(out, e);
  }
}

function refresh() {
  for (const id of ["fBins", "gBins", "width", "omega", "window"]) {
    $(id + "Out").textContent = $(id).value;
  }
  drawDensity();
  drawMap();
}

await init();
for (const id of ["fBins", "gBins", "width", "omega", "window", "physical", "pair"]) {
  $(id).addEventListener("input", refresh);
}
$("sample").addEventListener("click", drawHistogram);
refresh();
drawHistogram();
