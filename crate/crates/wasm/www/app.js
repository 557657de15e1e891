import init, { geodesic, dj_field, eh_residual } from "./pkg/cxgeom_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

// blue → yellow ramp over [0, 1]
function color(s) {
  const t = Math.min(1, Math.max(0, s));
  return [Math.round(40 + 215 * t), Math.round(40 + 190 * t), Math.round(160 - 120 * t)];
}

function heatmap(canvas, n, values) {
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(n, n);
  const logs = values.map((v) => (v > 0 && isFinite(v) ? Math.log10(v) : NaN));
  const finite = logs.filter((v) => isFinite(v));
  const lo = Math.min(...finite), hi = Math.max(...finite);
  for (let k = 0; k < n * n; k++) {
    // row 0 of the data is the bottom of the picture
    const row = n - 1 - Math.floor(k / n), col = k % n;
    const p = 4 * (row * n + col);
    const [r, g, b] = isFinite(logs[k]) ? color(hi > lo ? (logs[k] - lo) / (hi - lo) : 0.5) : [0, 0, 0];
    img.data.set([r, g, b, 255], p);
  }
  const tmp = new OffscreenCanvas(n, n);
  tmp.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.drawImage(tmp, 0, 0, canvas.width, canvas.height);
  return [lo, hi];
}

function plane(canvas, xs, ys) {
  const ctx = canvas.getContext("2d");
  const { width: W, height: H } = canvas;
  ctx.clearRect(0, 0, W, H);
  const r = Math.max(1, ...xs.map(Math.abs), ...ys.map(Math.abs)) * 1.1;
  const px = (x) => W / 2 + (x / r) * (W / 2);
  const py = (y) => H / 2 - (y / r) * (H / 2);
  ctx.strokeStyle = "#ddd";
  ctx.beginPath();
  ctx.moveTo(0, H / 2); ctx.lineTo(W, H / 2);
  ctx.moveTo(W / 2, 0); ctx.lineTo(W / 2, H);
  ctx.stroke();
  ctx.strokeStyle = "#c33";
  ctx.lineWidth = 2;
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(ys[i])) : ctx.moveTo(px(x), py(ys[i]))));
  ctx.stroke();
  ctx.fillStyle = "#333";
  ctx.fillRect(px(xs[0]) - 3, py(ys[0]) - 3, 6, 6);
  ctx.fillText(`|·| ≤ ${r.toFixed(2)}`, 6, 14);
}

function drawGeodesic() {
  $("g-tv").textContent = $("g-t").value;
  try {
    const rows = geodesic(
      $("g-model").value,
      num("g-zr"), num("g-zi"), num("g-wr"), num("g-wi"),
      num("g-pr"), num("g-pi"), num("g-qr"), num("g-qi"),
      num("g-t"),
    );
    const col = (j) => Array.from({ length: rows.length / 5 }, (_, i) => rows[5 * i + j]);
    plane($("g-z"), col(1), col(2));
    plane($("g-w"), col(3), col(4));
    const k = rows.length - 5;
    $("g-status").textContent =
      `${rows.length / 5} samples; end z = ${rows[k + 1].toFixed(4)}${fmtIm(rows[k + 2])}, w = ${rows[k + 3].toFixed(4)}${fmtIm(rows[k + 4])}`;
  } catch (e) {
    $("g-status").textContent = `error: ${e.message ?? e}`;
  }
}

const fmtIm = (v) => (v < 0 ? ` − ${(-v).toFixed(4)}i` : ` + ${v.toFixed(4)}i`);

function drawDj() {
  $("d-wrv").textContent = $("d-wr").value;
  $("d-wiv").textContent = $("d-wi").value;
  const n = 100;
  const t0 = performance.now();
  const f = dj_field(n, num("d-ext"), num("d-wr"), num("d-wi"));
  const [lo, hi] = heatmap($("d-map"), n, f);
  $("d-status").textContent =
    `‖dω_J‖ from 10^${lo.toFixed(2)} to 10^${hi.toFixed(2)} (black: 1 + zw = 0) in ${(performance.now() - t0).toFixed(0)} ms`;
}

function drawEh() {
  const n = Math.round(num("e-n"));
  try {
    const cells = eh_residual(n, num("e-ext"));
    const res = Array.from({ length: n * n }, (_, k) => cells[3 * k + 2]);
    // monge_ampere_grid runs x-major; transpose so rows follow y
    const byRow = Array.from({ length: n * n }, (_, k) => res[(k % n) * n + Math.floor(k / n)]);
    const [lo, hi] = heatmap($("e-map"), n, byRow);
    const worst = Math.max(...res);
    $("e-status").textContent =
      `max residual ${worst.toExponential(2)}; nonzero cells from 10^${lo.toFixed(1)} to 10^${hi.toFixed(1)} (black: exactly 0)`;
  } catch (e) {
    $("e-status").textContent = `error: ${e.message ?? e}`;
  }
}

await init();
for (const id of ["g-model", "g-zr", "g-zi", "g-wr", "g-wi", "g-pr", "g-pi", "g-qr", "g-qi", "g-t"]) {
  $(id).addEventListener("input", drawGeodesic);
}
for (const id of ["d-wr", "d-wi", "d-ext"]) $(id).addEventListener("input", drawDj);
for (const id of ["e-n", "e-ext"]) $(id).addEventListener("change", drawEh);
drawGeodesic();
drawDj();
drawEh();
