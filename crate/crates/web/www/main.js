import init, { activity_curve, check_config, solve_cell } from "./pkg/poremsa_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function drawCurve(rows) {
  const cv = $("plot");
  const g = cv.getContext("2d");
  const pad = 40;
  const w = cv.width - 2 * pad;
  const h = cv.height - 2 * pad;
  g.clearRect(0, 0, cv.width, cv.height);
  const lx = rows.map((r) => Math.log10(r[0]));
  const ys = rows.flatMap((r) => [r[1], r[2], r[3]]);
  const [x0, x1] = [Math.min(...lx), Math.max(...lx)];
  const [y0, y1] = [Math.min(...ys, 0.5), Math.max(...ys, 1.0)];
  const px = (x) => pad + ((x - x0) / (x1 - x0)) * w;
  const py = (y) => pad + h - ((y - y0) / (y1 - y0)) * h;
  g.strokeStyle = "#999";
  g.strokeRect(pad, pad, w, h);
  g.fillStyle = "#333";
  g.fillText(`log10 c: ${x0.toFixed(1)} .. ${x1.toFixed(1)}`, pad, cv.height - 10);
  g.fillText(`${y1.toFixed(2)}`, 4, pad + 4);
  g.fillText(`${y0.toFixed(2)}`, 4, pad + h);
  const series = [
    [1, "#c33", "gamma_inf"],
    [2, "#36c", "K_11"],
    [3, "#3a3", "K_22"],
  ];
  series.forEach(([col, color, name], k) => {
    g.strokeStyle = color;
    g.beginPath();
    rows.forEach((r, i) => {
      const [x, y] = [px(lx[i]), py(r[col])];
      i ? g.lineTo(x, y) : g.moveTo(x, y);
    });
    g.stroke();
    g.fillStyle = color;
    g.fillText(name, pad + 10, pad + 15 + 14 * k);
  });
}

function runCurve() {
  try {
    const flat = activity_curve(num("cmin"), num("cmax"), 40);
    const rows = [];
    for (let i = 0; i < flat.length; i += 4) rows.push(flat.slice(i, i + 4));
    drawCurve(rows);
    $("curve-msg").textContent = "";
  } catch (e) {
    $("curve-msg").textContent = String(e);
  }
}

function runSolve() {
  $("tensor").textContent = "solving...";
  setTimeout(() => {
    try {
      const t = performance.now();
      const r = solve_cell(num("phi"), num("aspect"), num("rot"), num("ell"), num("conc"), num("charge"), $("msa").checked);
      const f = (v) => v.toExponential(4);
      $("tensor").textContent = [
        `K      = [[${f(r[0])}, ${f(r[1])}], [${f(r[2])}, ${f(r[3])}]]`,
        `Krel   = ${r[4].toFixed(4)}, ${r[5].toFixed(4)}`,
        `avg n  = ${r[6].toFixed(4)}, ${r[7].toFixed(4)} (units of n_c)`,
        `sym residual ${f(r[8])}, min eigenvalue ${f(r[9])}`,
        `${(performance.now() - t).toFixed(0)} ms`,
      ].join("\n");
    } catch (e) {
      $("tensor").textContent = String(e);
    }
  }, 0);
}

await init();
$("curve").onclick = runCurve;
$("check").onclick = () => ($("report").textContent = check_config($("config").value));
$("solve").onclick = runSolve;
runCurve();
