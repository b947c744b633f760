import init, { Demo } from "./pkg/tempalpha_wasm.js";

const $ = (id) => document.getElementById(id);
const canvas = $("view");
const ctx = canvas.getContext("2d");
let demo = null;
let all = null;
let frame = null;

// The α slider is logarithmic between the smallest and largest finite radii.
function alphaValue() {
  const t = $("alpha").value / 1000;
  const lo = Math.max(demo.alphaMin(), 1e-9);
  const hi = Math.max(demo.alphaMax(), lo * 2);
  return lo * Math.pow(hi / lo, t);
}

function currentWindow() {
  const n = demo.n();
  const len = Math.min(+$("length").value, n);
  const i = Math.min(+$("start").value, n - len + 1);
  return [i, i + len - 1];
}

function fit() {
  let [x0, y0, x1, y1] = [Infinity, Infinity, -Infinity, -Infinity];
  for (let k = 0; k < all.length; k += 2) {
    x0 = Math.min(x0, all[k]); x1 = Math.max(x1, all[k]);
    y0 = Math.min(y0, all[k + 1]); y1 = Math.max(y1, all[k + 1]);
  }
  const pad = 20;
  const s = (canvas.width - 2 * pad) / Math.max(x1 - x0, y1 - y0, 1e-9);
  return (x, y) => [pad + (x - x0) * s, canvas.height - pad - (y - y0) * s];
}

function draw() {
  frame = null;
  const [i, j] = currentWindow();
  const alpha = alphaValue();
  $("start-v").textContent = `${i}`;
  $("length-v").textContent = `${j - i + 1} (to ${j})`;
  $("alpha-v").textContent = alpha.toPrecision(4);

  const t0 = performance.now();
  const edges = demo.query(i, j, alpha);
  const ms = performance.now() - t0;
  const pts = demo.points(i, j);
  const at = fit();

  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#ddd";
  for (let k = 0; k < all.length; k += 2) {
    const [x, y] = at(all[k], all[k + 1]);
    ctx.fillRect(x - 1, y - 1, 2, 2);
  }
  ctx.fillStyle = "#246";
  for (let k = 0; k < pts.length; k += 2) {
    const [x, y] = at(pts[k], pts[k + 1]);
    ctx.fillRect(x - 2, y - 2, 4, 4);
  }
  // An edge present on both sides is interior to the shape; one side only
  // marks the boundary.
  const sides = new Map();
  for (let k = 0; k < edges.length; k += 3) {
    const key = edges[k] * 4294967296 + edges[k + 1];
    sides.set(key, (sides.get(key) || 0) + 1);
  }
  for (const [key, count] of sides) {
    const a = Math.floor(key / 4294967296), b = key % 4294967296;
    const [ax, ay] = at(all[2 * a - 2], all[2 * a - 1]);
    const [bx, by] = at(all[2 * b - 2], all[2 * b - 1]);
    ctx.strokeStyle = count === 2 ? "#9bc" : "#c33";
    ctx.lineWidth = count === 2 ? 1 : 2;
    ctx.beginPath(); ctx.moveTo(ax, ay); ctx.lineTo(bx, by); ctx.stroke();
  }
  $("result").textContent =
    `${sides.size} edges (${edges.length / 3} edge sides) in ${ms.toFixed(2)} ms`;
}

function schedule() {
  if (demo && frame === null) frame = requestAnimationFrame(draw);
}

function load(make) {
  $("status").textContent = "computing…";
  $("controls").disabled = true;
  setTimeout(() => {
    try {
      const t0 = performance.now();
      const next = make();
      if (demo) demo.free();
      demo = next;
      all = demo.points(1, 0);
      const n = demo.n();
      $("start").max = Math.max(n - 1, 1);
      $("length").max = n;
      $("length").value = Math.min(n, 40);
      $("start").value = 1;
      $("status").textContent =
        `${n} points, ${demo.triangleCount()} triangles, ${demo.cuboidCount()} cuboids ` +
        `(${((performance.now() - t0) / 1000).toFixed(2)} s)`;
      $("controls").disabled = false;
      schedule();
    } catch (e) {
      $("status").textContent = `error: ${e.message || e}`;
    }
  }, 10);
}

for (const id of ["start", "length", "alpha"]) $(id).addEventListener("input", schedule);

$("generate").addEventListener("click", () =>
  load(() => Demo.swarm(+$("followers").value, +$("leaders").value, +$("steps").value, +$("seed").value)));

$("csv").addEventListener("change", async (ev) => {
  const file = ev.target.files[0];
  if (file) {
    const text = await file.text();
    load(() => Demo.from_csv(text));
  }
});

await init();
$("status").textContent = "ready";
$("generate").click();
