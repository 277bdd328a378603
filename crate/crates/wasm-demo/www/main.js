import init, { quarticCis, loopWinding, doubletPopulations, doubletPhase, capPhases } from "./pkg/conical_phase_wasm_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);
const piText = (x) => `${x.toFixed(6)} (${(x / Math.PI).toFixed(4)}π)`;

function report(el, fn) {
  try {
    el.classList.remove("err");
    el.textContent = fn();
  } catch (e) {
    el.classList.add("err");
    el.textContent = String(e.message ?? e);
  }
}

let center = [0, 0];
const EXTENT = 14;

function drawCis() {
  const cv = $("ci");
  const ctx = cv.getContext("2d");
  const s = cv.width / (2 * EXTENT);
  const px = (x, y) => [cv.width / 2 + x * s, cv.height / 2 - y * s];
  ctx.clearRect(0, 0, cv.width, cv.height);
  ctx.strokeStyle = "#ddd";
  ctx.beginPath();
  ctx.moveTo(0, cv.height / 2); ctx.lineTo(cv.width, cv.height / 2);
  ctx.moveTo(cv.width / 2, 0); ctx.lineTo(cv.width / 2, cv.height);
  ctx.stroke();

  report($("ci-out"), () => {
    const [k, mu, lambda, r] = [1, num("mu"), num("lambda"), num("radius")];
    const cis = JSON.parse(quarticCis(k, mu, lambda));
    for (const c of cis) {
      const [x, y] = px(c.x, c.y);
      ctx.beginPath();
      ctx.arc(x, y, 5, 0, 2 * Math.PI);
      ctx.strokeStyle = ctx.fillStyle = c.sign > 0 ? "#1565c0" : "#c62828";
      c.sign > 0 ? ctx.fill() : ctx.stroke();
    }
    const [cx, cy] = px(center[0], center[1]);
    ctx.beginPath();
    ctx.arc(cx, cy, r * s, 0, 2 * Math.PI);
    ctx.strokeStyle = "#333";
    ctx.stroke();
    const [traced, predicted] = loopWinding(k, mu, lambda, center[0], center[1], r);
    return `${cis.length} intersections\nloop at (${center[0].toFixed(2)}, ${center[1].toFixed(2)}), radius ${r}: ` +
      `traced ${traced}π, predicted ${predicted}π`;
  });
}

function drawPopulations() {
  const cv = $("pop");
  const ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  report($("pop-out"), () => {
    const [g, omega, excited] = [num("g"), num("omega"), $("excited").checked];
    const data = doubletPopulations(g, omega, excited, 400);
    const n = data.length / 3;
    const tMax = data[3 * (n - 1)];
    const pad = 10;
    const X = (t) => pad + (t / tMax) * (cv.width - 2 * pad);
    const Y = (p) => cv.height - pad - p * (cv.height - 2 * pad);
    for (const [col, colour] of [[1, "#1565c0"], [2, "#c62828"]]) {
      ctx.beginPath();
      for (let i = 0; i < n; i++) {
        const [x, y] = [X(data[3 * i]), Y(data[3 * i + col])];
        i ? ctx.lineTo(x, y) : ctx.moveTo(x, y);
      }
      ctx.strokeStyle = colour;
      ctx.stroke();
    }
    let phase;
    try {
      phase = piText(doubletPhase(g, omega, excited));
    } catch (e) {
      phase = `undefined (${e.message ?? e})`;
    }
    return `lower (blue) and upper (red) eigenstate populations over one period\nphase over one period: ${phase}`;
  });
}

function showCap() {
  report($("cap-out"), () => {
    const theta = num("theta");
    const [lo, up] = capPhases(theta);
    return `θ = ${theta.toFixed(3)}\nlower state: ${piText(lo)}\nupper state: ${piText(up)}`;
  });
}

await init();

$("ci").addEventListener("click", (ev) => {
  const cv = ev.target;
  const rect = cv.getBoundingClientRect();
  const s = cv.width / (2 * EXTENT);
  center = [(ev.clientX - rect.left - cv.width / 2) / s, (cv.height / 2 - (ev.clientY - rect.top)) / s];
  drawCis();
});
for (const id of ["mu", "lambda", "radius"]) $(id).addEventListener("input", drawCis);
for (const id of ["g", "omega", "excited"]) $(id).addEventListener("input", drawPopulations);
$("theta").addEventListener("input", showCap);

drawCis();
drawPopulations();
showCap();
