import init, { explore, trace, sweep } from "./pkg/ils_web.js";

const $ = (sel) => document.querySelector(sel);

function cell(text, cls) {
  const td = document.createElement("td");
  td.textContent = text ?? "";
  if (cls) td.className = cls;
  return td;
}

function fill(tbody, rows) {
  tbody.replaceChildren(
    ...rows.map((cells) => {
      const tr = document.createElement("tr");
      tr.append(...cells);
      return tr;
    }),
  );
}

function fail(target, err) {
  target.textContent = String(err);
  target.className = "bad";
}

function runExplore(form) {
  const f = form.elements;
  const out = $("#explore-exact");
  try {
    const r = JSON.parse(explore(f.i.value, f.d.value, f.a.value, Number(f.width.value)));
    out.className = "";
    out.textContent = `exact j=${r.exact_j} delta=${r.exact_delta}` + (r.tie ? " (tie)" : "") +
      (r.chunks ? `; adds plans ${r.chunks} chunk(s)` : "");
    fill($("#explore-table tbody"), r.results.map((k) => [
      cell(k.algorithm, "text"),
      cell(k.j ?? "-"),
      cell(k.delta ?? "-"),
      cell(k.guard_satisfied ? "ok" : "violated", k.guard_satisfied ? "good" : "bad"),
      cell(k.error ?? k.violated.join("; "), "text"),
    ]));
  } catch (e) {
    fail(out, e);
  }
}

function runTrace(form) {
  const f = form.elements;
  const out = $("#trace-summary");
  try {
    const r = JSON.parse(trace(f.i.value, f.d.value, f.a.value, Number(f.width.value), f.n.value));
    out.className = "";
    out.textContent = `exact j=${r.exact_j}; carried j=${r.carried_j}; zeroed j=${r.zeroed_j} (error ${r.zeroed_error})`;
    fill($("#trace-table tbody"), r.steps.map((s, n) => [
      cell(n + 1), cell(s.chunk), cell(s.carried_j), cell(s.carried_delta), cell(s.zeroed_j), cell(s.zeroed_delta),
    ]));
  } catch (e) {
    fail(out, e);
  }
}

function plot(canvas, points) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 36;
  const maxN = points.length;
  const maxY = Math.max(1, ...points.map((p) => Math.max(p.bound, Number(p.max_abs_error))));
  const x = (n) => pad + ((n - 1) / Math.max(1, maxN - 1)) * (w - 2 * pad);
  const y = (v) => h - pad - (v / maxY) * (h - 2 * pad);

  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#888";
  ctx.beginPath();
  ctx.moveTo(pad, pad);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad, h - pad);
  ctx.stroke();
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText("N", w - pad + 6, h - pad + 4);
  ctx.fillText(`${maxY}`, 4, pad + 4);
  ctx.fillText("0", pad - 12, h - pad + 4);

  ctx.strokeStyle = "#b00020";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  points.forEach((p, k) => (k ? ctx.lineTo : ctx.moveTo).call(ctx, x(p.n), y(p.bound)));
  ctx.stroke();
  ctx.setLineDash([]);

  ctx.fillStyle = "#1a4f9c";
  for (const p of points) {
    ctx.beginPath();
    ctx.arc(x(p.n), y(Number(p.max_abs_error)), 3.5, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function runSweep(form) {
  const f = form.elements;
  const out = $("#sweep-summary");
  try {
    const r = JSON.parse(sweep(f.id.value, f.u.value, Number(f.width.value), Number(f.n.value),
      Number(f.samples.value), f.seed.value));
    plot($("#sweep-plot"), r.points);
    out.className = r.violations ? "bad" : "good";
    out.textContent = `dots: max |error| per N; dashed: N/2. Samples above the bound: ${r.violations}`;
  } catch (e) {
    fail(out, e);
  }
}

const handlers = { "explore-form": runExplore, "trace-form": runTrace, "sweep-form": runSweep };

await init();
for (const [id, run] of Object.entries(handlers)) {
  const form = document.getElementById(id);
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    run(form);
  });
  run(form);
}
