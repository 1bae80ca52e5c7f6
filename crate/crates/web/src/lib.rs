//! Browser bindings for the scaling kernels.
//!
//! Every operation is a plain Rust function returning JSON, wrapped for
//! JavaScript below. Integers cross the boundary as decimal strings so that
//! 64-bit values survive intact.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use ils_core::bench::{run_zeroed_sweep, FigureSweepConfig};
use ils_core::decomposition::{additive_direct_search_traced, additive_zeroed_traced, ChunkPlan};
use ils_core::guard::{check_adds, check_ds, check_mdid, check_rounded_div, GuardReport};
use ils_core::oracle::exact_nearest_half_up;
use ils_core::{direct_search, mdid, plan_chunks, round_half_up_div, NearestSolution, ScaleError, ScaleProblem, Width};

fn int(name: &str, s: &str) -> Result<u64, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("{name} must be a non-negative integer, got `{s}`"))
}

fn width(bits: u32) -> Result<Width, String> {
    match bits {
        32 => Ok(Width::W32),
        64 => Ok(Width::W64),
        other => Err(format!("width must be 32 or 64, got {other}")),
    }
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
struct KernelResult {
    algorithm: &'static str,
    j: Option<String>,
    delta: Option<String>,
    error: Option<String>,
    guard_satisfied: bool,
    violated: Vec<String>,
}

impl KernelResult {
    fn new(algorithm: &'static str, result: Result<NearestSolution, ScaleError>, guard: GuardReport) -> Self {
        let (j, delta, error) = match result {
            Ok(s) => (Some(s.j.to_string()), Some(s.delta.to_string()), None),
            Err(e) => (None, None, Some(e.to_string())),
        };
        KernelResult {
            algorithm,
            j,
            delta,
            error,
            guard_satisfied: guard.satisfied(),
            violated: guard.violated.iter().map(|c| c.to_string()).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
struct Explorer {
    exact_j: String,
    exact_delta: String,
    tie: bool,
    chunks: Option<usize>,
    results: Vec<KernelResult>,
}

/// Runs every kernel on one instance and reports results next to the exact
/// answer and each guard's verdict.
pub fn explore(i: &str, d: &str, a: &str, bits: u32) -> Result<String, String> {
    let w = width(bits)?;
    let p = ScaleProblem::new(int("i", i)?, int("D", d)?, int("A", a)?).map_err(|e| e.to_string())?;
    let truth = exact_nearest_half_up(p.i, p.d, p.a);
    let mut results = vec![
        KernelResult::new("div", round_half_up_div(&p, w), check_rounded_div(&p, w)),
        KernelResult::new("mdid", mdid(&p, w), check_mdid(&p, w)),
        KernelResult::new("ds", direct_search(&p, p.i, 0, w), check_ds(&p, p.i, 0, w)),
    ];
    let mut chunks = None;
    match plan_chunks(p.i, p.d, p.a, w) {
        Ok(plan) => {
            chunks = Some(plan.len());
            let result =
                additive_direct_search_traced(&plan, p.d, p.a).map(|s| NearestSolution { j: s.j, delta: s.delta });
            results.push(KernelResult::new("adds", result, check_adds(&plan, p.d, p.a)));
        }
        Err(e) => results.push(KernelResult {
            algorithm: "adds",
            j: None,
            delta: None,
            error: Some(e.to_string()),
            guard_satisfied: false,
            violated: e.condition().map(|c| vec![c.to_string()]).unwrap_or_default(),
        }),
    }
    json(&Explorer {
        exact_j: truth.j.to_string(),
        exact_delta: truth.delta.to_string(),
        tie: truth.tie,
        chunks,
        results,
    })
}

#[derive(Debug, Serialize)]
struct ChunkStep {
    chunk: String,
    carried_j: String,
    carried_delta: String,
    zeroed_j: String,
    zeroed_delta: String,
}

#[derive(Debug, Serialize)]
struct Trace {
    exact_j: String,
    carried_j: String,
    zeroed_j: String,
    zeroed_error: String,
    steps: Vec<ChunkStep>,
}

/// Splits `i` into `n` equal chunks and traces the carried and the zeroed
/// recursions side by side.
pub fn trace(i: &str, d: &str, a: &str, bits: u32, n: &str) -> Result<String, String> {
    let w = width(bits)?;
    let (i, d, a, n) = (int("i", i)?, int("D", d)?, int("A", a)?, int("N", n)?);
    if n > 10_000 {
        return Err("N is limited to 10000 in the demo".into());
    }
    ScaleProblem::new(i, d, a).map_err(|e| e.to_string())?;
    let plan = ChunkPlan::even(i, n, w).map_err(|e| e.to_string())?;
    let carried = additive_direct_search_traced(&plan, d, a).map_err(|e| e.to_string())?;
    let zeroed = additive_zeroed_traced(&plan, d, a).map_err(|e| e.to_string())?;
    let truth = exact_nearest_half_up(i, d, a);
    let steps = plan
        .chunks()
        .iter()
        .zip(carried.per_chunk.unwrap_or_default())
        .zip(zeroed.per_chunk.unwrap_or_default())
        .map(|((c, (cj, cd)), (zj, zd))| ChunkStep {
            chunk: c.to_string(),
            carried_j: cj.to_string(),
            carried_delta: cd.to_string(),
            zeroed_j: zj.to_string(),
            zeroed_delta: zd.to_string(),
        })
        .collect();
    json(&Trace {
        exact_j: truth.j.to_string(),
        carried_j: carried.j.to_string(),
        zeroed_j: zeroed.j.to_string(),
        zeroed_error: (zeroed.j as i128 - truth.j_i128()).to_string(),
        steps,
    })
}

#[derive(Debug, Serialize)]
struct SweepPoint {
    n: u64,
    max_abs_error: String,
    bound: f64,
}

#[derive(Debug, Serialize)]
struct Sweep {
    violations: u64,
    points: Vec<SweepPoint>,
}

/// Worst drift of the zeroed recursion for `N = 1..=max_n`, with `A = D + u`
/// and `u` drawn from `[1, u_range]`.
pub fn sweep(
    i_equals_d: &str,
    u_range: &str,
    bits: u32,
    max_n: u32,
    samples: u32,
    seed: &str,
) -> Result<String, String> {
    if samples == 0 || samples > 20_000 || max_n == 0 || max_n > 64 {
        return Err("samples must be in 1..=20000 and N in 1..=64".into());
    }
    let cfg = FigureSweepConfig {
        width: width(bits)?,
        i_equals_d: int("i = D", i_equals_d)?,
        u_range: int("u range", u_range)?,
        n_values: (1..=max_n as u64).collect(),
        samples: samples as u64,
        seed: int("seed", seed)?,
    };
    let out = run_zeroed_sweep(&cfg).map_err(|e| e.to_string())?;
    json(&Sweep {
        violations: out.violations,
        points: out
            .max_abs
            .iter()
            .map(|&(n, e)| SweepPoint {
                n,
                max_abs_error: e.to_string(),
                bound: n as f64 / 2.0,
            })
            .collect(),
    })
}

#[wasm_bindgen(js_name = explore)]
pub fn explore_js(i: &str, d: &str, a: &str, bits: u32) -> Result<String, JsValue> {
    explore(i, d, a, bits).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = trace)]
pub fn trace_js(i: &str, d: &str, a: &str, bits: u32, n: &str) -> Result<String, JsValue> {
    trace(i, d, a, bits, n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = sweep)]
pub fn sweep_js(
    i_equals_d: &str,
    u_range: &str,
    bits: u32,
    max_n: u32,
    samples: u32,
    seed: &str,
) -> Result<String, JsValue> {
    sweep(i_equals_d, u_range, bits, max_n, samples, seed).map_err(|e| JsValue::from_str(&e))
}
