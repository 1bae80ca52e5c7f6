//! Clock-skew compensation experiments.
//!
//! A hardware clock reading `i` is compensated as `i * D / A`, where `D` and
//! `A` are cumulative interdeparture and interarrival times and `D/A`
//! estimates `1 / (1 + skew)`. Each experiment draws `A` for a range of clock
//! skews, runs every configured algorithm, and measures the compensation
//! error against the exact round-half-up solution.
//!
//! Every sample draws from its own ChaCha stream keyed by `(seed, index)`, so
//! results do not depend on evaluation order or thread count.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::decomposition::{additive_direct_search, additive_zeroed, plan_chunks, ChunkPlan};
use crate::error::ScaleError;
use crate::lane::Width;
use crate::oracle::{compensation_error_against, exact_nearest_half_up, fp_reference, Compensation, FloatPrecision};
use crate::problem::ScaleProblem;
use crate::scaling::mdid;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no non-overflow samples to summarize")]
    EmptyData,
    #[error(transparent)]
    Scale(#[from] ScaleError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Binary64,
    Binary32,
    Mdid,
    Adds,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Binary64,
        Algorithm::Binary32,
        Algorithm::Mdid,
        Algorithm::Adds,
    ];

    pub fn is_float(self) -> bool {
        matches!(self, Algorithm::Binary32 | Algorithm::Binary64)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Binary64 => "binary64",
            Algorithm::Binary32 => "binary32",
            Algorithm::Mdid => "mdid",
            Algorithm::Adds => "adds",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "binary64" | "f64" => Ok(Algorithm::Binary64),
            "binary32" | "f32" => Ok(Algorithm::Binary32),
            "mdid" => Ok(Algorithm::Mdid),
            "adds" => Ok(Algorithm::Adds),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

/// Clock skew as an exact rational `numer / 10^12`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Skew {
    pub numer: i64,
}

impl Skew {
    pub const DENOM: i64 = 1_000_000_000_000;

    pub fn from_ppm(ppm: i64) -> Self {
        Skew { numer: ppm * 1_000_000 }
    }

    pub fn as_ppm(self) -> f64 {
        self.numer as f64 / 1e6
    }
}

/// `A = round(D * (1 + skew))`, half up, at least 1.
pub fn a_from_skew(d: u64, skew: Skew) -> u64 {
    let den = Skew::DENOM as i128;
    let shift = (d as i128 * skew.numer as i128 * 2 + den).div_euclid(2 * den);
    (d as i128 + shift).max(1) as u64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioConfig {
    pub width: Width,
    pub d: u64,
    pub i_values: Vec<u64>,
    pub samples: u64,
    /// Half-range of the uniform skew, in parts per million.
    pub skew_ppm: u64,
    pub seed: u64,
    /// Explicit chunk count per `i` for ADDS; the planner is used otherwise.
    pub adds_n_override: BTreeMap<u64, u64>,
    pub algorithms: Vec<Algorithm>,
}

impl ScenarioConfig {
    pub fn new(width: Width, d: u64, i_values: Vec<u64>) -> Self {
        ScenarioConfig {
            width,
            d,
            i_values,
            samples: 1_000_000,
            skew_ppm: 100,
            seed: 0,
            adds_n_override: BTreeMap::new(),
            algorithms: Algorithm::ALL.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let max = self.width.max() as u64;
        if self.samples == 0 {
            return Err(BenchError::InvalidConfig("samples must be at least 1".into()));
        }
        if self.d == 0 || self.d > max {
            return Err(BenchError::InvalidConfig(format!("D={} outside [1, {max}]", self.d)));
        }
        if self.skew_ppm >= 1_000_000 {
            return Err(BenchError::InvalidConfig("skew must be below 1e6 ppm".into()));
        }
        if let Some(i) = self.i_values.iter().find(|&&i| i == 0 || i > max) {
            return Err(BenchError::InvalidConfig(format!("i={i} outside [1, {max}]")));
        }
        if self.i_values.is_empty() || self.algorithms.is_empty() {
            return Err(BenchError::InvalidConfig("nothing to run".into()));
        }
        if self.adds_n_override.values().any(|&n| n == 0) {
            return Err(BenchError::InvalidConfig("chunk count must be positive".into()));
        }
        Ok(())
    }
}

/// Draws the `index`-th skew and the matching `A`.
pub fn gen_sample(cfg: &ScenarioConfig, index: u64) -> (u64, Skew) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let bound = cfg.skew_ppm as i64 * 1_000_000;
    let skew = Skew {
        numer: rng.random_range(-bound..=bound),
    };
    (a_from_skew(cfg.d, skew), skew)
}

/// Min/max/avg compensation error over the non-overflow samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub err_min: Option<i128>,
    pub err_max: Option<i128>,
    pub err_avg: Option<f64>,
    /// Exact sum of errors; `err_avg = err_sum / (samples - overflow_count)`.
    pub err_sum: i128,
    pub overflow_count: u64,
    pub samples: u64,
}

impl ErrorStats {
    pub fn note(&self) -> &'static str {
        if self.overflow_count > 0 {
            "Overflow"
        } else {
            ""
        }
    }

    pub fn is_exact(&self) -> bool {
        self.err_min == Some(0) && self.err_max == Some(0) && self.overflow_count == 0
    }

    pub fn max_abs(&self) -> Result<i128, BenchError> {
        match (self.err_min, self.err_max) {
            (Some(lo), Some(hi)) => Ok(lo.abs().max(hi.abs())),
            _ => Err(BenchError::EmptyData),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    min: Option<i128>,
    max: Option<i128>,
    sum: i128,
    count: u64,
    overflow: u64,
}

impl Accumulator {
    fn push(&mut self, c: Compensation) {
        match c {
            Compensation::Overflow => self.overflow += 1,
            Compensation::Error(e) => {
                self.min = Some(self.min.map_or(e, |m| m.min(e)));
                self.max = Some(self.max.map_or(e, |m| m.max(e)));
                self.sum += e;
                self.count += 1;
            }
        }
    }

    fn merge(self, other: Accumulator) -> Accumulator {
        let pick = |a: Option<i128>, b: Option<i128>, f: fn(i128, i128) -> i128| match (a, b) {
            (Some(x), Some(y)) => Some(f(x, y)),
            (x, None) => x,
            (None, y) => y,
        };
        Accumulator {
            min: pick(self.min, other.min, i128::min),
            max: pick(self.max, other.max, i128::max),
            sum: self.sum + other.sum,
            count: self.count + other.count,
            overflow: self.overflow + other.overflow,
        }
    }

    fn finish(self) -> ErrorStats {
        ErrorStats {
            err_min: self.min,
            err_max: self.max,
            err_avg: (self.count > 0).then(|| self.sum as f64 / self.count as f64),
            err_sum: self.sum,
            overflow_count: self.overflow,
            samples: self.count + self.overflow,
        }
    }
}

pub fn summarize(errors: &[Compensation]) -> ErrorStats {
    let mut acc = Accumulator::default();
    for &e in errors {
        acc.push(e);
    }
    acc.finish()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub algorithm: Algorithm,
    pub width: Width,
    pub d: u64,
    pub i: u64,
    /// Chunk count for ADDS: the override, or the largest planned count.
    pub n: Option<u64>,
    pub stats: ErrorStats,
}

fn adds_result(i: u64, d: u64, a: u64, w: Width, n: Option<u64>) -> (Option<i128>, u64) {
    let plan = match n {
        Some(n) => ChunkPlan::even(i, n, w),
        None => plan_chunks(i, d, a, w),
    };
    match plan {
        Ok(plan) => {
            let len = plan.len() as u64;
            let j = additive_direct_search(&plan, d, a).ok().map(|s| s.j as i128);
            (j, len)
        }
        Err(_) => (None, n.unwrap_or(0)),
    }
}

/// Runs every configured algorithm for every `i`, one row per pair, ordered
/// by algorithm then `i`.
pub fn run_table_experiment(cfg: &ScenarioConfig) -> Result<Vec<TableRow>, BenchError> {
    cfg.validate()?;
    let w = cfg.width;
    let d = cfg.d;
    let algos = &cfg.algorithms;
    let a_values: Vec<u64> = (0..cfg.samples).into_par_iter().map(|k| gen_sample(cfg, k).0).collect();

    let mut by_i = Vec::with_capacity(cfg.i_values.len());
    for &i in &cfg.i_values {
        let n_override = cfg.adds_n_override.get(&i).copied();
        let (accs, planned_n) = a_values
            .par_iter()
            .fold(
                || (vec![Accumulator::default(); algos.len()], 0u64),
                |(mut accs, mut planned_n), &a| {
                    let truth = exact_nearest_half_up(i, d, a);
                    for (acc, algo) in accs.iter_mut().zip(algos) {
                        let result = match algo {
                            Algorithm::Binary64 => fp_reference(FloatPrecision::Binary64, i, d, a).ok(),
                            Algorithm::Binary32 => fp_reference(FloatPrecision::Binary32, i, d, a).ok(),
                            Algorithm::Mdid => ScaleProblem::new(i, d, a)
                                .and_then(|p| mdid(&p, w))
                                .ok()
                                .map(|s| s.j as i128),
                            Algorithm::Adds => {
                                let (j, n) = adds_result(i, d, a, w, n_override);
                                planned_n = planned_n.max(n);
                                j
                            }
                        };
                        acc.push(compensation_error_against(result, &truth));
                    }
                    (accs, planned_n)
                },
            )
            .reduce(
                || (vec![Accumulator::default(); algos.len()], 0u64),
                |(a, na), (b, nb)| (a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect(), na.max(nb)),
            );
        by_i.push((i, accs, n_override.unwrap_or(planned_n)));
    }

    let mut rows = Vec::with_capacity(algos.len() * cfg.i_values.len());
    for (k, &algorithm) in algos.iter().enumerate() {
        for (i, accs, n) in &by_i {
            rows.push(TableRow {
                algorithm,
                width: w,
                d,
                i: *i,
                n: (algorithm == Algorithm::Adds).then_some(*n),
                stats: accs[k].finish(),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FigureSweepConfig {
    pub width: Width,
    /// Used for both `i` and `D`.
    pub i_equals_d: u64,
    /// `A = D + u` with `u` uniform in `[1, u_range]`.
    pub u_range: u64,
    pub n_values: Vec<u64>,
    pub samples: u64,
    pub seed: u64,
}

impl FigureSweepConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let max = self.width.max() as u64;
        if self.samples == 0 || self.u_range == 0 || self.i_equals_d == 0 {
            return Err(BenchError::InvalidConfig(
                "samples, u range and i must be positive".into(),
            ));
        }
        if self.i_equals_d.checked_add(self.u_range).is_none_or(|a| a > max) {
            return Err(BenchError::InvalidConfig("D + u exceeds the lane".into()));
        }
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return Err(BenchError::InvalidConfig("chunk counts must be positive".into()));
        }
        Ok(())
    }

    /// The `index`-th draw of `u`; shared by every `N`.
    pub fn draw_u(&self, index: u64) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng.random_range(1..=self.u_range)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepRow {
    pub n: u64,
    pub sample: u64,
    pub u: u64,
    pub error: i128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    /// Samples with `|error| > N/2`.
    pub violations: u64,
    /// `(N, max |error|)` per swept `N`.
    pub max_abs: Vec<(u64, i128)>,
}

/// Sums independently rounded chunks (every carry dropped) and records the
/// drift from the exact solution.
pub fn run_zeroed_sweep(cfg: &FigureSweepConfig) -> Result<SweepOutcome, BenchError> {
    cfg.validate()?;
    let (w, i, d) = (cfg.width, cfg.i_equals_d, cfg.i_equals_d);
    let draws: Vec<(u64, u64, i128)> = (0..cfg.samples)
        .into_par_iter()
        .map(|k| {
            let u = cfg.draw_u(k);
            (k, u, exact_nearest_half_up(i, d, d + u).j_i128())
        })
        .collect();

    let mut rows = Vec::with_capacity(draws.len() * cfg.n_values.len());
    let mut max_abs = Vec::with_capacity(cfg.n_values.len());
    let mut violations = 0;
    for &n in &cfg.n_values {
        let plan = ChunkPlan::even(i, n, w)?;
        let chunk: Vec<Result<SweepRow, ScaleError>> = draws
            .par_iter()
            .map(|&(sample, u, truth)| {
                let got = additive_zeroed(&plan, d, d + u)?;
                Ok(SweepRow {
                    n,
                    sample,
                    u,
                    error: got.j as i128 - truth,
                })
            })
            .collect();
        let mut worst = 0;
        for row in chunk {
            let row = row?;
            worst = worst.max(row.error.abs());
            // |error| <= N/2  <=>  2|error| <= N
            if 2 * row.error.unsigned_abs() > n as u128 {
                violations += 1;
            }
            rows.push(row);
        }
        max_abs.push((n, worst));
    }
    Ok(SweepOutcome {
        rows,
        violations,
        max_abs,
    })
}

/// Scientific notation with five significant digits and a signed two-digit
/// exponent; exact zero prints as `0`.
pub fn format_avg(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let s = format!("{v:.4e}");
    let (mantissa, exp) = s.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub const TABLE_HEADER: [&str; 11] = [
    "algorithm",
    "width",
    "D",
    "i",
    "N",
    "samples",
    "err_min",
    "err_max",
    "err_avg",
    "overflow_count",
    "note",
];

pub const SWEEP_HEADER: [&str; 7] = ["width", "D", "i", "N", "sample", "u", "error"];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_table_csv<W: Write>(rows: &[TableRow], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TABLE_HEADER)?;
    for r in rows {
        w.write_record([
            r.algorithm.to_string(),
            r.width.to_string(),
            r.d.to_string(),
            r.i.to_string(),
            opt(r.n),
            r.stats.samples.to_string(),
            opt(r.stats.err_min),
            opt(r.stats.err_max),
            r.stats.err_avg.map(format_avg).unwrap_or_default(),
            r.stats.overflow_count.to_string(),
            r.stats.note().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(cfg: &FigureSweepConfig, rows: &[SweepRow], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    let (width, d) = (cfg.width.to_string(), cfg.i_equals_d.to_string());
    for r in rows {
        w.write_record([
            width.as_str(),
            d.as_str(),
            d.as_str(),
            &r.n.to_string(),
            &r.sample.to_string(),
            &r.u.to_string(),
            &r.error.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// A named experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preset {
    Table(ScenarioConfig),
    Sweep(FigureSweepConfig),
}

pub const PRESET_NAMES: [&str; 6] = [
    "int32-d1e6",
    "int32-d1e8",
    "int64-d1e9",
    "int64-d1e12",
    "fig3-int32",
    "fig3-int64",
];

fn powers_of_ten(from: u32, to: u32) -> Vec<u64> {
    (from..=to).map(|e| 10u64.pow(e)).collect()
}

/// Parameter grids of the clock-skew experiments.
///
/// The 32-bit scenarios model a 1 MHz clock (`i` spans 1 s to 1e3 s at
/// `D = 1e6`, 1 ms to 10 s at `D = 1e8`); the 64-bit scenarios model a 1 GHz
/// clock (1e3 s to 1e9 s at `D = 1e9`, 10 ms to 1e5 s at `D = 1e12`).
pub fn preset(name: &str, seed: u64) -> Option<Preset> {
    let table = |width, d, i_values: Vec<u64>, n: &[u64]| {
        let mut cfg = ScenarioConfig::new(width, d, i_values.clone());
        cfg.seed = seed;
        cfg.adds_n_override = i_values.iter().copied().zip(n.iter().copied()).collect();
        Preset::Table(cfg)
    };
    let sweep = |width, i_equals_d, u_range| {
        Preset::Sweep(FigureSweepConfig {
            width,
            i_equals_d,
            u_range,
            n_values: (1..=20).collect(),
            samples: 10_000,
            seed,
        })
    };
    Some(match name {
        "int32-d1e6" => table(Width::W32, 1_000_000, powers_of_ten(6, 9), &[1, 1, 10, 100]),
        "int32-d1e8" => table(Width::W32, 100_000_000, powers_of_ten(3, 7), &[]),
        "int64-d1e9" => table(
            Width::W64,
            1_000_000_000,
            powers_of_ten(12, 18),
            &[1, 1, 10, 100, 1_000, 10_000, 100_000],
        ),
        "int64-d1e12" => table(Width::W64, 1_000_000_000_000, powers_of_ten(7, 14), &[]),
        "fig3-int32" => sweep(Width::W32, 1_000_000, 1_000),
        "fig3-int64" => sweep(Width::W64, 1_000_000_000_000, 1_000_000),
        _ => return None,
    })
}
