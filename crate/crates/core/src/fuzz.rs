//! Randomized differential checks.
//!
//! Instances are drawn from a mix of log-uniform magnitudes, lane-edge values
//! and small-skew ratios, then every kernel is compared against the exact
//! oracle and against its overflow guard.

use std::fmt;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomposition::{additive_direct_search, chunk_cap, plan_chunks, ChunkPlan};
use crate::error::{Condition, ScaleError};
use crate::guard::{check_adds, check_ds, check_mdid, check_rounded_div};
use crate::lane::Width;
use crate::oracle::{exact_nearest_half_up, exact_residual, BigNearest};
use crate::problem::{NearestSolution, ScaleProblem};
use crate::scaling::{direct_search, mdid, round_half_up_div};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    OracleAgreement,
    ResidualBound,
    GuardSoundness,
    PartitionInvariance,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::OracleAgreement,
        Suite::ResidualBound,
        Suite::GuardSoundness,
        Suite::PartitionInvariance,
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::OracleAgreement => "oracle-agreement",
            Suite::ResidualBound => "residual-bound",
            Suite::GuardSoundness => "guard-soundness",
            Suite::PartitionInvariance => "partition-invariance",
        })
    }
}

/// A failing check, kept small enough to replay by hand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub check: String,
    pub i: u64,
    pub d: u64,
    pub a: u64,
    pub detail: String,
}

impl Failure {
    fn size(&self) -> (u128, u64) {
        (self.i as u128 + self.d as u128 + self.a as u128, self.i)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} i={} D={} A={}: {}",
            self.check, self.i, self.d, self.a, self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: u64,
    pub failed: u64,
    /// Smallest failing instance seen.
    pub minimal_failure: Option<Failure>,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        SuiteReport {
            suite,
            passed: 0,
            failed: 0,
            minimal_failure: None,
        }
    }

    fn record(&mut self, ok: bool, failure: impl FnOnce() -> Failure) {
        if ok {
            self.passed += 1;
            return;
        }
        self.failed += 1;
        let f = failure();
        if self.minimal_failure.as_ref().is_none_or(|m| f.size() < m.size()) {
            self.minimal_failure = Some(f);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzReport {
    pub width: Width,
    pub trials: u64,
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

impl FuzzReport {
    pub fn failures(&self) -> u64 {
        self.suites.iter().map(|s| s.failed).sum()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn suite(&self, suite: Suite) -> &SuiteReport {
        self.suites.iter().find(|s| s.suite == suite).expect("every suite runs")
    }
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fuzz width={} trials={} seed={}", self.width, self.trials, self.seed)?;
        for s in &self.suites {
            let status = if s.failed == 0 { "pass" } else { "FAIL" };
            writeln!(f, "{status} {} passed={} failed={}", s.suite, s.passed, s.failed)?;
            if let Some(m) = &s.minimal_failure {
                writeln!(f, "  minimal: {m}")?;
            }
        }
        Ok(())
    }
}

/// Planned decompositions longer than this are skipped to bound trial cost.
const MAX_FUZZ_CHUNKS: u64 = 4096;

/// Random `(i, D, A)` instances for one lane width.
#[derive(Debug, Clone)]
pub struct InstanceGen {
    rng: ChaCha8Rng,
    width: Width,
}

impl InstanceGen {
    pub fn new(width: Width, seed: u64) -> Self {
        InstanceGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            width,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn log_uniform(&mut self, min: u64) -> u64 {
        let max = self.width.max() as u64;
        let bits = self.rng.random_range(0..self.width.bits());
        let hi = ((1u64 << bits) - 1).saturating_mul(2).saturating_add(1).min(max);
        self.rng.random_range(min..=hi.max(min))
    }

    fn edge(&mut self, min: u64) -> u64 {
        let max = self.width.max() as u64;
        match self.rng.random_range(0..4) {
            0 => max - self.rng.random_range(0..64u64),
            1 => (max / 2).saturating_add_signed(self.rng.random_range(-32i64..=32)),
            2 => self.rng.random_range(min..=64),
            _ => 1u64 << self.rng.random_range(0..self.width.bits() - 1),
        }
        .max(min)
    }

    pub fn instance(&mut self) -> ScaleProblem {
        let (i, d, a) = match self.rng.random_range(0..4) {
            0 => (self.log_uniform(0), self.log_uniform(0), self.log_uniform(1)),
            1 => (self.edge(0), self.edge(0), self.edge(1)),
            2 => {
                // A close to D, as in clock-ratio scaling.
                let d = self.log_uniform(1);
                let spread = (d / 1000).max(1) as i64;
                let a = d.saturating_add_signed(self.rng.random_range(-spread..=spread)).max(1);
                (self.log_uniform(0), d, a.min(self.width.max() as u64))
            }
            _ => {
                let a = self.log_uniform(1);
                (self.log_uniform(0), self.edge(0), a)
            }
        };
        ScaleProblem { i, d, a }
    }

    /// Splits `i` into `n` random non-negative parts.
    pub fn partition(&mut self, i: u64, n: usize) -> Vec<u64> {
        let mut cuts: Vec<u64> = (0..n - 1).map(|_| self.rng.random_range(0..=i)).collect();
        cuts.sort_unstable();
        let mut parts = Vec::with_capacity(n);
        let mut prev = 0;
        for c in cuts {
            parts.push(c - prev);
            prev = c;
        }
        parts.push(i - prev);
        parts
    }
}

fn planned(p: &ScaleProblem, w: Width) -> Option<ChunkPlan> {
    let cap = chunk_cap(p.d, p.a, w).unwrap_or(u64::MAX).max(1);
    if p.i.div_ceil(cap) > MAX_FUZZ_CHUNKS {
        return None;
    }
    plan_chunks(p.i, p.d, p.a, w).ok()
}

fn failure(check: &str, p: &ScaleProblem, detail: impl fmt::Display) -> Failure {
    Failure {
        check: check.into(),
        i: p.i,
        d: p.d,
        a: p.a,
        detail: detail.to_string(),
    }
}

fn residual_ok(p: &ScaleProblem, sol: &NearestSolution, carry: i64) -> bool {
    let exact = exact_residual(p.i, p.d, p.a, sol.j) + carry;
    exact == BigInt::from(sol.delta)
        && BigInt::from(sol.delta) * 2 <= BigInt::from(p.a)
        && BigInt::from(sol.delta) * -2 <= BigInt::from(p.a)
}

/// Nearest solution of `(iD - carry) / A`.
fn carried_truth(p: &ScaleProblem, carry: i64) -> BigNearest {
    exact_nearest_half_up(1, BigInt::from(p.i) * p.d - carry, p.a)
}

struct Trial<'a> {
    reports: &'a mut [SuiteReport; 4],
}

impl Trial<'_> {
    fn agree(&mut self, ok: bool, f: impl FnOnce() -> Failure) {
        self.reports[0].record(ok, f);
    }
    fn residual(&mut self, ok: bool, f: impl FnOnce() -> Failure) {
        self.reports[1].record(ok, f);
    }
    fn guard(&mut self, ok: bool, f: impl FnOnce() -> Failure) {
        self.reports[2].record(ok, f);
    }
    fn partition(&mut self, ok: bool, f: impl FnOnce() -> Failure) {
        self.reports[3].record(ok, f);
    }

    fn kernel(
        &mut self,
        name: &str,
        p: &ScaleProblem,
        truth: &BigNearest,
        exact: bool,
        result: &Result<NearestSolution, ScaleError>,
        approved: bool,
    ) {
        match result {
            Ok(sol) => {
                let ok = if exact {
                    BigInt::from(sol.j) == truth.j
                } else {
                    truth.admits(sol.j)
                };
                self.agree(ok, || failure(name, p, format!("got {sol}, expected j={}", truth.j)));
                self.residual(residual_ok(p, sol, 0), || {
                    failure(name, p, format!("bad residual in {sol}"))
                });
            }
            Err(e) => {
                self.guard(!approved, || {
                    failure(name, p, format!("guard approved but kernel failed: {e}"))
                });
                return;
            }
        }
        self.guard(true, || unreachable!());
    }
}

/// Runs all suites on `trials` random instances.
pub fn run_fuzz(width: Width, trials: u64, seed: u64) -> Result<FuzzReport, ScaleError> {
    if trials == 0 {
        return Err(ScaleError::InvalidInput("trials must be positive".into()));
    }
    let mut reports = Suite::ALL.map(SuiteReport::new);
    let mut gen = InstanceGen::new(width, seed);
    for _ in 0..trials {
        let p = gen.instance();
        let truth = exact_nearest_half_up(p.i, p.d, p.a);
        let mut t = Trial { reports: &mut reports };

        let approved = check_rounded_div(&p, width).satisfied();
        t.kernel("div", &p, &truth, true, &round_half_up_div(&p, width), approved);

        let report = check_mdid(&p, width);
        let result = mdid(&p, width);
        t.kernel("mdid", &p, &truth, true, &result, report.satisfied());
        if !report.satisfied() {
            let only_output = report.violated == [Condition::OutputBound];
            t.guard(result.is_err() || only_output, || {
                failure("mdid", &p, "guard rejected but kernel succeeded")
            });
        }

        let max = width.max() as u64;
        let kappa = match gen.rng().random_range(0..4) {
            0 => p.i,
            1 => 0,
            2 => gen.rng().random_range(0..=p.i.saturating_mul(2).min(max)),
            _ => gen.rng().random_range(0..=max),
        };
        let approved = check_ds(&p, kappa, 0, width).satisfied();
        t.kernel("ds", &p, &truth, false, &direct_search(&p, kappa, 0, width), approved);

        let half = (p.a / 2).min(max) as i64;
        let carry = gen.rng().random_range(-half..=half);
        let approved = check_ds(&p, p.i, carry, width).satisfied();
        match direct_search(&p, p.i, carry, width) {
            Ok(sol) => {
                let ct = carried_truth(&p, carry);
                t.agree(ct.admits(sol.j), || {
                    failure("ds+carry", &p, format!("carry={carry} got {sol}, expected j={}", ct.j))
                });
                t.residual(residual_ok(&p, &sol, carry), || {
                    failure("ds+carry", &p, format!("carry={carry} bad residual in {sol}"))
                });
                t.guard(true, || unreachable!());
            }
            Err(e) => t.guard(!approved, || {
                failure(
                    "ds+carry",
                    &p,
                    format!("carry={carry}: guard approved but kernel failed: {e}"),
                )
            }),
        }

        let n = gen.rng().random_range(2..=32usize);
        let random_plan = ChunkPlan::from_chunks(gen.partition(p.i, n), width);
        for (name, plan) in [("adds", planned(&p, width)), ("adds/random", Some(random_plan))] {
            let Some(plan) = plan else { continue };
            let approved = check_adds(&plan, p.d, p.a).satisfied();
            match additive_direct_search(&plan, p.d, p.a) {
                Ok(sol) => {
                    let s = NearestSolution {
                        j: sol.j,
                        delta: sol.delta,
                    };
                    t.partition(truth.admits(s.j) && residual_ok(&p, &s, 0), || {
                        failure(
                            name,
                            &p,
                            format!("chunks={:?} got {s}, expected j={}", plan.chunks(), truth.j),
                        )
                    });
                    t.guard(true, || unreachable!());
                }
                Err(e) => t.guard(!approved, || {
                    failure(
                        name,
                        &p,
                        format!("chunks={:?}: guard approved but kernel failed: {e}", plan.chunks()),
                    )
                }),
            }
        }
    }
    Ok(FuzzReport {
        width,
        trials,
        seed,
        suites: reports.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_is_rejected() {
        assert!(run_fuzz(Width::W32, 0, 1).is_err());
    }

    #[test]
    fn short_runs_are_green() {
        for w in [Width::W32, Width::W64] {
            let r = run_fuzz(w, 2_000, 11).unwrap();
            assert!(r.passed(), "{r}");
            let names: Vec<_> = r.suites.iter().map(|s| s.suite.to_string()).collect();
            assert_eq!(
                names,
                [
                    "oracle-agreement",
                    "residual-bound",
                    "guard-soundness",
                    "partition-invariance"
                ]
            );
            assert!(r.suite(Suite::PartitionInvariance).passed > 0);
        }
    }

    #[test]
    fn partitions_sum() {
        let mut g = InstanceGen::new(Width::W32, 5);
        for n in 2..10 {
            let parts = g.partition(1000, n);
            assert_eq!(parts.len(), n);
            assert_eq!(parts.iter().sum::<u64>(), 1000);
        }
    }

    #[test]
    fn minimal_failure_keeps_smallest() {
        let mut r = SuiteReport::new(Suite::OracleAgreement);
        let f = |i| Failure {
            check: "x".into(),
            i,
            d: 1,
            a: 1,
            detail: String::new(),
        };
        r.record(false, || f(50));
        r.record(false, || f(5));
        r.record(false, || f(20));
        assert_eq!(r.failed, 3);
        assert_eq!(r.minimal_failure.unwrap().i, 5);
    }
}
