//! Pre-flight non-overflow checks.
//!
//! Every check is evaluated in arbitrary precision, so checking never
//! overflows itself, and reports each violated condition by name. For the
//! single-shot kernels the checks are exact: a report is satisfied if and only
//! if the kernel returns a value. The chunked check assumes the worst-case
//! carry `±ceil(A/2)` and is therefore conservative.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::decomposition::ChunkPlan;
use crate::error::Condition;
use crate::lane::Width;
use crate::problem::ScaleProblem;
use crate::scaling::{default_kappa, Kernel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GuardAlgorithm {
    RoundedDiv,
    Mdid,
    Ds,
    Adds,
}

impl fmt::Display for GuardAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GuardAlgorithm::RoundedDiv => "RoundedDiv",
            GuardAlgorithm::Mdid => "MDID",
            GuardAlgorithm::Ds => "DS",
            GuardAlgorithm::Adds => "ADDS",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardReport {
    pub algorithm: GuardAlgorithm,
    /// Violated conditions in evaluation order, without duplicates.
    pub violated: Vec<Condition>,
}

impl GuardReport {
    pub fn satisfied(&self) -> bool {
        self.violated.is_empty()
    }

    pub fn violates(&self, c: Condition) -> bool {
        self.violated.contains(&c)
    }
}

/// Collects violations against one lane.
struct Lane {
    min: BigInt,
    max: BigInt,
    violated: Vec<Condition>,
}

impl Lane {
    fn new(w: Width) -> Self {
        Lane {
            min: BigInt::from(w.min()),
            max: BigInt::from(w.max()),
            violated: Vec::new(),
        }
    }

    fn fail(&mut self, c: Condition) {
        if !self.violated.contains(&c) {
            self.violated.push(c);
        }
    }

    /// Records `c` if `v` leaves the lane; returns whether it fits.
    fn fits(&mut self, v: &BigInt, c: Condition) -> bool {
        let ok = *v >= self.min && *v <= self.max;
        if !ok {
            self.fail(c);
        }
        ok
    }

    fn within(&mut self, v: &BigInt, lo: &BigInt, hi: &BigInt, c: Condition) -> bool {
        let ok = v >= lo && v <= hi;
        if !ok {
            self.fail(c);
        }
        ok
    }

    fn inputs(&mut self, i: u64, d: u64, a: u64) -> bool {
        let i_ok = self.fits(&i.into(), Condition::InputI);
        let d_ok = self.fits(&d.into(), Condition::InputD);
        let a_ok = self.fits(&a.into(), Condition::InputA);
        i_ok && d_ok && a_ok
    }

    fn output(&mut self, i: &BigInt, d: u64, a: u64) {
        let a = BigInt::from(a);
        let j = (i * d * 2u32 + &a) / (a * 2u32);
        self.fits(&j, Condition::OutputBound);
    }

    fn report(self, algorithm: GuardAlgorithm) -> GuardReport {
        GuardReport {
            algorithm,
            violated: self.violated,
        }
    }
}

/// Lane division truncates toward zero; so does `BigInt` division.
fn trunc_div(n: &BigInt, a: &BigInt) -> BigInt {
    n / a
}

pub fn check_rounded_div(p: &ScaleProblem, w: Width) -> GuardReport {
    let mut lane = Lane::new(w);
    if lane.inputs(p.i, p.d, p.a) {
        let product = BigInt::from(p.i) * p.d;
        lane.fits(&product, Condition::Product);
        lane.fits(&(product + p.a / 2), Condition::ProductSum);
    }
    lane.report(GuardAlgorithm::RoundedDiv)
}

pub fn check_mdid(p: &ScaleProblem, w: Width) -> GuardReport {
    let mut lane = Lane::new(w);
    if lane.inputs(p.i, p.d, p.a) {
        let (q, r) = (p.i / p.a, p.i % p.a);
        lane.output(&p.i.into(), p.d, p.a);
        lane.fits(&(BigInt::from(q) * p.d), Condition::MdidQuotientTerm);
        lane.fits(&(BigInt::from(r) * p.d + p.a / 2), Condition::MdidRemainderTerm);
        if p.i < p.a && p.d < p.a {
            lane.fits(&(BigInt::from(p.i) * p.d), Condition::MdidSmallProduct);
        }
    }
    lane.report(GuardAlgorithm::Mdid)
}

/// Evaluates the direct-search steps for every initial residual in
/// `[lo_carry, hi_carry]`, relying on `k1` being monotone in the residual.
fn ds_steps(lane: &mut Lane, i: u64, d: u64, a: u64, kappa: u64, carries: (&BigInt, &BigInt), chunked: bool) {
    let (i, d, a_big, kappa) = (BigInt::from(i), BigInt::from(d), BigInt::from(a), BigInt::from(kappa));
    let diff = &kappa - &i;
    let guess_ok = lane.fits(&diff, Condition::DsGuessTerm);
    let guess = &diff * &a_big;
    let guess_ok = guess_ok && lane.fits(&guess, Condition::DsGuessTerm);
    let skew = &i * (&a_big - &d);
    let skew_ok = lane.fits(&skew, Condition::DsSkewTerm);
    let init = guess + skew;
    let init_ok = if chunked {
        // Leave room for the carry on both sides.
        let half = BigInt::from(a.div_ceil(2));
        let lo = &lane.min + &half;
        let hi = &lane.max - &half;
        lane.within(&init, &lo, &hi, Condition::AddsChunk)
    } else {
        lane.fits(&init, Condition::DsInit)
    };
    if !(guess_ok && skew_ok && init_ok) {
        return;
    }
    for carry in [carries.0, carries.1] {
        let d0 = &init + carry;
        if !lane.fits(&d0, Condition::DsCarry) || d0.is_zero() {
            continue;
        }
        let k1 = &kappa - trunc_div(&d0, &a_big);
        if lane.fits(&k1, Condition::DsUpdate) {
            // Case 2 may step down and case 3 may step up by one.
            let step = if d0 > BigInt::zero() { &k1 - 1 } else { &k1 + 1 };
            if chunked {
                lane.fits(&(&k1 - 1), Condition::DsResult);
                lane.fits(&(&k1 + 1), Condition::DsResult);
            } else {
                let last: BigInt = (&d0 % &a_big) * 2;
                let moves = if d0 > BigInt::zero() {
                    last > a_big
                } else {
                    -last > a_big
                };
                if moves {
                    lane.fits(&step, Condition::DsResult);
                }
            }
        }
    }
}

/// Checks one direct-search call with the given guess and incoming carry.
pub fn check_ds(p: &ScaleProblem, kappa: u64, carry: i64, w: Width) -> GuardReport {
    let mut lane = Lane::new(w);
    let inputs_ok = lane.inputs(p.i, p.d, p.a);
    let kappa_ok = lane.fits(&kappa.into(), Condition::DsGuessTerm);
    let carry_ok = 2 * carry.unsigned_abs() as u128 <= p.a as u128;
    if !carry_ok {
        lane.fail(Condition::DsCarry);
    }
    if inputs_ok && kappa_ok && carry_ok && !(p.is_zero() && carry == 0) {
        let c = BigInt::from(carry);
        ds_steps(&mut lane, p.i, p.d, p.a, kappa, (&c, &c), false);
    }
    lane.report(GuardAlgorithm::Ds)
}

/// Checks every chunk of `plan` against the worst-case carry `±ceil(A/2)`.
pub fn check_adds(plan: &ChunkPlan, d: u64, a: u64) -> GuardReport {
    let mut lane = Lane::new(plan.width());
    let mut total = BigInt::zero();
    let half = BigInt::from(a.div_ceil(2));
    let carries = (-half.clone(), half);
    let common_ok = {
        let d_ok = lane.fits(&d.into(), Condition::InputD);
        let a_ok = lane.fits(&a.into(), Condition::InputA);
        d_ok && a_ok && a > 0
    };
    for &chunk in plan.chunks() {
        total += chunk;
        let chunk_ok = lane.fits(&chunk.into(), Condition::InputI);
        let kappa = plan.kappa_policy().guess(chunk, d, a);
        let kappa_ok = lane.fits(&kappa.into(), Condition::DsGuessTerm);
        if common_ok && chunk_ok && kappa_ok {
            ds_steps(&mut lane, chunk, d, a, kappa, (&carries.0, &carries.1), true);
        }
    }
    if common_ok {
        lane.output(&total, d, a);
    }
    lane.report(GuardAlgorithm::Adds)
}

/// Guard for a single-shot kernel, using the kernel's default guess.
pub fn check_kernel(kernel: Kernel, p: &ScaleProblem, w: Width) -> GuardReport {
    match kernel {
        Kernel::RoundedDiv => check_rounded_div(p, w),
        Kernel::Mdid => check_mdid(p, w),
        Kernel::DirectSearch => check_ds(p, default_kappa(p), 0, w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::plan_chunks;
    use crate::scaling::{direct_search, mdid, round_half_up_div};

    fn p(i: u64, d: u64, a: u64) -> ScaleProblem {
        ScaleProblem::new(i, d, a).unwrap()
    }

    const MAX32: u64 = i32::MAX as u64;

    #[test]
    fn mdid_examples() {
        let r = check_mdid(&p(100_000_000, 1_000_000, 999_950), Width::W32);
        assert!(!r.satisfied());
        assert_eq!(r.violated, vec![Condition::MdidRemainderTerm]);
        assert_eq!(r.violated[0].to_string(), "(i mod A)·D + ⌊A/2⌋ bound");

        assert!(check_mdid(&p(10, 3, 4), Width::W32).satisfied());

        let r = check_mdid(&p(2, 1 << 30, MAX32), Width::W32);
        assert!(!r.satisfied());
        assert!(r.violates(Condition::MdidSmallProduct));
        assert_eq!(Condition::MdidSmallProduct.to_string(), "iD bound (i<A, D<A case)");
    }

    #[test]
    fn ds_examples() {
        assert!(check_ds(&p(2, 1 << 30, MAX32), 2, 0, Width::W32).satisfied());
        let r = check_ds(&p(MAX32, 1, MAX32), 0, 0, Width::W32);
        assert!(!r.satisfied());
        assert!(r.violates(Condition::DsGuessTerm));
        assert!(check_ds(&p(0, 0, 1), 0, 0, Width::W32).satisfied());
    }

    #[test]
    fn adds_examples() {
        let plan = plan_chunks(100_000_000, 1_000_000, 1_000_100, Width::W32).unwrap();
        assert!(check_adds(&plan, 1_000_000, 1_000_100).satisfied());

        let plan = ChunkPlan::from_chunks(vec![1_000_000_000], Width::W32);
        let r = check_adds(&plan, 1_000_000, 1_000_100);
        assert!(!r.satisfied());

        let plan = ChunkPlan::from_chunks(vec![0], Width::W32);
        assert!(check_adds(&plan, 12345, 678).satisfied());
    }

    #[test]
    fn ds_boundary_is_tight() {
        let w = Width::W32;
        // Upper edge: (kappa - 1) * 2 + 1 = 2^31 - 1 at kappa = 2^30.
        let at = p(1, 1, 2);
        assert!(check_ds(&at, 1 << 30, 0, w).satisfied());
        assert_eq!(
            direct_search(&at, 1 << 30, 0, w).unwrap(),
            crate::NearestSolution { j: 1, delta: 1 }
        );
        // One beyond: (kappa - 1) * 3 + 2 = 2^31 at kappa = (2^31 + 1) / 3.
        let beyond = p(1, 1, 3);
        let k = ((1u64 << 31) + 1) / 3;
        let r = check_ds(&beyond, k, 0, w);
        assert_eq!(r.violated, vec![Condition::DsInit]);
        assert_eq!(
            direct_search(&beyond, k, 0, w).unwrap_err().condition(),
            Some(Condition::DsInit)
        );

        // Lower edge: -2^30 + 2^29 * (2 - 4) = -2^31.
        let at = p(1 << 29, 4, 2);
        assert!(check_ds(&at, 0, 0, w).satisfied());
        assert_eq!(direct_search(&at, 0, 0, w).unwrap().j, 1 << 30);
        // One beyond: -3 + 3 * (1 - 715827883) = -2^31 - 1.
        let beyond = p(3, 715_827_883, 1);
        let r = check_ds(&beyond, 0, 0, w);
        assert!(r.violates(Condition::DsInit));
        assert!(direct_search(&beyond, 0, 0, w).is_err());
    }

    #[test]
    fn ds_reports_update_bound_separately() {
        // The initialization sits exactly on the lane minimum, but the
        // solution 2^31 itself does not fit.
        let q = p(2, 1 << 30, 1);
        let r = check_ds(&q, 0, 0, Width::W32);
        assert_eq!(r.violated, vec![Condition::DsUpdate]);
        assert_eq!(
            direct_search(&q, 0, 0, Width::W32).unwrap_err().condition(),
            Some(Condition::DsUpdate)
        );
    }

    #[test]
    fn exact_agreement_on_small_lane_edges() {
        let edges = [0, 1, 2, 3, 1 << 15, 46_340, 46_341, 1 << 30, MAX32 - 1, MAX32];
        for &i in &edges {
            for &d in &edges {
                for &a in edges.iter().filter(|&&a| a > 0) {
                    let q = p(i, d, a);
                    assert_eq!(
                        check_mdid(&q, Width::W32).satisfied(),
                        mdid(&q, Width::W32).is_ok(),
                        "{q}"
                    );
                    assert_eq!(
                        check_rounded_div(&q, Width::W32).satisfied(),
                        round_half_up_div(&q, Width::W32).is_ok(),
                        "{q}"
                    );
                    for &k in &edges {
                        assert_eq!(
                            check_ds(&q, k, 0, Width::W32).satisfied(),
                            direct_search(&q, k, 0, Width::W32).is_ok(),
                            "{q} kappa={k}"
                        );
                    }
                }
            }
        }
    }
}
