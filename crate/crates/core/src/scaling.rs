//! Nearest-integer scaling kernels.
//!
//! Each kernel solves `i * D / A` rounded to the nearest integer inside a
//! `W`-bit signed lane and returns the exact residual `delta = jA - iD`
//! alongside `j`. Any step that leaves the lane yields
//! [`ScaleError::Overflow`] naming the violated condition.

use std::fmt;
use std::str::FromStr;

use crate::error::{Condition, ScaleError};
use crate::lane::{add, load, mul, sub, Lane, Width};
use crate::problem::{NearestSolution, ScaleProblem, SignedScaleProblem};

/// Which kernel to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    /// `floor((iD + floor(A/2)) / A)`
    RoundedDiv,
    /// Multiplicative decomposition of integer division.
    Mdid,
    /// Direct search from the default initial guess.
    DirectSearch,
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kernel::RoundedDiv => "div",
            Kernel::Mdid => "mdid",
            Kernel::DirectSearch => "ds",
        })
    }
}

impl FromStr for Kernel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "div" | "rounded-div" => Ok(Kernel::RoundedDiv),
            "mdid" => Ok(Kernel::Mdid),
            "ds" | "direct-search" => Ok(Kernel::DirectSearch),
            other => Err(format!("unknown kernel `{other}`")),
        }
    }
}

/// Initial guess used when the caller does not supply one.
///
/// `kappa = i` zeroes the `(kappa - i)A` term, which keeps the initial
/// residual at `i(A - D)`: small whenever `D/A` is close to one.
pub fn default_kappa(p: &ScaleProblem) -> u64 {
    p.i
}

struct Loaded<T> {
    i: T,
    d: T,
    a: T,
}

fn load_problem<T: Lane>(p: &ScaleProblem) -> Result<Loaded<T>, ScaleError> {
    Ok(Loaded {
        i: load(p.i, Condition::InputI)?,
        d: load(p.d, Condition::InputD)?,
        a: load(p.a, Condition::InputA)?,
    })
}

fn widen<T: Lane>(j: T, delta: T) -> NearestSolution {
    NearestSolution {
        j: j.wide(),
        delta: delta.wide(),
    }
}

fn rounded_div_lane<T: Lane>(p: &ScaleProblem) -> Result<NearestSolution, ScaleError> {
    let Loaded { i, d, a } = load_problem::<T>(p)?;
    if p.is_zero() {
        return Ok(NearestSolution::ZERO);
    }
    let two = T::one() + T::one();
    let product = mul(i, d, Condition::Product)?;
    let numerator = add(product, a / two, Condition::ProductSum)?;
    let j = numerator / a;
    let delta = sub(mul(j, a, Condition::Residual)?, product, Condition::Residual)?;
    Ok(widen(j, delta))
}

fn mdid_lane<T: Lane>(p: &ScaleProblem) -> Result<NearestSolution, ScaleError> {
    let Loaded { i, d, a } = load_problem::<T>(p)?;
    if p.is_zero() {
        return Ok(NearestSolution::ZERO);
    }
    let two = T::one() + T::one();
    let (q, r) = (i / a, i % a);
    let head = mul(q, d, Condition::MdidQuotientTerm)?;
    // With i < A and D < A the remainder product is the full product iD.
    let rd_cond = if q.is_zero() && d < a {
        Condition::MdidSmallProduct
    } else {
        Condition::MdidRemainderTerm
    };
    let rd = mul(r, d, rd_cond)?;
    let tail = add(rd, a / two, Condition::MdidRemainderTerm)? / a;
    let j = add(head, tail, Condition::OutputBound)?;
    // jA - iD = (qD + t)A - (qA + r)D = tA - rD
    let delta = sub(mul(tail, a, Condition::Residual)?, rd, Condition::Residual)?;
    Ok(widen(j, delta))
}

fn direct_search_lane<T: Lane>(p: &ScaleProblem, kappa: u64, carry: i64) -> Result<NearestSolution, ScaleError> {
    let Loaded { i, d, a } = load_problem::<T>(p)?;
    if 2 * carry.unsigned_abs() as u128 > p.a as u128 {
        return Err(ScaleError::InvalidInput(format!(
            "carry {carry} exceeds A/2 for A={}",
            p.a
        )));
    }
    let k0: T = load(kappa, Condition::DsGuessTerm)?;
    if p.is_zero() && carry == 0 {
        return Ok(NearestSolution::ZERO);
    }
    // |carry| <= A/2 <= lane max, so this cannot fail.
    let carry = T::from_wide(carry).ok_or(ScaleError::overflow(T::WIDTH, Condition::DsCarry))?;

    // Evaluated as (k0 - i)A, then + i(A - D), then + carry; the bound is
    // stated on exactly this expression.
    let guess = mul(sub(k0, i, Condition::DsGuessTerm)?, a, Condition::DsGuessTerm)?;
    let skew = mul(i, sub(a, d, Condition::DsSkewTerm)?, Condition::DsSkewTerm)?;
    let init = add(guess, skew, Condition::DsInit)?;
    let d0 = add(init, carry, Condition::DsCarry)?;

    if d0.is_zero() {
        return Ok(widen(k0, T::zero()));
    }
    // Lane division truncates toward zero. For d0 > 0 this is the floor; for
    // d0 < 0 it yields q = -(|d0| div A) and a remainder in (-A, 0], which is
    // the range the case analysis needs. Neither needs |d0|, so d0 = MIN is fine.
    let k1 = sub(k0, d0 / a, Condition::DsUpdate)?;
    let d1 = d0 % a;
    let (j, delta) = if d0 > T::zero() {
        let below = d1 - a;
        if below.abs() < d1.abs() {
            (sub(k1, T::one(), Condition::DsResult)?, below)
        } else {
            (k1, d1)
        }
    } else {
        let above = d1 + a;
        if above.abs() < d1.abs() {
            (add(k1, T::one(), Condition::DsResult)?, above)
        } else {
            (k1, d1)
        }
    };
    Ok(widen(j, delta))
}

/// Rounded integer division `floor((iD + floor(A/2)) / A)`.
///
/// Needs the full product `iD` to fit in the lane.
pub fn round_half_up_div(p: &ScaleProblem, w: Width) -> Result<NearestSolution, ScaleError> {
    match w {
        Width::W32 => rounded_div_lane::<i32>(p),
        Width::W64 => rounded_div_lane::<i64>(p),
    }
}

/// Multiplicative decomposition: with `i = qA + r`,
/// `j = qD + floor((rD + floor(A/2)) / A)`.
///
/// Returns the round-half-up solution without ever forming `iD`.
pub fn mdid(p: &ScaleProblem, w: Width) -> Result<NearestSolution, ScaleError> {
    match w {
        Width::W32 => mdid_lane::<i32>(p),
        Width::W64 => mdid_lane::<i64>(p),
    }
}

/// Direct search from the initial guess `kappa` with an incoming residual
/// `carry`.
///
/// Returns `j` nearest to `(iD - carry) / A` and `delta = jA - iD + carry`,
/// with `2|delta| <= A`. Off ties `j` does not depend on `kappa`. On an exact
/// tie the side depends on the approach direction: a guess above the target
/// keeps the upper candidate (`delta = +A/2`), a guess below keeps the lower
/// one (`delta = -A/2`). Use [`crate::oracle::normalize_half_up`] when a
/// strict half-up result is required.
///
/// `carry` must satisfy `2|carry| <= A`.
pub fn direct_search(p: &ScaleProblem, kappa: u64, carry: i64, w: Width) -> Result<NearestSolution, ScaleError> {
    match w {
        Width::W32 => direct_search_lane::<i32>(p, kappa, carry),
        Width::W64 => direct_search_lane::<i64>(p, kappa, carry),
    }
}

/// Runs `kernel` on the magnitude problem and applies the sign to both `j`
/// and `delta`.
///
/// On the signed axis this rounds ties away from zero.
pub fn solve_signed(p: &SignedScaleProblem, kernel: Kernel, w: Width) -> Result<NearestSolution, ScaleError> {
    let m = p.magnitude();
    let sol = match kernel {
        Kernel::RoundedDiv => round_half_up_div(&m, w)?,
        Kernel::Mdid => mdid(&m, w)?,
        Kernel::DirectSearch => direct_search(&m, default_kappa(&m), 0, w)?,
    };
    let sign = p.sign();
    let j = sign
        .apply(sol.j)
        .filter(|&v| w.holds(v as i128))
        .ok_or(ScaleError::overflow(w, Condition::OutputBound))?;
    let delta = sign
        .apply(sol.delta)
        .ok_or(ScaleError::overflow(w, Condition::Residual))?;
    Ok(NearestSolution { j, delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Sign;

    fn p(i: u64, d: u64, a: u64) -> ScaleProblem {
        ScaleProblem::new(i, d, a).unwrap()
    }

    fn sol(j: i64, delta: i64) -> NearestSolution {
        NearestSolution { j, delta }
    }

    #[test]
    fn rounded_div_examples() {
        assert_eq!(round_half_up_div(&p(3, 5, 2), Width::W32).unwrap(), sol(8, 1));
        assert_eq!(round_half_up_div(&p(0, 7, 3), Width::W32).unwrap(), sol(0, 0));
        assert_eq!(round_half_up_div(&p(10, 3, 4), Width::W32).unwrap(), sol(8, 2));
        assert_eq!(round_half_up_div(&p(7, 2, 7), Width::W32).unwrap(), sol(2, 0));
    }

    #[test]
    fn rounded_div_overflow_names_step() {
        let e = round_half_up_div(&p(1 << 16, 1 << 15, 3), Width::W32).unwrap_err();
        assert_eq!(e.condition(), Some(Condition::Product));
        let e = round_half_up_div(&p(1, i32::MAX as u64, 4), Width::W32).unwrap_err();
        assert_eq!(e.condition(), Some(Condition::ProductSum));
        assert!(round_half_up_div(&p(1, i32::MAX as u64, 4), Width::W64).is_ok());
    }

    #[test]
    fn mdid_examples() {
        assert_eq!(mdid(&p(10, 3, 4), Width::W32).unwrap(), sol(8, 2));
        assert_eq!(mdid(&p(0, 5, 9), Width::W32).unwrap(), sol(0, 0));
        let big = p(100_000_000, 1_000_000, 999_950);
        assert_eq!(mdid(&big, Width::W64).unwrap(), sol(100_005_000, -250_000));
        let e = mdid(&big, Width::W32).unwrap_err();
        assert_eq!(e.condition(), Some(Condition::MdidRemainderTerm));
    }

    #[test]
    fn mdid_small_product_case() {
        let e = mdid(&p(2, 1 << 30, (1 << 31) - 1), Width::W32).unwrap_err();
        assert_eq!(e.condition(), Some(Condition::MdidSmallProduct));
    }

    #[test]
    fn mdid_rejects_out_of_lane_inputs() {
        let e = mdid(&p(1 << 31, 1, 1), Width::W32).unwrap_err();
        assert_eq!(e.condition(), Some(Condition::InputI));
        let e = mdid(&p(1, 1, 1 << 31), Width::W32).unwrap_err();
        assert_eq!(e.condition(), Some(Condition::InputA));
    }

    #[test]
    fn direct_search_cases() {
        // Case 2.2
        assert_eq!(direct_search(&p(5, 3, 5), 5, 0, Width::W32).unwrap(), sol(3, 0));
        // Case 3.1
        assert_eq!(direct_search(&p(7, 9, 5), 7, 0, Width::W32).unwrap(), sol(13, 2));
        // Case 1
        assert_eq!(direct_search(&p(4, 3, 6), 2, 0, Width::W32).unwrap(), sol(2, 0));
        // Case 2.1: the product iD would not fit, the search does.
        let hard = p(2, 1 << 30, (1 << 31) - 1);
        assert_eq!(direct_search(&hard, 2, 0, Width::W32).unwrap(), sol(1, -1));
    }

    #[test]
    fn direct_search_tie_side_follows_guess() {
        let tie = p(1, 5, 2);
        assert_eq!(direct_search(&tie, 0, 0, Width::W32).unwrap(), sol(2, -1));
        assert_eq!(direct_search(&tie, 3, 0, Width::W32).unwrap(), sol(3, 1));
    }

    #[test]
    fn direct_search_with_carry() {
        // Second half of 10*3/4 after 5*3/4 -> (4, 1).
        assert_eq!(direct_search(&p(5, 3, 4), 5, 1, Width::W32).unwrap(), sol(4, 2));
        // Zero chunk passes the carry through.
        assert_eq!(direct_search(&p(0, 3, 4), 0, -2, Width::W32).unwrap(), sol(0, -2));
        assert!(direct_search(&p(5, 3, 4), 5, 3, Width::W32).is_err());
    }

    #[test]
    fn direct_search_allows_lane_minimum() {
        // i = 2, A = 2^30, D = 2^30 + 2^29, kappa = 1:
        // d0 = -2^30 + 2 * (-2^29) = -2^31, the lane minimum.
        let q = p(2, (1 << 30) + (1 << 29), 1 << 30);
        let s = direct_search(&q, 1, 0, Width::W32).unwrap();
        // iD/A = 3 exactly.
        assert_eq!(s, sol(3, 0));
    }

    #[test]
    fn direct_search_guess_term_overflow() {
        let q = p(i32::MAX as u64, 1, i32::MAX as u64);
        let e = direct_search(&q, 0, 0, Width::W32).unwrap_err();
        assert_eq!(e.condition(), Some(Condition::DsGuessTerm));
    }

    #[test]
    fn signed_examples() {
        let neg = SignedScaleProblem::new(p(10, 3, 4), Sign::Negative);
        assert_eq!(solve_signed(&neg, Kernel::Mdid, Width::W32).unwrap(), sol(-8, -2));
        let zero = SignedScaleProblem::new(p(0, 0, 1), Sign::Positive);
        assert_eq!(solve_signed(&zero, Kernel::RoundedDiv, Width::W32).unwrap(), sol(0, 0));
        let tie = SignedScaleProblem::new(p(3, 5, 2), Sign::Negative);
        assert_eq!(solve_signed(&tie, Kernel::RoundedDiv, Width::W32).unwrap().j, -8);
        let pos = SignedScaleProblem::new(p(10, 3, 4), Sign::Positive);
        for k in [Kernel::RoundedDiv, Kernel::Mdid, Kernel::DirectSearch] {
            assert_eq!(solve_signed(&pos, k, Width::W64).unwrap(), sol(8, 2));
        }
    }

    #[test]
    fn kernel_names_round_trip() {
        for k in [Kernel::RoundedDiv, Kernel::Mdid, Kernel::DirectSearch] {
            assert_eq!(k.to_string().parse::<Kernel>().unwrap(), k);
        }
    }
}
