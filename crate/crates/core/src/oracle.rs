//! Ground truth for differential testing and error measurement.
//!
//! The exact reference is evaluated with arbitrary-precision integers, so it
//! is never subject to the overflow and precision limits of the kernels it
//! checks. The floating-point references model what a platform with only
//! binary32 or binary64 arithmetic would compute.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::problem::NearestSolution;

/// Exact round-half-up solution of `i * D / A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigNearest {
    pub j: BigInt,
    /// `jA - iD`
    pub delta: BigInt,
    /// `2|delta| == A`
    pub tie: bool,
}

impl BigNearest {
    pub fn is_zero_residual(&self) -> bool {
        self.delta.is_zero()
    }

    pub fn j_i128(&self) -> i128 {
        self.j.to_i128().expect("oracle result exceeds i128")
    }

    /// Whether a lane result agrees with this solution, allowing the lower
    /// candidate on exact ties.
    pub fn admits(&self, j: i64) -> bool {
        let j = BigInt::from(j);
        j == self.j || (self.tie && j == &self.j - 1)
    }
}

/// `floor((2iD + A) / 2A)`, which equals `floor(iD/A + 1/2)`.
pub fn exact_nearest_half_up(i: impl Into<BigInt>, d: impl Into<BigInt>, a: impl Into<BigInt>) -> BigNearest {
    let (i, d, a) = (i.into(), d.into(), a.into());
    assert!(a.is_positive(), "A must be positive");
    let product = &i * &d;
    let two_a = &a * 2;
    let twice: BigInt = &product * 2 + &a;
    let j = twice.div_floor(&two_a);
    let delta = &j * &a - &product;
    let tie = delta.abs() * 2 == a;
    BigNearest { j, delta, tie }
}

/// `jA - iD` in exact arithmetic.
pub fn exact_residual(i: u64, d: u64, a: u64, j: i64) -> BigInt {
    BigInt::from(j) * a - BigInt::from(i) * d
}

/// All minimizers of `|kA - iD|` over `k in [0, bound]`, by scanning.
///
/// Intended for small inputs; the scan is linear in `bound`.
pub fn brute_force_nearest(i: u64, d: u64, a: u64, bound: u64) -> BTreeSet<u64> {
    assert!(a > 0, "A must be positive");
    let target = i as i128 * d as i128;
    let mut best = i128::MAX;
    let mut argmin = BTreeSet::new();
    for k in 0..=bound {
        let dist = (k as i128 * a as i128 - target).abs();
        if dist < best {
            best = dist;
            argmin.clear();
            argmin.insert(k);
        } else if dist == best {
            argmin.insert(k);
        }
    }
    argmin
}

/// Lifts a direct-search solution that retained a tie from below onto the
/// round-half-up side. Other solutions are returned unchanged.
///
/// Returns `None` if the shifted `j` does not fit in `i64`.
pub fn normalize_half_up(sol: NearestSolution, a: u64) -> Option<NearestSolution> {
    if sol.delta < 0 && sol.is_tie(a) {
        Some(NearestSolution {
            j: sol.j.checked_add(1)?,
            delta: sol.delta.checked_add(i64::try_from(a).ok()?)?,
        })
    } else {
        Some(sol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FloatPrecision {
    Binary32,
    Binary64,
}

impl fmt::Display for FloatPrecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FloatPrecision::Binary32 => "binary32",
            FloatPrecision::Binary64 => "binary64",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{precision} evaluation is not finite ({value})")]
    NonFinite { precision: FloatPrecision, value: f64 },
}

/// `floor(fl(i * (D / A)) + 0.5)` where `fl` is evaluated entirely in the
/// given format; the half-add and floor are exact.
pub fn fp_reference(prec: FloatPrecision, i: u64, d: u64, a: u64) -> Result<i128, OracleError> {
    // i as f32 and friends round to nearest-even, as a C cast would.
    let r = match prec {
        FloatPrecision::Binary32 => {
            let r = (i as f32) * ((d as f32) / (a as f32));
            r as f64
        }
        FloatPrecision::Binary64 => (i as f64) * ((d as f64) / (a as f64)),
    };
    round_half_up_exact(r).ok_or(OracleError::NonFinite {
        precision: prec,
        value: r,
    })
}

/// Exact `floor(r + 0.5)` of a finite double.
///
/// A double with a fractional part is below 2^52 in magnitude; there adding
/// 0.5 may round, but never across an integer, so the floor is exact. Doubles
/// at or above 2^52 are already integers.
fn round_half_up_exact(r: f64) -> Option<i128> {
    if !r.is_finite() || r.abs() >= 1.7e38 {
        return None;
    }
    if r.fract() == 0.0 {
        return Some(r as i128);
    }
    Some((r + 0.5).floor() as i128)
}

/// One compensation-error sample: a signed error, or an overflow marker that
/// is excluded from statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Compensation {
    Error(i128),
    Overflow,
}

/// `result - exact_nearest_half_up(i, D, A).j`, or the overflow marker.
pub fn compensation_error(result: Option<i128>, i: u64, d: u64, a: u64) -> Compensation {
    match result {
        None => Compensation::Overflow,
        Some(_) => compensation_error_against(result, &exact_nearest_half_up(i, d, a)),
    }
}

/// As [`compensation_error`], with an already computed reference.
pub fn compensation_error_against(result: Option<i128>, truth: &BigNearest) -> Compensation {
    match result {
        None => Compensation::Overflow,
        Some(v) => {
            let err = BigInt::from(v) - &truth.j;
            Compensation::Error(err.to_i128().expect("compensation error exceeds i128"))
        }
    }
}
