//! Fixed-width signed integer lanes.
//!
//! Every kernel in this crate runs inside a `W`-bit signed lane, either `i32`
//! or `i64`. Intermediates are computed with checked arithmetic only; a value
//! leaving `[-2^(W-1), 2^(W-1) - 1]` is reported, never wrapped.

use std::fmt;
use std::str::FromStr;

use num_traits::{CheckedMul, CheckedNeg, CheckedRem, PrimInt, Signed};

use crate::error::{Condition, ScaleError};

/// Width of the signed integer lane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Width {
    W32,
    W64,
}

impl Width {
    pub const fn bits(self) -> u32 {
        match self {
            Width::W32 => 32,
            Width::W64 => 64,
        }
    }

    /// `2^(W-1) - 1`
    pub const fn max(self) -> i64 {
        match self {
            Width::W32 => i32::MAX as i64,
            Width::W64 => i64::MAX,
        }
    }

    /// `-2^(W-1)`
    pub const fn min(self) -> i64 {
        match self {
            Width::W32 => i32::MIN as i64,
            Width::W64 => i64::MIN,
        }
    }

    /// Whether a wide value is representable in this lane.
    pub fn holds(self, v: i128) -> bool {
        v >= self.min() as i128 && v <= self.max() as i128
    }
}

impl fmt::Display for Width {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits())
    }
}

impl FromStr for Width {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().trim_start_matches(['w', 'W']) {
            "32" => Ok(Width::W32),
            "64" => Ok(Width::W64),
            other => Err(format!("unsupported width `{other}` (expected 32 or 64)")),
        }
    }
}

/// A signed machine integer usable as a kernel lane.
pub trait Lane:
    PrimInt + Signed + CheckedRem + CheckedNeg + CheckedMul + fmt::Debug + Into<i64> + TryFrom<i64>
{
    const WIDTH: Width;

    fn from_wide(v: i64) -> Option<Self> {
        Self::try_from(v).ok()
    }

    fn wide(self) -> i64 {
        self.into()
    }
}

impl Lane for i32 {
    const WIDTH: Width = Width::W32;
}

impl Lane for i64 {
    const WIDTH: Width = Width::W64;
}

// Checked step helpers: each one names the condition it guards.

#[inline]
pub(crate) fn add<T: Lane>(a: T, b: T, cond: Condition) -> Result<T, ScaleError> {
    a.checked_add(&b).ok_or(ScaleError::overflow(T::WIDTH, cond))
}

#[inline]
pub(crate) fn sub<T: Lane>(a: T, b: T, cond: Condition) -> Result<T, ScaleError> {
    a.checked_sub(&b).ok_or(ScaleError::overflow(T::WIDTH, cond))
}

#[inline]
pub(crate) fn mul<T: Lane>(a: T, b: T, cond: Condition) -> Result<T, ScaleError> {
    a.checked_mul(&b).ok_or(ScaleError::overflow(T::WIDTH, cond))
}

/// Moves an unsigned input into the lane, or reports which input bound it violates.
#[inline]
pub(crate) fn load<T: Lane>(v: u64, cond: Condition) -> Result<T, ScaleError> {
    i64::try_from(v)
        .ok()
        .and_then(T::from_wide)
        .ok_or(ScaleError::overflow(T::WIDTH, cond))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_bounds() {
        assert_eq!(Width::W32.max(), 2_147_483_647);
        assert_eq!(Width::W32.min(), -2_147_483_648);
        assert_eq!(Width::W64.max(), i64::MAX);
        assert!(Width::W32.holds(i32::MAX as i128));
        assert!(!Width::W32.holds(i32::MAX as i128 + 1));
        assert!(!Width::W64.holds(i64::MIN as i128 - 1));
    }

    #[test]
    fn width_parse() {
        assert_eq!("32".parse::<Width>().unwrap(), Width::W32);
        assert_eq!("w64".parse::<Width>().unwrap(), Width::W64);
        assert!("16".parse::<Width>().is_err());
    }

    #[test]
    fn load_rejects_out_of_lane() {
        assert_eq!(load::<i32>(7, Condition::InputI).unwrap(), 7);
        assert!(load::<i32>(1 << 31, Condition::InputI).is_err());
        assert!(load::<i64>(1 << 63, Condition::InputD).is_err());
    }
}
