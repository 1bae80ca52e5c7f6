use std::fmt;

use crate::error::ScaleError;

/// One instance of `i * D / A` with `i, D >= 0` and `A >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScaleProblem {
    pub i: u64,
    pub d: u64,
    pub a: u64,
}

impl ScaleProblem {
    pub fn new(i: u64, d: u64, a: u64) -> Result<Self, ScaleError> {
        if a == 0 {
            return Err(ScaleError::InvalidInput("A must be positive".into()));
        }
        Ok(ScaleProblem { i, d, a })
    }

    pub fn is_zero(&self) -> bool {
        self.i == 0 || self.d == 0
    }
}

impl fmt::Display for ScaleProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(i={}, D={}, A={})", self.i, self.d, self.a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn apply(self, v: i64) -> Option<i64> {
        match self {
            Sign::Positive => Some(v),
            Sign::Negative => v.checked_neg(),
        }
    }
}

/// A scaling problem with an overall sign on the product `i * D`.
///
/// `A` stays positive; a zero product always carries `Sign::Positive`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignedScaleProblem {
    magnitude: ScaleProblem,
    sign: Sign,
}

impl SignedScaleProblem {
    pub fn new(magnitude: ScaleProblem, sign: Sign) -> Self {
        let sign = if magnitude.is_zero() { Sign::Positive } else { sign };
        SignedScaleProblem { magnitude, sign }
    }

    /// Builds a problem from signed `i`, `D` and `A`; the sign of `A` is
    /// folded into the product sign.
    pub fn from_signed(i: i64, d: i64, a: i64) -> Result<Self, ScaleError> {
        if a == 0 {
            return Err(ScaleError::InvalidInput("A must be non-zero".into()));
        }
        let negative = (i < 0) ^ (d < 0) ^ (a < 0);
        let magnitude = ScaleProblem::new(i.unsigned_abs(), d.unsigned_abs(), a.unsigned_abs())?;
        let sign = if negative { Sign::Negative } else { Sign::Positive };
        Ok(Self::new(magnitude, sign))
    }

    pub fn magnitude(&self) -> ScaleProblem {
        self.magnitude
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }
}

/// A nearest-integer solution `j` with its exact residual `delta = jA - iD`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NearestSolution {
    pub j: i64,
    pub delta: i64,
}

impl NearestSolution {
    pub const ZERO: NearestSolution = NearestSolution { j: 0, delta: 0 };

    /// `2|delta| == A`: the solution sits on an exact half tie.
    pub fn is_tie(&self, a: u64) -> bool {
        2 * self.delta.unsigned_abs() as u128 == a as u128
    }
}

impl fmt::Display for NearestSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "j={} delta={}", self.j, self.delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_product_is_positive() {
        let p = ScaleProblem::new(0, 5, 3).unwrap();
        assert_eq!(SignedScaleProblem::new(p, Sign::Negative).sign(), Sign::Positive);
        let p = ScaleProblem::new(4, 0, 3).unwrap();
        assert_eq!(SignedScaleProblem::new(p, Sign::Negative).sign(), Sign::Positive);
    }

    #[test]
    fn signed_inputs_fold_sign() {
        let s = SignedScaleProblem::from_signed(-10, 3, 4).unwrap();
        assert_eq!(s.sign(), Sign::Negative);
        assert_eq!(s.magnitude(), ScaleProblem { i: 10, d: 3, a: 4 });
        let s = SignedScaleProblem::from_signed(-10, -3, 4).unwrap();
        assert_eq!(s.sign(), Sign::Positive);
        let s = SignedScaleProblem::from_signed(10, 3, -4).unwrap();
        assert_eq!(s.sign(), Sign::Negative);
        assert!(SignedScaleProblem::from_signed(1, 1, 0).is_err());
    }

    #[test]
    fn a_must_be_positive() {
        assert!(ScaleProblem::new(1, 1, 0).is_err());
    }
}
