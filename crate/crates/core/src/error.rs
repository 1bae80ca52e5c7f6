use std::fmt;

use thiserror::Error;

use crate::lane::Width;

/// A named non-overflow condition.
///
/// The display strings are stable: they appear in guard reports, CLI error
/// output and golden tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    /// `i <= 2^(W-1) - 1`
    InputI,
    /// `D <= 2^(W-1) - 1`
    InputD,
    /// `A <= 2^(W-1) - 1`
    InputA,
    /// `floor(iD/A + 0.5) <= 2^(W-1) - 1`
    OutputBound,
    /// Full product `iD` of plain rounded division.
    Product,
    /// `iD + floor(A/2)` of plain rounded division.
    ProductSum,
    /// Residual `jA - iD`.
    Residual,
    /// `floor(i/A) * D`
    MdidQuotientTerm,
    /// `(i mod A) * D + floor(A/2)`
    MdidRemainderTerm,
    /// `iD` when both `i < A` and `D < A`.
    MdidSmallProduct,
    /// `(kappa - i) * A`
    DsGuessTerm,
    /// `i * (A - D)`
    DsSkewTerm,
    /// `(kappa - i)A + i(A - D)`
    DsInit,
    /// Initial residual after adding the carry.
    DsCarry,
    /// Intermediate guess `k1`.
    DsUpdate,
    /// Final `j = k1 +/- 1`.
    DsResult,
    /// Per-chunk ADDS condition with worst-case carry.
    AddsChunk,
}

impl Condition {
    pub const fn name(self) -> &'static str {
        match self {
            Condition::InputI => "i bound",
            Condition::InputD => "D bound",
            Condition::InputA => "A bound",
            Condition::OutputBound => "⌊iD/A + 0.5⌋ bound",
            Condition::Product => "iD product",
            Condition::ProductSum => "iD + ⌊A/2⌋ sum",
            Condition::Residual => "residual jA − iD",
            Condition::MdidQuotientTerm => "⌊i/A⌋·D bound",
            Condition::MdidRemainderTerm => "(i mod A)·D + ⌊A/2⌋ bound",
            Condition::MdidSmallProduct => "iD bound (i<A, D<A case)",
            Condition::DsGuessTerm => "(κ−i)·A term",
            Condition::DsSkewTerm => "i(A−D) term",
            Condition::DsInit => "(κ−i)A + i(A−D) bound",
            Condition::DsCarry => "(κ−i)A + i(A−D) + carry bound",
            Condition::DsUpdate => "k1 bound",
            Condition::DsResult => "j bound",
            Condition::AddsChunk => "(κn−in)A + in(A−D) ± A/2 bound",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScaleError {
    #[error("overflow in {width}-bit lane: {condition}")]
    Overflow { width: Width, condition: Condition },
    /// Overflow inside one chunk of an additive decomposition.
    #[error("overflow in chunk {chunk} ({width}-bit lane): {condition}")]
    ChunkOverflow {
        chunk: usize,
        width: Width,
        condition: Condition,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no safe chunk size: |A−D| = {skew} overflows even for a single tick")]
    Unsatisfiable { skew: u64 },
    #[error("plan needs {chunks} chunks, more than the limit of {limit}")]
    PlanTooLarge { chunks: u64, limit: u64 },
}

impl ScaleError {
    pub(crate) const fn overflow(width: Width, condition: Condition) -> Self {
        ScaleError::Overflow { width, condition }
    }

    /// The violated condition, for overflow errors.
    pub fn condition(&self) -> Option<Condition> {
        match self {
            ScaleError::Overflow { condition, .. } | ScaleError::ChunkOverflow { condition, .. } => Some(*condition),
            _ => None,
        }
    }

    pub fn is_overflow(&self) -> bool {
        self.condition().is_some()
    }

    pub(crate) fn in_chunk(self, chunk: usize) -> Self {
        match self {
            ScaleError::Overflow { width, condition } => ScaleError::ChunkOverflow {
                chunk,
                width,
                condition,
            },
            other => other,
        }
    }
}
