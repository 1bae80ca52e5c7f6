//! Additive decomposition of direct search.
//!
//! A large `i` is split into chunks `i_1 + ... + i_N`. Each chunk is solved by
//! [`direct_search`] with the residual of the previous chunk as its carry, so
//! the sum of the chunk solutions is the nearest solution for the whole `i`
//! and no rounding error accumulates.

use crate::error::{Condition, ScaleError};
use crate::lane::Width;
use crate::problem::ScaleProblem;
use crate::scaling::direct_search;

/// Initial guess for each chunk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KappaPolicy {
    /// `kappa_n = i_n`; the `(kappa_n - i_n)A` term vanishes.
    #[default]
    ChunkSize,
    /// `kappa_n = floor(i_n / A) * D`
    Quotient,
}

impl KappaPolicy {
    pub fn guess(self, chunk: u64, d: u64, a: u64) -> u64 {
        match self {
            KappaPolicy::ChunkSize => chunk,
            KappaPolicy::Quotient => {
                let g = (chunk / a) as u128 * d as u128;
                u64::try_from(g).unwrap_or(u64::MAX)
            }
        }
    }
}

/// A partition of `i` into sub-problems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkPlan {
    chunks: Vec<u64>,
    width: Width,
    kappa_policy: KappaPolicy,
}

impl ChunkPlan {
    /// A plan with explicit chunks.
    pub fn from_chunks(chunks: Vec<u64>, width: Width) -> Self {
        ChunkPlan {
            chunks,
            width,
            kappa_policy: KappaPolicy::ChunkSize,
        }
    }

    /// Splits `i` into `n` parts that differ by at most one.
    pub fn even(i: u64, n: u64, width: Width) -> Result<Self, ScaleError> {
        if n == 0 {
            return Err(ScaleError::InvalidInput("chunk count must be positive".into()));
        }
        if n > MAX_PLAN_CHUNKS {
            return Err(ScaleError::PlanTooLarge {
                chunks: n,
                limit: MAX_PLAN_CHUNKS,
            });
        }
        let (base, extra) = (i / n, i % n);
        let chunks = (0..n).map(|k| base + u64::from(k < extra)).collect();
        Ok(Self::from_chunks(chunks, width))
    }

    pub fn with_kappa_policy(mut self, policy: KappaPolicy) -> Self {
        self.kappa_policy = policy;
        self
    }

    pub fn chunks(&self) -> &[u64] {
        &self.chunks
    }

    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }

    pub fn width(&self) -> Width {
        self.width
    }

    pub fn kappa_policy(&self) -> KappaPolicy {
        self.kappa_policy
    }

    pub fn total(&self) -> u128 {
        self.chunks.iter().map(|&c| c as u128).sum()
    }
}

/// Largest chunk for which `|i_n (A - D)| + ceil(A/2)` stays in the lane,
/// with `kappa_n = i_n`. `None` when `A == D` (any chunk is safe).
pub fn chunk_cap(d: u64, a: u64, w: Width) -> Option<u64> {
    let skew = a.abs_diff(d);
    if skew == 0 {
        return None;
    }
    let headroom = (w.max() as u64).saturating_sub(a.div_ceil(2));
    Some(headroom / skew)
}

/// Upper bound on the number of chunks [`plan_chunks`] will allocate.
pub const MAX_PLAN_CHUNKS: u64 = 1 << 24;

/// Plans the fewest equal chunks (the last one possibly smaller) that keep
/// every direct-search initialization in the lane for any admissible carry.
pub fn plan_chunks(i: u64, d: u64, a: u64, w: Width) -> Result<ChunkPlan, ScaleError> {
    let max = w.max() as u64;
    if a == 0 {
        return Err(ScaleError::InvalidInput("A must be positive".into()));
    }
    if d > max {
        return Err(ScaleError::overflow(w, Condition::InputD));
    }
    if a > max {
        return Err(ScaleError::overflow(w, Condition::InputA));
    }
    let output = (2 * i as u128 * d as u128 + a as u128) / (2 * a as u128);
    if output > max as u128 {
        return Err(ScaleError::overflow(w, Condition::OutputBound));
    }
    let cap = match chunk_cap(d, a, w) {
        Some(0) => return Err(ScaleError::Unsatisfiable { skew: a.abs_diff(d) }),
        Some(c) => c.min(max),
        None => max,
    };
    let count = i.div_ceil(cap).max(1);
    if count > MAX_PLAN_CHUNKS {
        return Err(ScaleError::PlanTooLarge {
            chunks: count,
            limit: MAX_PLAN_CHUNKS,
        });
    }
    let mut chunks = Vec::with_capacity(count as usize);
    let mut rest = i;
    while rest > cap {
        chunks.push(cap);
        rest -= cap;
    }
    chunks.push(rest);
    Ok(ChunkPlan::from_chunks(chunks, w))
}

/// Accumulated solution of a chunked problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarrySolution {
    /// `sum of j_n`
    pub j: i64,
    /// Final carry; equals `jA - iD` for the carried variant.
    pub delta: i64,
    /// `(j_n, carry_n)` per chunk, when tracing was requested.
    pub per_chunk: Option<Vec<(i64, i64)>>,
}

fn run_chunks(plan: &ChunkPlan, d: u64, a: u64, carry_forward: bool, trace: bool) -> Result<CarrySolution, ScaleError> {
    let w = plan.width;
    let mut total: i64 = 0;
    let mut carry: i64 = 0;
    let mut per_chunk = trace.then(|| Vec::with_capacity(plan.len()));
    for (n, &chunk) in plan.chunks.iter().enumerate() {
        let sub = ScaleProblem::new(chunk, d, a)?;
        let kappa = plan.kappa_policy.guess(chunk, d, a);
        let incoming = if carry_forward { carry } else { 0 };
        let sol = direct_search(&sub, kappa, incoming, w).map_err(|e| e.in_chunk(n))?;
        total = total
            .checked_add(sol.j)
            .filter(|&t| w.holds(t as i128))
            .ok_or(ScaleError::overflow(w, Condition::OutputBound).in_chunk(n))?;
        carry = sol.delta;
        if let Some(trace) = per_chunk.as_mut() {
            trace.push((sol.j, sol.delta));
        }
    }
    Ok(CarrySolution {
        j: total,
        delta: carry,
        per_chunk,
    })
}

/// Solves `(sum of chunks) * D / A` chunk by chunk, passing each chunk's
/// residual to the next.
pub fn additive_direct_search(plan: &ChunkPlan, d: u64, a: u64) -> Result<CarrySolution, ScaleError> {
    run_chunks(plan, d, a, true, false)
}

/// As [`additive_direct_search`], recording `(j_n, carry_n)` for every chunk.
pub fn additive_direct_search_traced(plan: &ChunkPlan, d: u64, a: u64) -> Result<CarrySolution, ScaleError> {
    run_chunks(plan, d, a, true, true)
}

/// Diagnostic variant that drops every carry: each chunk is rounded on its
/// own, so the sum can drift from the nearest solution by up to `N/2`.
pub fn additive_zeroed(plan: &ChunkPlan, d: u64, a: u64) -> Result<CarrySolution, ScaleError> {
    run_chunks(plan, d, a, false, false)
}

/// As [`additive_zeroed`], recording `(j_n, delta_n)` for every chunk.
pub fn additive_zeroed_traced(plan: &ChunkPlan, d: u64, a: u64) -> Result<CarrySolution, ScaleError> {
    run_chunks(plan, d, a, false, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::exact_nearest_half_up;
    use crate::scaling::direct_search;

    #[test]
    fn planner_examples() {
        let plan = plan_chunks(100_000_000, 1_000_000, 1_000_100, Width::W32).unwrap();
        assert_eq!(chunk_cap(1_000_000, 1_000_100, Width::W32), Some(21_469_835));
        assert_eq!(plan.len(), 5);
        assert_eq!(plan.chunks()[0], 21_469_835);
        assert_eq!(plan.total(), 100_000_000);

        let plan = plan_chunks(1_000_000_000, 1_000_000, 1_000_000, Width::W32).unwrap();
        assert_eq!(plan.chunks(), &[1_000_000_000]);

        let plan = plan_chunks(1_000_000_000_000_000_000, 1_000_000_000, 1_000_100_000, Width::W64).unwrap();
        assert_eq!(
            chunk_cap(1_000_000_000, 1_000_100_000, Width::W64),
            Some(92_233_720_363_547)
        );
        assert_eq!(plan.len(), 10_843);
        assert_eq!(plan.total(), 1_000_000_000_000_000_000);
    }

    #[test]
    fn planner_zero_input_is_one_empty_chunk() {
        let plan = plan_chunks(0, 5, 3, Width::W32).unwrap();
        assert_eq!(plan.chunks(), &[0]);
    }

    #[test]
    fn planner_rejects_output_overflow() {
        let e = plan_chunks(i32::MAX as u64, 2, 1, Width::W32).unwrap_err();
        assert_eq!(e.condition(), Some(Condition::OutputBound));
    }

    #[test]
    fn planner_refuses_huge_plans() {
        // cap = 1 with i = 2^62
        let e = plan_chunks(1 << 62, 0, 1 << 62, Width::W64).unwrap_err();
        assert!(matches!(e, ScaleError::PlanTooLarge { chunks, .. } if chunks == 1 << 62));
    }

    #[test]
    fn even_split() {
        let plan = ChunkPlan::even(10, 3, Width::W32).unwrap();
        assert_eq!(plan.chunks(), &[4, 3, 3]);
        assert!(ChunkPlan::even(10, 0, Width::W32).is_err());
    }

    #[test]
    fn carried_examples() {
        let plan = ChunkPlan::from_chunks(vec![5, 5], Width::W32);
        let s = additive_direct_search_traced(&plan, 3, 4).unwrap();
        assert_eq!((s.j, s.delta), (8, 2));
        assert_eq!(s.per_chunk.unwrap(), vec![(4, 1), (4, 2)]);

        let plan = ChunkPlan::from_chunks(vec![1, 1], Width::W32);
        let s = additive_direct_search_traced(&plan, 1, 3).unwrap();
        assert_eq!((s.j, s.delta), (1, 1));
        assert_eq!(s.per_chunk.unwrap(), vec![(0, -1), (1, 1)]);
    }

    #[test]
    fn single_chunk_is_direct_search() {
        for (i, d, a) in [(10, 3, 4), (1, 5, 2), (7, 9, 5), (1_000_000, 999_999, 1_000_001)] {
            let plan = ChunkPlan::from_chunks(vec![i], Width::W32);
            let s = additive_direct_search(&plan, d, a).unwrap();
            let z = additive_zeroed(&plan, d, a).unwrap();
            let ds = direct_search(&ScaleProblem::new(i, d, a).unwrap(), i, 0, Width::W32).unwrap();
            assert_eq!((s.j, s.delta), (ds.j, ds.delta));
            assert_eq!((z.j, z.delta), (ds.j, ds.delta));
        }
    }

    #[test]
    fn zeroed_examples() {
        let plan = ChunkPlan::from_chunks(vec![1, 1], Width::W32);
        assert_eq!(additive_zeroed(&plan, 1, 3).unwrap().j, 0);
        let traced = additive_zeroed_traced(&plan, 1, 3).unwrap();
        assert_eq!(traced.per_chunk.unwrap(), vec![(0, -1), (0, -1)]);
        let plan = ChunkPlan::from_chunks(vec![5, 5], Width::W32);
        assert_eq!(additive_zeroed(&plan, 3, 4).unwrap().j, 8);
    }

    #[test]
    fn chunk_overflow_reports_index() {
        // Second chunk is too large for the lane.
        let plan = ChunkPlan::from_chunks(vec![1, 1_000_000_000], Width::W32);
        let e = additive_direct_search(&plan, 1_000_000, 1_000_100).unwrap_err();
        assert!(matches!(e, ScaleError::ChunkOverflow { chunk: 1, .. }), "{e:?}");
    }

    #[test]
    fn planned_chunks_agree_with_oracle() {
        let (i, d, a) = (1_000_000_000u64, 1_000_000u64, 1_000_100u64);
        let plan = plan_chunks(i, d, a, Width::W32).unwrap();
        let s = additive_direct_search(&plan, d, a).unwrap();
        let truth = exact_nearest_half_up(i, d, a);
        assert_eq!(s.j as i128, truth.j_i128());
        assert_eq!(s.delta, 1000);
    }
}
