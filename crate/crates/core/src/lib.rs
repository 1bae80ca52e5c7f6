//! Exact nearest-integer linear scaling `i * D / A` on fixed-width integers.
//!
//! The kernels in [`scaling`] and [`decomposition`] never form a value that
//! does not fit in the chosen signed lane; inputs they cannot handle produce
//! an overflow error naming the violated condition. [`guard`] evaluates the
//! same conditions ahead of time, [`oracle`] supplies exact ground truth, and
//! [`bench`] reproduces the clock-skew compensation experiments.

pub mod bench;
pub mod decomposition;
pub mod error;
pub mod fuzz;
pub mod guard;
pub mod lane;
pub mod oracle;
pub mod problem;
pub mod scaling;

pub use decomposition::{additive_direct_search, additive_zeroed, plan_chunks, CarrySolution, ChunkPlan};
pub use error::{Condition, ScaleError};
pub use lane::Width;
pub use problem::{NearestSolution, ScaleProblem, Sign, SignedScaleProblem};
pub use scaling::{direct_search, mdid, round_half_up_div, solve_signed, Kernel};
