//! Generalized black-box optimization.
//!
//! Search spaces with float, integer, ordinal and categorical parameters; an
//! ask-and-tell [`advisor::Advisor`] that picks a surrogate (Gaussian process or
//! probabilistic random forest) and acquisition (EI, constrained EI, EHVI) from
//! the shape of the task; evolutionary fallbacks (DE, NSGA-II); a closed-loop
//! [`optimizer`]; report generation and a small benchmark harness.
//!
//! All objectives are minimized. Constraints are feasible when `<= 0`.
//!
//! ```
//! use bbo_core::{Advisor, Observation, Parameter, SearchSpace, TaskSpec};
//!
//! let space = SearchSpace::new(vec![
//!     Parameter::float("x", -5.0, 10.0)?,
//!     Parameter::categorical("kind", vec!["a", "b"])?,
//! ])?;
//! let task = TaskSpec::new(space, 1, 0).with_max_runs(20).with_seed(42);
//! let mut advisor = Advisor::new(task)?;
//! for _ in 0..20 {
//!     let config = advisor.ask()?;
//!     let x = config.get_f64("x").unwrap();
//!     let penalty = if config.get("kind").and_then(|v| v.as_str()) == Some("b") { 1.0 } else { 0.0 };
//!     advisor.tell(Observation::success(config, vec![(x - 1.0).powi(2) + penalty], vec![]))?;
//! }
//! let best = advisor.history().incumbent()?.unwrap();
//! assert!(best.objectives[0] < 1.0);
//! # Ok::<(), bbo_core::BboError>(())
//! ```

pub mod acquisition;
pub mod advisor;
pub mod bench;
pub mod error;
pub mod evolution;
pub mod history;
pub mod moo;
pub mod optimizer;
pub mod report;
pub mod space;
pub mod stats;
pub mod surrogate;

pub use advisor::{Advisor, AlgorithmPlan, TaskSpec};
pub use error::{BboError, Result};
pub use history::{History, Observation, TrialState};
pub use optimizer::{run, EvalFailure, Evaluation, Objective, OptResult, RunOptions, StopReason};
pub use space::{Configuration, Encoding, Parameter, ParameterKind, SearchSpace, Value};

/// Seeded random stream used throughout the crate.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Builds the crate's random stream from a seed.
pub fn rng_from_seed(seed: u64) -> Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
