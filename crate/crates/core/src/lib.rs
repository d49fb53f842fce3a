//! Fairness in the dictator game under indirect reciprocity.
//!
//! Players split a unit resource either fairly (half each) or unfairly (the
//! dictator keeps everything). Observers judge dictators with a social norm
//! and may publish their judgement at a cost. The crate computes
//!
//! * the reputation chain of a two-strategy population and its stationary
//!   distribution ([`reputation_chain`]),
//! * stationary expected payoffs ([`payoffs`]),
//! * fixation probabilities and the small-mutation strategy chain
//!   ([`dynamics`]),
//! * the long-run level of fairness ([`fairness`]),
//!
//! and cross-checks the two-timescale analysis with an agent-based
//! simulation ([`abm`]). The `examples/` directory has one runnable program
//! per capability; the `dgnorms` binary wraps the experiment drivers in
//! [`experiments`].

pub mod error;
pub mod norms;
pub mod setting;
mod linalg;
pub mod reputation_chain;
pub mod payoffs;
pub mod dynamics;
pub mod fairness;
pub mod abm;
pub mod config;
pub mod experiments;
pub mod output;
pub mod validate;

pub use error::{Error, Result};
pub use norms::{SocialNorm, Strategy};
pub use setting::{PairwiseSetting, Params, RoleAssignment};
