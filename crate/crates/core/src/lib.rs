//! Certified globally attracting periodic orbits for the forced viscous
//! Burgers equation on the circle.
//!
//! The pipeline has three stages: an absorbing set from energy estimates,
//! a trapping isolating segment with a logarithmic-norm contraction bound,
//! and rigorous capture of the absorbing set into the segment.

pub mod absorbing;
pub mod burgers;
pub mod integrator;
pub mod lognorm;
pub mod modes;
pub mod presets;
pub mod proof;
pub mod segment;

pub use interval::{CInterval, IMatrix, Interval};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScbError {
    #[error(transparent)]
    Interval(#[from] interval::IntervalError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parameter error: {0}")]
    Param(String),
    #[error("integration blew up at step {step}: {reason}")]
    Blowup { step: usize, reason: String },
    #[error("newton seed failed: {0}")]
    Seed(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = ScbError> = std::result::Result<T, E>;
