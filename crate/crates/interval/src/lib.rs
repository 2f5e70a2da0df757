//! Outward-rounded interval arithmetic.
//!
//! Reals ([`Interval`]), complex rectangles ([`CInterval`]) and dense
//! matrices ([`IMatrix`]) with a verified inverse enclosure.

mod complex;
mod decimal;
mod interval;
mod matrix;
pub mod round;

pub use complex::CInterval;
pub use decimal::{endpoint_string, format_down, format_up, parse_interval};
pub use interval::{pi, Interval};
pub use matrix::{rigorous_inverse, IMatrix};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntervalError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("parse error: {0}")]
    Parse(String),
}
