//! Forcing data of the worked examples.

use interval::{parse_interval, CInterval, Interval};

use crate::burgers::{Expr, FieldParams, ForcingSpec, NonautMode};
use crate::Result;

fn dec(s: &str) -> Interval {
    parse_interval(s).expect("valid decimal literal")
}

fn c(re: &str, im: &str) -> CInterval {
    CInterval::new(dec(re), dec(im))
}

/// `sin t · (re + i im)` on mode `k`.
fn sin_mode(k: usize, re: &str, im: &str) -> NonautMode {
    NonautMode {
        k,
        re: Expr::scaled_sin(dec(re)),
        im: Expr::scaled_sin(dec(im)),
    }
}

/// Time-dependent dominant forcing with `ν = 2` and a `5·10⁻⁵` square
/// on the first three autonomous modes.
pub fn periodic_forcing() -> ForcingSpec {
    ForcingSpec {
        nu: Interval::point(2.0),
        autonomous: vec![c("0", "0.3"), c("0.35", "-0.35"), c("-0.4", "0.4")],
        perturbation: 5e-5,
        nonautonomous: vec![
            sin_mode(1, "-0.3", "0"),
            sin_mode(2, "0.35", "-0.35"),
            sin_mode(3, "-0.4", "0.4"),
        ],
        t_p: Some(ForcingSpec::two_pi()),
    }
}

/// Time-independent dominant forcing with `ν ∈ [2, 2.1]` and a `0.015`
/// square on the first three modes.
pub fn autonomous_forcing() -> ForcingSpec {
    ForcingSpec {
        nu: Interval::new(2.0, 2.1),
        autonomous: vec![c("0", "0"), c("0.8", "0"), c("0", "1")],
        perturbation: 0.015,
        nonautonomous: Vec::new(),
        t_p: None,
    }
}

/// `α = 1/2`, the mean `∫u dx = π`.
pub fn half() -> Interval {
    Interval::point(0.5)
}

pub fn periodic_field(m: usize, big_m: usize) -> Result<FieldParams> {
    FieldParams::new(periodic_forcing(), m, big_m, half())
}

pub fn autonomous_field(m: usize, big_m: usize) -> Result<FieldParams> {
    FieldParams::new(autonomous_forcing(), m, big_m, half())
}
