use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::round::*;
use crate::IntervalError;

/// Closed real interval `[lo, hi]` with outward-rounded arithmetic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    /// Builds `[lo, hi]`. Panics on NaN or reversed endpoints.
    pub fn new(lo: f64, hi: f64) -> Self {
        Self::try_new(lo, hi).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn try_new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_nan() || hi.is_nan() {
            return Err(IntervalError::Domain("NaN endpoint".into()));
        }
        if lo > hi {
            return Err(IntervalError::Domain(format!("reversed endpoints [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub const fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    /// Symmetric interval `[-r, r]`.
    pub fn sym(r: f64) -> Self {
        let r = r.abs();
        Self::new(-r, r)
    }

    /// `c ± r` rounded outward.
    pub fn centered(c: f64, r: f64) -> Self {
        let r = r.abs();
        Self::new(sub_down(c, r), add_up(c, r))
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        if self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY {
            return 0.0;
        }
        if self.lo == f64::NEG_INFINITY {
            return f64::MIN;
        }
        if self.hi == f64::INFINITY {
            return f64::MAX;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Upper bound of the radius about `mid()`.
    pub fn rad(&self) -> f64 {
        let m = self.mid();
        sub_up(m, self.lo).max(sub_up(self.hi, m))
    }

    pub fn width(&self) -> f64 {
        sub_up(self.hi, self.lo)
    }

    /// Largest absolute value.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value.
    pub fn mig(&self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Intersection, or `None` when the intervals are disjoint.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn subset(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `self ⊂ int(other)` with strict inequalities at both ends.
    pub fn interior_subset(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    /// Same midpoint, radius scaled by `c`.
    pub fn inflate(&self, c: f64) -> Interval {
        let m = self.mid();
        let r = mul_up(self.rad(), c.abs());
        let out = Interval::new(sub_down(m, r), add_up(m, r));
        if c >= 1.0 {
            out.hull(self)
        } else {
            out
        }
    }

    /// Adds `[-r, r]`.
    pub fn widen(&self, r: f64) -> Interval {
        let r = r.abs();
        Interval::new(sub_down(self.lo, r), add_up(self.hi, r))
    }

    pub fn abs(&self) -> Interval {
        Interval::new(self.mig(), self.mag())
    }

    pub fn max(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.max(other.hi))
    }

    pub fn min(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.min(other.hi))
    }

    pub fn sqr(&self) -> Interval {
        let a = self.mig();
        let b = self.mag();
        Interval::new(mul_down(a, a), mul_up(b, b))
    }

    pub fn sqrt(&self) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::Domain(format!("sqrt of {self}")));
        }
        Ok(Interval::new(sqrt_down(self.lo), sqrt_up(self.hi)))
    }

    pub fn recip(&self) -> Result<Interval, IntervalError> {
        Interval::ONE.checked_div(self)
    }

    /// Division; fails when the divisor contains zero.
    pub fn checked_div(&self, b: &Interval) -> Result<Interval, IntervalError> {
        if b.contains(0.0) {
            return Err(IntervalError::Domain(format!("division by {b}")));
        }
        let c = [
            (self.lo, b.lo),
            (self.lo, b.hi),
            (self.hi, b.lo),
            (self.hi, b.hi),
        ];
        let lo = c.iter().map(|&(x, y)| div_down(x, y)).fold(f64::INFINITY, f64::min);
        let hi = c.iter().map(|&(x, y)| div_up(x, y)).fold(f64::NEG_INFINITY, f64::max);
        Ok(Interval::new(lo, hi))
    }

    /// Division by a nonzero scalar.
    pub fn div_f64(&self, b: f64) -> Interval {
        assert!(b != 0.0 && !b.is_nan(), "division by {b}");
        if b > 0.0 {
            Interval::new(div_down(self.lo, b), div_up(self.hi, b))
        } else {
            Interval::new(div_down(self.hi, b), div_up(self.lo, b))
        }
    }

    pub fn powi(&self, n: u32) -> Interval {
        match n {
            0 => Interval::ONE,
            1 => *self,
            _ if n % 2 == 0 => self.powi(n / 2).sqr(),
            _ => self.powi(n - 1) * *self,
        }
    }

    pub fn exp(&self) -> Interval {
        let lo = pad_down(self.lo.exp()).max(0.0);
        let hi = pad_up(self.hi.exp());
        Interval::new(lo, hi)
    }

    /// `e^x - 1`, accurate near zero.
    pub fn exp_m1(&self) -> Interval {
        let lo = pad_down(self.lo.exp_m1()).max(-1.0);
        let hi = pad_up(self.hi.exp_m1());
        Interval::new(lo, hi)
    }

    pub fn ln(&self) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 || self.hi <= 0.0 {
            return Err(IntervalError::Domain(format!("ln of {self}")));
        }
        let lo = if self.lo == 0.0 {
            f64::NEG_INFINITY
        } else {
            pad_down(self.lo.ln())
        };
        Ok(Interval::new(lo, pad_up(self.hi.ln())))
    }

    /// `x^s` for `x ≥ 0`, computed as `exp(s ln x)`.
    pub fn powf(&self, s: &Interval) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::Domain(format!("power of {self}")));
        }
        if self.hi == 0.0 {
            return if s.lo > 0.0 {
                Ok(Interval::ZERO)
            } else {
                Err(IntervalError::Domain("0 to a nonpositive power".into()))
            };
        }
        if self.lo == 0.0 {
            if s.lo <= 0.0 {
                return Err(IntervalError::Domain("0 to a nonpositive power".into()));
            }
            let top = Interval::new(self.hi, self.hi).powf(s)?;
            let small = Interval::new(f64::MIN_POSITIVE, self.hi).powf(s)?;
            return Ok(Interval::new(0.0, top.hi.max(small.hi)));
        }
        Ok((*s * self.ln()?).exp())
    }

    pub fn cos(&self) -> Interval {
        trig_range(self, 0.0)
    }

    pub fn sin(&self) -> Interval {
        trig_range(self, 0.5)
    }

    fn from_raw(lo: f64, hi: f64) -> Interval {
        Interval { lo, hi }
    }
}

/// Enclosure of π.
pub fn pi() -> Interval {
    Interval::new(std::f64::consts::PI, std::f64::consts::PI.next_up())
}

/// Range of `cos(x - shift·π)` over `x`; `shift = 0.5` gives `sin`.
fn trig_range(x: &Interval, shift: f64) -> Interval {
    if !x.is_finite() {
        return Interval::new(-1.0, 1.0);
    }
    let two_pi = pi() * 2.0;
    if x.width() >= two_pi.lo() {
        return Interval::new(-1.0, 1.0);
    }
    let eval = |v: f64| -> (f64, f64) {
        let y = if shift == 0.0 { v.cos() } else { v.sin() };
        (pad_down(y).max(-1.0), pad_up(y).min(1.0))
    };
    let (a_lo, a_hi) = eval(x.lo);
    let (b_lo, b_hi) = eval(x.hi);
    let mut lo = a_lo.min(b_lo);
    let mut hi = a_hi.max(b_hi);
    // critical points: maxima at shift·π + 2πk, minima at (shift + 1)·π + 2πk
    let k0 = (x.lo / two_pi.hi()).floor() as i64 - 2;
    let k1 = (x.hi / two_pi.lo()).ceil() as i64 + 2;
    for k in k0..=k1 {
        let base = pi() * (2.0 * k as f64 + shift);
        if base.intersect(x).is_some() {
            hi = 1.0;
        }
        let trough = pi() * (2.0 * k as f64 + shift + 1.0);
        if trough.intersect(x).is_some() {
            lo = -1.0;
        }
    }
    Interval::new(lo, hi)
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, b: Interval) -> Interval {
        Interval::from_raw(add_down(self.lo, b.lo), add_up(self.hi, b.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, b: Interval) -> Interval {
        Interval::from_raw(sub_down(self.lo, b.hi), sub_up(self.hi, b.lo))
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval::from_raw(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, b: Interval) -> Interval {
        let (a0, a1, b0, b1) = (self.lo, self.hi, b.lo, b.hi);
        if a0 >= 0.0 && b0 >= 0.0 {
            return Interval::from_raw(mul_down(a0, b0), mul_up(a1, b1));
        }
        if a1 <= 0.0 && b1 <= 0.0 {
            return Interval::from_raw(mul_down(a1, b1), mul_up(a0, b0));
        }
        if a0 >= 0.0 && b1 <= 0.0 {
            return Interval::from_raw(mul_down(a1, b0), mul_up(a0, b1));
        }
        if a1 <= 0.0 && b0 >= 0.0 {
            return Interval::from_raw(mul_down(a0, b1), mul_up(a1, b0));
        }
        let lo = mul_down(a0, b0)
            .min(mul_down(a0, b1))
            .min(mul_down(a1, b0))
            .min(mul_down(a1, b1));
        let hi = mul_up(a0, b0)
            .max(mul_up(a0, b1))
            .max(mul_up(a1, b0))
            .max(mul_up(a1, b1));
        Interval::from_raw(lo, hi)
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, b: f64) -> Interval {
        self + Interval::point(b)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, b: f64) -> Interval {
        self - Interval::point(b)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, b: f64) -> Interval {
        self * Interval::point(b)
    }
}

impl Mul<Interval> for f64 {
    type Output = Interval;
    fn mul(self, b: Interval) -> Interval {
        Interval::point(self) * b
    }
}

impl AddAssign for Interval {
    fn add_assign(&mut self, b: Interval) {
        *self = *self + b;
    }
}

impl SubAssign for Interval {
    fn sub_assign(&mut self, b: Interval) {
        *self = *self - b;
    }
}

impl MulAssign for Interval {
    fn mul_assign(&mut self, b: Interval) {
        *self = *self * b;
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}
