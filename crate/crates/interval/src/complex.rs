use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::round::{add_up, mul_up, sqrt_up};
use crate::Interval;

/// Axis-aligned rectangle `re × im` in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CInterval {
    pub re: Interval,
    pub im: Interval,
}

impl CInterval {
    pub const ZERO: CInterval = CInterval {
        re: Interval::ZERO,
        im: Interval::ZERO,
    };

    pub fn new(re: Interval, im: Interval) -> Self {
        Self { re, im }
    }

    pub fn point(re: f64, im: f64) -> Self {
        Self::new(Interval::point(re), Interval::point(im))
    }

    pub fn real(re: Interval) -> Self {
        Self::new(re, Interval::ZERO)
    }

    /// Square `[-r, r] × [-r, r]`, which contains the disc `|z| ≤ r`.
    pub fn disc_box(r: f64) -> Self {
        Self::new(Interval::sym(r), Interval::sym(r))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re, -self.im)
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        Self::new(-self.im, self.re)
    }

    pub fn scale(&self, s: Interval) -> Self {
        Self::new(self.re * s, self.im * s)
    }

    /// Upper bound of `|z|` over the rectangle.
    pub fn mag(&self) -> f64 {
        let a = self.re.mag();
        let b = self.im.mag();
        sqrt_up(add_up(mul_up(a, a), mul_up(b, b)))
    }

    /// Lower bound of `|z|` over the rectangle.
    pub fn mig(&self) -> f64 {
        self.norm_sqr().sqrt().map(|s| s.lo()).unwrap_or(0.0)
    }

    /// Enclosure of `|z|²`.
    pub fn norm_sqr(&self) -> Interval {
        self.re.sqr() + self.im.sqr()
    }

    pub fn mid(&self) -> (f64, f64) {
        (self.re.mid(), self.im.mid())
    }

    pub fn mid_point(&self) -> CInterval {
        let (a, b) = self.mid();
        CInterval::point(a, b)
    }

    /// Upper bound of the modulus radius about `mid()`.
    pub fn rad(&self) -> f64 {
        let a = self.re.rad();
        let b = self.im.rad();
        sqrt_up(add_up(mul_up(a, a), mul_up(b, b)))
    }

    pub fn hull(&self, other: &CInterval) -> Self {
        Self::new(self.re.hull(&other.re), self.im.hull(&other.im))
    }

    pub fn intersect(&self, other: &CInterval) -> Option<Self> {
        Some(Self::new(
            self.re.intersect(&other.re)?,
            self.im.intersect(&other.im)?,
        ))
    }

    pub fn subset(&self, other: &CInterval) -> bool {
        self.re.subset(&other.re) && self.im.subset(&other.im)
    }

    pub fn interior_subset(&self, other: &CInterval) -> bool {
        self.re.interior_subset(&other.re) && self.im.interior_subset(&other.im)
    }

    pub fn inflate(&self, c: f64) -> Self {
        Self::new(self.re.inflate(c), self.im.inflate(c))
    }

    /// Adds the square `[-r, r]²`.
    pub fn widen(&self, r: f64) -> Self {
        Self::new(self.re.widen(r), self.im.widen(r))
    }

    pub fn contains(&self, re: f64, im: f64) -> bool {
        self.re.contains(re) && self.im.contains(im)
    }

    /// `e^{i θ}` for an interval angle.
    pub fn cis(theta: Interval) -> Self {
        Self::new(theta.cos(), theta.sin())
    }
}

impl Add for CInterval {
    type Output = CInterval;
    #[inline]
    fn add(self, b: CInterval) -> CInterval {
        CInterval::new(self.re + b.re, self.im + b.im)
    }
}

impl AddAssign for CInterval {
    #[inline]
    fn add_assign(&mut self, b: CInterval) {
        *self = *self + b;
    }
}

impl Sub for CInterval {
    type Output = CInterval;
    #[inline]
    fn sub(self, b: CInterval) -> CInterval {
        CInterval::new(self.re - b.re, self.im - b.im)
    }
}

impl Neg for CInterval {
    type Output = CInterval;
    fn neg(self) -> CInterval {
        CInterval::new(-self.re, -self.im)
    }
}

impl Mul for CInterval {
    type Output = CInterval;
    #[inline]
    fn mul(self, b: CInterval) -> CInterval {
        CInterval::new(
            self.re * b.re - self.im * b.im,
            self.re * b.im + self.im * b.re,
        )
    }
}

impl Mul<Interval> for CInterval {
    type Output = CInterval;
    fn mul(self, s: Interval) -> CInterval {
        self.scale(s)
    }
}

impl Mul<f64> for CInterval {
    type Output = CInterval;
    fn mul(self, s: f64) -> CInterval {
        self.scale(Interval::point(s))
    }
}

impl std::iter::Sum for CInterval {
    fn sum<I: Iterator<Item = CInterval>>(iter: I) -> CInterval {
        iter.fold(CInterval::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for CInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + i{}", self.re, self.im)
    }
}
