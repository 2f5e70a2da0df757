//! Directed rounding by nudging.
//!
//! Every routine computes the round-to-nearest result, recovers the exact
//! rounding error with an error-free transform and steps one ulp only when
//! that error points the wrong way.

const TINY: f64 = 1e-290;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn overflow_down(s: f64) -> f64 {
    if s == f64::INFINITY {
        f64::MAX
    } else {
        s
    }
}

#[inline]
fn overflow_up(s: f64) -> f64 {
    if s == f64::NEG_INFINITY {
        f64::MIN
    } else {
        s
    }
}

#[inline]
pub fn add_down(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if !s.is_finite() {
        if a.is_infinite() || b.is_infinite() {
            return s;
        }
        return overflow_down(s);
    }
    if e < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub fn add_up(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if !s.is_finite() {
        if a.is_infinite() || b.is_infinite() {
            return s;
        }
        return overflow_up(s);
    }
    if e > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

#[inline]
pub fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

#[inline]
pub fn mul_down(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if !p.is_finite() {
        if a.is_infinite() || b.is_infinite() {
            return p;
        }
        return overflow_down(p);
    }
    if p.abs() < TINY {
        return p.next_down();
    }
    let e = a.mul_add(b, -p);
    if e < 0.0 {
        p.next_down()
    } else {
        p
    }
}

#[inline]
pub fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if !p.is_finite() {
        if a.is_infinite() || b.is_infinite() {
            return p;
        }
        return overflow_up(p);
    }
    if p.abs() < TINY {
        return p.next_up();
    }
    let e = a.mul_add(b, -p);
    if e > 0.0 {
        p.next_up()
    } else {
        p
    }
}

/// Sign of the exact `a / b - q` for finite nonzero operands.
#[inline]
fn div_residual_sign(a: f64, b: f64, q: f64) -> f64 {
    let r = (-q).mul_add(b, a);
    r * b.signum()
}

#[inline]
pub fn div_down(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if !q.is_finite() {
        if a.is_infinite() {
            return q;
        }
        return overflow_down(q);
    }
    if b.is_infinite() {
        return 0.0;
    }
    if q.abs() < TINY || a.abs() < TINY {
        return q.next_down();
    }
    if div_residual_sign(a, b, q) < 0.0 {
        q.next_down()
    } else {
        q
    }
}

#[inline]
pub fn div_up(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if !q.is_finite() {
        if a.is_infinite() {
            return q;
        }
        return overflow_up(q);
    }
    if b.is_infinite() {
        return 0.0;
    }
    if q.abs() < TINY || a.abs() < TINY {
        return q.next_up();
    }
    if div_residual_sign(a, b, q) > 0.0 {
        q.next_up()
    } else {
        q
    }
}

#[inline]
pub fn sqrt_down(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let s = x.sqrt();
    if !s.is_finite() {
        return s;
    }
    if x < TINY {
        return s.next_down().max(0.0);
    }
    let r = (-s).mul_add(s, x);
    if r < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub fn sqrt_up(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let s = x.sqrt();
    if !s.is_finite() {
        return s;
    }
    if x < TINY {
        return s.next_up();
    }
    let r = (-s).mul_add(s, x);
    if r > 0.0 {
        s.next_up()
    } else {
        s
    }
}

/// Pads a libm result by two ulps downward.
#[inline]
pub fn pad_down(x: f64) -> f64 {
    if x.is_infinite() {
        return if x > 0.0 { f64::MAX } else { x };
    }
    x.next_down().next_down()
}

/// Pads a libm result by two ulps upward.
#[inline]
pub fn pad_up(x: f64) -> f64 {
    if x.is_infinite() {
        return if x < 0.0 { f64::MIN } else { x };
    }
    x.next_up().next_up()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nudges_only_when_inexact() {
        assert_eq!(add_down(1.0, 2.0), 3.0);
        assert_eq!(add_up(1.0, 2.0), 3.0);
        assert!(add_down(0.1, 0.2) < add_up(0.1, 0.2));
        assert_eq!(mul_down(3.0, 4.0), 12.0);
        assert!(div_down(1.0, 3.0) < div_up(1.0, 3.0));
        assert_eq!(sqrt_down(4.0), 2.0);
        assert!(sqrt_down(2.0) < sqrt_up(2.0));
    }

    #[test]
    fn overflow_stays_finite_in_safe_direction() {
        assert_eq!(add_down(f64::MAX, f64::MAX), f64::MAX);
        assert_eq!(add_up(f64::MAX, f64::MAX), f64::INFINITY);
        assert_eq!(mul_down(1e300, 1e300), f64::MAX);
    }
}
