//! Decimal parsing and printing with enclosure guarantees.

use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{CInterval, Interval, IntervalError};

/// Normalized decimal digits: value = 0.d₁d₂… × 10^exp, sign separate.
fn normalize(s: &str) -> Option<(bool, String, i64)> {
    let s = s.trim();
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(p) => (&body[..p], body[p + 1..].parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (int, frac) = match mant.find('.') {
        Some(p) => (&mant[..p], &mant[p + 1..]),
        None => (mant, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: String = format!("{int}{frac}");
    let lead = digits.bytes().take_while(|&c| c == b'0').count();
    let trimmed = digits[lead..].trim_end_matches('0').to_string();
    if trimmed.is_empty() {
        return Some((neg, String::new(), 0));
    }
    let point = int.len() as i64 - lead as i64 + exp;
    Some((neg, trimmed, point))
}

/// True when `x` equals the decimal `s` exactly.
fn is_exact(x: f64, s: &str) -> bool {
    let Some(want) = normalize(s) else {
        return false;
    };
    if x == 0.0 {
        return want.1.is_empty();
    }
    // Rust prints the exact binary expansion when enough digits are requested.
    let exact = format!("{:.1100e}", x);
    normalize(&exact).is_some_and(|got| got == want)
}

/// Parses a decimal literal into the tightest enclosure available.
pub fn parse_interval_endpoint(s: &str) -> Result<Interval, IntervalError> {
    let x = f64::from_str(s.trim()).map_err(|e| IntervalError::Parse(format!("{s:?}: {e}")))?;
    if x.is_nan() {
        return Err(IntervalError::Parse(format!("{s:?} is NaN")));
    }
    if x.is_infinite() {
        let t = s.trim().to_ascii_lowercase();
        if t.contains("inf") {
            return Ok(Interval::point(x));
        }
        return Ok(if x > 0.0 {
            Interval::new(f64::MAX, f64::INFINITY)
        } else {
            Interval::new(f64::NEG_INFINITY, f64::MIN)
        });
    }
    if is_exact(x, s) {
        Ok(Interval::point(x))
    } else {
        Ok(Interval::new(x.next_down(), x.next_up()))
    }
}

/// Parses `"x"` or `"[lo, hi]"`.
pub fn parse_interval(s: &str) -> Result<Interval, IntervalError> {
    let t = s.trim();
    if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let mut parts = inner.split(',');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(IntervalError::Parse(format!("expected [lo, hi], got {s:?}")));
        };
        let lo = parse_interval_endpoint(a)?;
        let hi = parse_interval_endpoint(b)?;
        return Interval::try_new(lo.lo(), hi.hi());
    }
    parse_interval_endpoint(t)
}

impl FromStr for Interval {
    type Err = IntervalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_interval(s)
    }
}

/// Shortest round-trip decimal for an endpoint.
pub fn endpoint_string(x: f64) -> String {
    format!("{x:?}")
}

/// Rounds `x` down to `digits` significant decimal digits.
pub fn format_down(x: f64, digits: usize) -> String {
    format_directed(x, digits, false)
}

/// Rounds `x` up to `digits` significant decimal digits.
pub fn format_up(x: f64, digits: usize) -> String {
    format_directed(x, digits, true)
}

fn format_directed(x: f64, digits: usize, up: bool) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let prec = digits.max(1) - 1;
    let safe = |cand: &str| {
        parse_interval_endpoint(cand)
            .map(|iv| if up { iv.lo() >= x } else { iv.hi() <= x })
            .unwrap_or(false)
    };
    let s = format!("{x:.prec$e}");
    if safe(&s) {
        return tidy(&s);
    }
    let (mant, exp) = s.split_once('e').expect("exponent form");
    let mut m: f64 = mant.parse().expect("mantissa");
    let unit = 10f64.powi(-(prec as i32));
    for _ in 0..4 {
        m += if up { unit } else { -unit };
        let cand = format!("{m:.prec$}e{exp}");
        if safe(&cand) {
            return tidy(&cand);
        }
    }
    endpoint_string(x)
}

fn tidy(s: &str) -> String {
    match s.parse::<f64>() {
        Ok(v) if (1e-4..1e6).contains(&v.abs()) => {
            let (mant, exp) = s.split_once('e').unwrap_or((s, "0"));
            let exp: i32 = exp.parse().unwrap_or(0);
            let (neg, mant) = mant.strip_prefix('-').map_or((false, mant), |m| (true, m));
            let digits: String = mant.chars().filter(|c| *c != '.').collect();
            let point = 1 + exp;
            let body = if point <= 0 {
                format!("0.{}{}", "0".repeat((-point) as usize), digits)
            } else if point as usize >= digits.len() {
                format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
            } else {
                format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
            };
            let body = if body.contains('.') {
                body.trim_end_matches('0').trim_end_matches('.').to_string()
            } else {
                body
            };
            if neg {
                format!("-{body}")
            } else {
                body
            }
        }
        _ => s.to_string(),
    }
}

/// Finite endpoints are written as numbers, which read back exactly;
/// decimal strings are read as enclosures of the literal.
fn endpoint_repr(x: f64) -> StrOrNum {
    if x.is_finite() {
        StrOrNum::Num(x)
    } else {
        StrOrNum::Str(endpoint_string(x))
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        [endpoint_repr(self.lo()), endpoint_repr(self.hi())].serialize(ser)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntervalRepr {
    Pair([StrOrNum; 2]),
    Single(StrOrNum),
}

#[derive(Deserialize, Serialize)]
#[serde(untagged)]
enum StrOrNum {
    Str(String),
    Num(f64),
}

impl StrOrNum {
    fn enclosure(&self) -> Result<Interval, IntervalError> {
        match self {
            StrOrNum::Str(s) => parse_interval(s),
            StrOrNum::Num(x) => Interval::try_new(*x, *x),
        }
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = IntervalRepr::deserialize(de)?;
        let iv = match repr {
            IntervalRepr::Pair([a, b]) => {
                let a = a.enclosure().map_err(D::Error::custom)?;
                let b = b.enclosure().map_err(D::Error::custom)?;
                Interval::try_new(a.lo(), b.hi())
            }
            IntervalRepr::Single(a) => a.enclosure(),
        };
        iv.map_err(D::Error::custom)
    }
}

impl Serialize for CInterval {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("CInterval", 2)?;
        st.serialize_field("re", &self.re)?;
        st.serialize_field("im", &self.im)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CInterval {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Repr {
            re: Interval,
            #[serde(default = "zero")]
            im: Interval,
        }
        fn zero() -> Interval {
            Interval::ZERO
        }
        let r = Repr::deserialize(de)?;
        Ok(CInterval::new(r.re, r.im))
    }
}
