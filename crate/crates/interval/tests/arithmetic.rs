use interval::{pi, CInterval, Interval};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};
use proptest::prelude::*;

fn exact(x: f64) -> BigRational {
    BigRational::from_f64(x).expect("finite")
}

fn encloses(iv: Interval, r: &BigRational) -> bool {
    exact(iv.lo()) <= *r && *r <= exact(iv.hi())
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6f64..1e6,
        -1.0f64..1.0,
        any::<f64>().prop_filter("finite, moderate", |x| x.is_finite() && x.abs() < 1e150 && (x.abs() > 1e-150 || *x == 0.0)),
    ]
}

fn interval() -> impl Strategy<Value = Interval> {
    (finite(), finite()).prop_map(|(a, b)| Interval::new(a.min(b), a.max(b)))
}

/// An interval together with one strictly wider and one point inside.
fn nested() -> impl Strategy<Value = (Interval, Interval)> {
    (interval(), 0.0f64..10.0, 0.0f64..10.0).prop_map(|(a, l, r)| {
        let outer = Interval::new(a.lo() - l, a.hi() + r);
        (a, outer)
    })
}

#[test]
fn spec_examples() {
    assert_eq!(Interval::new(1.0, 2.0) + Interval::new(3.0, 4.0), Interval::new(4.0, 6.0));
    assert_eq!(Interval::new(-1.0, 2.0) * Interval::new(3.0, 4.0), Interval::new(-4.0, 8.0));
    let third = Interval::ONE.checked_div(&Interval::point(3.0)).unwrap();
    assert!(third.lo() < third.hi());
    assert!(encloses(third, &BigRational::new(BigInt::from(1), BigInt::from(3))));
    assert!(Interval::new(1.0, 2.0).subset(&Interval::new(0.0, 3.0)));
    assert!(!Interval::new(0.0, 3.0).interior_subset(&Interval::new(0.0, 3.0)));
    assert_eq!(Interval::new(-1.0, 1.0).inflate(1.01), Interval::new(-1.01, 1.01));
}

#[test]
fn division_by_zero_containing_interval_is_an_error() {
    assert!(Interval::ONE.checked_div(&Interval::new(-1.0, 1.0)).is_err());
    assert!(Interval::ONE.checked_div(&Interval::ZERO).is_err());
}

#[test]
fn disjoint_intersection_is_empty_signal() {
    assert!(Interval::new(0.0, 1.0).intersect(&Interval::new(2.0, 3.0)).is_none());
    assert_eq!(
        Interval::new(0.0, 2.0).intersect(&Interval::new(1.0, 3.0)),
        Some(Interval::new(1.0, 2.0))
    );
}

#[test]
fn pi_enclosure() {
    let p = pi();
    assert!(p.lo() < p.hi());
    let digits: Interval = "3.14159265358979323846264338327950288".parse().unwrap();
    assert!(p.intersect(&digits).is_some());
}

#[test]
fn transcendental_reference_values() {
    let cases: [(Interval, &str); 5] = [
        (Interval::ONE.exp(), "2.71828182845904523536028747135266"),
        (Interval::point(2.0).ln().unwrap(), "0.693147180559945309417232121458177"),
        (Interval::ONE.sin(), "0.841470984807896506652502321630299"),
        (Interval::ONE.cos(), "0.540302305868139717400936607442977"),
        (Interval::point(1e-10).exp_m1(), "1.00000000005000000000166666666671e-10"),
    ];
    for (iv, reference) in cases {
        let r: Interval = reference.parse().unwrap();
        assert!(iv.intersect(&r).is_some(), "{iv} vs {reference}");
        assert!(iv.width() < 1e-14 * iv.mag().max(1e-300) * 10.0 + 1e-300);
    }
}

#[test]
fn trig_ranges_include_extrema() {
    let c = Interval::new(3.0, 3.3).cos();
    assert_eq!(c.lo(), -1.0);
    let s = Interval::new(1.5, 1.6).sin();
    assert_eq!(s.hi(), 1.0);
    let s = Interval::new(4.6, 4.8).sin();
    assert_eq!(s.lo(), -1.0);
    assert_eq!(Interval::new(0.0, 7.0).sin(), Interval::new(-1.0, 1.0));
    let s = Interval::new(0.1, 0.2).sin();
    assert!(s.hi() < 0.2 && s.lo() > 0.09);
}

#[test]
fn complex_product_encloses_exact_product() {
    let a = CInterval::point(1.0, 2.0);
    let b = CInterval::point(3.0, -1.0);
    let p = a * b;
    assert!(p.contains(5.0, 5.0));
    assert!(CInterval::point(0.0, 1.0).mul_i().contains(-1.0, 0.0));
}

#[test]
fn serde_round_trip_is_exact() {
    for x in [0.1, 1.0 / 3.0, -2.5e-300, 123456.789] {
        let iv = Interval::new(x, x.next_up());
        let s = serde_json::to_string(&iv).unwrap();
        let back: Interval = serde_json::from_str(&s).unwrap();
        assert_eq!(iv, back, "{s}");
    }
    let wide = Interval::new(f64::NEG_INFINITY, 1.0);
    let back: Interval = serde_json::from_str(&serde_json::to_string(&wide).unwrap()).unwrap();
    assert_eq!(wide, back);
}

#[test]
fn string_literals_are_enclosed() {
    let iv: Interval = serde_json::from_str(r#""0.1""#).unwrap();
    assert!(iv.lo() < 0.1 && 0.1 < iv.hi());
    let pair: Interval = serde_json::from_str(r#"["0.3", "0.5"]"#).unwrap();
    assert!(pair.lo() < 0.3 && pair.hi() == 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn point_evaluation_add(x in finite(), y in finite()) {
        let r = Interval::point(x) + Interval::point(y);
        prop_assert!(encloses(r, &(exact(x) + exact(y))));
    }

    #[test]
    fn point_evaluation_sub(x in finite(), y in finite()) {
        let r = Interval::point(x) - Interval::point(y);
        prop_assert!(encloses(r, &(exact(x) - exact(y))));
    }

    #[test]
    fn point_evaluation_mul(x in finite(), y in finite()) {
        let r = Interval::point(x) * Interval::point(y);
        prop_assert!(encloses(r, &(exact(x) * exact(y))));
    }

    #[test]
    fn point_evaluation_div(x in finite(), y in finite()) {
        prop_assume!(y != 0.0);
        let r = Interval::point(x).checked_div(&Interval::point(y)).unwrap();
        prop_assert!(encloses(r, &(exact(x) / exact(y))));
    }

    #[test]
    fn point_evaluation_sqrt(x in 0.0f64..1e12) {
        let r = Interval::point(x).sqrt().unwrap();
        let ex = exact(x);
        prop_assert!(exact(r.lo()) * exact(r.lo()) <= ex);
        prop_assert!(exact(r.hi()) * exact(r.hi()) >= ex);
    }

    #[test]
    fn monotone_add((a, a2) in nested(), (b, b2) in nested()) {
        prop_assert!((a + b).subset(&(a2 + b2)));
    }

    #[test]
    fn monotone_sub((a, a2) in nested(), (b, b2) in nested()) {
        prop_assert!((a - b).subset(&(a2 - b2)));
    }

    #[test]
    fn monotone_mul((a, a2) in nested(), (b, b2) in nested()) {
        prop_assert!((a * b).subset(&(a2 * b2)));
    }

    #[test]
    fn monotone_div((a, a2) in nested(), lo in 1e-3f64..1e3, w in 0.0f64..1e3, l in 0.0f64..1.0, r in 0.0f64..10.0, neg in any::<bool>()) {
        let sign = if neg { -1.0 } else { 1.0 };
        let b = Interval::new(lo, lo + w) * sign;
        let b2 = Interval::new(lo * (1.0 - l) + 1e-300, lo + w + r) * sign;
        let small = a.checked_div(&b).unwrap();
        let big = a2.checked_div(&b2).unwrap();
        prop_assert!(small.subset(&big));
    }

    #[test]
    fn interval_ops_contain_sampled_points(a in interval(), b in interval(), u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let x = a.lo() + u * (a.hi() - a.lo());
        let y = b.lo() + v * (b.hi() - b.lo());
        prop_assume!(a.contains(x) && b.contains(y));
        let (ex, ey) = (exact(x), exact(y));
        prop_assert!(encloses(a + b, &(ex.clone() + ey.clone())));
        prop_assert!(encloses(a - b, &(ex.clone() - ey.clone())));
        prop_assert!(encloses(a * b, &(ex.clone() * ey.clone())));
        if !b.contains(0.0) && !ey.is_zero() {
            prop_assert!(encloses(a.checked_div(&b).unwrap(), &(ex / ey)));
        }
    }

    #[test]
    fn transcendentals_contain_sampled_points(lo in -20.0f64..20.0, w in 0.0f64..3.0, u in 0.0f64..1.0) {
        let a = Interval::new(lo, lo + w);
        let x = (lo + u * w).clamp(a.lo(), a.hi());
        prop_assert!(a.exp().contains(x.exp()));
        prop_assert!(a.sin().contains(x.sin()));
        prop_assert!(a.cos().contains(x.cos()));
        if a.lo() > 0.0 {
            prop_assert!(a.ln().unwrap().contains(x.ln()));
        }
    }

    #[test]
    fn decimal_round_trip(x in finite(), w in 0.0f64..1.0) {
        let iv = Interval::new(x, x + w);
        let printed = format!("[{:?}, {:?}]", iv.lo(), iv.hi());
        let back: Interval = printed.parse().unwrap();
        prop_assert!(iv.subset(&back));
    }
}
