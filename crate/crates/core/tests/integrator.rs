use burgers_scb::burgers::reference::Reference;
use burgers_scb::burgers::{FieldParams, ForcingSpec};
use burgers_scb::integrator::{step_grid, Integrator, IntegratorConfig};
use burgers_scb::modes::{GalerkinState, Tail};
use burgers_scb::presets;
use burgers_scb::{CInterval, Interval};
use nalgebra::Complex;
use proptest::prelude::*;

fn linear_field(nu: f64, m: usize, big_m: usize) -> FieldParams {
    let forcing = ForcingSpec {
        nu: Interval::point(nu),
        autonomous: Vec::new(),
        perturbation: 0.0,
        nonautonomous: Vec::new(),
        t_p: None,
    };
    let mut f = FieldParams::new(forcing, m, big_m, Interval::ZERO).unwrap();
    f.nonlinear = false;
    f
}

fn point_state(vals: &[(f64, f64)], m: usize, a0: f64) -> GalerkinState {
    let modes = vals.iter().map(|&(a, b)| CInterval::point(a, b)).collect();
    GalerkinState::new(Interval::point(a0), modes, Tail::zero(4.0, vals.len()), m).unwrap()
}

fn inside(z: &CInterval, p: Complex<f64>) -> bool {
    z.contains(p.re, p.im)
}

#[test]
fn scalar_decay_rough_enclosure() {
    let field = linear_field(1.0, 1, 1);
    let integ = Integrator::new(&field, IntegratorConfig::default()).unwrap();
    let x = point_state(&[(1.0, 0.0)], 1, 0.0);
    let z = integ.rough_enclosure(0.0, Interval::point(0.1), &x).unwrap();
    let re = z.mode(1).re;
    assert!(re.contains(1.0) && re.contains((-0.1f64).exp()));
    assert!(re.subset(&Interval::new(0.899, 1.001)), "{re}");
}

#[test]
fn zero_field_rough_enclosure_is_a_small_inflation() {
    let field = linear_field(1.0, 1, 1);
    let integ = Integrator::new(&field, IntegratorConfig::default()).unwrap();
    let x = point_state(&[(0.0, 0.0)], 1, 0.0);
    let z = integ.rough_enclosure(0.0, Interval::point(0.1), &x).unwrap();
    assert!(z.mode(1).mag() < 1e-200);
}

#[test]
fn longer_steps_never_shrink_the_rough_enclosure() {
    let field = linear_field(1.0, 1, 1);
    let integ = Integrator::new(&field, IntegratorConfig::default()).unwrap();
    let x = point_state(&[(1.0, -0.5)], 1, 0.0);
    let short = integ.rough_enclosure(0.0, Interval::point(0.05), &x).unwrap();
    let long = integ.rough_enclosure(0.0, Interval::point(0.2), &x).unwrap();
    assert!(long.mode(1).re.lo() <= short.mode(1).re.lo());
    assert!(long.mode(1).im.hi() >= short.mode(1).im.hi());
}

#[test]
fn linear_mode_matches_the_exponential() {
    let field = linear_field(2.0, 1, 1);
    let h = 0.1;
    let cfg = IntegratorConfig {
        step: h,
        ..IntegratorConfig::default()
    };
    let integ = Integrator::new(&field, cfg).unwrap();
    let x = point_state(&[(1.0, 0.0)], 1, 0.0);
    let st = integ.step(0.0, &x).unwrap();
    let out = st.tight_out.mode(1);
    let exact = (-2.0 * h).exp();
    assert!(out.re.contains(exact), "{}", out.re);
    assert!(out.im.contains(0.0));
    // Taylor-6 remainder scale (νh)^7/7!
    let scale = (2.0 * h).powi(7) / 5040.0;
    assert!(out.re.width() <= 10.0 * scale, "width {}", out.re.width());
}

#[test]
fn tail_only_state_decays() {
    let field = linear_field(1.0, 2, 4);
    let cfg = IntegratorConfig::default();
    let integ = Integrator::new(&field, cfg.clone()).unwrap();
    let mut x = GalerkinState::zero(Interval::ZERO, 2, 4, 4.0);
    x.tail = Tail::new(1.0, 4.0, 4);
    let st = integ.step(0.0, &x).unwrap();
    let bound = (-(25.0) * cfg.step).exp() * 1.0 + 1e-12;
    assert!(st.tight_out.tail.c <= bound, "{} > {bound}", st.tight_out.tail.c);
}

fn to_c(state: &GalerkinState) -> Vec<Complex<f64>> {
    state
        .modes
        .iter()
        .map(|z| {
            let (a, b) = z.mid();
            Complex::new(a, b)
        })
        .collect()
}

/// Three dominant modes inside a 12-mode stored window: the zero-tail
/// Galerkin solution is one of the solutions of the inclusion.
#[test]
fn truncated_system_reference_stays_inside() {
    let field = presets::periodic_field(3, 12).unwrap();
    let cfg = IntegratorConfig::default();
    let integ = Integrator::new(&field, cfg.clone()).unwrap();
    let mut init = vec![(0.1, 0.1), (0.05, -0.04), (-0.02, 0.02)];
    init.resize(12, (0.0, 0.0));
    let x = point_state(&init, 3, 0.5);
    let reference = Reference::new(&field, 12);
    let (img, tube) = integ.time_shift(0.0, Interval::point(200.0 * cfg.step), &x).unwrap();
    assert_eq!(tube.len(), 200);
    let mut a = to_c(&x);
    for (i, st) in tube.iter().enumerate() {
        let next = reference.flow(st.t, st.dt.mid(), 1e-4, &a);
        for k in 1..=12 {
            assert!(inside(&st.tight_out.mode(k), next[k - 1]), "step {i} mode {k}");
            assert!(inside(&st.rough.mode(k), next[k - 1]));
            assert!(st.tight_out.mode(k).subset(&st.rough.mode(k)));
            assert!(st.tight_in.mode(k).subset(&st.rough.mode(k)));
        }
        a = next;
    }
    let cur = img;
    assert!(cur.max_rad() < 1e-2, "enclosure grew to {}", cur.max_rad());
}

#[test]
fn zero_shift_is_the_identity() {
    let field = presets::periodic_field(3, 3).unwrap();
    let integ = Integrator::new(&field, IntegratorConfig::default()).unwrap();
    let x = point_state(&[(0.1, 0.1), (0.0, 0.0), (0.0, 0.0)], 3, 0.5);
    let (img, tube) = integ.time_shift(0.0, Interval::ZERO, &x).unwrap();
    assert_eq!(img, x);
    assert!(tube.is_empty());
}

#[test]
fn two_step_shift_contains_reference_and_keeps_the_mean() {
    let field = presets::periodic_field(3, 6).unwrap();
    let cfg = IntegratorConfig::default();
    let integ = Integrator::new(&field, cfg.clone()).unwrap();
    let mut x = point_state(&[(0.1, 0.1), (0.05, -0.04), (-0.02, 0.02), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)], 3, 0.5);
    x.tail = Tail::new(1e-4, 4.0, 6);
    let (img, tube) = integ.time_shift(0.3, Interval::point(2.0 * cfg.step), &x).unwrap();
    assert_eq!(tube.len(), 2);
    assert_eq!(img.a0, x.a0);
    let reference = Reference::new(&field, 6);
    let end = reference.flow(0.3, 2.0 * cfg.step, 1e-4, &to_c(&x));
    for k in 1..=6 {
        assert!(inside(&img.mode(k), end[k - 1]), "mode {k}");
    }
    for w in tube.windows(2) {
        assert!(w[0].tight_out.subset(&w[1].tight_in));
    }
}

#[test]
fn grid_lands_on_the_period() {
    let tp = ForcingSpec::two_pi();
    let grid = step_grid(0.0, tp, 0.005).unwrap();
    assert_eq!(grid.len(), 1257);
    let (t, dt) = grid[grid.len() - 1];
    let end = Interval::point(t) + dt;
    assert!(end.subset(&tp.widen(1e-15)));
    assert!(grid.iter().all(|(_, dt)| dt.lo() > 0.0));
}

#[test]
fn shifted_start_uses_the_same_period_samples() {
    let field = presets::periodic_field(3, 3).unwrap();
    let integ = Integrator::new(&field, IntegratorConfig::default()).unwrap();
    let x = point_state(&[(0.1, 0.1), (0.05, -0.04), (-0.02, 0.02)], 3, 0.5);
    let tp = ForcingSpec::two_pi();
    let a = integ.step(0.0, &x).unwrap();
    let b = integ.step(tp.mid(), &x).unwrap();
    for k in 1..=3 {
        let (za, zb) = (a.tight_out.mode(k), b.tight_out.mode(k));
        assert!((za.re.mid() - zb.re.mid()).abs() < 1e-12);
        assert!((za.im.mid() - zb.im.mid()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reachable_points_of_a_subbox_stay_in_both_images(
        c1 in -0.2f64..0.2, c2 in -0.2f64..0.2, r in 1e-6f64..1e-3, u in 0.0f64..1.0, v in 0.0f64..1.0
    ) {
        let field = presets::periodic_field(3, 5).unwrap();
        let integ = Integrator::new(&field, IntegratorConfig::default()).unwrap();
        let big = |rr: f64| {
            let modes = vec![
                CInterval::new(Interval::centered(c1, rr), Interval::centered(c2, rr)),
                CInterval::new(Interval::centered(-c2, rr), Interval::centered(c1, rr)),
                CInterval::ZERO,
                CInterval::ZERO,
                CInterval::ZERO,
            ];
            GalerkinState::new(Interval::point(0.5), modes, Tail::zero(4.0, 5), 3).unwrap()
        };
        let small = big(r);
        let large = big(2.0 * r);
        let p = vec![
            Complex::new(c1 + (2.0 * u - 1.0) * r, c2 + (2.0 * v - 1.0) * r),
            Complex::new(-c2, c1),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
        ];
        let end = Reference::new(&field, 5).flow(0.0, 0.005, 1e-4, &p);
        let a = integ.step(0.0, &small).unwrap();
        let b = integ.step(0.0, &large).unwrap();
        for k in 1..=5 {
            prop_assert!(inside(&a.tight_out.mode(k), end[k - 1]));
            prop_assert!(inside(&b.tight_out.mode(k), end[k - 1]));
        }
        prop_assert_eq!(a.tight_out.a0, small.a0);
    }
}
