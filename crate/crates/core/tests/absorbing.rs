use burgers_scb::absorbing::{
    absorbing_ladder, absorption_time, d_const, decay_bounds, decay_time, e0, forcing_energy, forcing_energy_sup,
    radii, realize_trapping_region, trapping_region,
};
use burgers_scb::burgers::reference::Reference;
use burgers_scb::burgers::{FieldParams, ForcingSpec};
use burgers_scb::modes::{check_scb, GalerkinState, Tail};
use burgers_scb::proof::{absorbing_for, ProofConfig};
use burgers_scb::{presets, CInterval, Interval};
use nalgebra::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(name: &str) -> ProofConfig {
    let path = format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"));
    ProofConfig::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn quiet(nu: f64) -> ForcingSpec {
    ForcingSpec {
        nu: Interval::point(nu),
        autonomous: Vec::new(),
        perturbation: 0.0,
        nonautonomous: Vec::new(),
        t_p: None,
    }
}

fn with_nu(nu: f64) -> ForcingSpec {
    ForcingSpec {
        nu: Interval::point(nu),
        ..presets::periodic_forcing()
    }
}

#[test]
fn forcing_energies_of_the_periodic_example() {
    let f = presets::periodic_forcing();
    let auto = forcing_energy(&f);
    assert!(auto.contains(1.31) && auto.width() < 1e-10, "{auto}");
    let sup = forcing_energy_sup(&f);
    assert!(sup.contains(4.88072) && sup.width() < 1e-3, "{sup}");
    let e = e0(&f);
    assert!(e.contains(1.22018) && e.width() < 1e-4, "{e}");
}

#[test]
fn zero_forcing_has_zero_energy() {
    assert_eq!(forcing_energy_sup(&quiet(2.0)), Interval::ZERO);
    assert_eq!(e0(&quiet(2.0)), Interval::ZERO);
}

#[test]
fn absorbing_radius_across_viscosities() {
    for (nu, expect) in [(0.85, 6.75532), (1.0, 4.88072), (1.85, 1.42607)] {
        let e = e0(&with_nu(nu));
        assert!((e.mid() - expect).abs() < 1e-5 * expect, "nu={nu}: {e}");
    }
}

#[test]
fn decay_constant_at_two() {
    let d = d_const(2.0);
    let exact = 2f64.powf(1.5) + 2.0 / 3f64.sqrt();
    assert!(d.contains(exact) && d.width() < 1e-14, "{d}");
    assert!((d.mid() - 3.98313).abs() < 5e-6);
}

#[test]
fn decay_constants_increase_along_the_ladder() {
    let ds: Vec<f64> = (2..=12).map(|i| d_const(i as f64 / 2.0).mid()).collect();
    assert!(ds.windows(2).all(|w| w[0] < w[1]), "{ds:?}");
}

#[test]
fn first_rung_without_forcing() {
    let ladder = absorbing_ladder(&quiet(2.0), 1.0, 0.01, 4.0).unwrap();
    let c2 = ladder.levels[0].c;
    let exact = 0.01 + 1.0 / (2.0 * 2.0);
    assert!(c2 >= exact && c2 - exact < 1e-15, "{c2}");
    assert_eq!(ladder.levels.iter().map(|l| l.i).collect::<Vec<_>>(), (2..=8).collect::<Vec<_>>());
}

#[test]
fn trapping_region_rejects_bad_inputs() {
    let f = presets::periodic_forcing();
    let e = e0(&f).hi();
    assert!(trapping_region(&f, e, 4.0).is_err());
    assert!(trapping_region(&f, e * 0.5, 4.0).is_err());
    assert!(trapping_region(&f, e * 1.1, 0.5).is_err());
    assert!(absorbing_ladder(&f, e * 1.1, 0.0, 4.0).is_err());
    assert!(absorbing_ladder(&f, e * 1.1, 0.01, 4.3).is_err());
}

#[test]
fn trapping_region_satisfies_its_defining_inequalities() {
    let f = presets::periodic_forcing();
    let e_tilde = 1.01 * e0(&f).hi();
    let p = trapping_region(&f, e_tilde, 4.0).unwrap();
    let q = (e_tilde.sqrt() * p.d.hi() / 2.0).powi(2);
    assert!(p.n as f64 > q && p.n > f.j());
    assert!((p.n - 1) as f64 <= q.max(f.j() as f64), "N is not the smallest admissible integer");
    assert!(p.c > e_tilde.sqrt() * (p.n as f64).powi(4));
    assert!(p.c.is_finite());
}

#[test]
fn strong_viscosity_leaves_only_the_forcing_range() {
    let f = with_nu(1e6);
    let p = trapping_region(&f, 1.01 * e0(&f).hi(), 4.0).unwrap();
    assert_eq!(p.n, f.j() + 1);
}

#[test]
fn realized_trapping_region_is_self_consistent_and_isolating() {
    let field = presets::periodic_field(8, 23).unwrap();
    let e_tilde = 1.01 * e0(&field.forcing).hi();
    let p = trapping_region(&field.forcing, e_tilde, 4.0).unwrap();
    let w = realize_trapping_region(&p, field.alpha, 8, 23);
    let rep = check_scb(&w, &field, Interval::new(0.0, 6.3));
    assert!(rep.c1_ok && rep.c2_ok && rep.c3_ok);
    assert!(rep.c4_ok, "{:?}", rep.c4_failures);
}

/// `Σ_{k≠0} |a_k|²` of a plain mode vector.
fn energy_of(a: &[Complex<f64>]) -> f64 {
    2.0 * a.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

#[test]
fn energy_sphere_points_move_inward() {
    let field = presets::periodic_field(8, 23).unwrap();
    let e_tilde = 1.01 * e0(&field.forcing).hi();
    let reference = Reference::new(&field, 23);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let mut a: Vec<Complex<f64>> = (1..=23)
            .map(|k| {
                let r = rng.gen_range(0.0..1.0) / (k as f64).powi(2);
                Complex::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        let scale = (e_tilde / energy_of(&a)).sqrt();
        a.iter_mut().for_each(|z| *z *= scale);
        let t0 = rng.gen_range(0.0..std::f64::consts::TAU);
        let b = reference.flow(t0, 1e-3, 1e-4, &a);
        assert!(energy_of(&b) < e_tilde, "{} >= {e_tilde}", energy_of(&b));
    }
}

#[test]
fn absorbing_set_covers_the_tabulated_one() {
    let set = absorbing_for(&config("thm12.json")).unwrap().set;
    let tabulated = [
        (0.357457, 0.238867),
        (0.150289, 0.143525),
        (7.0412e-2, 7.07427e-2),
        (2.24348e-2, 2.23378e-2),
        (9.60379e-3, 9.60024e-3),
        (4.3149e-3, 4.30936e-3),
        (2.01048e-3, 2.01036e-3),
        (9.87006e-4, 9.86863e-4),
    ];
    for (k, (&(re, im), (our_re, our_im))) in tabulated.iter().zip(radii(&set)).enumerate() {
        assert!(our_re >= 0.9 * re && our_im >= 0.9 * im, "mode {}: ({our_re}, {our_im}) vs ({re}, {im})", k + 1);
    }
}

#[test]
fn pure_decay_has_no_drift() {
    let mut field = FieldParams::new(quiet(1.0), 2, 4, Interval::ZERO).unwrap();
    field.nonlinear = false;
    let mut w = GalerkinState::zero(Interval::ZERO, 2, 4, 4.0);
    w.modes = vec![CInterval::disc_box(0.3); 4];
    w.tail = Tail::new(0.3, 4.0, 4);
    let d = decay_bounds(&w, &field).unwrap();
    assert!(d.b.iter().all(|&b| b == 0.0));
    assert_eq!(d.c_b, 0.0);
}

#[test]
fn decay_time_of_a_single_derivative() {
    let t = decay_time(1, 1.0, 1.0, 0.5);
    assert!(t >= 2.0 && t - 2.0 < 1e-14, "{t}");
}

#[test]
fn absorption_needs_a_faster_decay() {
    assert!(absorption_time(1.0, 4.0, 1.0, 2.0, 0.01, 2.0).is_err());
    assert!(absorption_time(1.0, 4.0, 1.0, 1.5, 0.01, 2.0).is_err());
    assert!(absorption_time(1.0, 4.0, 1.0, 3.0, 0.01, 2.0).is_ok());
}

proptest! {
    #[test]
    fn absorption_time_is_monotone(c in 0.01f64..100.0, nu in 0.1f64..10.0, grow in 1.0f64..4.0) {
        let (_, t) = absorption_time(c, 4.0, 1.0, 5.0, 0.01, nu).unwrap();
        let (_, t_visc) = absorption_time(c, 4.0, 1.0, 5.0, 0.01, nu * grow).unwrap();
        let (_, t_big) = absorption_time(c * grow, 4.0, 1.0, 5.0, 0.01, nu).unwrap();
        prop_assert!(t_visc <= t);
        prop_assert!(t_big >= t);
    }

    #[test]
    fn absorbing_radius_grows_with_the_perturbation(eps in 0.0f64..0.1, extra in 0.0f64..0.1) {
        let mut a = presets::periodic_forcing();
        a.perturbation = eps;
        let mut b = a.clone();
        b.perturbation = eps + extra;
        prop_assert!(e0(&a).hi() <= e0(&b).hi());
    }

    #[test]
    fn ladder_exponents_climb_by_halves(e_scale in 1.01f64..3.0) {
        let f = presets::periodic_forcing();
        let ladder = absorbing_ladder(&f, e_scale * e0(&f).hi(), 0.01, 4.0).unwrap();
        for w in ladder.levels.windows(2) {
            prop_assert_eq!(w[1].s - w[0].s, 0.5);
            prop_assert!(w[1].d.lo() > w[0].d.hi());
            prop_assert!(w[0].c.is_finite() && w[0].c_tilde.is_finite());
        }
    }
}
