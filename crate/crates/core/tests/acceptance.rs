//! One PASS/FAIL line per acceptance criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use burgers_scb::absorbing::{e0, forcing_energy, forcing_energy_sup, realize_trapping_region, trapping_region};
use burgers_scb::burgers::reference::Reference;
use burgers_scb::burgers::{convolution, FieldParams, ForcingSpec};
use burgers_scb::integrator::{Integrator, IntegratorConfig};
use burgers_scb::lognorm::{mu, Frame, LipschitzLedger, NormKind, NormSpec};
use burgers_scb::modes::{check_scb, GalerkinState, Tail};
use burgers_scb::proof::{run_proof, same_claims, verify_certificate, ProofConfig, Verdict};
use burgers_scb::{presets, CInterval, IMatrix, Interval};
use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn config(name: &str) -> ProofConfig {
    let path = format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"));
    ProofConfig::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn energies() -> Outcome {
    let f = presets::periodic_forcing();
    let auto = forcing_energy(&f);
    ensure(auto.contains(1.31) && auto.width() < 1e-10, || format!("E(f) = {auto}"))?;
    let sup = forcing_energy_sup(&f);
    ensure(sup.contains(4.88072) && sup.width() < 1e-3, || format!("sup energy = {sup}"))?;
    let e = e0(&f);
    ensure(e.contains(1.22018) && e.width() < 1e-4, || format!("E0 = {e}"))?;
    Ok(format!("E(f) = {auto}, sup = {sup}, E0 = {e}"))
}

fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.abs().row_sum().max();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.1 {
        scale *= 0.5;
        squarings += 1;
    }
    let b = a * scale;
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for j in 1..=20 {
        term = &term * &b / j as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn op_norm(a: &DMatrix<f64>, kind: NormKind) -> f64 {
    match kind {
        NormKind::Euclidean => a.clone().svd(false, false).singular_values.max(),
        NormKind::Infinity => a.abs().column_sum().max(),
        NormKind::Ell1 => a.abs().row_sum().max(),
        NormKind::BlockInfinity => {
            let b = a.nrows() / 2;
            (0..b)
                .map(|i| {
                    (0..b)
                        .map(|j| a.view((2 * i, 2 * j), (2, 2)).into_owned().svd(false, false).singular_values.max())
                        .sum::<f64>()
                })
                .fold(0.0, f64::max)
        }
    }
}

fn log_norms() -> Outcome {
    let kinds = [NormKind::Euclidean, NormKind::Infinity, NormKind::Ell1, NormKind::BlockInfinity];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..500 {
        let n = 2 * rng.gen_range(1..=8);
        let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-5.0..5.0));
        let ia = IMatrix::from_points(&a);
        for kind in kinds {
            let spec = match kind {
                NormKind::BlockInfinity => NormSpec::block(Frame::identity(n)),
                k => NormSpec::plain(k),
            };
            let m = mu(&ia, &spec).map_err(|e| e.to_string())?.hi();
            for h in [1e-3, 1e-2] {
                let lhs = op_norm(&expm(&(&a * h)), kind);
                let rhs = (h * m).exp();
                ensure(lhs <= rhs + 1e-10, || format!("{kind:?} n={n} h={h}: {lhs} > {rhs}"))?;
                worst = worst.max(lhs - rhs);
            }
        }
    }
    Ok(format!("4000 checks, max excess {worst:.3e}"))
}

fn integrator_containment() -> Outcome {
    let field = presets::periodic_field(3, 12).unwrap();
    let cfg = IntegratorConfig::default();
    let integ = Integrator::new(&field, cfg.clone()).map_err(|e| e.to_string())?;
    let mut init = vec![(0.1, 0.1), (0.05, -0.04), (-0.02, 0.02)];
    init.resize(12, (0.0, 0.0));
    let modes = init.iter().map(|&(a, b)| CInterval::point(a, b)).collect();
    let x = GalerkinState::new(Interval::point(0.5), modes, Tail::zero(4.0, 12), 3).unwrap();
    let reference = Reference::new(&field, 12);
    let (_, tube) = integ
        .time_shift(0.0, Interval::point(200.0 * cfg.step), &x)
        .map_err(|e| e.to_string())?;
    ensure(tube.len() == 200, || format!("{} steps", tube.len()))?;
    let mut a: Vec<Complex<f64>> = init.iter().map(|&(re, im)| Complex::new(re, im)).collect();
    for (i, st) in tube.iter().enumerate() {
        let next = reference.flow(st.t, st.dt.mid(), 1e-4, &a);
        for k in 1..=12 {
            let p = next[k - 1];
            ensure(st.tight_out.mode(k).contains(p.re, p.im), || format!("step {i} mode {k} escaped"))?;
        }
        a = next;
    }

    let forcing = ForcingSpec {
        nu: Interval::point(2.0),
        autonomous: Vec::new(),
        perturbation: 0.0,
        nonautonomous: Vec::new(),
        t_p: None,
    };
    let mut lin = FieldParams::new(forcing, 1, 1, Interval::ZERO).unwrap();
    lin.nonlinear = false;
    let h = 0.1;
    let integ = Integrator::new(&lin, IntegratorConfig { step: h, ..IntegratorConfig::default() }).unwrap();
    let x = GalerkinState::new(Interval::ZERO, vec![CInterval::point(1.0, 0.0)], Tail::zero(4.0, 1), 1).unwrap();
    let out = integ.step(0.0, &x).map_err(|e| e.to_string())?.tight_out.mode(1);
    let exact = (-2.0 * h).exp();
    let scale = (2.0 * h).powi(7) / 5040.0;
    ensure(out.re.contains(exact) && out.re.width() <= 10.0 * scale, || {
        format!("e^(λh) enclosure {} width {} vs {}", out.re, out.re.width(), scale)
    })?;
    Ok(format!("200 steps contained; linear width {:.2e} <= 10 x {scale:.2e}", out.re.width()))
}

fn trapping_region_invariance() -> Outcome {
    let field = presets::periodic_field(8, 23).unwrap();
    let e_tilde = 1.01 * e0(&field.forcing).hi();
    let p = trapping_region(&field.forcing, e_tilde, 4.0).map_err(|e| e.to_string())?;
    let w = realize_trapping_region(&p, field.alpha, 8, 23);
    let rep = check_scb(&w, &field, Interval::new(0.0, 6.3));
    ensure(rep.c1_ok && rep.c2_ok && rep.c3_ok && rep.c4_ok, || {
        format!("C1..C4 = {} {} {} {}; {} face failures", rep.c1_ok, rep.c2_ok, rep.c3_ok, rep.c4_ok, rep.c4_failures.len())
    })?;

    let energy = |a: &[Complex<f64>]| 2.0 * a.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let reference = Reference::new(&field, 23);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..200 {
        let mut a: Vec<Complex<f64>> = (1..=23)
            .map(|k| {
                let r = rng.gen_range(0.0..1.0) / (k as f64).powi(2);
                Complex::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        let scale = (e_tilde / energy(&a)).sqrt();
        a.iter_mut().for_each(|z| *z *= scale);
        let t0 = rng.gen_range(0.0..std::f64::consts::TAU);
        let b = reference.flow(t0, 1e-3, 1e-4, &a);
        ensure(energy(&b) < e_tilde, || format!("sample {i} moved outward"))?;
    }
    Ok(format!("N = {}, C = {:.4e}, C4 ok, 200 boundary samples inward", p.n, p.c))
}

fn headline() -> Outcome {
    let cert = run_proof(&config("thm12.json")).map_err(|e| e.to_string())?;
    let c = cert.contraction.as_ref().ok_or("no contraction certificate")?;
    ensure(cert.verdict == Verdict::ProvedGlobal, || format!("verdict {:?}: {:?}", cert.verdict, cert.notes))?;
    ensure(c.big_l.hi() < 1e-2, || format!("L <= {:e}", c.big_l.hi()))?;
    let tabulated = [
        (-2.00765, 0.496188),
        (-8.00731, 0.999835),
        (-18.0068, 1.49997),
        (-32.0066, 1.99999),
        (-50.0065, 2.49999),
        (-72.006, 2.99993),
        (-98.0028, 3.49945),
        (-127.956, 4.00124),
    ];
    ensure(c.eigenvalues.len() == tabulated.len(), || format!("{} eigenvalue pairs", c.eigenvalues.len()))?;
    for (&(re, im), &(pr, pi)) in c.eigenvalues.iter().zip(&tabulated) {
        let d = Complex::new(re - pr, im - pi).norm();
        ensure(d <= 0.05 * Complex::new(pr, pi).norm(), || format!("eigenvalue {re} +- {im}i vs {pr} +- {pi}i"))?;
    }
    Ok(format!("PROVED_GLOBAL, L <= {:e}, n = {:?}", c.big_l.hi(), cert.capture_n))
}

fn negative_control() -> Outcome {
    let cert = run_proof(&config("nu085.json")).map_err(|e| e.to_string())?;
    let l = cert.contraction.as_ref().map(|c| c.big_l.hi()).unwrap_or(f64::INFINITY);
    ensure(l > 1.0, || format!("L <= {l:e}"))?;
    ensure(cert.verdict <= Verdict::OrbitOnly, || format!("verdict {:?}", cert.verdict))?;
    Ok(format!("{:?}, L <= {l:e}", cert.verdict))
}

fn random_interval(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Interval {
    let a = rng.gen_range(lo..hi);
    let b = rng.gen_range(lo..hi);
    Interval::new(a.min(b), a.max(b))
}

fn widen(rng: &mut ChaCha8Rng, x: Interval) -> Interval {
    Interval::new(x.lo() - rng.gen_range(0.0..1.0), x.hi() + rng.gen_range(0.0..1.0))
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..1000 {
        let (a, b) = (random_interval(&mut rng, -10.0, 10.0), random_interval(&mut rng, -10.0, 10.0));
        let (a2, b2) = (widen(&mut rng, a), widen(&mut rng, b));
        let p = random_interval(&mut rng, 0.5, 10.0);
        let p2 = Interval::new(p.lo() * rng.gen_range(0.5..1.0), p.hi() + rng.gen_range(0.0..1.0));
        let ok = (a + b).subset(&(a2 + b2))
            && (a - b).subset(&(a2 - b2))
            && (a * b).subset(&(a2 * b2))
            && a.checked_div(&p).unwrap().subset(&a2.checked_div(&p2).unwrap())
            && p.sqrt().unwrap().subset(&p2.sqrt().unwrap())
            && a.exp().subset(&a2.exp())
            && a.sin().subset(&a2.sin())
            && a.cos().subset(&a2.cos())
            && p.ln().unwrap().subset(&p2.ln().unwrap());
        ensure(ok, || format!("monotonicity case {i}: {a} {b} {p}"))?;
    }

    // convolution against the full two-sided sum with a_{-j} = conj(a_j)
    for _ in 0..200 {
        let a: Vec<(f64, f64)> = (0..5).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let a0 = rng.gen_range(-1.0..1.0);
        let at = |j: i64| match j {
            0 => Complex::new(a0, 0.0),
            j if j > 0 => Complex::new(a[j as usize - 1].0, a[j as usize - 1].1),
            j => Complex::new(a[(-j) as usize - 1].0, -a[(-j) as usize - 1].1),
        };
        let modes = a.iter().map(|&(re, im)| CInterval::point(re, im)).collect();
        let st = GalerkinState::new(Interval::point(a0), modes, Tail::zero(4.0, 5), 5).unwrap();
        for k in 1..=5i64 {
            let full = |k: i64| {
                let s: Complex<f64> = (-5..=5).filter(|j: &i64| (k - j).abs() <= 5).map(|j| at(j) * at(k - j)).sum();
                Complex::new(0.0, -(k as f64) / 2.0) * s
            };
            let (plus, minus) = (full(k), full(-k));
            ensure((plus.conj() - minus).norm() < 1e-12, || format!("reality broken at k = {k}"))?;
            let enc = convolution(&st, k as usize, true).widen(1e-14);
            ensure(enc.contains(plus.re, plus.im), || format!("convolution misses k = {k}"))?;
        }
    }

    let field = presets::periodic_field(3, 6).unwrap();
    let integ = Integrator::new(&field, IntegratorConfig::default()).unwrap();
    let modes = [(0.09, 0.12), (0.04, -0.04), (-0.02, 0.02), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]
        .iter()
        .map(|&(re, im)| CInterval::point(re, im).widen(1e-4))
        .collect();
    let x = GalerkinState::new(Interval::point(0.5), modes, Tail::new(1e-3, 4.0, 6), 3).unwrap();
    let (out, tube) = integ.time_shift(0.0, Interval::point(0.05), &x).map_err(|e| e.to_string())?;
    ensure(out.a0 == x.a0 && tube.iter().all(|s| s.tight_out.a0 == x.a0), || "mean drifted".into())?;

    let quiet = ProofConfig::from_json(
        r#"{"version": 1, "mode": "periodic_shift", "m": 3, "M": 6, "alpha": "0", "s": 4,
            "forcing": {"nu": "2", "autonomous": [], "perturbation": 0, "nonautonomous": [], "t_p": "1"},
            "e_tilde": 0.01}"#,
    )
    .map_err(|e| e.to_string())?;
    let first = run_proof(&quiet).map_err(|e| e.to_string())?;
    let second = run_proof(&quiet).map_err(|e| e.to_string())?;
    ensure(same_claims(&first, &second), || "two runs disagree".into())?;
    ensure(verify_certificate(&first, false).map_err(|e| e.to_string())?, || "replay rejected".into())?;

    for _ in 0..1000 {
        let l = rng.gen_range(-5.0..2.0);
        let dt = rng.gen_range(0.01..3.0);
        let parts = rng.gen_range(2..=8);
        let mut whole = LipschitzLedger::new();
        whole.push(Interval::point(l), Interval::point(dt), Interval::ONE).unwrap();
        let mut split = LipschitzLedger::new();
        for _ in 0..parts {
            split.push(Interval::point(l), Interval::point(dt / parts as f64), Interval::ONE).unwrap();
        }
        let (w, _) = whole.accumulate().unwrap();
        let (s, _) = split.accumulate().unwrap();
        ensure(w.intersect(&s).is_some() && (w.hi() - s.hi()).abs() <= 1e-12 * w.hi(), || {
            format!("slab split l={l} dt={dt}: {w} vs {s}")
        })?;
    }
    Ok("monotonicity, reality, mean, replay and slab refinement hold".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("forcing energies", energies),
        ("log-norm soundness", log_norms),
        ("integrator containment", integrator_containment),
        ("trapping-region invariance", trapping_region_invariance),
        ("periodic orbit reproduction", headline),
        ("negative control", negative_control),
        ("property suites", properties),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
