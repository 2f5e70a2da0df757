//! Absorbing sets and trapping regions built from energy estimates.

use interval::round::{add_up, mul_up, sqrt_up};
use interval::{CInterval, Interval};
use serde::{Deserialize, Serialize};

use crate::burgers::{self, FieldParams, ForcingSpec};
use crate::modes::{GalerkinState, Majorant, Tail};
use crate::{Result, ScbError};

/// Relative margin above the strict inequalities `N > …`, `C > …`.
pub const MARGIN: f64 = 0.01;

/// `E({f_k}) = Σ_{k≠0} |f_k|²` of the autonomous centers.
pub fn forcing_energy(forcing: &ForcingSpec) -> Interval {
    (1..=forcing.autonomous.len())
        .map(|k| forcing.autonomous_center(k).norm_sqr() * 2.0)
        .sum()
}

/// Enclosure of `sup_t E({F_k(t)})`.
pub fn forcing_energy_sup(forcing: &ForcingSpec) -> Interval {
    forcing.sup_energy()
}

/// `E₀ = sup_t E({F_k(t)}) / ν²`.
pub fn e0(forcing: &ForcingSpec) -> Interval {
    forcing.e0()
}

/// `D(s) = 2^{s-1/2} + 2^{s-1}/√(2s-1)`.
pub fn d_const(s: f64) -> Interval {
    let si = Interval::point(s);
    let two = Interval::point(2.0);
    let a = two.powf(&(si - 0.5)).expect("positive base");
    let b = two.powf(&(si - 1.0)).expect("positive base");
    let root = (si * 2.0 - 1.0).sqrt().expect("s > 1/2");
    a + b.checked_div(&root).expect("s > 1/2")
}

/// `W(Ẽ, N, C, s) = {ℰ ≤ Ẽ, |a_k| ≤ C/|k|^s}`, forward invariant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrappingRegionParams {
    pub e_tilde: f64,
    pub s: f64,
    pub d: Interval,
    pub n: usize,
    pub c: f64,
}

fn check_energy(forcing: &ForcingSpec, e_tilde: f64) -> Result<Interval> {
    let e0 = forcing.e0();
    if !(e_tilde > e0.hi()) {
        return Err(ScbError::Param(format!(
            "energy bound {e_tilde} must exceed E0 = {e0}"
        )));
    }
    Ok(e0)
}

/// Smallest integer `N > max(J, (√Ẽ D/ν)²)`.
fn smallest_n(forcing: &ForcingSpec, e_tilde: f64, d: Interval) -> usize {
    let nu = Interval::point(forcing.nu.lo());
    let q = (Interval::point(e_tilde).sqrt().expect("positive") * d)
        .checked_div(&nu)
        .expect("positive viscosity")
        .sqr();
    let bound = q.hi().max(forcing.j() as f64);
    bound.floor() as usize + 1
}

/// `(1 + MARGIN) √Ẽ N^s`.
fn c_above(e_tilde: f64, n: usize, s: f64) -> f64 {
    let v = Interval::point(e_tilde).sqrt().expect("positive")
        * Interval::point(n as f64).powf(&Interval::point(s)).expect("positive base")
        * (1.0 + MARGIN);
    v.hi()
}

pub fn trapping_region(forcing: &ForcingSpec, e_tilde: f64, s: f64) -> Result<TrappingRegionParams> {
    if !(s > 0.5) {
        return Err(ScbError::Param(format!("decay exponent must exceed 1/2, got {s}")));
    }
    check_energy(forcing, e_tilde)?;
    let d = d_const(s);
    let n = smallest_n(forcing, e_tilde, d);
    Ok(TrappingRegionParams {
        e_tilde,
        s,
        d,
        n,
        c: c_above(e_tilde, n, s),
    })
}

/// Upper bound of `√(Ẽ/2)`, the largest single modulus allowed by `ℰ ≤ Ẽ`.
fn energy_radius(e_tilde: f64) -> f64 {
    sqrt_up(mul_up(0.5, e_tilde))
}

/// `W` as a state: `|a_k| ≤ min(√(Ẽ/2), C/k^s)` per stored mode, tail `C`.
pub fn realize_trapping_region(p: &TrappingRegionParams, a0: Interval, m: usize, big_m: usize) -> GalerkinState {
    let er = energy_radius(p.e_tilde);
    let tail = Tail::new(p.c, p.s, big_m);
    let modes = (1..=big_m).map(|k| CInterval::disc_box(er.min(tail.bound(k)))).collect();
    GalerkinState {
        a0,
        modes,
        tail,
        m,
        energy_bound: Some(p.e_tilde),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub i: usize,
    pub s: f64,
    pub d: Interval,
    pub c: f64,
    pub c_tilde: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingLadder {
    pub e0: Interval,
    pub e_tilde: f64,
    pub epsilon: f64,
    pub n: usize,
    pub levels: Vec<Level>,
}

impl AbsorbingLadder {
    pub fn top(&self) -> &Level {
        self.levels.last().expect("ladder has a level")
    }
}

/// Upper bound of `sup_{k,t} k^p (|f_k| + |f̃_k(t)|)`.
fn forcing_weight_sup(forcing: &ForcingSpec, p: f64) -> f64 {
    (1..=forcing.j())
        .map(|k| {
            let f = add_up(forcing.autonomous_box(k).mag(), forcing.nonaut_modulus_sup(k));
            (Interval::point(f) * Interval::point(k as f64).powf(&Interval::point(p)).expect("positive base")).hi()
        })
        .fold(0.0, f64::max)
}

/// Iterates `C_2, C_3, …` up to `s_i = target_s`.
pub fn absorbing_ladder(forcing: &ForcingSpec, e_tilde: f64, epsilon: f64, target_s: f64) -> Result<AbsorbingLadder> {
    if !(epsilon > 0.0) {
        return Err(ScbError::Param("epsilon must be positive".into()));
    }
    let top = (2.0 * target_s).round();
    if top < 2.0 || (top - 2.0 * target_s).abs() > 1e-12 {
        return Err(ScbError::Param(format!("target exponent {target_s} is not of the form i/2, i >= 2")));
    }
    let top = top as usize;
    let e0 = check_energy(forcing, e_tilde)?;
    let n = smallest_n(forcing, e_tilde, d_const(2.0).max(&d_const(target_s)));
    let inv_nu = Interval::ONE.checked_div(&Interval::point(forcing.nu.lo()))?;
    let sqrt_e = Interval::point(e_tilde).sqrt()?;
    let mut levels: Vec<Level> = Vec::with_capacity(top - 1);
    for i in 2..=top {
        let s = i as f64 / 2.0;
        let push = Interval::point(forcing_weight_sup(forcing, s - 2.0));
        let inner = match levels.last() {
            None => Interval::point(e_tilde) * 0.5 + push,
            Some(prev) => Interval::point(prev.c) * sqrt_e * prev.d + push,
        };
        let c = (Interval::point(epsilon) + inv_nu * inner).hi();
        levels.push(Level {
            i,
            s,
            d: d_const(s),
            c,
            c_tilde: c_above(e_tilde, n, s),
        });
    }
    Ok(AbsorbingLadder {
        e0,
        e_tilde,
        epsilon,
        n,
        levels,
    })
}

/// Lemma-style decay data over a forward-invariant set: `b_k` per stored
/// mode and `b_k ≤ C_b/k^{s_b}` for every `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayBounds {
    /// `b[k-1]` for `k = 1..=M`.
    pub b: Vec<f64>,
    pub c_n: f64,
    pub s_n: f64,
    pub c_b: f64,
    pub s_b: f64,
}

/// `b_k = sup |N_k + F_k| / (ν k²)` over `w`, and the decay constants.
pub fn decay_bounds(w: &GalerkinState, field: &FieldParams) -> Result<DecayBounds> {
    if w.tail.s <= 1.0 {
        return Err(ScbError::Param("decay bounds need a tail exponent above 1".into()));
    }
    let maj = Majorant::from_state(w, false);
    let nu = Interval::point(field.forcing.nu.lo());
    let s_n = w.tail.s - 1.0;
    let s_b = s_n + 2.0;
    let big_m = w.big_m();
    let big_k = 4 * big_m;
    let mut b = Vec::with_capacity(big_m);
    let mut c_n = if field.nonlinear { 0.5 * maj.far_constant() } else { 0.0 };
    let mut f_w = 0.0f64;
    for k in 1..=big_k {
        let nk = burgers::tail_nonlinear_bound(&maj, k, w.energy_bound, field);
        let fk = field.forcing.forcing_modulus_sup(k);
        let kk = Interval::point(k as f64);
        let w_n = kk.powf(&Interval::point(s_n))?;
        c_n = c_n.max((Interval::point(nk) * w_n).hi());
        f_w = f_w.max((Interval::point(fk) * w_n).hi());
        if k <= big_m {
            let v = Interval::point(add_up(nk, fk)).checked_div(&(nu * kk.sqr()))?;
            b.push(v.hi());
        }
    }
    let c_b = Interval::point(add_up(c_n, f_w)).checked_div(&nu)?.hi();
    Ok(DecayBounds { b, c_n, s_n, c_b, s_b })
}

/// `(n! C_a / (νⁿ ε))^{1/n}`, the time after which `n! C_a/(νⁿ tⁿ) ≤ ε`.
pub fn decay_time(n: usize, c_a: f64, nu: f64, eps: f64) -> f64 {
    assert!(n >= 1);
    let mut fact = Interval::ONE;
    for i in 2..=n {
        fact = fact * (i as f64);
    }
    let den = Interval::point(nu).powi(n as u32) * Interval::point(eps);
    let v = (fact * Interval::point(c_a)).checked_div(&den).expect("positive denominator");
    v.powf(&Interval::ONE.div_f64(n as f64)).expect("positive").hi()
}

/// Uniform absorption time: the least `t̂` over `n ∈ [n₀, n₀ + 8]`,
/// `n₀ = ⌈(s_b - s_a)/2⌉ + 1`. Returns `(n, t̂)`.
pub fn absorption_time(c_a: f64, s_a: f64, _c_n: f64, s_n: f64, eps: f64, nu: f64) -> Result<(usize, f64)> {
    let s_b = s_n + 2.0;
    if !(s_b > s_a) {
        return Err(ScbError::Param(format!("need s_b = {s_b} > s_a = {s_a}")));
    }
    if !(eps > 0.0 && nu > 0.0 && c_a >= 0.0) {
        return Err(ScbError::Param("absorption time needs positive ε, ν".into()));
    }
    let n0 = ((s_b - s_a) / 2.0).ceil() as usize + 1;
    Ok((n0..=n0 + 8)
        .map(|n| (n, decay_time(n, c_a, nu, eps)))
        .fold((n0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best }))
}

/// Absorbing set `𝒜` with the data it was built from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingSet {
    pub ladder: AbsorbingLadder,
    pub decay: DecayBounds,
    pub absorption_n: usize,
    pub absorption_time: f64,
    pub set: GalerkinState,
}

/// `𝒜 = {ℰ ≤ Ẽ, |a_k| ≤ C_i/k^{s_i}} ∩ W(Ẽ, N, C̃_i, s_i)`, tightened per
/// mode by `b_k + ε` and by `refine_rounds` passes of the box estimate
/// `a_k ∈ G_k/(-λ_k) ± ε`, where `G_k` encloses the rest of the field over
/// the current set and all times.
pub fn absorbing_set(
    field: &FieldParams,
    e_tilde: f64,
    epsilon: f64,
    target_s: f64,
    refine_rounds: usize,
) -> Result<AbsorbingSet> {
    let ladder = absorbing_ladder(&field.forcing, e_tilde, epsilon, target_s)?;
    let top = ladder.top().clone();
    let big_m = field.big_m;
    let er = energy_radius(e_tilde);
    let tail = Tail::new(top.c.min(top.c_tilde), top.s, big_m);
    let modes = (1..=big_m).map(|k| CInterval::disc_box(er.min(tail.bound(k)))).collect();
    let mut set = GalerkinState {
        a0: field.alpha,
        modes,
        tail,
        m: field.m,
        energy_bound: Some(e_tilde),
    };
    let decay = decay_bounds(&set, field)?;
    for k in 1..=big_m {
        let r = add_up(decay.b[k - 1], epsilon);
        if let Some(v) = set.modes[k - 1].intersect(&CInterval::disc_box(r)) {
            set.modes[k - 1] = v;
        }
    }
    // the decay bound (C_b + ε)/k^{s_b} is written with exponent s on the tail
    let shift = Interval::point((big_m + 1) as f64).powf(&Interval::point(top.s - decay.s_b))?;
    let decayed = (Interval::point(add_up(decay.c_b, epsilon)) * shift).hi();
    set.tail.c = set.tail.c.min(decayed);

    let all_time = match field.forcing.t_p {
        Some(tp) => Interval::new(0.0, tp.hi()),
        None => Interval::ENTIRE,
    };
    for _ in 0..refine_rounds {
        let maj = Majorant::from_state(&set, false);
        let mut next = set.clone();
        for k in 1..=big_m {
            let g = burgers::drift(&set, k, field, all_time, &maj);
            let inv = (-field.lambda(k)).recip()?;
            let face = g.scale(inv).widen(epsilon);
            if let Some(v) = set.modes[k - 1].intersect(&face) {
                next.modes[k - 1] = v;
            }
        }
        set = next;
    }
    let nu_lo = field.forcing.nu.lo();
    let (absorption_n, absorption_time) =
        absorption_time(top.c.min(top.c_tilde), top.s, decay.c_n, decay.s_n, epsilon, nu_lo)?;
    Ok(AbsorbingSet {
        ladder,
        decay,
        absorption_n,
        absorption_time,
        set,
    })
}

/// Per-mode radii of a centered box state, `(Re, Im)` half-widths.
pub fn radii(state: &GalerkinState) -> Vec<(f64, f64)> {
    state.modes.iter().map(|z| (z.re.rad(), z.im.rad())).collect()
}
