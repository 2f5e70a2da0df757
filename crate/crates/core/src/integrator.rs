//! Rigorous integration of the Galerkin system as the differential
//! inclusion `a' ∈ P_M F(t, a) + [δ]` with a decaying tail.
//!
//! Modes `k ≤ m` travel as a point center, advanced by the `m`-mode
//! Galerkin system with a Taylor remainder, plus one modulus radius per
//! mode bounded by a linear comparison system. Modes `m < k ≤ M` travel as
//! boxes through the variation-of-constants formula, and the tail through
//! the scalar inequality `d|a_k|/dt ≤ λ_k |a_k| + b_k`.

use interval::round::{add_up, mul_up};
use interval::{CInterval, Interval};
use serde::{Deserialize, Serialize};

use crate::burgers::{self, FieldParams};
use crate::lognorm::phi1;
use crate::modes::{far_ratio, inv_pow, GalerkinState, Majorant, Tail};
use crate::{Result, ScbError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    /// Taylor order `p`.
    pub order: usize,
    /// Step `h`.
    pub step: f64,
    pub rough_enclosure_inflation: f64,
    pub max_rough_retries: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            order: 6,
            step: 0.005,
            rough_enclosure_inflation: 1.1,
            max_rough_retries: 30,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(ScbError::Config("Taylor order must be at least 1".into()));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(ScbError::Config(format!("step must be positive, got {}", self.step)));
        }
        if !(self.rough_enclosure_inflation > 1.0 && self.rough_enclosure_inflation.is_finite()) {
            return Err(ScbError::Config("rough enclosure inflation must exceed 1".into()));
        }
        if self.max_rough_retries == 0 {
            return Err(ScbError::Config("need at least one rough enclosure attempt".into()));
        }
        Ok(())
    }
}

/// One integration step: `tight_in` at `t`, `tight_out` at `t + dt` and
/// `rough` holding every solution over `[t, t + dt]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnclosureStep {
    pub t: f64,
    pub dt: Interval,
    pub tight_in: GalerkinState,
    pub tight_out: GalerkinState,
    pub rough: GalerkinState,
}

/// Tight set: the state plus the center/radius form of modes `k ≤ m`.
#[derive(Clone, Debug)]
struct TightSet {
    state: GalerkinState,
    center: Vec<CInterval>,
    radius: Vec<f64>,
}

impl TightSet {
    fn from_state(x: &GalerkinState) -> Self {
        let low = &x.modes[..x.m];
        let mut set = Self {
            state: x.clone(),
            center: low.iter().map(CInterval::mid_point).collect(),
            radius: low.iter().map(CInterval::rad).collect(),
        };
        set.sync();
        set
    }

    /// Writes the disc boxes `center ± radius` into the state.
    fn sync(&mut self) {
        for k in 0..self.state.m {
            self.state.modes[k] = self.center[k].widen(self.radius[k]);
        }
    }
}

/// Integrator bound to one field.
#[derive(Clone, Debug)]
pub struct Integrator {
    field: FieldParams,
    /// The `m`-mode system with center forcing.
    center_field: FieldParams,
    cfg: IntegratorConfig,
    /// Energy balls `ℰ ≤ Ẽ` with `Ẽ ≥ E₀` are forward invariant.
    e0: f64,
}

fn blowup(reason: impl Into<String>) -> ScbError {
    ScbError::Blowup {
        step: 0,
        reason: reason.into(),
    }
}

fn with_step(e: ScbError, step: usize) -> ScbError {
    match e {
        ScbError::Blowup { reason, .. } => ScbError::Blowup { step, reason },
        other => other,
    }
}

/// `Σ c_i h^i` by Horner's rule.
fn horner(coeffs: &[Vec<CInterval>], k: usize, h: Interval) -> CInterval {
    let mut v = coeffs[coeffs.len() - 1][k];
    for c in coeffs[..coeffs.len() - 1].iter().rev() {
        v = v.scale(h) + c[k];
    }
    v
}

/// `e^{λh} x + h φ₁(λh) g`, the variation-of-constants enclosure when the
/// nonlinear part stays in `g` over the step.
fn exp_form(x: CInterval, lambda: Interval, h: Interval, g: CInterval) -> CInterval {
    let lh = lambda * h;
    x.scale(lh.exp()) + g.scale(h * phi1(lh))
}

fn finite(z: &GalerkinState) -> bool {
    z.tail.c.is_finite() && z.modes.iter().all(|m| m.re.is_finite() && m.im.is_finite())
}

/// Widening that makes a zero-width component strictly wider.
fn grow(z: CInterval, factor: f64) -> CInterval {
    let z = z.inflate(factor);
    z.widen(mul_up(1e-12, z.mag()).max(1e-300))
}

impl Integrator {
    pub fn new(field: &FieldParams, cfg: IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        field.validate()?;
        let mut center_field = field.clone();
        center_field.forcing.perturbation = 0.0;
        center_field.big_m = field.m;
        Ok(Self {
            field: field.clone(),
            center_field,
            cfg,
            e0: field.forcing.e0().hi(),
        })
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.cfg
    }

    pub fn field(&self) -> &FieldParams {
        &self.field
    }

    fn energy_for(&self, x: &GalerkinState) -> Option<f64> {
        x.energy_bound.filter(|&e| e >= self.e0)
    }

    fn tight_set(&self, x: &GalerkinState) -> TightSet {
        let mut set = TightSet::from_state(x);
        set.state.energy_bound = self.energy_for(x);
        set
    }

    fn check_state(&self, x: &GalerkinState) -> Result<()> {
        x.validate()?;
        if x.m != self.field.m || x.big_m() != self.field.big_m {
            return Err(ScbError::Config(format!(
                "state dimensions (m = {}, M = {}) do not match the field (m = {}, M = {})",
                x.m,
                x.big_m(),
                self.field.m,
                self.field.big_m
            )));
        }
        Ok(())
    }

    /// Upper bounds `β_k` with `k^s |N_k + F_k| ≤ ν k² β_k` over `Z`, for
    /// `M < k ≤ 4M`, and one bound `β_far` for every `k > 4M`.
    fn tail_betas(&self, fld: &FieldParams, z: &GalerkinState, maj: &Majorant) -> (Vec<f64>, f64) {
        let big_m = z.big_m();
        let big_k = 4 * big_m;
        let nu_lo = Interval::point(fld.forcing.nu.lo());
        let mut betas = Vec::with_capacity(big_k - big_m);
        for k in (big_m + 1)..=big_k {
            let b = add_up(
                burgers::tail_nonlinear_bound(maj, k, z.energy_bound, fld),
                fld.forcing.forcing_modulus_sup(k),
            );
            let den = nu_lo * ((k * k) as f64) * inv_pow(z.tail.s, k);
            let beta = Interval::point(b).checked_div(&den).map_or(f64::INFINITY, |v| v.hi());
            betas.push(beta);
        }
        let far = if !fld.nonlinear || maj.c == 0.0 {
            0.0
        } else {
            mul_up(far_ratio(maj, big_k + 1, nu_lo.lo(), z.energy_bound).hi(), maj.c)
        };
        (betas, far)
    }

    /// Candidate enclosure over the step from the guess `z`; the flag is
    /// false when two valid forms disagree, which means `z` was too small.
    fn candidate(
        &self,
        fld: &FieldParams,
        t_range: Interval,
        h: Interval,
        x: &GalerkinState,
        z: &GalerkinState,
        with_tail: bool,
    ) -> (GalerkinState, bool) {
        let maj = Majorant::from_state(z, false);
        let span = Interval::new(0.0, h.hi());
        let mut consistent = true;
        let mut out = x.clone();
        for k in 1..=z.big_m() {
            let full = burgers::field_component(z, k, None, fld, t_range, &maj);
            let euler = x.mode(k) + full.scale(span);
            let g = burgers::drift(z, k, fld, t_range, &maj);
            let inv = (-fld.lambda(k)).recip().expect("viscosity is positive");
            let expo = x.mode(k).hull(&g.scale(inv));
            out.modes[k - 1] = match euler.intersect(&expo) {
                Some(v) => v,
                None => {
                    consistent = false;
                    euler.hull(&expo)
                }
            };
        }
        if with_tail {
            // θC + (1-θ)β over θ ∈ [e^{λh}, 1] peaks at one of the ends
            let c = self.tail_out(fld, z, &maj, h, x.tail.c).max(x.tail.c);
            out.tail = Tail::new(c, x.tail.s, x.tail.m_excl);
        }
        (out, consistent)
    }

    fn rough_with(
        &self,
        fld: &FieldParams,
        t: f64,
        h: Interval,
        x: &GalerkinState,
        with_tail: bool,
    ) -> Result<GalerkinState> {
        if !(h.lo() > 0.0) {
            return Err(ScbError::Param(format!("step must be positive, got {h}")));
        }
        let infl = self.cfg.rough_enclosure_inflation;
        let t_range = Interval::new(t, (Interval::point(t) + h).hi());
        let inflate = |z: &GalerkinState| -> GalerkinState {
            let mut z = z.clone();
            for m in z.modes.iter_mut() {
                *m = grow(*m, infl);
            }
            z.tail.c = mul_up(z.tail.c, infl);
            z
        };
        let (c0, _) = self.candidate(fld, t_range, h, x, x, with_tail);
        let mut z = inflate(&x.hull(&c0));
        for attempt in 0..self.cfg.max_rough_retries {
            if !finite(&z) {
                break;
            }
            let (c, ok) = self.candidate(fld, t_range, h, x, &z, with_tail);
            if ok && c.subset(&z) {
                // any valid enclosure gives a valid candidate, so refine once
                let (r, ok) = self.candidate(fld, t_range, h, x, &c, with_tail);
                return Ok(if ok && r.subset(&c) { r } else { c });
            }
            // grow only the components that escaped, by a factor rising per attempt
            let f = infl.powi(attempt as i32 + 1);
            for (zk, ck) in z.modes.iter_mut().zip(&c.modes) {
                if !ck.subset(zk) {
                    *zk = grow(zk.hull(ck), f);
                }
            }
            if c.tail.c > z.tail.c {
                z.tail.c = mul_up(c.tail.c, f);
            }
        }
        Err(blowup(format!(
            "rough enclosure not validated on [{t}, {}] after {} attempts",
            t_range.hi(),
            self.cfg.max_rough_retries
        )))
    }

    /// A state holding every solution from `x` over `[t, t + h]`.
    pub fn rough_enclosure(&self, t: f64, h: Interval, x: &GalerkinState) -> Result<GalerkinState> {
        self.check_state(x)?;
        let mut x = x.clone();
        x.energy_bound = self.energy_for(&x);
        self.rough_with(&self.field, t, h, &x, true)
    }

    fn advance(&self, t: f64, h: Interval, set: &TightSet) -> Result<(TightSet, EnclosureStep)> {
        let fld = &self.field;
        let x = &set.state;
        let (m, big_m) = (x.m, x.big_m());
        let t_range = Interval::new(t, (Interval::point(t) + h).hi());
        let z = self.rough_with(fld, t, h, x, true)?;
        let maj = Majorant::from_state(&z, false);

        // center: Taylor polynomial plus remainder over its own rough enclosure
        let mut cstate = GalerkinState::zero(fld.alpha, m, m, x.tail.s);
        cstate.modes.clone_from(&set.center);
        let y = self.rough_with(&self.center_field, t, h, &cstate, false)?;
        let order = self.cfg.order;
        let coeffs = burgers::center_taylor(&set.center, fld.alpha, fld, Interval::point(t), order);
        let rem = burgers::center_taylor(&y.modes, fld.alpha, fld, t_range, order + 1);
        let hp = h.powi((order + 1) as u32);
        let center: Vec<CInterval> = (0..m)
            .map(|k| horner(&coeffs, k, h) + rem[order + 1][k].scale(hp))
            .collect();

        // deviation from the center: |y_k|' ≤ d_k |y_k| + Σ_l A_kl |y_l| + δ_k
        let mu: Vec<f64> = (0..=m)
            .map(|i| if i == 0 { 0.0 } else { maj.at(i).max(y.modes[i - 1].mag()) })
            .collect();
        let rot_gap = (x.a0 - fld.alpha).mag();
        let mut d = vec![0.0; m];
        let mut a = vec![vec![0.0; m]; m];
        let mut delta = vec![0.0; m];
        for k in 1..=m {
            let kf = k as f64;
            d[k - 1] = fld.lambda(k).hi();
            let mut dk = fld.forcing.perturbation_box(k).mag();
            dk = add_up(dk, mul_up(mul_up(kf, rot_gap), y.modes[k - 1].mag()));
            if fld.nonlinear {
                if 2 * k <= m {
                    d[k - 1] = add_up(d[k - 1], mul_up(kf, mu[2 * k]));
                }
                for l in (1..=m).filter(|&l| l != k) {
                    let mut c = mu[k.abs_diff(l)];
                    if k + l <= m {
                        c = add_up(c, mu[k + l]);
                    }
                    a[k - 1][l - 1] = mul_up(kf, c);
                }
                dk = add_up(dk, mul_up(kf, maj.outer_pair_sum(k, m)));
            }
            delta[k - 1] = dk;
        }
        let push = |k: usize, bar: &[f64]| -> f64 {
            let mut s = delta[k];
            for l in 0..m {
                s = add_up(s, mul_up(a[k][l], bar[l]));
            }
            s
        };
        // a priori bound over the step, first from the two rough enclosures
        let mut bar: Vec<f64> = (0..m).map(|k| (z.modes[k] - y.modes[k]).mag()).collect();
        for _ in 0..3 {
            let next: Vec<f64> = (0..m)
                .map(|k| {
                    let g = add_up(mul_up(d[k].max(0.0), bar[k]), push(k, &bar));
                    add_up(set.radius[k], mul_up(h.hi(), g)).min(bar[k])
                })
                .collect();
            bar = next;
        }
        let mut out = TightSet {
            state: x.clone(),
            center: Vec::with_capacity(m),
            radius: Vec::with_capacity(m),
        };
        let mut tight_low = Vec::with_capacity(m);
        for k in 1..=m {
            let dh = Interval::point(d[k - 1]) * h;
            let lin = (dh.exp() * set.radius[k - 1]).hi();
            let forced = (h * phi1(dh) * push(k - 1, &bar)).hi();
            let c = center[k - 1];
            let mid = c.mid_point();
            let r = add_up(add_up(lin, forced), (c - mid).mag());
            let g = burgers::drift(&z, k, fld, t_range, &maj);
            let ex = exp_form(x.mode(k), fld.lambda(k), h, g);
            let b = mid
                .widen(r)
                .intersect(&ex)
                .and_then(|b| b.intersect(&z.mode(k)))
                .ok_or_else(|| blowup(format!("inconsistent enclosures of mode {k}")))?;
            if b.rad() < r {
                out.center.push(b.mid_point());
                out.radius.push(b.rad());
            } else {
                out.center.push(mid);
                out.radius.push(r);
            }
            tight_low.push(b);
        }
        for k in (m + 1)..=big_m {
            let g = burgers::drift(&z, k, fld, t_range, &maj);
            let v = exp_form(x.mode(k), fld.lambda(k), h, g);
            out.state.modes[k - 1] = v
                .intersect(&z.mode(k))
                .ok_or_else(|| blowup(format!("inconsistent enclosures of mode {k}")))?;
        }
        out.state.tail.c = self.tail_out(fld, &z, &maj, h, x.tail.c).min(z.tail.c);
        out.state.energy_bound = self.energy_for(x);
        out.sync();
        let mut tight_out = out.state.clone();
        tight_out.modes[..m].copy_from_slice(&tight_low);
        if !finite(&tight_out) {
            return Err(blowup("non-finite enclosure"));
        }
        let step = EnclosureStep {
            t,
            dt: h,
            tight_in: x.clone(),
            tight_out,
            rough: z,
        };
        Ok((out, step))
    }

    /// `C_out` from `|a_k(h)| ≤ e^{λ_k h} C/k^s + (1 - e^{λ_k h}) β_k/k^s`.
    fn tail_out(&self, fld: &FieldParams, z: &GalerkinState, maj: &Majorant, h: Interval, c_in: f64) -> f64 {
        let big_m = z.big_m();
        let (betas, far) = self.tail_betas(fld, z, maj);
        let c = Interval::point(c_in);
        let mut out = 0.0f64;
        for (i, beta) in betas.iter().enumerate() {
            let k = big_m + 1 + i;
            let theta = (fld.lambda(k) * h).exp();
            let v = theta * c + (Interval::ONE - theta) * Interval::point(*beta);
            out = out.max(v.hi());
        }
        let k0 = 4 * big_m + 1;
        let theta = (Interval::point(-fld.forcing.nu.lo()) * ((k0 * k0) as f64) * h.lo()).exp();
        let far_v = add_up((theta * c).hi(), far).min(c_in.max(far));
        out.max(far_v)
    }

    /// One step of length `cfg.step` from `t`.
    pub fn step(&self, t: f64, x: &GalerkinState) -> Result<EnclosureStep> {
        self.step_dt(t, Interval::point(self.cfg.step), x)
    }

    /// One step of length `dt` from `t`.
    pub fn step_dt(&self, t: f64, dt: Interval, x: &GalerkinState) -> Result<EnclosureStep> {
        self.check_state(x)?;
        Ok(self.advance(t, dt, &self.tight_set(x))?.1)
    }

    /// Time shift by `t_p` from `t0` on the grid `t0 + i h`, the last step
    /// shortened to end at `t0 + t_p`.
    pub fn time_shift(&self, t0: f64, t_p: Interval, x: &GalerkinState) -> Result<(GalerkinState, Vec<EnclosureStep>)> {
        self.check_state(x)?;
        if t_p.lo() < 0.0 {
            return Err(ScbError::Param(format!("negative time shift {t_p}")));
        }
        if t_p.hi() == 0.0 {
            return Ok((x.clone(), Vec::new()));
        }
        let grid = step_grid(t0, t_p, self.cfg.step)?;
        let mut set = self.tight_set(x);
        let mut tube = Vec::with_capacity(grid.len());
        for (i, (t, dt)) in grid.into_iter().enumerate() {
            let (next, step) = self.advance(t, dt, &set).map_err(|e| with_step(e, i))?;
            set = next;
            tube.push(step);
        }
        let image = tube.last().expect("at least one step").tight_out.clone();
        Ok((image, tube))
    }
}

/// Start times and durations `(t_i, dt_i)` covering `[t0, t0 + t_p]`.
pub fn step_grid(t0: f64, t_p: Interval, h: f64) -> Result<Vec<(f64, Interval)>> {
    if !(t_p.lo() > 0.0) || !(h > 0.0) {
        return Err(ScbError::Param("need positive duration and step".into()));
    }
    let end = Interval::point(t0) + t_p;
    let at = |i: usize| t0 + i as f64 * h;
    let mut n = ((t_p.lo() / h).ceil() as usize).max(1);
    while at(n) < end.lo() {
        n += 1;
    }
    while n > 1 && at(n - 1) >= end.lo() {
        n -= 1;
    }
    Ok((0..n)
        .map(|i| {
            let t = at(i);
            let dt = if i + 1 < n {
                Interval::point(at(i + 1)) - Interval::point(t)
            } else {
                end - Interval::point(t)
            };
            (t, dt)
        })
        .collect())
}

/// Free-function forms of the integrator operations.
pub fn rough_enclosure(
    t: f64,
    h: Interval,
    x: &GalerkinState,
    field: &FieldParams,
    cfg: &IntegratorConfig,
) -> Result<GalerkinState> {
    Integrator::new(field, cfg.clone())?.rough_enclosure(t, h, x)
}

pub fn step(t: f64, cfg: &IntegratorConfig, x: &GalerkinState, field: &FieldParams) -> Result<EnclosureStep> {
    Integrator::new(field, cfg.clone())?.step(t, x)
}

pub fn time_shift(
    t0: f64,
    t_p: Interval,
    x: &GalerkinState,
    cfg: &IntegratorConfig,
    field: &FieldParams,
) -> Result<(GalerkinState, Vec<EnclosureStep>)> {
    Integrator::new(field, cfg.clone())?.time_shift(t0, t_p, x)
}
