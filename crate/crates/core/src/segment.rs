//! Trapping isolating segments for the time-shift map and the contraction
//! certificate built from per-slab logarithmic norms along one period.

use interval::round::add_up;
use interval::{CInterval, IMatrix, Interval};
use nalgebra::{Complex, DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::burgers::reference::Reference;
use crate::burgers::{jacobian_n, FieldParams};
use crate::integrator::{EnclosureStep, Integrator};
use crate::lognorm::{block, block_row_norm, mu2, norm2, transition_factor, Frame, LipschitzLedger};
use crate::modes::{check_isolation, GalerkinState, Majorant, Tail};
use crate::{Result, ScbError};

type C64 = Complex<f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SegmentBuildConfig {
    /// Seed half-width.
    pub c1: f64,
    /// Overshoot factor.
    pub c2: f64,
    /// Inflation factor.
    pub c3: f64,
    pub max_inflation_iters: usize,
    pub newton_iters: usize,
    /// Scale applied to the radii of a time-independent segment once its
    /// faces check, kept when the faces still check after scaling.
    pub final_margin: f64,
}

impl Default for SegmentBuildConfig {
    fn default() -> Self {
        Self {
            c1: 1e-5,
            c2: 0.1,
            c3: 1.01,
            max_inflation_iters: 40,
            newton_iters: 6,
            final_margin: 1.0,
        }
    }
}

impl SegmentBuildConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c1 > 0.0 && self.c1.is_finite()) {
            return Err(ScbError::Config(format!("c1 must be positive, got {}", self.c1)));
        }
        if !(self.c2 > 0.0 && self.c2.is_finite()) {
            return Err(ScbError::Config(format!("c2 must be positive, got {}", self.c2)));
        }
        if !(self.c3 > 1.0 && self.c3.is_finite()) {
            return Err(ScbError::Config(format!("c3 must exceed 1, got {}", self.c3)));
        }
        if !(self.final_margin >= 1.0 && self.final_margin.is_finite()) {
            return Err(ScbError::Config(format!("final_margin must be at least 1, got {}", self.final_margin)));
        }
        Ok(())
    }
}

/// When to replace the coordinate frame along the tube.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FramePolicy {
    /// Relative growth of `l_i` over the reference slab that triggers a
    /// new frame.
    pub degradation: f64,
    pub max_frames: usize,
}

impl Default for FramePolicy {
    fn default() -> Self {
        Self {
            degradation: 0.5,
            max_frames: 16,
        }
    }
}

// ---------------------------------------------------------------------------
// Newton seed

fn pack(a: &[C64]) -> DVector<f64> {
    DVector::from_iterator(2 * a.len(), a.iter().flat_map(|z| [z.re, z.im]))
}

fn unpack(v: &DVector<f64>) -> Vec<C64> {
    v.as_slice().chunks(2).map(|p| C64::new(p[0], p[1])).collect()
}

/// Finite-difference Newton iteration for `G(x) = 0`.
fn newton(g: impl Fn(&[C64]) -> Vec<C64>, x_init: &[C64], iters: usize) -> Result<Vec<C64>> {
    let n = 2 * x_init.len();
    let mut x = pack(x_init);
    for _ in 0..iters {
        let g0 = pack(&g(&unpack(&x)));
        if g0.norm() == 0.0 {
            break;
        }
        let mut jac = DMatrix::zeros(n, n);
        for c in 0..n {
            let eps = 1e-7 * x[c].abs().max(1.0);
            let mut xp = x.clone();
            xp[c] += eps;
            let col = (pack(&g(&unpack(&xp))) - &g0) / eps;
            jac.set_column(c, &col);
        }
        let dx = jac
            .lu()
            .solve(&(-&g0))
            .ok_or_else(|| ScbError::Seed("singular Newton matrix".into()))?;
        if !dx.iter().all(|v| v.is_finite()) {
            return Err(ScbError::Seed("non-finite Newton update".into()));
        }
        x += &dx;
        if dx.norm() <= 1e-15 * x.norm().max(1.0) {
            break;
        }
    }
    Ok(unpack(&x))
}

/// Non-rigorous seed for the periodic point of the time-shift by `t_p`
/// (or for an equilibrium when `t_p` is `None`) of the Galerkin system of
/// dimension `x_init.len()`, integrated with step `h`.
pub fn newton_seed(field: &FieldParams, t_p: Option<f64>, x_init: &[C64], iters: usize, h: f64) -> Result<Vec<C64>> {
    if x_init.is_empty() {
        return Err(ScbError::Seed("empty initial point".into()));
    }
    let r = Reference::new(field, x_init.len());
    match t_p {
        Some(tp) => newton(
            |x| {
                r.flow(0.0, tp, h, x)
                    .iter()
                    .zip(x)
                    .map(|(p, q)| p - q)
                    .collect()
            },
            x_init,
            iters,
        ),
        None => newton(|x| r.field(0.0, x), x_init, iters),
    }
}

/// Midpoints of the stored modes.
pub fn to_points(state: &GalerkinState) -> Vec<C64> {
    state
        .modes
        .iter()
        .map(|z| {
            let (re, im) = z.mid();
            C64::new(re, im)
        })
        .collect()
}

/// Point state with the given leading modes, zero elsewhere.
pub fn point_state(field: &FieldParams, a: &[C64], s: f64) -> GalerkinState {
    let mut st = GalerkinState::zero(field.alpha, field.m, field.big_m, s);
    for (slot, z) in st.modes.iter_mut().zip(a) {
        *slot = CInterval::point(z.re, z.im);
    }
    st
}

// ---------------------------------------------------------------------------
// Inflation loop

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Containment {
    /// Strict inequality on every face and on the tail.
    Interior,
    Plain,
    Failed,
}

#[derive(Clone, Debug)]
pub struct SegmentBuild {
    pub w0: GalerkinState,
    pub image: GalerkinState,
    pub tube: Vec<EnclosureStep>,
    /// Inflation rounds after the initial check.
    pub iterations: usize,
    pub containment: Containment,
}

/// `x̄ ± c1` on every stored mode `k ≤ m`, the modes above `m` and the
/// tail bounded by `C/k^s` with `C = |W0_m| m^s`.
pub fn initial_segment(center: &GalerkinState, c1: f64, s: f64) -> GalerkinState {
    let m = center.m;
    let mut w = center.clone();
    for z in &mut w.modes[..m] {
        *z = z.widen(c1);
    }
    let c = (Interval::point(w.modes[m - 1].mag()) * Interval::point(m as f64).powf(&Interval::point(s)).expect("positive")).hi();
    let tail = Tail::new(c, s, center.big_m());
    for k in (m + 1)..=center.big_m() {
        w.modes[k - 1] = w.modes[k - 1].widen(tail.bound(k));
    }
    w.tail = tail;
    w.energy_bound = None;
    w
}

/// Moves each violated face past the image face by `c2` times the
/// overshoot, then inflates the component by `c3` about its center.
fn inflate_interval(w: Interval, img: Interval, c2: f64, c3: f64) -> Interval {
    let lo_bad = !(img.lo() > w.lo());
    let hi_bad = !(img.hi() < w.hi());
    if !lo_bad && !hi_bad {
        return w;
    }
    let mut lo = w.lo();
    let mut hi = w.hi();
    if lo_bad {
        let over = (w.lo() - img.lo()).max(0.0);
        lo = img.lo().min(lo) - c2 * over;
    }
    if hi_bad {
        let over = (img.hi() - w.hi()).max(0.0);
        hi = img.hi().max(hi) + c2 * over;
    }
    Interval::new(lo, hi).inflate(c3)
}

pub fn inflate_faces(w: &GalerkinState, img: &GalerkinState, cfg: &SegmentBuildConfig) -> GalerkinState {
    let mut out = w.clone();
    for (z, v) in out.modes.iter_mut().zip(&img.modes) {
        *z = CInterval::new(
            inflate_interval(z.re, v.re, cfg.c2, cfg.c3),
            inflate_interval(z.im, v.im, cfg.c2, cfg.c3),
        );
    }
    let ti = img.tail.with_exponent(w.tail.s);
    if !(ti.c < w.tail.c) {
        out.tail.c = (Interval::point(ti.c.max(w.tail.c)) * cfg.c3).hi();
    }
    out
}

fn containment(img: &GalerkinState, w: &GalerkinState) -> Containment {
    if img.interior_subset(w) {
        Containment::Interior
    } else if img.subset(w) {
        Containment::Plain
    } else {
        Containment::Failed
    }
}

/// Inflation loop for `Φ_{t_p}(W0) ⊂ W0`, starting from
/// [`initial_segment`]. Stops at interior containment; when the budget
/// runs out the last containment status is reported.
pub fn build_segment(
    center: &GalerkinState,
    cfg: &SegmentBuildConfig,
    integ: &Integrator,
    t_p: Interval,
) -> Result<SegmentBuild> {
    cfg.validate()?;
    let s = center.tail.s;
    let mut w = initial_segment(center, cfg.c1, s);
    let mut iterations = 0;
    loop {
        let (image, tube) = integ.time_shift(0.0, t_p, &w)?;
        let status = containment(&image, &w);
        if status == Containment::Interior || iterations >= cfg.max_inflation_iters {
            return Ok(SegmentBuild {
                w0: w,
                image,
                tube,
                iterations,
                containment: status,
            });
        }
        w = inflate_faces(&w, &image, cfg);
        iterations += 1;
    }
}

/// Time-independent version: the field points strictly inward on every
/// face of `W0` (condition C4 on all stored modes). A failing face moves
/// out by `(1 + c2)` times the time `1/(ν k²)` at the offending speed.
pub fn build_autonomous_segment(
    center: &GalerkinState,
    cfg: &SegmentBuildConfig,
    field: &FieldParams,
) -> Result<(GalerkinState, usize, Containment)> {
    cfg.validate()?;
    let s = center.tail.s;
    let mut w = initial_segment(center, cfg.c1, s);
    let all_time = Interval::new(0.0, f64::MAX);
    let nu = field.forcing.nu.lo();
    let mut iterations = 0;
    loop {
        let failures = check_isolation(&w, field, all_time, 1);
        if failures.is_empty() {
            if cfg.final_margin > 1.0 {
                let mut wide = w.clone();
                for z in &mut wide.modes {
                    *z = CInterval::new(z.re.inflate(cfg.final_margin), z.im.inflate(cfg.final_margin));
                }
                if check_isolation(&wide, field, all_time, 1).is_empty() {
                    return Ok((wide, iterations, Containment::Interior));
                }
            }
            return Ok((w, iterations, Containment::Interior));
        }
        if iterations >= cfg.max_inflation_iters {
            return Ok((w, iterations, Containment::Failed));
        }
        for f in &failures {
            let k = f.k;
            if k > w.big_m() {
                w.tail.c = (Interval::point(w.tail.c) * cfg.c3 * 2.0).hi();
                continue;
            }
            let speed = f.value.mag();
            let push = (1.0 + cfg.c2) * speed / (nu * (k * k) as f64);
            let z = w.modes[k - 1];
            use crate::modes::Face::*;
            let (re, im) = match f.face {
                ReLower => (Interval::new(z.re.lo() - push, z.re.hi()), z.im),
                ReUpper => (Interval::new(z.re.lo(), z.re.hi() + push), z.im),
                ImLower => (z.re, Interval::new(z.im.lo() - push, z.im.hi())),
                ImUpper => (z.re, Interval::new(z.im.lo(), z.im.hi() + push)),
                Modulus => (z.re, z.im),
            };
            w.modes[k - 1] = CInterval::new(re.inflate(cfg.c3), im.inflate(cfg.c3));
        }
        iterations += 1;
    }
}

// ---------------------------------------------------------------------------
// Frames and slab log norms

/// Frame of real 2-blocks `[Re v, Im v]` from approximate eigenvectors of
/// `j`, ordered by decreasing real part, with the approximate eigenvalues
/// (one per conjugate pair, nonnegative imaginary part).
pub fn eigen_frame(j: &DMatrix<f64>) -> (DMatrix<f64>, Vec<(f64, f64)>) {
    let n = j.nrows();
    let mut eig: Vec<C64> = j.complex_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let scale = j.amax().max(1.0);
    let tol = 1e-9 * scale;
    let mut complex_vecs: Vec<(C64, DVector<C64>)> = Vec::new();
    let mut real_vecs: Vec<(f64, DVector<f64>)> = Vec::new();
    for &lam in &eig {
        if lam.im < -tol {
            continue;
        }
        let v = inverse_iteration(j, lam, scale);
        if lam.im.abs() <= tol {
            real_vecs.push((lam.re, v.map(|z| z.re)));
        } else {
            complex_vecs.push((lam, v));
        }
    }
    let mut blocks: Vec<(f64, f64, DVector<f64>, DVector<f64>)> = complex_vecs
        .into_iter()
        .map(|(l, v)| (l.re, l.im, v.map(|z| z.re), v.map(|z| z.im)))
        .collect();
    for pair in real_vecs.chunks(2) {
        match pair {
            [a, b] => blocks.push((a.0.max(b.0), 0.0, a.1.clone(), b.1.clone())),
            [a] => blocks.push((a.0, 0.0, a.1.clone(), DVector::zeros(n))),
            _ => {}
        }
    }
    blocks.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut q = DMatrix::zeros(n, n);
    for (i, (_, _, x, y)) in blocks.iter().enumerate().take(n / 2) {
        q.set_column(2 * i, x);
        q.set_column(2 * i + 1, y);
    }
    let mut vals: Vec<(f64, f64)> = eig.iter().filter(|z| z.im >= -tol).map(|z| (z.re, z.im.abs())).collect();
    vals.sort_by(|a, b| b.0.total_cmp(&a.0));
    (q, vals)
}

/// Normalized eigenvector estimate for the eigenvalue `lam`.
fn inverse_iteration(j: &DMatrix<f64>, lam: C64, scale: f64) -> DVector<C64> {
    let n = j.nrows();
    let shift = lam + C64::new(1e-10 * scale, 1e-10 * scale);
    let a = DMatrix::from_fn(n, n, |r, c| {
        let d = if r == c { shift } else { C64::new(0.0, 0.0) };
        C64::new(j[(r, c)], 0.0) - d
    });
    let lu = a.lu();
    let mut v = DVector::from_fn(n, |i, _| C64::new(1.0 + 0.1 * i as f64, 0.0));
    for _ in 0..3 {
        match lu.solve(&v) {
            Some(w) if w.iter().all(|z| z.re.is_finite() && z.im.is_finite()) && w.norm() > 0.0 => {
                v = w.unscale(w.norm());
            }
            _ => break,
        }
    }
    // rotate so the largest entry is real, which balances Re and Im parts
    let (imax, _) = v.iter().enumerate().fold((0, 0.0), |acc, (i, z)| if z.norm() > acc.1 { (i, z.norm()) } else { acc });
    let phase = v[imax].conj() / v[imax].norm().max(f64::MIN_POSITIVE);
    v * phase
}

/// Frame from the midpoint Jacobian of the modes `k ≤ m` over `z`; the
/// identity frame when the inverse cannot be certified.
pub fn frame_for(z: &GalerkinState, field: &FieldParams) -> (Frame, Vec<(f64, f64)>, Option<String>) {
    let j = jacobian_n(z, field, field.m).mid();
    let (q, vals) = eigen_frame(&j);
    match Frame::new(q) {
        Ok(f) => (f, vals, None),
        Err(e) => (Frame::identity(2 * field.m), vals, Some(format!("frame inverse failed ({e}), identity frame used"))),
    }
}

/// Upper bound of the logarithmic norm of the full Burgers Jacobian over
/// `z` in the norm `max(max_i ‖(Q⁻¹ a_L)_i‖₂, max_{k>m} |a_k|)`.
///
/// Columns beyond `M` enter row `k` through
/// `k (Σ_{i>M-k} ā_i + Σ_{i>M+k} ā_i)`; rows beyond `M` are bounded by
/// `-ν k² + 3 k max(1, ‖Q‖) ℓ¹`.
pub fn slab_lognorm(z: &GalerkinState, field: &FieldParams, frame: &Frame) -> Interval {
    let m = field.m;
    let big_m = z.big_m();
    let (n, nl) = (2 * big_m, 2 * m);
    let j = jacobian_n(z, field, big_m);
    let q = IMatrix::from_points(&frame.q);
    let jq = j.block(0, 0, n, nl).mul(&q);
    let jt = IMatrix::from_fn(n, n, |r, c| if c < nl { jq[(r, c)] } else { j[(r, c)] });
    let top = frame.q_inv.mul(&jt.block(0, 0, nl, n));
    let b = IMatrix::from_fn(n, n, |r, c| if r < nl { top[(r, c)] } else { jt[(r, c)] });

    let maj = Majorant::from_state(z, false);
    let tau: Vec<f64> = (1..=big_m)
        .map(|k| {
            if !field.nonlinear {
                return 0.0;
            }
            let s = add_up(maj.sum_from(big_m - k), maj.sum_from(big_m + k));
            (Interval::point(k as f64) * Interval::point(s)).hi()
        })
        .collect();

    let mut best = Interval::point(f64::NEG_INFINITY);
    for i in 0..big_m {
        let mut row = mu2(&block(&b, i, i));
        let mut off = 0.0;
        for jb in (0..big_m).filter(|&jb| jb != i) {
            off = add_up(off, norm2(&block(&b, i, jb)));
        }
        if i < m {
            for l in 0..m {
                off = add_up(off, (Interval::point(norm2(&block(&frame.q_inv, i, l))) * Interval::point(tau[l])).hi());
            }
        } else {
            off = add_up(off, tau[i]);
        }
        row += Interval::new(0.0, off);
        best = best.max(&row);
    }

    // rows beyond M: f(k) = -ν k² + B k, concave in k
    let nu = Interval::point(field.forcing.nu.lo());
    let bcoef = if field.nonlinear {
        Interval::point(3.0) * Interval::point(block_row_norm(&q).max(1.0)) * Interval::point(maj.sum_from(0))
    } else {
        Interval::ZERO
    };
    let k1 = Interval::point((big_m + 1) as f64);
    let vertex = bcoef.checked_div(&(nu * 2.0)).expect("ν > 0");
    let tail_row = if vertex.hi() <= k1.lo() {
        -(nu * k1.sqr()) + bcoef * k1
    } else {
        let at_m1 = -(nu * k1.sqr()) + bcoef * k1;
        let peak = bcoef.sqr().checked_div(&(nu * 4.0)).expect("ν > 0");
        Interval::new(at_m1.lo(), peak.hi().max(at_m1.hi()))
    };
    best.max(&tail_row)
}

// ---------------------------------------------------------------------------
// Contraction certificate

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ContractionVerdict {
    Contracting,
    OrbitOnly,
    Failed,
}

/// A frame matrix stored row-major, used from slab `start` on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub start: usize,
    pub dim: usize,
    pub q: Vec<f64>,
}

impl FrameRecord {
    fn new(start: usize, f: &Frame) -> Self {
        let dim = f.dim();
        Self {
            start,
            dim,
            q: (0..dim * dim).map(|i| f.q[(i / dim, i % dim)]).collect(),
        }
    }

    pub fn frame(&self) -> Result<Frame> {
        if self.q.len() != self.dim * self.dim {
            return Err(ScbError::Parse("frame matrix has the wrong size".into()));
        }
        Frame::new(DMatrix::from_row_slice(self.dim, self.dim, &self.q))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionCertificate {
    pub w0: GalerkinState,
    pub image: GalerkinState,
    pub containment: Containment,
    /// Duration `Δ` covered by the ledger.
    pub period: Interval,
    pub tube: Vec<EnclosureStep>,
    pub frames: Vec<FrameRecord>,
    pub l_locals: Vec<Interval>,
    pub p_factors: Vec<Interval>,
    pub ledger: LipschitzLedger,
    pub l: Interval,
    pub c_const: Interval,
    /// Lipschitz constant of the map over `Δ`.
    pub big_l: Interval,
    /// Approximate eigenvalues of the first midpoint Jacobian.
    pub eigenvalues: Vec<(f64, f64)>,
    pub fallback: Option<String>,
    pub verdict: ContractionVerdict,
}

/// `max(N, 1)`: the coordinates beyond `m` never change frame.
fn full_transition(from: &Frame, to: &Frame) -> Interval {
    let p = transition_factor(from, to);
    Interval::new(p.lo().max(1.0), p.hi().max(1.0))
}

/// Frame index of every slab from the frame start list.
pub fn frame_index(frames: &[FrameRecord], slabs: usize) -> Vec<usize> {
    let mut idx = Vec::with_capacity(slabs);
    let mut cur = 0;
    for i in 0..slabs {
        while cur + 1 < frames.len() && frames[cur + 1].start <= i {
            cur += 1;
        }
        idx.push(cur);
    }
    idx
}

/// Ledger from slab norms, durations and frames; the last slab carries
/// the change back to the first frame.
pub fn assemble_ledger(l_locals: &[Interval], dts: &[Interval], frames: &[Frame], index: &[usize]) -> Result<(LipschitzLedger, Vec<Interval>)> {
    let mut ledger = LipschitzLedger::new();
    let mut ps = Vec::with_capacity(l_locals.len());
    for i in 0..l_locals.len() {
        let next = if i + 1 < l_locals.len() { index[i + 1] } else { 0 };
        let p = if next == index[i] {
            Interval::ONE
        } else {
            full_transition(&frames[index[i]], &frames[next])
        };
        ledger.push(l_locals[i], dts[i], p)?;
        ps.push(p);
    }
    Ok((ledger, ps))
}

/// `C = max(1, e^{BΔ}) max(1, e^{-lΔ})`.
pub fn c_const(b: f64, l: Interval, delta: Interval) -> Interval {
    let one = |x: Interval| Interval::new(x.lo().max(1.0), x.hi().max(1.0));
    one((Interval::point(b) * delta).exp()) * one((-(l * delta)).exp())
}

fn verdict(containment: Containment, big_l: Interval) -> ContractionVerdict {
    match containment {
        Containment::Interior if big_l.hi() < 1.0 => ContractionVerdict::Contracting,
        Containment::Interior | Containment::Plain => ContractionVerdict::OrbitOnly,
        Containment::Failed => ContractionVerdict::Failed,
    }
}

/// Log norms along the tube of the segment, with frame changes per
/// `policy`, and the resulting Lipschitz bound of the time shift.
pub fn certify_contraction(seg: &SegmentBuild, field: &FieldParams, t_p: Interval, policy: &FramePolicy) -> Result<ContractionCertificate> {
    let tube = &seg.tube;
    if tube.is_empty() {
        return Err(ScbError::Param("empty tube".into()));
    }
    let (f0, eigenvalues, fallback) = frame_for(&tube[0].rough, field);
    let mut frames = vec![f0];
    let mut starts = vec![0usize];
    let mut l_locals: Vec<Interval> = tube.par_iter().map(|s| slab_lognorm(&s.rough, field, &frames[0])).collect();
    let mut reference = l_locals[0].hi();
    let mut i = 1;
    while i < tube.len() {
        let li = l_locals[i].hi();
        if frames.len() < policy.max_frames && li > reference + policy.degradation * reference.abs() {
            let (f, _, failed) = frame_for(&tube[i].rough, field);
            if failed.is_none() {
                let cand = slab_lognorm(&tube[i].rough, field, &f);
                if cand.hi() < li {
                    let rest: Vec<Interval> = tube[i..].par_iter().map(|s| slab_lognorm(&s.rough, field, &f)).collect();
                    l_locals.splice(i.., rest);
                    reference = cand.hi();
                    frames.push(f);
                    starts.push(i);
                }
            }
        }
        i += 1;
    }
    let records: Vec<FrameRecord> = frames.iter().zip(&starts).map(|(f, &s)| FrameRecord::new(s, f)).collect();
    let index = frame_index(&records, tube.len());
    let dts: Vec<Interval> = tube.iter().map(|s| s.dt).collect();
    let (ledger, p_factors) = assemble_ledger(&l_locals, &dts, &frames, &index)?;
    let (big_l, l) = ledger.accumulate()?;
    let b = l_locals.iter().map(|x| x.hi()).fold(f64::NEG_INFINITY, f64::max);
    Ok(ContractionCertificate {
        w0: seg.w0.clone(),
        image: seg.image.clone(),
        containment: seg.containment,
        period: t_p,
        tube: tube.clone(),
        frames: records,
        l_locals,
        p_factors,
        ledger,
        l,
        c_const: c_const(b, l, t_p),
        big_l,
        eigenvalues,
        fallback,
        verdict: verdict(seg.containment, big_l),
    })
}

/// Certificate for a time-independent segment: `W0` itself encloses every
/// solution starting in it, so one slab of duration `Δ` over `W0` gives
/// the Lipschitz bound of the time-`Δ` map.
pub fn certify_autonomous(w0: &GalerkinState, containment: Containment, field: &FieldParams, delta: Interval) -> Result<ContractionCertificate> {
    let (f0, eigenvalues, fallback) = frame_for(w0, field);
    let l0 = slab_lognorm(w0, field, &f0);
    let records = vec![FrameRecord::new(0, &f0)];
    let (ledger, p_factors) = assemble_ledger(&[l0], &[delta], &[f0], &[0])?;
    let (big_l, l) = ledger.accumulate()?;
    Ok(ContractionCertificate {
        w0: w0.clone(),
        image: w0.clone(),
        containment,
        period: delta,
        tube: Vec::new(),
        frames: records,
        l_locals: vec![l0],
        p_factors,
        ledger,
        l,
        c_const: c_const(l0.hi(), l, delta),
        big_l,
        eigenvalues,
        fallback,
        verdict: verdict(containment, big_l),
    })
}

/// Recomputes the slab norms and the ledger from the stored tube (or from
/// `W0` when the tube is empty) and frames; `Ok(true)` when every
/// recorded value is reproduced and the verdict follows from them.
pub fn replay_contraction(cert: &ContractionCertificate, field: &FieldParams) -> Result<bool> {
    if cert.frames.is_empty() || cert.frames[0].start != 0 {
        return Ok(false);
    }
    let frames: Vec<Frame> = cert.frames.iter().map(FrameRecord::frame).collect::<Result<_>>()?;
    let (sets, dts): (Vec<&GalerkinState>, Vec<Interval>) = if cert.tube.is_empty() {
        (vec![&cert.w0], vec![cert.period])
    } else {
        cert.tube.iter().map(|s| (&s.rough, s.dt)).unzip()
    };
    if sets.len() != cert.l_locals.len() {
        return Ok(false);
    }
    let index = frame_index(&cert.frames, sets.len());
    let l_locals: Vec<Interval> = sets
        .par_iter()
        .zip(index.par_iter())
        .map(|(z, &fi)| slab_lognorm(z, field, &frames[fi]))
        .collect();
    let (ledger, p_factors) = assemble_ledger(&l_locals, &dts, &frames, &index)?;
    let (big_l, l) = ledger.accumulate()?;
    let b = l_locals.iter().map(|x| x.hi()).fold(f64::NEG_INFINITY, f64::max);
    let tube_ok = cert.tube.windows(2).all(|w| w[0].tight_out.subset(&w[1].tight_in))
        && cert.tube.first().is_none_or(|s| cert.w0.subset(&s.tight_in))
        && cert.tube.last().is_none_or(|s| s.tight_out.subset(&cert.image));
    let containment_ok = if cert.tube.is_empty() {
        let inward = check_isolation(&cert.w0, field, Interval::new(0.0, f64::MAX), 1).is_empty();
        (cert.containment == Containment::Interior) == inward
    } else {
        containment(&cert.image, &cert.w0) == cert.containment
    };
    Ok(tube_ok
        && containment_ok
        && l_locals == cert.l_locals
        && p_factors == cert.p_factors
        && ledger == cert.ledger
        && big_l == cert.big_l
        && l == cert.l
        && c_const(b, l, cert.period) == cert.c_const
        && verdict(cert.containment, big_l) == cert.verdict)
}
