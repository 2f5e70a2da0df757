//! Fourier-Galerkin state space: stored complex-interval modes under the
//! reality condition, a polynomial-decay tail, energies and the
//! self-consistent-bounds checks.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt::Write as _;

use interval::round::{add_up, mul_up, sqrt_up};
use interval::{format_down, format_up, CInterval, Interval};
use serde::{Deserialize, Serialize};

use crate::burgers::{self, FieldParams};
use crate::{Result, ScbError};

/// Bound `|a_k| ≤ C/|k|^s` for every `|k| > m_excl`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tail {
    pub c: f64,
    pub s: f64,
    pub m_excl: usize,
}

impl Tail {
    pub fn new(c: f64, s: f64, m_excl: usize) -> Self {
        Self { c, s, m_excl }
    }

    pub fn zero(s: f64, m_excl: usize) -> Self {
        Self::new(0.0, s, m_excl)
    }

    /// Upper bound of `C/k^s`.
    pub fn bound(&self, k: usize) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        mul_up(self.c, inv_pow(self.s, k).hi())
    }

    /// Lower bound of `C/k^s`.
    pub fn bound_lo(&self, k: usize) -> f64 {
        (Interval::point(self.c) * inv_pow(self.s, k)).lo()
    }

    /// Constant of the same bound written with exponent `s_new ≤ s`,
    /// valid for `k > m_excl`.
    pub fn with_exponent(&self, s_new: f64) -> Tail {
        assert!(s_new <= self.s, "cannot raise the decay exponent");
        let base = Interval::point((self.m_excl + 1) as f64);
        let f = base.powf(&(Interval::point(s_new) - self.s)).expect("positive base");
        Tail::new(mul_up(self.c, f.hi()), s_new, self.m_excl)
    }
}

thread_local! {
    static POW_CACHE: RefCell<HashMap<u64, Vec<Interval>>> = RefCell::new(HashMap::new());
}

/// Enclosure of `k^{-s}` for `k ≥ 1`, cached per exponent.
pub fn inv_pow(s: f64, k: usize) -> Interval {
    assert!(k >= 1, "inv_pow of 0");
    if k > 1 << 16 {
        return raw_inv_pow(s, k);
    }
    POW_CACHE.with(|c| {
        let mut c = c.borrow_mut();
        let t = c.entry(s.to_bits()).or_default();
        while t.len() < k {
            let next = raw_inv_pow(s, t.len() + 1);
            t.push(next);
        }
        t[k - 1]
    })
}

fn raw_inv_pow(s: f64, k: usize) -> Interval {
    if k == 1 {
        return Interval::ONE;
    }
    let ln = Interval::point(k as f64).ln().expect("k >= 1");
    (-(Interval::point(s) * ln)).exp()
}

/// Enclosure of `Σ_{k>n} k^{-p}` for `p > 1`: explicit terms up to
/// `cut ≥ n`, then the integral bound `cut^{1-p}/(p-1)`.
pub fn zeta_tail(p: f64, n: usize, cut: usize) -> Interval {
    assert!(p > 1.0, "divergent tail sum");
    let cut = cut.max(n).max(1);
    let mut sum = Interval::ZERO;
    for k in (n + 1)..=cut {
        sum += inv_pow(p, k);
    }
    let rest = inv_pow(p - 1.0, cut)
        .checked_div(&(Interval::point(p) - 1.0))
        .expect("p > 1");
    sum + Interval::new(0.0, rest.hi())
}

/// Stored modes plus a decay tail: the set `W ⊕ T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GalerkinState {
    pub a0: Interval,
    /// `modes[k-1]` holds `a_k` for `k = 1..=M`.
    pub modes: Vec<CInterval>,
    pub tail: Tail,
    pub m: usize,
    /// Energy constraint `ℰ ≤ Ẽ` carried by trapping regions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_bound: Option<f64>,
}

impl GalerkinState {
    pub fn new(a0: Interval, modes: Vec<CInterval>, tail: Tail, m: usize) -> Result<Self> {
        let st = Self {
            a0,
            modes,
            tail,
            m,
            energy_bound: None,
        };
        st.validate()?;
        Ok(st)
    }

    /// Every stored mode and the tail zero.
    pub fn zero(a0: Interval, m: usize, big_m: usize, s: f64) -> Self {
        Self {
            a0,
            modes: vec![CInterval::ZERO; big_m],
            tail: Tail::zero(s, big_m),
            m,
            energy_bound: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let big_m = self.modes.len();
        if self.m == 0 || self.m > big_m {
            return Err(ScbError::Config(format!(
                "need 0 < m <= M, got m = {}, M = {big_m}",
                self.m
            )));
        }
        if self.tail.m_excl != big_m {
            return Err(ScbError::Config("tail must start right after the stored modes".into()));
        }
        if !(self.tail.c >= 0.0 && self.tail.c.is_finite()) || !(self.tail.s > 0.5) {
            return Err(ScbError::Config(format!(
                "bad tail C = {}, s = {}",
                self.tail.c, self.tail.s
            )));
        }
        Ok(())
    }

    pub fn big_m(&self) -> usize {
        self.modes.len()
    }

    /// `a_k` for `0 < k ≤ M`.
    pub fn mode(&self, k: usize) -> CInterval {
        self.modes[k - 1]
    }

    /// Value at `|i| ≤ M`; negative indices by conjugation.
    pub fn at(&self, i: i64) -> CInterval {
        match i {
            0 => CInterval::real(self.a0),
            i if i > 0 => self.modes[i as usize - 1],
            i => self.modes[(-i) as usize - 1].conj(),
        }
    }

    /// Value at any index; tail indices give the square `[-C/|i|^s, C/|i|^s]²`.
    pub fn at_any(&self, i: i64) -> CInterval {
        let a = i.unsigned_abs() as usize;
        if a <= self.big_m() {
            self.at(i)
        } else {
            CInterval::disc_box(self.tail.bound(a))
        }
    }

    /// Entrywise containment; tails are compared beyond `M`.
    pub fn subset(&self, other: &GalerkinState) -> bool {
        self.modes.len() == other.modes.len()
            && self.a0.subset(&other.a0)
            && self.modes.iter().zip(&other.modes).all(|(a, b)| a.subset(b))
            && tail_le(&self.tail, &other.tail, false)
    }

    /// Strict interior containment on every stored face and on the tail.
    pub fn interior_subset(&self, other: &GalerkinState) -> bool {
        self.modes.len() == other.modes.len()
            && self.a0.subset(&other.a0)
            && self.modes.iter().zip(&other.modes).all(|(a, b)| a.interior_subset(b))
            && tail_le(&self.tail, &other.tail, true)
    }

    pub fn hull(&self, other: &GalerkinState) -> GalerkinState {
        assert_eq!(self.modes.len(), other.modes.len());
        assert_eq!(self.tail.s, other.tail.s);
        GalerkinState {
            a0: self.a0.hull(&other.a0),
            modes: self.modes.iter().zip(&other.modes).map(|(a, b)| a.hull(b)).collect(),
            tail: Tail::new(self.tail.c.max(other.tail.c), self.tail.s, self.tail.m_excl),
            m: self.m,
            energy_bound: match (self.energy_bound, other.energy_bound) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            },
        }
    }

    /// Modewise intersection; `None` when some mode is disjoint.
    pub fn intersect(&self, other: &GalerkinState) -> Option<GalerkinState> {
        let mut modes = Vec::with_capacity(self.modes.len());
        for (a, b) in self.modes.iter().zip(&other.modes) {
            modes.push(a.intersect(b)?);
        }
        let tail = if self.tail.s == other.tail.s {
            Tail::new(self.tail.c.min(other.tail.c), self.tail.s, self.tail.m_excl)
        } else {
            self.tail
        };
        Some(GalerkinState {
            a0: self.a0.intersect(&other.a0)?,
            modes,
            tail,
            m: self.m,
            energy_bound: match (self.energy_bound, other.energy_bound) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
        })
    }

    /// Midpoint state with zero tail.
    pub fn midpoint(&self) -> GalerkinState {
        GalerkinState {
            a0: self.a0,
            modes: self.modes.iter().map(CInterval::mid_point).collect(),
            tail: Tail::zero(self.tail.s, self.tail.m_excl),
            m: self.m,
            energy_bound: None,
        }
    }

    /// Largest componentwise radius among stored modes.
    pub fn max_rad(&self) -> f64 {
        self.modes
            .iter()
            .map(|z| z.re.rad().max(z.im.rad()))
            .fold(0.0, f64::max)
    }

    /// Table `k | Re a_k | Im a_k` with a tail row; `digits = None` prints
    /// every endpoint at full precision.
    pub fn table(&self, digits: Option<usize>) -> String {
        let fmt = |iv: &Interval| match digits {
            Some(d) => format!("[{}, {}]", format_down(iv.lo(), d), format_up(iv.hi(), d)),
            None => format!("{iv}"),
        };
        let c = match digits {
            Some(d) => format_up(self.tail.c, d),
            None => format!("{:?}", self.tail.c),
        };
        let mut out = String::from("k | Re a_k | Im a_k\n");
        for (i, z) in self.modes.iter().enumerate() {
            let _ = writeln!(out, "{} | {} | {}", i + 1, fmt(&z.re), fmt(&z.im));
        }
        let _ = writeln!(out, ">={} | |a_k| <= {}/k^{}", self.big_m() + 1, c, self.tail.s);
        out
    }
}

/// `C₁/k^{s₁} ≤ C₂/k^{s₂}` for every `k > M`, given `s₁ ≥ s₂`.
fn tail_le(a: &Tail, b: &Tail, strict: bool) -> bool {
    if a.m_excl != b.m_excl || a.s < b.s {
        return false;
    }
    let c = if a.s == b.s { a.c } else { a.with_exponent(b.s).c };
    if strict {
        c < b.c || (c == 0.0 && b.c == 0.0)
    } else {
        c <= b.c
    }
}

/// Upper bounds `ā_i ≥ |a_i|` for every `i ≥ 0`: explicit to `M`, then
/// read from the tail.
#[derive(Clone, Debug)]
pub struct Majorant {
    vals: Vec<f64>,
    pub c: f64,
    pub s: f64,
}

impl Majorant {
    /// `ā_0` is 0 unless `with_a0`.
    pub fn from_state(st: &GalerkinState, with_a0: bool) -> Self {
        let mut vals = Vec::with_capacity(st.big_m() + 1);
        vals.push(if with_a0 { st.a0.mag() } else { 0.0 });
        vals.extend(st.modes.iter().map(CInterval::mag));
        Self {
            vals,
            c: st.tail.c,
            s: st.tail.s,
        }
    }

    pub fn from_values(vals: Vec<f64>, c: f64, s: f64) -> Self {
        assert!(!vals.is_empty());
        Self { vals, c, s }
    }

    pub fn big_m(&self) -> usize {
        self.vals.len() - 1
    }

    #[inline]
    pub fn at(&self, i: usize) -> f64 {
        if i < self.vals.len() {
            self.vals[i]
        } else if self.c == 0.0 {
            0.0
        } else {
            mul_up(self.c, inv_pow(self.s, i).hi())
        }
    }

    fn cut(&self, n: usize) -> usize {
        (4 * self.big_m()).max(n + 1)
    }

    /// Upper bound of `Σ_{i>n} ā_i`.
    pub fn sum_from(&self, n: usize) -> f64 {
        let w = self.cut(n);
        let mut sum = 0.0;
        for i in (n + 1)..=w {
            sum = add_up(sum, self.at(i));
        }
        if self.c > 0.0 {
            assert!(self.s > 1.0, "l1 tail needs s > 1");
            let rest = Interval::point(self.c) * zeta_tail(self.s, w, w);
            sum = add_up(sum, rest.hi());
        }
        sum
    }

    /// Upper bound of `Σ_{i≥n} ā_i²` for `n ≥ 1`.
    pub fn sq_sum_from(&self, n: usize) -> f64 {
        let n = n.max(1);
        let w = self.cut(n);
        let mut sum = 0.0;
        for i in n..=w {
            let a = self.at(i);
            sum = add_up(sum, mul_up(a, a));
        }
        if self.c > 0.0 {
            let c2 = Interval::point(self.c).sqr();
            sum = add_up(sum, (c2 * zeta_tail(2.0 * self.s, w, w)).hi());
        }
        sum
    }

    /// Upper bound of `Σ_{j>n} ā_j ā_{j-k}` for `1 ≤ k ≤ n`.
    pub fn shifted_pair_sum(&self, k: usize, n: usize) -> f64 {
        assert!(k >= 1 && k <= n, "shifted pair sum needs 1 <= k <= n");
        let w = self.cut(n).max(self.big_m() + k);
        let mut sum = 0.0;
        for j in (n + 1)..=w {
            sum = add_up(sum, mul_up(self.at(j), self.at(j - k)));
        }
        if self.c > 0.0 {
            // j > w puts both factors in the tail: ā_j ā_{j-k} ≤ C²/(j-k)^{2s}
            let c2 = Interval::point(self.c).sqr();
            sum = add_up(sum, (c2 * zeta_tail(2.0 * self.s, w - k, w - k)).hi());
        }
        sum
    }

    /// Upper bound of `Σ_{|j|>n} ā_{|j|} ā_{|k-j|}` for `1 ≤ k ≤ n`. Every
    /// convolution pair with an index above `n` is covered by twice this.
    pub fn outer_pair_sum(&self, k: usize, n: usize) -> f64 {
        let w = self.cut(n);
        let mut sum = self.shifted_pair_sum(k, n);
        for i in (n + 1)..=w {
            sum = add_up(sum, mul_up(self.at(i), self.at(i + k)));
        }
        if self.c > 0.0 {
            let c2 = Interval::point(self.c).sqr();
            sum = add_up(sum, (c2 * zeta_tail(2.0 * self.s, w, w)).hi());
        }
        sum
    }

    /// Upper bound of `Σ_{j∉{0,k}} ā_{|j|} ā_{|k-j|}`.
    pub fn full_pair_sum(&self, k: usize) -> f64 {
        let w = (4 * self.big_m()).max(1) as i64;
        let k = k as i64;
        let mut sum = 0.0;
        for j in -w..=(k + w) {
            if j == 0 || j == k {
                continue;
            }
            let a = self.at(j.unsigned_abs() as usize);
            let b = self.at((k - j).unsigned_abs() as usize);
            sum = add_up(sum, mul_up(a, b));
        }
        if self.c > 0.0 {
            // j < -w and j > k + w: both factors in the tail, each side ≤ C² Σ_{i>w} i^{-2s}
            let c2 = Interval::point(self.c).sqr();
            let side = (c2 * zeta_tail(2.0 * self.s, w as usize, w as usize)).hi();
            sum = add_up(sum, mul_up(2.0, side));
        }
        sum
    }

    /// `G` with `Σ_{j∉{0,k}} ā_{|j|}ā_{|k-j|} ≤ G/k^s` for every `k > 2M`.
    ///
    /// Each pair has an index of modulus at least `k/2 > M`, bounded by
    /// `2^s C/k^s`; the other factor sums to at most `2ℓ¹`.
    pub fn far_constant(&self) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        let l1 = self.sum_from(0);
        let s = Interval::point(self.s);
        let two_pow = Interval::point(2.0).powf(&(s + 2.0)).expect("positive base");
        (two_pow * Interval::point(self.c) * Interval::point(l1)).hi()
    }
}

/// Cauchy-Schwarz bound `k √Ẽ (2 Σ_{i≥⌈k/2⌉} ā_i²)^{1/2}` for
/// `(k/2) Σ_{j∉{0,k}} |a_j||a_{k-j}|`, capped by `(k/2) Ẽ`.
pub fn energy_convolution_bound(maj: &Majorant, k: usize, e_tilde: f64) -> f64 {
    let t2 = maj.sq_sum_from(k.div_ceil(2));
    let kk = k as f64;
    let cs = mul_up(mul_up(kk, sqrt_up(e_tilde)), sqrt_up(mul_up(2.0, t2)));
    cs.min(mul_up(0.5 * kk, e_tilde))
}

/// Enclosure of `2 Σ_{k>M} (C/k^s)²`.
pub fn tail_sum_enclosure(c: f64, s: f64, m_excl: usize) -> Interval {
    if c == 0.0 {
        return Interval::ZERO;
    }
    let cut = (4 * m_excl).max(m_excl + 1);
    let c2 = Interval::point(c).sqr();
    let mut partial = Interval::ZERO;
    for k in (m_excl + 1)..=cut {
        partial += inv_pow(2.0 * s, k);
    }
    let full = zeta_tail(2.0 * s, m_excl, cut);
    Interval::new((c2 * partial * 2.0).lo(), (c2 * full * 2.0).hi())
}

/// Enclosure of `Σ_k |a_k|²`; the zero mode is skipped on request.
pub fn energy(state: &GalerkinState, exclude_zero: bool) -> Interval {
    let mut e = Interval::ZERO;
    for z in &state.modes {
        e += z.norm_sqr() * 2.0;
    }
    let t = tail_sum_enclosure(state.tail.c, state.tail.s, state.tail.m_excl);
    e += Interval::new(0.0, t.hi());
    if !exclude_zero {
        e += state.a0.sqr();
    }
    e
}

/// Zeroes every mode above `n` and empties the tail.
pub fn project(state: &GalerkinState, n: usize) -> GalerkinState {
    let mut out = state.clone();
    for z in out.modes.iter_mut().skip(n) {
        *z = CInterval::ZERO;
    }
    out.tail.c = 0.0;
    out
}

/// ℓ² enclosure of the part above `n`: `(Σ_{|k|>n} |a_k|²)^{1/2}`.
pub fn tail_norm(state: &GalerkinState, n: usize) -> Interval {
    let mut sq = Interval::ZERO;
    for z in state.modes.iter().skip(n) {
        sq += z.norm_sqr() * 2.0;
    }
    let t = tail_sum_enclosure(state.tail.c, state.tail.s, state.tail.m_excl);
    sq += Interval::new(0.0, t.hi());
    sq.sqrt().expect("nonnegative")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Face {
    ReLower,
    ReUpper,
    ImLower,
    ImUpper,
    /// Modulus inequality on the tail.
    Modulus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C4Failure {
    pub k: usize,
    pub face: Face,
    /// Enclosure of the field component that missed the sign test.
    pub value: Interval,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SCBReport {
    pub c1_ok: bool,
    pub c2_ok: bool,
    pub c3_ok: bool,
    pub c4_ok: bool,
    pub c2_tail_energy: Interval,
    pub c4_failures: Vec<C4Failure>,
}

/// Conditions C1-C4. C4 is checked on the box faces of every stored mode
/// `k > m` and in modulus form on the tail.
pub fn check_scb(state: &GalerkinState, field: &FieldParams, time_range: Interval) -> SCBReport {
    let tail_energy = tail_sum_enclosure(state.tail.c, state.tail.s, state.tail.m_excl);
    let failures = check_isolation(state, field, time_range, state.m + 1);
    SCBReport {
        c1_ok: true,
        c2_ok: state.tail.s > 0.5 && tail_energy.is_finite(),
        c3_ok: state.tail.s - 2.0 > 1.0,
        c4_ok: failures.is_empty(),
        c2_tail_energy: tail_energy,
        c4_failures: failures,
    }
}

/// Isolation inequalities on the faces of modes `from..=M` plus the tail.
pub fn check_isolation(
    state: &GalerkinState,
    field: &FieldParams,
    time_range: Interval,
    from: usize,
) -> Vec<C4Failure> {
    let maj = Majorant::from_state(state, false);
    let mut failures = Vec::new();
    for k in from.max(1)..=state.big_m() {
        let z = state.mode(k);
        let faces = [
            (Face::ReLower, CInterval::new(Interval::point(z.re.lo()), z.im)),
            (Face::ReUpper, CInterval::new(Interval::point(z.re.hi()), z.im)),
            (Face::ImLower, CInterval::new(z.re, Interval::point(z.im.lo()))),
            (Face::ImUpper, CInterval::new(z.re, Interval::point(z.im.hi()))),
        ];
        for (face, value) in faces {
            let mut f = burgers::field_component(state, k, Some(value), field, time_range, &maj);
            if let (Some(e), true) = (state.energy_bound, field.nonlinear) {
                // points of the face that also satisfy ℰ ≤ Ẽ
                let kk = Interval::point(k as f64);
                let alt = value * field.lambda(k)
                    + value.mul_i().scale(-(state.a0 * kk))
                    + CInterval::disc_box(energy_convolution_bound(&maj, k, e))
                    + field.forcing.forcing_range(k, time_range);
                f = f.intersect(&alt).unwrap_or(f);
            }
            let (comp, positive) = match face {
                Face::ReLower => (f.re, true),
                Face::ReUpper => (f.re, false),
                Face::ImLower => (f.im, true),
                _ => (f.im, false),
            };
            let ok = if positive { comp.lo() > 0.0 } else { comp.hi() < 0.0 };
            if !ok {
                failures.push(C4Failure { k, face, value: comp });
            }
        }
    }
    if let Some((k, value)) = tail_isolation_failure(state, field, &maj) {
        failures.push(C4Failure {
            k,
            face: Face::Modulus,
            value,
        });
    }
    failures
}

/// Modulus form of C4 for `k > M`: `|N_k| + |F_k| < ν k² C/k^s`.
/// Returns the first failing index with the offending margin.
fn tail_isolation_failure(
    state: &GalerkinState,
    field: &FieldParams,
    maj: &Majorant,
) -> Option<(usize, Interval)> {
    let big_m = state.big_m();
    let tail = state.tail;
    let nu_lo = field.forcing.nu.lo();
    let big_k = 4 * big_m;
    for k in (big_m + 1)..=big_k {
        let n = burgers::tail_nonlinear_bound(maj, k, state.energy_bound, field);
        let f = field.forcing.forcing_modulus_sup(k);
        let push = Interval::point(n) + Interval::point(f);
        let decay = Interval::point(nu_lo) * ((k * k) as f64) * Interval::point(tail.bound_lo(k));
        let v = push - decay;
        if !(v.hi() < 0.0) {
            return Some((k, v));
        }
    }
    let k0 = big_k + 1;
    if field.forcing.j() >= k0 {
        return Some((k0, Interval::ENTIRE));
    }
    if !field.nonlinear || tail.c == 0.0 {
        let g = if field.nonlinear { maj.far_constant() } else { 0.0 };
        return (g > 0.0).then_some((k0, Interval::ENTIRE));
    }
    if far_ratio(maj, k0, nu_lo, state.energy_bound).hi() < 1.0 {
        None
    } else {
        Some((k0, Interval::ENTIRE))
    }
}

/// Upper bound, over every `k ≥ k0 > 2M`, of `k^s |N_k| / (ν k² C)`; both
/// estimates used are nonincreasing in `k`.
pub fn far_ratio(maj: &Majorant, k0: usize, nu_lo: f64, energy_bound: Option<f64>) -> Interval {
    let c = Interval::point(maj.c);
    let nu = Interval::point(nu_lo);
    // |N_k| ≤ (k/2) G/k^s gives the ratio G/(2νCk)
    let g = Interval::point(maj.far_constant());
    let mut best = g
        .checked_div(&(nu * c * 2.0 * (k0 as f64)))
        .unwrap_or(Interval::ENTIRE);
    if let Some(e) = energy_bound {
        // 2 Σ_{i≥k/2} C² i^{-2s} ≤ 2 C² (k/2)^{1-2s} (2/k + 1/(2s-1))
        let s = Interval::point(maj.s);
        let recip = Interval::ONE.checked_div(&(s * 2.0 - 1.0)).expect("s > 1/2");
        let inner = (Interval::point(2.0).div_f64(k0 as f64) + recip) * 2.0;
        let pow = Interval::point(2.0).powf(&(s - 0.5)).expect("positive base");
        let num = Interval::point(e).sqrt().expect("nonnegative") * inner.sqrt().expect("nonnegative") * pow;
        let den = nu * Interval::point(k0 as f64).sqrt().expect("positive");
        if let Ok(r) = num.checked_div(&den) {
            if r.hi() < best.hi() {
                best = r;
            }
        }
    }
    best
}
