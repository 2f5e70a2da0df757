//! The three-stage proof: absorbing set, contracting segment, capture of
//! the absorbing set by the segment. Certificates record every interval
//! claim and can be re-verified.

use std::time::Instant;

use interval::Interval;
use nalgebra::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::absorbing::{self, AbsorbingSet};
use crate::burgers::reference::Reference;
use crate::burgers::{FieldParams, ForcingSpec};
use crate::integrator::{Integrator, IntegratorConfig};
use crate::modes::GalerkinState;
use crate::segment::{
    self, certify_autonomous, certify_contraction, newton_seed, point_state, ContractionCertificate,
    ContractionVerdict, FramePolicy, SegmentBuildConfig,
};
use crate::{Result, ScbError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofMode {
    /// Time-independent segment checked through the face inequalities.
    AutonomousDominant,
    /// Segment for the time shift by the forcing period.
    PeriodicShift,
}

fn default_epsilon() -> f64 {
    0.01
}

fn default_refine() -> usize {
    3
}

fn default_capture_iters() -> usize {
    20
}

fn default_splits() -> usize {
    64
}

fn default_seed_periods() -> usize {
    5
}

fn default_capture_time() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofConfig {
    pub version: u32,
    pub mode: ProofMode,
    pub m: usize,
    #[serde(rename = "M")]
    pub big_m: usize,
    pub alpha: Interval,
    /// Tail exponent.
    pub s: f64,
    /// Viscosity, forcing and period.
    pub forcing: ForcingSpec,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub segment: SegmentBuildConfig,
    #[serde(default)]
    pub frames: FramePolicy,
    /// Energy level `Ẽ > E₀`; `1.01 E₀` when absent.
    #[serde(default)]
    pub e_tilde: Option<f64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_refine")]
    pub refine_rounds: usize,
    #[serde(default = "default_capture_iters")]
    pub max_capture_iters: usize,
    /// Bisection budget for the capture stage.
    #[serde(default = "default_splits")]
    pub max_splits: usize,
    /// Periods of plain integration from zero before Newton.
    #[serde(default = "default_seed_periods")]
    pub seed_periods: usize,
    /// Integration time per capture round in the autonomous mode, and the
    /// time `Δ` of its contraction bound.
    #[serde(default = "default_capture_time")]
    pub capture_time: f64,
    #[serde(default = "yes")]
    pub nonlinear: bool,
}

impl ProofConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ProofConfig = serde_json::from_str(text).map_err(|e| ScbError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != SCHEMA_VERSION {
            return Err(ScbError::Config(format!(
                "unsupported config version {} (expected {SCHEMA_VERSION})",
                self.version
            )));
        }
        if !(self.s > 3.0) {
            return Err(ScbError::Config(format!("tail exponent must exceed 3, got {}", self.s)));
        }
        if !(self.epsilon > 0.0) {
            return Err(ScbError::Config("epsilon must be positive".into()));
        }
        if !self.alpha.is_point() {
            return Err(ScbError::Config("alpha must be a single value".into()));
        }
        if !(self.capture_time > 0.0 && self.capture_time.is_finite()) {
            return Err(ScbError::Config("capture_time must be positive".into()));
        }
        if let Some(e) = self.e_tilde {
            if !(e > 0.0 && e.is_finite()) {
                return Err(ScbError::Config("e_tilde must be positive".into()));
            }
        }
        match self.mode {
            ProofMode::PeriodicShift if self.forcing.t_p.is_none() => {
                return Err(ScbError::Config("periodic_shift needs forcing.t_p".into()));
            }
            ProofMode::PeriodicShift if self.forcing.t_p.is_some_and(|t| !(t.lo() > 0.0)) => {
                return Err(ScbError::Config("forcing period must be positive".into()));
            }
            _ => {}
        }
        self.integrator.validate()?;
        self.segment.validate()?;
        self.field()?;
        Ok(())
    }

    pub fn field(&self) -> Result<FieldParams> {
        let mut f = FieldParams::new(self.forcing.clone(), self.m, self.big_m, self.alpha)?;
        f.nonlinear = self.nonlinear;
        Ok(f)
    }

    pub fn e_tilde(&self) -> f64 {
        self.e_tilde
            .unwrap_or_else(|| (absorbing::e0(&self.forcing) * 1.01).hi())
    }

    /// Duration of the map whose Lipschitz constant is certified.
    pub fn period(&self) -> Interval {
        match self.mode {
            ProofMode::PeriodicShift => self.forcing.t_p.expect("validated"),
            ProofMode::AutonomousDominant => Interval::point(self.capture_time),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Failed,
    OrbitOnly,
    ProvedLocal,
    ProvedGlobal,
}

/// One capture piece: a bisection path from the absorbing set (`0` lower
/// half, `1` upper half), the rounds it needed and its final image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapturePiece {
    pub path: String,
    pub n: usize,
    pub image: GalerkinState,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaptureRecord {
    pub pieces: Vec<CapturePiece>,
    pub splits: usize,
    /// Set when some piece was never captured.
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericDump {
    pub forcing_energy: Interval,
    pub sup_energy: Interval,
    pub e0: Interval,
    pub e_tilde: f64,
    pub seed: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    pub config: ProofConfig,
    pub numeric: NumericDump,
    #[serde(default)]
    pub absorbing: Option<AbsorbingSet>,
    #[serde(default)]
    pub contraction: Option<ContractionCertificate>,
    #[serde(default)]
    pub capture: Option<CaptureRecord>,
    pub capture_n: Option<usize>,
    pub wall_time: f64,
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

impl Certificate {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| ScbError::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ScbError::Parse(e.to_string()))
    }
}

/// Verdict implied by the recorded stages.
pub fn assemble_verdict(contraction: Option<&ContractionCertificate>, capture_n: Option<usize>) -> Verdict {
    match contraction.map(|c| c.verdict) {
        Some(ContractionVerdict::Contracting) if capture_n.is_some() => Verdict::ProvedGlobal,
        Some(ContractionVerdict::Contracting) => Verdict::ProvedLocal,
        Some(ContractionVerdict::OrbitOnly) => Verdict::OrbitOnly,
        _ => Verdict::Failed,
    }
}

fn numeric_dump(cfg: &ProofConfig, seed: &[Complex<f64>]) -> NumericDump {
    NumericDump {
        forcing_energy: absorbing::forcing_energy(&cfg.forcing),
        sup_energy: absorbing::forcing_energy_sup(&cfg.forcing),
        e0: absorbing::e0(&cfg.forcing),
        e_tilde: cfg.e_tilde(),
        seed: seed.iter().map(|z| (z.re, z.im)).collect(),
    }
}

/// Non-rigorous seed on all `M` stored modes.
pub fn seed(cfg: &ProofConfig, field: &FieldParams) -> Result<Vec<Complex<f64>>> {
    let r = Reference::new(field, cfg.big_m);
    let h = cfg.integrator.step;
    let mut x = vec![Complex::new(0.0, 0.0); cfg.big_m];
    match cfg.mode {
        ProofMode::PeriodicShift => {
            let tp = cfg.forcing.t_p.expect("validated").mid();
            for _ in 0..cfg.seed_periods {
                x = r.flow(0.0, tp, h, &x);
            }
            newton_seed(field, Some(tp), &x, cfg.segment.newton_iters, h)
        }
        ProofMode::AutonomousDominant => {
            for _ in 0..cfg.seed_periods {
                x = r.flow(0.0, cfg.capture_time, h, &x);
            }
            newton_seed(field, None, &x, cfg.segment.newton_iters, h)
        }
    }
}

fn empty_certificate(cfg: &ProofConfig, seed: &[Complex<f64>]) -> Certificate {
    Certificate {
        version: SCHEMA_VERSION,
        config: cfg.clone(),
        numeric: numeric_dump(cfg, seed),
        absorbing: None,
        contraction: None,
        capture: None,
        capture_n: None,
        wall_time: 0.0,
        notes: Vec::new(),
        verdict: Verdict::Failed,
    }
}

/// Step A: seed, segment and contraction certificate.
pub fn run_segment_stage(cfg: &ProofConfig) -> Result<Certificate> {
    cfg.validate()?;
    let start = Instant::now();
    let field = cfg.field()?;
    let seed = seed(cfg, &field)?;
    let mut cert = empty_certificate(cfg, &seed);
    let center = point_state(&field, &seed, cfg.s);
    let outcome = match cfg.mode {
        ProofMode::PeriodicShift => {
            let t_p = cfg.period();
            let integ = Integrator::new(&field, cfg.integrator.clone())?;
            segment::build_segment(&center, &cfg.segment, &integ, t_p)
                .and_then(|seg| certify_contraction(&seg, &field, t_p, &cfg.frames))
        }
        ProofMode::AutonomousDominant => segment::build_autonomous_segment(&center, &cfg.segment, &field)
            .and_then(|(w0, _, status)| certify_autonomous(&w0, status, &field, cfg.period())),
    };
    match outcome {
        Ok(c) => {
            if let Some(f) = &c.fallback {
                cert.notes.push(f.clone());
            }
            cert.contraction = Some(c);
        }
        Err(e) => cert.notes.push(format!("segment stage failed: {e}")),
    }
    cert.verdict = assemble_verdict(cert.contraction.as_ref(), None);
    cert.wall_time = start.elapsed().as_secs_f64();
    Ok(cert)
}

/// Step B: the absorbing set, computed from the configuration alone.
pub fn absorbing_for(cfg: &ProofConfig) -> Result<AbsorbingSet> {
    let field = cfg.field()?;
    absorbing::absorbing_set(&field, cfg.e_tilde(), cfg.epsilon, cfg.s, cfg.refine_rounds)
}

pub fn run_absorb_stage(cfg: &ProofConfig) -> Result<Certificate> {
    cfg.validate()?;
    let start = Instant::now();
    let mut cert = empty_certificate(cfg, &[]);
    match absorbing_for(cfg) {
        Ok(a) => cert.absorbing = Some(a),
        Err(e) => cert.notes.push(format!("absorbing stage failed: {e}")),
    }
    cert.wall_time = start.elapsed().as_secs_f64();
    Ok(cert)
}

/// Splits along the widest stored component.
pub fn bisect(x: &GalerkinState) -> (GalerkinState, GalerkinState) {
    let mut best = (0usize, false, -1.0f64);
    for (k, z) in x.modes.iter().enumerate() {
        if z.re.width() > best.2 {
            best = (k, false, z.re.width());
        }
        if z.im.width() > best.2 {
            best = (k, true, z.im.width());
        }
    }
    let (k, im, _) = best;
    let comp = if im { x.modes[k].im } else { x.modes[k].re };
    let mid = comp.mid();
    let (lo, hi) = (Interval::new(comp.lo(), mid), Interval::new(mid, comp.hi()));
    let mut a = x.clone();
    let mut b = x.clone();
    if im {
        a.modes[k].im = lo;
        b.modes[k].im = hi;
    } else {
        a.modes[k].re = lo;
        b.modes[k].re = hi;
    }
    (a, b)
}

/// Piece of `x` reached by a bisection path.
pub fn piece_at(x: &GalerkinState, path: &str) -> Result<GalerkinState> {
    let mut p = x.clone();
    for c in path.chars() {
        let (a, b) = bisect(&p);
        p = match c {
            '0' => a,
            '1' => b,
            _ => return Err(ScbError::Parse(format!("bad bisection path {path:?}"))),
        };
    }
    Ok(p)
}

/// True when the paths are the leaves of a full binary tree: prefix free
/// with `Σ 2^{-len} = 1`.
pub fn paths_cover(paths: &[&str]) -> bool {
    if paths.is_empty() || paths.iter().any(|p| p.len() > 100) {
        return false;
    }
    let depth = paths.iter().map(|p| p.len()).max().unwrap_or(0) as u32;
    if depth > 120 {
        return false;
    }
    let mut total: u128 = 0;
    for p in paths {
        total += 1u128 << (depth - p.len() as u32);
    }
    let mut sorted: Vec<&&str> = paths.iter().collect();
    sorted.sort();
    let prefix_free = sorted.windows(2).all(|w| !w[1].starts_with(*w[0]));
    prefix_free && total == 1u128 << depth
}

enum PieceOutcome {
    Captured(usize, GalerkinState),
    Missed(String),
}

fn run_piece(integ: &Integrator, x: &GalerkinState, w0: &GalerkinState, delta: Interval, max_iters: usize) -> PieceOutcome {
    let mut cur = x.clone();
    if cur.interior_subset(w0) {
        return PieceOutcome::Captured(0, cur);
    }
    for n in 1..=max_iters {
        match integ.time_shift(0.0, delta, &cur) {
            Ok((img, _)) => cur = img,
            Err(e) => return PieceOutcome::Missed(e.to_string()),
        }
        if cur.interior_subset(w0) {
            return PieceOutcome::Captured(n, cur);
        }
    }
    PieceOutcome::Missed(format!("not inside W0 after {max_iters} rounds"))
}

/// Step C: iterates the absorbing set (split on failure) until every piece
/// lies in the interior of `W0`.
pub fn capture(cfg: &ProofConfig, set: &GalerkinState, w0: &GalerkinState) -> Result<CaptureRecord> {
    let field = cfg.field()?;
    let integ = Integrator::new(&field, cfg.integrator.clone())?;
    let delta = cfg.period();
    let mut queue: Vec<String> = vec![String::new()];
    let mut done: Vec<CapturePiece> = Vec::new();
    let mut splits = 0;
    let mut failure = None;
    while !queue.is_empty() {
        let results: Vec<(String, PieceOutcome)> = queue
            .par_iter()
            .map(|path| {
                let out = match piece_at(set, path) {
                    Ok(p) => run_piece(&integ, &p, w0, delta, cfg.max_capture_iters),
                    Err(e) => PieceOutcome::Missed(e.to_string()),
                };
                (path.clone(), out)
            })
            .collect();
        queue.clear();
        for (path, out) in results {
            match out {
                PieceOutcome::Captured(n, image) => done.push(CapturePiece { path, n, image }),
                PieceOutcome::Missed(reason) => {
                    if splits < cfg.max_splits {
                        splits += 1;
                        queue.push(format!("{path}0"));
                        queue.push(format!("{path}1"));
                    } else if failure.is_none() {
                        failure = Some(format!("piece {path:?}: {reason}"));
                    }
                }
            }
        }
        if failure.is_some() {
            break;
        }
    }
    done.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(CaptureRecord {
        pieces: done,
        splits,
        failure,
    })
}

/// Runs capture on a certificate that already holds the segment stage.
pub fn run_capture_stage(mut cert: Certificate) -> Result<Certificate> {
    let start = Instant::now();
    let cfg = cert.config.clone();
    cfg.validate()?;
    if cert.absorbing.is_none() {
        match absorbing_for(&cfg) {
            Ok(a) => cert.absorbing = Some(a),
            Err(e) => cert.notes.push(format!("absorbing stage failed: {e}")),
        }
    }
    let contracting = cert
        .contraction
        .as_ref()
        .is_some_and(|c| c.verdict == ContractionVerdict::Contracting);
    if let (Some(a), Some(c), true) = (&cert.absorbing, &cert.contraction, contracting) {
        let rec = capture(&cfg, &a.set, &c.w0)?;
        if let Some(f) = &rec.failure {
            cert.notes.push(format!("capture incomplete: {f}"));
        } else {
            cert.capture_n = rec.pieces.iter().map(|p| p.n).max();
        }
        cert.capture = Some(rec);
    } else if !contracting {
        cert.notes.push("capture skipped: segment is not contracting".into());
    }
    cert.verdict = assemble_verdict(cert.contraction.as_ref(), cert.capture_n);
    cert.wall_time += start.elapsed().as_secs_f64();
    Ok(cert)
}

/// The full pipeline. Stage failures degrade the verdict; only an invalid
/// configuration is an error.
pub fn run_proof(cfg: &ProofConfig) -> Result<Certificate> {
    let seg = run_segment_stage(cfg)?;
    run_capture_stage(seg)
}

/// Replays every recorded claim without re-running the capture
/// integration; `full` re-runs the whole pipeline and compares.
pub fn verify_certificate(cert: &Certificate, full: bool) -> Result<bool> {
    let cfg = &cert.config;
    if cert.version != SCHEMA_VERSION || cfg.validate().is_err() {
        return Ok(false);
    }
    let field = cfg.field()?;
    if numeric_dump(cfg, &[]).e0 != cert.numeric.e0 || cert.numeric.e_tilde != cfg.e_tilde() {
        return Ok(false);
    }
    if let Some(a) = &cert.absorbing {
        if absorbing_for(cfg).ok().as_ref() != Some(a) {
            return Ok(false);
        }
    }
    if let Some(c) = &cert.contraction {
        if c.period != cfg.period() || !segment::replay_contraction(c, &field)? {
            return Ok(false);
        }
    }
    match (&cert.capture, cert.capture_n) {
        (Some(rec), n) => {
            let (Some(c), Some(_)) = (&cert.contraction, &cert.absorbing) else {
                return Ok(false);
            };
            let paths: Vec<&str> = rec.pieces.iter().map(|p| p.path.as_str()).collect();
            let complete = rec.failure.is_none() && paths_cover(&paths);
            if !rec.pieces.iter().all(|p| p.image.interior_subset(&c.w0)) {
                return Ok(false);
            }
            let expect_n = if complete { rec.pieces.iter().map(|p| p.n).max() } else { None };
            if n != expect_n {
                return Ok(false);
            }
        }
        (None, Some(_)) => return Ok(false),
        (None, None) => {}
    }
    if assemble_verdict(cert.contraction.as_ref(), cert.capture_n) != cert.verdict {
        return Ok(false);
    }
    if full {
        let again = if cert.capture.is_some() || cert.absorbing.is_some() && cert.contraction.is_some() {
            run_proof(cfg)?
        } else if cert.contraction.is_some() {
            run_segment_stage(cfg)?
        } else {
            run_absorb_stage(cfg)?
        };
        return Ok(same_claims(&again, cert));
    }
    Ok(true)
}

/// Equality of everything but wall time and notes.
pub fn same_claims(a: &Certificate, b: &Certificate) -> bool {
    a.config == b.config
        && a.absorbing == b.absorbing
        && a.contraction == b.contraction
        && a.capture == b.capture
        && a.capture_n == b.capture_n
        && a.verdict == b.verdict
}

/// Plain-text tables of a certificate.
pub fn tables(cert: &Certificate) -> String {
    let mut out = String::new();
    let n = &cert.numeric;
    out.push_str(&format!("E({{f_k}}) = {}\n", n.forcing_energy));
    out.push_str(&format!("sup total forced energy = {}\n", n.sup_energy));
    out.push_str(&format!("E_0 = {}\n", n.e0));
    out.push_str(&format!("E~ = {}\n", n.e_tilde));
    if let Some(c) = &cert.contraction {
        out.push_str("\nThe trapping region, W =\n");
        out.push_str(&c.w0.table(Some(6)));
        out.push_str("\nImage of W =\n");
        out.push_str(&c.image.table(Some(6)));
        out.push_str("\nApproximate eigenvalues:\n");
        for (re, im) in &c.eigenvalues {
            if *im == 0.0 {
                out.push_str(&format!("{re:.6}\n"));
            } else {
                out.push_str(&format!("{re:.6} +- {im:.6}i\n"));
            }
        }
        out.push_str(&format!(
            "\nl = {}\nC = {}\nThe Lipschitz constant, L <= {:e}\nframes = {}\ncontraction: {:?}\n",
            c.l,
            c.c_const,
            c.big_l.hi(),
            c.frames.len(),
            c.verdict
        ));
    }
    if let Some(a) = &cert.absorbing {
        out.push_str("\nThe absorbing set =\n");
        out.push_str(&a.set.table(Some(6)));
    }
    if let Some(n) = cert.capture_n {
        out.push_str(&format!("\ncaptured after n = {n}\n"));
    }
    out.push_str(&format!("\nverdict: {:?}\n", cert.verdict));
    out.push_str(&format!("Total execution time was {:.2} s\n", cert.wall_time));
    out
}
