//! Logarithmic norms `μ(A) = lim_{h→0⁺} (‖I + hA‖ - 1)/h` of interval
//! matrices, coordinate frames for the block norm, and Lipschitz ledgers.

use interval::round::add_up;
use interval::{rigorous_inverse, IMatrix, Interval};
use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::{Result, ScbError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Euclidean,
    Infinity,
    Ell1,
    BlockInfinity,
}

/// Change of coordinates `x = Q y` with a certified inverse enclosure.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub q: DMatrix<f64>,
    pub q_inv: IMatrix,
}

impl Frame {
    pub fn new(q: DMatrix<f64>) -> Result<Self> {
        let q_inv = rigorous_inverse(&IMatrix::from_points(&q))?;
        Ok(Self { q, q_inv })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            q: DMatrix::identity(n, n),
            q_inv: IMatrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    /// `[Q⁻¹] A Q`.
    pub fn conjugate(&self, a: &IMatrix) -> IMatrix {
        self.q_inv.mul(a).mul(&IMatrix::from_points(&self.q))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormSpec {
    pub kind: NormKind,
    pub frame: Option<Frame>,
}

impl NormSpec {
    pub fn plain(kind: NormKind) -> Self {
        Self { kind, frame: None }
    }

    pub fn block(frame: Frame) -> Self {
        Self {
            kind: NormKind::BlockInfinity,
            frame: Some(frame),
        }
    }
}

/// Enclosure of `sup μ(A)` over the point matrices of `a`; the upper
/// endpoint is the certified bound.
pub fn mu(a: &IMatrix, norm: &NormSpec) -> Result<Interval> {
    if !a.is_square() {
        return Err(ScbError::Config("log norm of a non-square matrix".into()));
    }
    match norm.kind {
        NormKind::Infinity => Ok(mu_inf(a)),
        NormKind::Ell1 => Ok(mu_inf(&a.transpose())),
        NormKind::Euclidean => mu_euclidean(a),
        NormKind::BlockInfinity => {
            let frame = norm
                .frame
                .as_ref()
                .ok_or_else(|| ScbError::Config("block norm needs a frame".into()))?;
            if a.rows() % 2 != 0 || frame.dim() != a.rows() {
                return Err(ScbError::Config("block norm needs a matching even dimension".into()));
            }
            Ok(mu_block(&frame.conjugate(a)))
        }
    }
}

/// `max_i (a_ii + Σ_{j≠i} |a_ij|)`.
fn mu_inf(a: &IMatrix) -> Interval {
    let n = a.rows();
    let mut best = Interval::point(f64::NEG_INFINITY);
    for i in 0..n {
        let mut row = a[(i, i)];
        for j in (0..n).filter(|&j| j != i) {
            row += a[(i, j)].abs();
        }
        best = best.max(&row);
    }
    best
}

/// Largest eigenvalue of the symmetric part, via Gershgorin discs of the
/// symmetric part rotated into an approximate eigenbasis.
fn mu_euclidean(a: &IMatrix) -> Result<Interval> {
    let n = a.rows();
    let s = IMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)]) * 0.5);
    let v = SymmetricEigen::new(s.mid()).eigenvectors;
    let v_inv = rigorous_inverse(&IMatrix::from_points(&v))?;
    let b = v_inv.mul(&s).mul(&IMatrix::from_points(&v));
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            r = add_up(r, b[(i, j)].mag());
        }
        hi = hi.max(b[(i, i)].widen(r).hi());
        lo = lo.max(b[(i, i)].lo() - r);
    }
    Ok(Interval::new(lo.min(hi), hi))
}

/// `max_i [μ₂(B_ii) + Σ_{j≠i} ‖B_ij‖₂]` over 2×2 blocks.
fn mu_block(b: &IMatrix) -> Interval {
    let nb = b.rows() / 2;
    let mut best = Interval::point(f64::NEG_INFINITY);
    for i in 0..nb {
        let mut row = mu2(&block(b, i, i));
        for j in (0..nb).filter(|&j| j != i) {
            row += Interval::new(0.0, norm2(&block(b, i, j)));
        }
        best = best.max(&row);
    }
    best
}

/// The 2×2 block at block position `(i, j)`, row-major.
pub fn block(a: &IMatrix, i: usize, j: usize) -> [Interval; 4] {
    let (r, c) = (2 * i, 2 * j);
    [a[(r, c)], a[(r, c + 1)], a[(r + 1, c)], a[(r + 1, c + 1)]]
}

/// Enclosure of the largest eigenvalue of the symmetric part of a 2×2 block.
pub fn mu2(b: &[Interval; 4]) -> Interval {
    let p = b[0];
    let r = b[3];
    let q = (b[1] + b[2]) * 0.5;
    let half_diff = (p - r) * 0.5;
    let root = (half_diff.sqr() + q.sqr()).sqrt().expect("sum of squares");
    (p + r) * 0.5 + root
}

/// Upper bound of the spectral norm of a 2×2 block:
/// `σ² = (F² + √(F⁴ - 4 det²))/2`, increasing in `F²`, decreasing in `det²`.
pub fn norm2(b: &[Interval; 4]) -> f64 {
    let f2 = b[0].sqr() + b[1].sqr() + b[2].sqr() + b[3].sqr();
    let det = b[0] * b[3] - b[1] * b[2];
    let f2_hi = Interval::point(f2.hi());
    let disc = f2_hi.sqr() - Interval::point(det.sqr().lo()) * 4.0;
    let disc = Interval::new(disc.lo().max(0.0), disc.hi().max(0.0));
    let sigma2 = (f2_hi + disc.sqrt().expect("clamped")) * 0.5;
    sigma2.sqrt().expect("nonnegative").hi()
}

/// Upper bound of the operator norm for `‖x‖ = max_i ‖x_i‖₂` over
/// 2-blocks: `max_i Σ_j ‖A_ij‖₂`. It is submultiplicative.
pub fn block_row_norm(a: &IMatrix) -> f64 {
    let (nr, nc) = (a.rows() / 2, a.cols() / 2);
    let mut best = 0.0f64;
    for i in 0..nr {
        let mut row = 0.0;
        for j in 0..nc {
            row = add_up(row, norm2(&block(a, i, j)));
        }
        best = best.max(row);
    }
    best
}

/// `‖Q_to⁻¹ Q_from‖` in the block norm, `[1, 1]` for identical frames.
pub fn transition_factor(from: &Frame, to: &Frame) -> Interval {
    if from.q == to.q {
        return Interval::ONE;
    }
    let m = to.q_inv.mul(&IMatrix::from_points(&from.q));
    let hi = block_row_norm(&m);
    // the lower end is only an estimate from the midpoint matrix
    let lo = block_row_norm(&IMatrix::from_points(&m.mid())).min(hi);
    Interval::new(lo, hi)
}

/// One time slab: local log norm `l`, duration `dt` and the norm-change
/// factor `p` applied after it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slab {
    pub l: Interval,
    pub dt: Interval,
    pub p: Interval,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LipschitzLedger {
    slabs: Vec<Slab>,
}

impl LipschitzLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, l: Interval, dt: Interval, p: Interval) -> Result<()> {
        if !(dt.lo() > 0.0) {
            return Err(ScbError::Param(format!("slab duration must be positive, got {dt}")));
        }
        self.slabs.push(Slab { l, dt, p });
        Ok(())
    }

    pub fn slabs(&self) -> &[Slab] {
        &self.slabs
    }

    pub fn total_time(&self) -> Interval {
        self.slabs.iter().map(|s| s.dt).sum()
    }

    /// `L = Π exp(l_i dt_i) P_i` and `l = ln L / Σ dt_i`.
    pub fn accumulate(&self) -> Result<(Interval, Interval)> {
        if self.slabs.is_empty() {
            return Err(ScbError::Param("empty ledger".into()));
        }
        // sums in the exponent keep the product from underflowing
        let mut expo = Interval::ZERO;
        let mut ln_p = Interval::ZERO;
        for s in &self.slabs {
            expo += s.l * s.dt;
            if s.p != Interval::ONE {
                ln_p += Interval::point(s.p.hi()).ln()?;
            }
        }
        let ln_l = expo + ln_p;
        let big_l = ln_l.exp();
        let l = ln_l.checked_div(&self.total_time())?;
        Ok((big_l, l))
    }
}

/// `φ₁(x) = (eˣ - 1)/x`, increasing, `φ₁(0) = 1`.
pub fn phi1(x: Interval) -> Interval {
    let at = |v: f64| -> Interval {
        if v == 0.0 {
            Interval::ONE
        } else {
            let p = Interval::point(v);
            p.exp_m1().checked_div(&p).expect("nonzero point")
        }
    };
    Interval::new(at(x.lo()).lo(), at(x.hi()).hi())
}

/// `e^{l dt} gap + δ dt φ₁(l dt)`, the bound on the distance between an
/// inclusion solution and a reference solution after `dt`.
pub fn flow_distance_bound(l: Interval, delta: Interval, dt: Interval, gap: Interval) -> Interval {
    let x = l * dt;
    x.exp() * gap + delta * dt * phi1(x)
}
