use interval::{pi, CInterval, Interval};
use serde::{Deserialize, Serialize};

use crate::{Result, ScbError};

/// Closed-form forcing expression in `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expr {
    Const(Interval),
    T,
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(Interval::point(c))
    }

    /// `c · sin(t)`.
    pub fn scaled_sin(c: Interval) -> Expr {
        Expr::Mul(vec![Expr::Const(c), Expr::Sin(Box::new(Expr::T))])
    }

    /// Taylor coefficients `[e(t0), e'(t0), e''(t0)/2!, …]` to `order`,
    /// enclosed for every `t0` in the given interval.
    pub fn taylor(&self, t0: Interval, order: usize) -> Vec<Interval> {
        let n = order + 1;
        match self {
            Expr::Const(c) => {
                let mut v = vec![Interval::ZERO; n];
                v[0] = *c;
                v
            }
            Expr::T => {
                let mut v = vec![Interval::ZERO; n];
                v[0] = t0;
                if n > 1 {
                    v[1] = Interval::ONE;
                }
                v
            }
            Expr::Add(terms) => {
                let mut v = vec![Interval::ZERO; n];
                for t in terms {
                    for (a, b) in v.iter_mut().zip(t.taylor(t0, order)) {
                        *a += b;
                    }
                }
                v
            }
            Expr::Mul(terms) => {
                let mut v = vec![Interval::ZERO; n];
                v[0] = Interval::ONE;
                for t in terms {
                    let u = t.taylor(t0, order);
                    v = (0..n)
                        .map(|i| (0..=i).map(|j| v[j] * u[i - j]).sum())
                        .collect();
                }
                v
            }
            Expr::Sin(inner) => sin_cos_series(&inner.taylor(t0, order)).0,
            Expr::Cos(inner) => sin_cos_series(&inner.taylor(t0, order)).1,
        }
    }

    /// Range enclosure over a time interval.
    pub fn range(&self, t: Interval) -> Interval {
        match self {
            Expr::Const(c) => *c,
            Expr::T => t,
            Expr::Add(terms) => terms.iter().map(|e| e.range(t)).sum(),
            Expr::Mul(terms) => terms.iter().fold(Interval::ONE, |acc, e| acc * e.range(t)),
            Expr::Sin(inner) => inner.range(t).sin(),
            Expr::Cos(inner) => inner.range(t).cos(),
        }
    }

    /// Plain floating-point evaluation.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Expr::Const(c) => c.mid(),
            Expr::T => t,
            Expr::Add(terms) => terms.iter().map(|e| e.eval(t)).sum(),
            Expr::Mul(terms) => terms.iter().map(|e| e.eval(t)).product(),
            Expr::Sin(inner) => inner.eval(t).sin(),
            Expr::Cos(inner) => inner.eval(t).cos(),
        }
    }

    /// True when `t` only appears inside `sin`/`cos`, so the range over all
    /// times is bounded.
    pub fn is_bounded(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::T => false,
            Expr::Add(terms) | Expr::Mul(terms) => terms.iter().all(Expr::is_bounded),
            Expr::Sin(_) | Expr::Cos(_) => true,
        }
    }
}

/// Series of `sin u` and `cos u` from the series of `u`.
fn sin_cos_series(u: &[Interval]) -> (Vec<Interval>, Vec<Interval>) {
    let n = u.len();
    let mut s = vec![Interval::ZERO; n];
    let mut c = vec![Interval::ZERO; n];
    s[0] = u[0].sin();
    c[0] = u[0].cos();
    for i in 1..n {
        let mut ds = Interval::ZERO;
        let mut dc = Interval::ZERO;
        for j in 1..=i {
            let ju = u[j] * j as f64;
            ds += ju * c[i - j];
            dc += ju * s[i - j];
        }
        s[i] = ds.div_f64(i as f64);
        c[i] = -dc.div_f64(i as f64);
    }
    (s, c)
}

fn zero_expr() -> Expr {
    Expr::Const(Interval::ZERO)
}

/// One time-dependent forcing mode `f̃_k(t) = re(t) + i im(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonautMode {
    pub k: usize,
    #[serde(default = "zero_expr")]
    pub re: Expr,
    #[serde(default = "zero_expr")]
    pub im: Expr,
}

/// Forcing `F_k(t) = f_k + f̃_k(t)` for `k > 0`, with `F_0 = 0` and
/// `F_{-k} = conj(F_k)` implied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSpec {
    pub nu: Interval,
    /// `autonomous[k-1]` is `f_k`.
    #[serde(default)]
    pub autonomous: Vec<CInterval>,
    /// Half-width of the square added to every autonomous mode.
    #[serde(default)]
    pub perturbation: f64,
    #[serde(default)]
    pub nonautonomous: Vec<NonautMode>,
    /// Forcing period, when the time dependence is periodic.
    #[serde(default)]
    pub t_p: Option<Interval>,
}

/// Subintervals used for sup-in-time range bounds over one period.
const PERIOD_PIECES: usize = 4096;

impl ForcingSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu.lo() > 0.0) || !self.nu.is_finite() {
            return Err(ScbError::Config(format!("viscosity must be positive, got {}", self.nu)));
        }
        if !(self.perturbation >= 0.0 && self.perturbation.is_finite()) {
            return Err(ScbError::Config("perturbation must be a finite nonnegative number".into()));
        }
        if let Some(n) = self.nonautonomous.iter().find(|n| n.k == 0) {
            return Err(ScbError::Config(format!("mode {} : the zero mode cannot be forced", n.k)));
        }
        if let Some(tp) = self.t_p {
            if !(tp.lo() > 0.0) {
                return Err(ScbError::Config("period must be positive".into()));
            }
        }
        if self.t_p.is_none() && !self.nonautonomous.iter().all(|n| n.re.is_bounded() && n.im.is_bounded()) {
            return Err(ScbError::Config("aperiodic forcing must be bounded in time".into()));
        }
        Ok(())
    }

    /// Highest forced index `J`.
    pub fn j(&self) -> usize {
        let a = self
            .autonomous
            .iter()
            .rposition(|z| *z != CInterval::ZERO)
            .map_or(0, |i| i + 1);
        let a = if self.perturbation > 0.0 { self.autonomous.len() } else { a };
        self.nonautonomous.iter().map(|n| n.k).fold(a, usize::max)
    }

    /// Autonomous mode including its perturbation square.
    pub fn autonomous_box(&self, k: usize) -> CInterval {
        match self.autonomous.get(k.wrapping_sub(1)) {
            Some(z) => z.widen(self.perturbation),
            None => CInterval::ZERO,
        }
    }

    /// Point value used by the center system.
    pub fn autonomous_center(&self, k: usize) -> CInterval {
        self.autonomous_box(k).mid_point()
    }

    /// The autonomous box minus its center.
    pub fn perturbation_box(&self, k: usize) -> CInterval {
        let b = self.autonomous_box(k);
        b - b.mid_point()
    }

    fn nonaut(&self, k: usize) -> impl Iterator<Item = &NonautMode> {
        self.nonautonomous.iter().filter(move |n| n.k == k)
    }

    /// Range of `f̃_k` over a time interval.
    pub fn nonaut_range(&self, k: usize, t: Interval) -> CInterval {
        self.nonaut(k)
            .map(|n| CInterval::new(n.re.range(t), n.im.range(t)))
            .sum()
    }

    /// Enclosure of `F_k(t)` for every `t` in the interval, perturbation included.
    pub fn forcing_range(&self, k: usize, t: Interval) -> CInterval {
        self.autonomous_box(k) + self.nonaut_range(k, t)
    }

    /// Taylor coefficients of `f̃_k` at `t0`.
    pub fn nonaut_taylor(&self, k: usize, t0: Interval, order: usize) -> Vec<CInterval> {
        let mut out = vec![CInterval::ZERO; order + 1];
        for n in self.nonaut(k) {
            let re = n.re.taylor(t0, order);
            let im = n.im.taylor(t0, order);
            for (o, (r, i)) in out.iter_mut().zip(re.into_iter().zip(im)) {
                *o += CInterval::new(r, i);
            }
        }
        out
    }

    /// Taylor coefficients of the center forcing `mid(f_k) + f̃_k` at `t0`.
    pub fn center_taylor(&self, k: usize, t0: Interval, order: usize) -> Vec<CInterval> {
        let mut v = self.nonaut_taylor(k, t0, order);
        v[0] += self.autonomous_center(k);
        v
    }

    /// Covering of all relevant times: one period split in pieces, or the
    /// whole line when aperiodic.
    fn time_pieces(&self) -> Vec<Interval> {
        match self.t_p {
            Some(tp) if !self.nonautonomous.is_empty() => {
                let n = PERIOD_PIECES;
                (0..n)
                    .map(|i| {
                        let a = tp * Interval::point(i as f64).div_f64(n as f64);
                        let b = tp * Interval::point((i + 1) as f64).div_f64(n as f64);
                        Interval::new(a.lo(), b.hi())
                    })
                    .collect()
            }
            Some(_) => vec![Interval::ZERO],
            None => vec![Interval::ENTIRE],
        }
    }

    /// Upper bound of `sup_t |F_k(t)|`.
    pub fn forcing_modulus_sup(&self, k: usize) -> f64 {
        if k == 0 || k > self.j() {
            return 0.0;
        }
        self.time_pieces()
            .into_iter()
            .map(|t| self.forcing_range(k, t).mag())
            .fold(0.0, f64::max)
    }

    /// Upper bound of `sup_t |f̃_k(t)|` for one mode.
    pub fn nonaut_modulus_sup(&self, k: usize) -> f64 {
        if self.nonaut(k).next().is_none() {
            return 0.0;
        }
        self.time_pieces()
            .into_iter()
            .map(|t| self.nonaut_range(k, t).mag())
            .fold(0.0, f64::max)
    }

    /// Enclosure of `F_k(t)` over every time.
    pub fn forcing_hull(&self, k: usize) -> CInterval {
        let mut pieces = self.time_pieces().into_iter();
        let first = self.forcing_range(k, pieces.next().expect("at least one piece"));
        pieces.fold(first, |acc, t| acc.hull(&self.forcing_range(k, t)))
    }

    /// Upper bound of `sup_t |f̃_k(t)|` over every `k`.
    pub fn epsilon_tilde(&self) -> f64 {
        (1..=self.j())
            .flat_map(|k| self.time_pieces().into_iter().map(move |t| (k, t)))
            .map(|(k, t)| {
                let r = self.nonaut_range(k, t);
                r.re.mag().max(r.im.mag())
            })
            .fold(0.0, f64::max)
    }

    /// Enclosure of `sup_t E({F_k(t)})` with the perturbation squares.
    pub fn sup_energy(&self) -> Interval {
        let j = self.j();
        if j == 0 {
            return Interval::ZERO;
        }
        let energy_on = |t: Interval| -> Interval {
            (1..=j).map(|k| self.forcing_range(k, t).norm_sqr() * 2.0).sum()
        };
        let mut hi = 0.0f64;
        let mut lo = 0.0f64;
        for t in self.time_pieces() {
            hi = hi.max(energy_on(t).hi());
            // a point in the piece, with the perturbation pushed outward, is attained
            if t.is_finite() {
                let tm = Interval::point(t.mid());
                let e: Interval = (1..=j)
                    .map(|k| {
                        let c = self.autonomous_center(k) + self.nonaut_range(k, tm);
                        Interval::point(outward_norm_sqr_lo(&c, self.perturbation)) * 2.0
                    })
                    .sum();
                lo = lo.max(e.lo());
            }
        }
        Interval::new(lo.min(hi), hi)
    }

    /// `E₀ = sup_t E({F_k(t)}) / ν²`.
    pub fn e0(&self) -> Interval {
        self.sup_energy()
            .checked_div(&self.nu.sqr())
            .expect("viscosity is positive")
    }

    /// Default period enclosure `2π`.
    pub fn two_pi() -> Interval {
        pi() * 2.0
    }
}

/// Lower bound of `|z|²` for a point of `c + [-ε, ε]²` chosen to push
/// each component away from zero.
fn outward_norm_sqr_lo(c: &CInterval, eps: f64) -> f64 {
    let push = |x: Interval| -> Interval {
        let base = if x.lo() >= 0.0 {
            x.lo()
        } else if x.hi() <= 0.0 {
            -x.hi()
        } else {
            -x.width()
        };
        let v = (Interval::point(base) + eps).lo().max(0.0);
        Interval::point(v)
    };
    (push(c.re).sqr() + push(c.im).sqr()).lo()
}
