//! The Burgers vector field in Fourier coordinates
//! `a_k' = λ_k a_k - i(k/2) Σ_j a_j a_{k-j} + F_k(t)`, `λ_k = -ν k²`.

mod forcing;
pub mod reference;

pub use forcing::{Expr, ForcingSpec, NonautMode};

use interval::round::mul_up;
use interval::{CInterval, IMatrix, Interval};
use serde::{Deserialize, Serialize};

use crate::modes::{energy_convolution_bound, GalerkinState, Majorant};
use crate::{Result, ScbError};

/// Field data shared by every evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    pub forcing: ForcingSpec,
    pub m: usize,
    pub big_m: usize,
    /// The conserved mean `a_0`.
    pub alpha: Interval,
    /// `false` drops every convolution term except the `a_0` rotation.
    #[serde(default = "yes")]
    pub nonlinear: bool,
}

fn yes() -> bool {
    true
}

impl FieldParams {
    pub fn new(forcing: ForcingSpec, m: usize, big_m: usize, alpha: Interval) -> Result<Self> {
        let p = Self {
            forcing,
            m,
            big_m,
            alpha,
            nonlinear: true,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.forcing.validate()?;
        if self.m == 0 || self.m > self.big_m {
            return Err(ScbError::Config(format!(
                "need 0 < m <= M, got m = {}, M = {}",
                self.m, self.big_m
            )));
        }
        if self.forcing.j() > self.m {
            return Err(ScbError::Config(format!(
                "forcing reaches mode {} beyond m = {}",
                self.forcing.j(),
                self.m
            )));
        }
        Ok(())
    }

    /// `λ_k = -ν k²`.
    pub fn lambda(&self, k: usize) -> Interval {
        -(self.forcing.nu * ((k * k) as f64))
    }
}

/// `-i (k/2) z`.
fn times_minus_i_half_k(z: CInterval, k: usize) -> CInterval {
    z.mul_i().scale(Interval::point(-(k as f64))).scale(Interval::point(0.5))
}

/// `Σ a_j a_{k-j}` over stored indices `|j|, |k-j| ≤ n` of the given
/// state; `a_0` pairs are included on request.
fn stored_sum(state: &GalerkinState, k: usize, n: usize, with_a0: bool, nonlinear: bool) -> CInterval {
    let k = k as i64;
    let n = n as i64;
    let mut sum = CInterval::ZERO;
    if with_a0 {
        sum += (CInterval::real(state.a0) * state.at(k)) * 2.0;
    }
    if !nonlinear {
        return sum;
    }
    // pairs (j, k-j) with j < k-j, doubled, plus the square term
    let lo = k - n;
    for j in lo..=n {
        let i = k - j;
        if j >= i {
            break;
        }
        if j == 0 || i == 0 || i.abs() > n {
            continue;
        }
        sum += (state.at(j) * state.at(i)) * 2.0;
    }
    if k % 2 == 0 && k / 2 <= n && k != 0 {
        let h = state.at(k / 2);
        sum += h * h;
    }
    sum
}

/// Enclosure of `N_k = -i(k/2) Σ_j a_j a_{k-j}` for `0 < k ≤ M`. The two
/// `a_0` terms are part of the sum only when `include_a0`.
pub fn convolution(state: &GalerkinState, k: usize, include_a0: bool) -> CInterval {
    let maj = Majorant::from_state(state, false);
    convolution_with(state, k, include_a0, true, &maj)
}

fn convolution_with(
    state: &GalerkinState,
    k: usize,
    include_a0: bool,
    nonlinear: bool,
    maj: &Majorant,
) -> CInterval {
    let big_m = state.big_m();
    assert!(k >= 1 && k <= big_m, "convolution index out of the stored range");
    let mut s = stored_sum(state, k, big_m, include_a0, nonlinear);
    if nonlinear && state.tail.c > 0.0 {
        s = s.widen(mul_up(2.0, maj.outer_pair_sum(k, big_m)));
    }
    times_minus_i_half_k(s, k)
}

/// Right-hand side split into the translated Galerkin field over stored
/// modes and the inclusion box `[δ]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rhs {
    /// `λ_k a_k + N_k(stored) + F_k^center(t)` for `k = 1..=M`.
    pub field: Vec<CInterval>,
    /// Tail-induced convolution plus the forcing perturbation; empty when
    /// tail influence was not requested.
    pub delta: Vec<CInterval>,
}

impl Rhs {
    pub fn total(&self) -> Vec<CInterval> {
        if self.delta.is_empty() {
            return self.field.clone();
        }
        self.field.iter().zip(&self.delta).map(|(a, b)| *a + *b).collect()
    }
}

/// Enclosure of the field for `k = 1..=M` over the state and time range.
pub fn rhs(t_range: Interval, state: &GalerkinState, params: &FieldParams, include_tail_influence: bool) -> Rhs {
    let big_m = state.big_m();
    let maj = Majorant::from_state(state, false);
    let mut field = Vec::with_capacity(big_m);
    let mut delta = Vec::new();
    for k in 1..=big_m {
        let s = stored_sum(state, k, big_m, true, params.nonlinear);
        let f = state.mode(k) * params.lambda(k)
            + times_minus_i_half_k(s, k)
            + params.forcing.autonomous_center(k)
            + params.forcing.nonaut_range(k, t_range);
        field.push(f);
        if include_tail_influence {
            let mut d = params.forcing.perturbation_box(k);
            if params.nonlinear && state.tail.c > 0.0 {
                d = d.widen(mul_up(k as f64, maj.outer_pair_sum(k, big_m)));
            }
            delta.push(d);
        }
    }
    Rhs { field, delta }
}

/// Full enclosure of the `k`-th field component over the state, with
/// `a_k` optionally replaced by a face of its box.
pub fn field_component(
    state: &GalerkinState,
    k: usize,
    replace: Option<CInterval>,
    params: &FieldParams,
    t_range: Interval,
    maj: &Majorant,
) -> CInterval {
    let owned;
    let st = match replace {
        Some(v) => {
            let mut s = state.clone();
            s.modes[k - 1] = v;
            owned = s;
            &owned
        }
        None => state,
    };
    st.mode(k) * params.lambda(k)
        + convolution_with(st, k, true, params.nonlinear, maj)
        + params.forcing.forcing_range(k, t_range)
}

/// `-ik a_0 a_k + N_k + F_k` over the state and time range: the field
/// without its linear part, with the `a_0` rotation written separately.
pub fn drift(state: &GalerkinState, k: usize, params: &FieldParams, t_range: Interval, maj: &Majorant) -> CInterval {
    let rot = state.mode(k).mul_i().scale(-(state.a0 * (k as f64)));
    rot + convolution_with(state, k, false, params.nonlinear, maj) + params.forcing.forcing_range(k, t_range)
}

/// Upper bound of `|N_k|` without the `a_0` terms, for any `k`.
pub fn tail_nonlinear_bound(maj: &Majorant, k: usize, energy_bound: Option<f64>, params: &FieldParams) -> f64 {
    if !params.nonlinear {
        return 0.0;
    }
    let direct = mul_up(0.5 * k as f64, maj.full_pair_sum(k));
    match energy_bound {
        Some(e) => direct.min(energy_convolution_bound(maj, k, e)),
        None => direct,
    }
}

/// `M(c) z + M̄(d) z̄` written as a real 2×2 block acting on `(Re z, Im z)`.
fn real_block(c1: CInterval, c2: CInterval) -> [Interval; 4] {
    [
        c1.re + c2.re,
        -c1.im + c2.im,
        c1.im + c2.im,
        c1.re - c2.re,
    ]
}

/// Jacobian of the field restricted to modes `1..=n`, as a real `2n × 2n`
/// matrix with `(Re a_k, Im a_k)` at rows `2k-2, 2k-1`. Coefficients read
/// the full state, so `n` may be smaller than `M`.
pub fn jacobian_n(state: &GalerkinState, params: &FieldParams, n: usize) -> IMatrix {
    let mut j = IMatrix::zeros(2 * n, 2 * n);
    for k in 1..=n {
        let kk = Interval::point(k as f64);
        for l in 1..=n {
            // ∂/∂a_l: -ik a_{k-l}; ∂/∂ā_l: -ik a_{k+l}
            let (mut c1, c2) = if params.nonlinear {
                let a = state.at_any(k as i64 - l as i64);
                let b = state.at_any((k + l) as i64);
                (a.mul_i().scale(-kk), b.mul_i().scale(-kk))
            } else if k == l {
                (CInterval::real(state.a0).mul_i().scale(-kk), CInterval::ZERO)
            } else {
                continue;
            };
            if k == l {
                c1 += CInterval::real(params.lambda(k));
            }
            let b = real_block(c1, c2);
            let (r, c) = (2 * (k - 1), 2 * (l - 1));
            j[(r, c)] = b[0];
            j[(r, c + 1)] = b[1];
            j[(r + 1, c)] = b[2];
            j[(r + 1, c + 1)] = b[3];
        }
    }
    j
}

/// Jacobian of the `m`-th Galerkin field over the box, `2m × 2m`. The
/// forcing does not depend on the state, so `t_range` does not enter.
pub fn jacobian(_t_range: Interval, state: &GalerkinState, params: &FieldParams) -> IMatrix {
    jacobian_n(state, params, params.m)
}

/// Taylor coefficients of the center system, the `n`-mode Galerkin field
/// with center forcing, from `a(t0) = init`. Returns `coeffs[i][k-1]` for
/// `i = 0..=order`.
pub fn center_taylor(
    init: &[CInterval],
    alpha: Interval,
    params: &FieldParams,
    t0: Interval,
    order: usize,
) -> Vec<Vec<CInterval>> {
    let n = init.len();
    let forcing: Vec<Vec<CInterval>> = (1..=n).map(|k| params.forcing.center_taylor(k, t0, order)).collect();
    let lambdas: Vec<Interval> = (1..=n).map(|k| params.lambda(k)).collect();
    let mut coeffs: Vec<Vec<CInterval>> = Vec::with_capacity(order + 1);
    coeffs.push(init.to_vec());
    let at = |c: &Vec<CInterval>, i: i64| -> CInterval {
        match i {
            0 => CInterval::ZERO,
            i if i > 0 => c[i as usize - 1],
            i => c[(-i) as usize - 1].conj(),
        }
    };
    let a0 = CInterval::real(alpha);
    for i in 0..order {
        let mut next = Vec::with_capacity(n);
        for k in 1..=n {
            // Σ_{l=0..i} Σ_j a^{[l]}_j a^{[i-l]}_{k-j}, a_0 series constant
            let mut s = coeffs[i][k - 1] * a0 * 2.0;
            if params.nonlinear {
                let ki = k as i64;
                let ni = n as i64;
                for l in 0..=i {
                    let (p, q) = (&coeffs[l], &coeffs[i - l]);
                    for j in (ki - ni)..=ni {
                        let r = ki - j;
                        if j == 0 || r == 0 || r.abs() > ni {
                            continue;
                        }
                        s += at(p, j) * at(q, r);
                    }
                }
            }
            let v = coeffs[i][k - 1] * lambdas[k - 1] + times_minus_i_half_k(s, k) + forcing[k - 1][i];
            next.push(v.scale(Interval::ONE.div_f64((i + 1) as f64)));
        }
        coeffs.push(next);
    }
    coeffs
}
