//! Plain floating-point Galerkin solver: integrating-factor RK4 on
//! `a_k' = (λ_k - ikα) a_k + N_k(a) + F_k(t)`, `k = 1..=n`, with the
//! forcing centers. Used for seeds and as a test oracle, never for proofs.

use nalgebra::Complex;

use super::FieldParams;

type C64 = Complex<f64>;

/// Galerkin system of dimension `n` with point coefficients.
#[derive(Clone, Debug)]
pub struct Reference {
    n: usize,
    nu: f64,
    alpha: f64,
    nonlinear: bool,
    params: FieldParams,
}

impl Reference {
    pub fn new(params: &FieldParams, n: usize) -> Self {
        Self {
            n,
            nu: params.forcing.nu.mid(),
            alpha: params.alpha.mid(),
            nonlinear: params.nonlinear,
            params: params.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn linear(&self, k: usize) -> C64 {
        let kf = k as f64;
        C64::new(-self.nu * kf * kf, -kf * self.alpha)
    }

    fn forcing(&self, k: usize, t: f64) -> C64 {
        let f = &self.params.forcing;
        let (ar, ai) = f.autonomous_center(k).mid();
        let mut z = C64::new(ar, ai);
        for m in f.nonautonomous.iter().filter(|m| m.k == k) {
            z += C64::new(m.re.eval(t), m.im.eval(t));
        }
        z
    }

    /// Nonlinear part plus forcing, without the linear term.
    pub fn nonlinear_part(&self, t: f64, a: &[C64]) -> Vec<C64> {
        let n = self.n as i64;
        let at = |i: i64| -> C64 {
            if i > 0 {
                a[i as usize - 1]
            } else {
                a[(-i) as usize - 1].conj()
            }
        };
        (1..=n)
            .map(|k| {
                let mut s = C64::new(0.0, 0.0);
                if self.nonlinear {
                    for j in (k - n)..=n {
                        let r = k - j;
                        if j == 0 || r == 0 || r.abs() > n {
                            continue;
                        }
                        s += at(j) * at(r);
                    }
                }
                C64::new(0.0, -0.5 * k as f64) * s + self.forcing(k as usize, t)
            })
            .collect()
    }

    /// Full vector field.
    pub fn field(&self, t: f64, a: &[C64]) -> Vec<C64> {
        let mut f = self.nonlinear_part(t, a);
        for (k, v) in f.iter_mut().enumerate() {
            *v += self.linear(k + 1) * a[k];
        }
        f
    }

    /// One Lawson step of size `h`.
    pub fn step(&self, t: f64, h: f64, a: &[C64]) -> Vec<C64> {
        let e_half: Vec<C64> = (1..=self.n).map(|k| (self.linear(k) * (h / 2.0)).exp()).collect();
        let e_full: Vec<C64> = e_half.iter().map(|e| e * e).collect();
        let k1 = self.nonlinear_part(t, a);
        let y2: Vec<C64> = (0..self.n).map(|i| e_half[i] * (a[i] + k1[i] * (h / 2.0))).collect();
        let k2 = self.nonlinear_part(t + h / 2.0, &y2);
        let y3: Vec<C64> = (0..self.n).map(|i| e_half[i] * a[i] + k2[i] * (h / 2.0)).collect();
        let k3 = self.nonlinear_part(t + h / 2.0, &y3);
        let y4: Vec<C64> = (0..self.n).map(|i| e_full[i] * a[i] + e_half[i] * k3[i] * h).collect();
        let k4 = self.nonlinear_part(t + h, &y4);
        (0..self.n)
            .map(|i| {
                e_full[i] * a[i]
                    + (e_full[i] * k1[i] + e_half[i] * (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0)
            })
            .collect()
    }

    /// Integrates from `t0` over `duration` with substeps no longer than `h`.
    pub fn flow(&self, t0: f64, duration: f64, h: f64, a: &[C64]) -> Vec<C64> {
        assert_eq!(a.len(), self.n);
        if duration <= 0.0 {
            return a.to_vec();
        }
        let steps = (duration / h).ceil().max(1.0) as usize;
        let dt = duration / steps as f64;
        let mut y = a.to_vec();
        for i in 0..steps {
            y = self.step(t0 + i as f64 * dt, dt, &y);
        }
        y
    }
}
