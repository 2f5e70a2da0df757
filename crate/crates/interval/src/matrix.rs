use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use crate::round::{add_up, div_up, mul_up, sub_down};
use crate::{Interval, IntervalError};

/// Dense row-major interval matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct IMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Interval>,
}

impl IMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Interval>) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        assert_eq!(data.len(), rows * cols, "data length");
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![Interval::ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Interval::ONE } else { Interval::ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Interval) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn from_points(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| Interval::point(m[(i, j)]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mid(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].mid())
    }

    /// Largest entry radius.
    pub fn max_rad(&self) -> f64 {
        self.data.iter().map(Interval::rad).fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn add(&self, b: &IMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (b.rows, b.cols));
        let data = self.data.iter().zip(&b.data).map(|(x, y)| *x + *y).collect();
        Self::new(self.rows, self.cols, data)
    }

    pub fn sub(&self, b: &IMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (b.rows, b.cols));
        let data = self.data.iter().zip(&b.data).map(|(x, y)| *x - *y).collect();
        Self::new(self.rows, self.cols, data)
    }

    pub fn scale(&self, s: Interval) -> Self {
        Self::new(self.rows, self.cols, self.data.iter().map(|x| *x * s).collect())
    }

    pub fn mul(&self, b: &IMatrix) -> Self {
        assert_eq!(self.cols, b.rows, "inner dimensions");
        Self::from_fn(self.rows, b.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * b[(k, j)]).sum()
        })
    }

    pub fn mul_vec(&self, v: &[Interval]) -> Vec<Interval> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|k| self[(i, k)] * v[k]).sum())
            .collect()
    }

    /// Upper bound of the induced ∞-norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(0.0, |acc, j| add_up(acc, self[(i, j)].mag())))
            .fold(0.0, f64::max)
    }

    /// Upper bound of the induced 1-norm (max absolute column sum).
    pub fn norm_1(&self) -> f64 {
        self.transpose().norm_inf()
    }

    pub fn contains_points(&self, m: &DMatrix<f64>) -> bool {
        m.nrows() == self.rows
            && m.ncols() == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self[(i, j)].contains(m[(i, j)])))
    }

    pub fn subset(&self, other: &IMatrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.subset(b))
    }

    /// Sub-block with top-left corner `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.data
    }
}

impl Index<(usize, usize)> for IMatrix {
    type Output = Interval;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Interval {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Interval {
        &mut self.data[i * self.cols + j]
    }
}

/// Encloses the inverse of every point matrix in `q`.
///
/// With `R ≈ mid(q)⁻¹`, `E = I − Rq` and `β = ‖E‖∞ < 1` the Neumann series
/// gives `q⁻¹ ∈ R + ER + [−η, η]` where `η = β‖ER‖∞ / (1 − β)`.
pub fn rigorous_inverse(q: &IMatrix) -> Result<IMatrix, IntervalError> {
    if !q.is_square() {
        return Err(IntervalError::Singular("matrix is not square".into()));
    }
    let n = q.rows();
    let r = q
        .mid()
        .try_inverse()
        .filter(|r| r.iter().all(|x| x.is_finite()))
        .ok_or_else(|| IntervalError::Singular("approximate inverse failed".into()))?;
    let r = IMatrix::from_points(&r);
    let e = IMatrix::identity(n).sub(&r.mul(q));
    let beta = e.norm_inf();
    if !(beta < 1.0) {
        return Err(IntervalError::Singular(format!("residual norm {beta} ≥ 1")));
    }
    let er = e.mul(&r);
    let eta = div_up(mul_up(beta, er.norm_inf()), sub_down(1.0, beta));
    let corr = Interval::sym(eta);
    Ok(IMatrix::from_fn(n, n, |i, j| r[(i, j)] + er[(i, j)] + corr))
}
