//! Dense linear algebra for small dimensions: `n × n` matrices, Gauss-Jordan
//! inversion, and a one-sided Jacobi SVD for rank decisions.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num;

/// Element of `gl(V)` (or of `GL(V)` when invertible), row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixElement {
    n: usize,
    data: Vec<f64>,
}

impl MatrixElement {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: data.len() });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("matrix entries must be finite"));
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.n + j] = x;
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.n);
        mat_mul_acc(&self.data, &other.data, self.n, 1.0, &mut out.data);
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        mat_vec_acc(&self.data, v, self.n, 1.0, &mut out);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { n: self.n, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { n: self.n, data }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|x| c * x).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    /// `[self, other]`
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn max_abs(&self) -> f64 {
        num::max_abs(&self.data)
    }

    pub fn frobenius(&self) -> f64 {
        num::norm2(&self.data)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn det(&self) -> f64 {
        lu_det(&self.data, self.n)
    }

    /// Inverse by Gauss-Jordan elimination; `tol` bounds `|det|` away from zero.
    pub fn inverse(&self, tol: f64) -> Result<Self> {
        let det = self.det();
        if !(det.abs() > tol) {
            return Err(Error::Singular { det });
        }
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
                .unwrap_or(col);
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                    inv.swap(col * n + j, pivot * n + j);
                }
            }
            let p = a[col * n + col];
            for j in 0..n {
                a[col * n + j] /= p;
                inv[col * n + j] /= p;
            }
            for i in 0..n {
                if i != col {
                    let f = a[i * n + col];
                    if f != 0.0 {
                        for j in 0..n {
                            a[i * n + j] -= f * a[col * n + j];
                            inv[i * n + j] -= f * inv[col * n + j];
                        }
                    }
                }
            }
        }
        Ok(Self { n, data: inv })
    }

    /// Matrix exponential by scaling and squaring of a truncated Taylor series.
    pub fn exp(&self) -> Self {
        let norm = self.max_abs() * self.n as f64;
        let mut squarings = 0;
        let mut scale = 1.0;
        while norm * scale > 0.25 {
            scale *= 0.5;
            squarings += 1;
        }
        let a = self.scale(scale);
        let mut term = Self::identity(self.n);
        let mut sum = Self::identity(self.n);
        for k in 1..=20 {
            term = term.mul(&a).scale(1.0 / k as f64);
            sum = sum.add(&term);
        }
        for _ in 0..squarings {
            sum = sum.mul(&sum);
        }
        sum
    }
}

/// `out += scale · a · b` for row-major `n × n` blocks.
pub(crate) fn mat_mul_acc(a: &[f64], b: &[f64], n: usize, scale: f64, out: &mut [f64]) {
    for i in 0..n {
        for l in 0..n {
            let ail = scale * a[i * n + l];
            if ail == 0.0 {
                continue;
            }
            let brow = &b[l * n..(l + 1) * n];
            let orow = &mut out[i * n..(i + 1) * n];
            for (o, &blj) in orow.iter_mut().zip(brow) {
                *o += ail * blj;
            }
        }
    }
}

/// `out += scale · a · v`
pub(crate) fn mat_vec_acc(a: &[f64], v: &[f64], n: usize, scale: f64, out: &mut [f64]) {
    for i in 0..n {
        let row = &a[i * n..(i + 1) * n];
        out[i] += scale * row.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
    }
}

fn lu_det(data: &[f64], n: usize) -> f64 {
    let mut a = data.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap_or(col);
        let p = a[pivot * n + col];
        if p == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        det *= p;
        for i in col + 1..n {
            let f = a[i * n + col] / p;
            if f != 0.0 {
                for j in col..n {
                    a[i * n + j] -= f * a[col * n + j];
                }
            }
        }
    }
    det
}

/// Singular values and right singular vectors of a row-major `rows × cols` matrix.
#[derive(Clone, Debug)]
pub struct Svd {
    pub cols: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    /// `right[k]` is the right singular vector for `singular_values[k]`.
    pub right: Vec<Vec<f64>>,
}

impl Svd {
    /// Numerical rank with threshold `rel · σ_max`.
    pub fn rank(&self, rel: f64) -> usize {
        let smax = self.singular_values.first().copied().unwrap_or(0.0);
        if smax == 0.0 {
            return 0;
        }
        self.singular_values.iter().filter(|&&s| s > rel * smax).count()
    }
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(a: &[f64], rows: usize, cols: usize) -> Svd {
    debug_assert_eq!(a.len(), rows * cols);
    // column-major working copy
    let mut u: Vec<Vec<f64>> = (0..cols).map(|j| (0..rows).map(|i| a[i * cols + j]).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0.0; cols];
            e[j] = 1.0;
            e
        })
        .collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = u[p].iter().map(|x| x * x).sum();
                let beta: f64 = u[q].iter().map(|x| x * x).sum();
                let gamma: f64 = u[p].iter().zip(&u[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= 1e-15 * num::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + num::sqrt(1.0 + zeta * zeta));
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / num::sqrt(1.0 + t * t);
                let s = c * t;
                let (left, right) = u.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
                let (left, right) = v.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(f64, usize)> = u.iter().enumerate().map(|(j, col)| (num::norm2(col), j)).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    Svd {
        cols,
        singular_values: order.iter().map(|&(s, _)| s).collect(),
        right: order.iter().map(|&(_, j)| v[j].clone()).collect(),
    }
}

/// Orthonormal basis (rows) of the span of the given row vectors, using the
/// relative singular-value threshold `rel`.
pub fn orthonormal_row_basis(rows: &[Vec<f64>], dim: usize, rel: f64) -> Vec<Vec<f64>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    let dec = svd(&flat, rows.len(), dim);
    let rank = dec.rank(rel);
    dec.right.into_iter().take(rank).collect()
}

/// Euclidean distance from `x` to the span of the orthonormal rows `basis`.
pub fn projection_defect(x: &[f64], basis: &[Vec<f64>]) -> f64 {
    let mut r = x.to_vec();
    for b in basis {
        let c: f64 = b.iter().zip(x).map(|(p, q)| p * q).sum();
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri -= c * bi;
        }
    }
    // second pass against loss of orthogonality
    for b in basis {
        let c: f64 = b.iter().zip(&r).map(|(p, q)| p * q).sum();
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri -= c * bi;
        }
    }
    num::norm2(&r)
}
