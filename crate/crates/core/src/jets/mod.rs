//! Truncated power series of `W`-valued `k`-forms on a neighbourhood of `0 ∈ ℝⁿ`.

mod calculus;
mod product;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::MatrixElement;
use crate::multilinear::{sym_eval, GradedCoefficient, ValueSpace};

pub use calculus::{contract_euler, euler_lie, ext_d, integrate_i, partial, times_euler};
pub use product::{curvature_contract, curvature_series, product_piece, series_invert, wedge, ContractArg, Pairing};
pub(crate) use product::wedge_piece;

/// Which stored pieces are trustworthy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Validity {
    /// Every stored piece is exact and all degrees above the order vanish.
    Exact,
    /// Pieces `0..=d` are exact; higher stored pieces may be incomplete.
    Through(usize),
}

const UNBOUNDED: usize = usize::MAX / 4;

impl Validity {
    fn bound(self) -> usize {
        match self {
            Validity::Exact => UNBOUNDED,
            Validity::Through(d) => d,
        }
    }

    fn min(self, other: Self) -> Self {
        match (self, other) {
            (Validity::Exact, Validity::Exact) => Validity::Exact,
            _ => Validity::Through(self.bound().min(other.bound())),
        }
    }
}

/// `Σ_{m=0}^{N} η⁽ᵐ⁾`, piece `m` homogeneous of degree `m` in the point.
#[derive(Clone, Debug, PartialEq)]
pub struct FormSeries {
    n: usize,
    form_degree: usize,
    value: ValueSpace,
    pieces: Vec<GradedCoefficient>,
    validity: Validity,
}

impl FormSeries {
    pub fn zero(n: usize, form_degree: usize, value: ValueSpace, order: usize) -> Self {
        let pieces = (0..=order).map(|m| GradedCoefficient::zeros(n, m, form_degree, value)).collect();
        Self { n, form_degree, value, pieces, validity: Validity::Exact }
    }

    /// Assembles a series from pieces `0..=N`.
    pub fn from_pieces(pieces: Vec<GradedCoefficient>, validity: Validity) -> Result<Self> {
        let first = pieces.first().ok_or(Error::InvalidParameter("a series needs at least one piece"))?;
        let (n, form_degree, value) = (first.dim(), first.form_degree(), first.value_space());
        for (m, p) in pieces.iter().enumerate() {
            if p.dim() != n || p.form_degree() != form_degree || p.value_space() != value {
                return Err(Error::ValueSpace("series pieces disagree in shape"));
            }
            if p.sym_degree() != m {
                return Err(Error::DimensionMismatch { expected: m, found: p.sym_degree() });
            }
        }
        let order = pieces.len() - 1;
        let validity = match validity {
            Validity::Through(d) => Validity::Through(d.min(order)),
            v => v,
        };
        Ok(Self { n, form_degree, value, pieces, validity })
    }

    /// `dv`: the identity-valued constant 1-form.
    pub fn dv(n: usize, order: usize) -> Self {
        let mut out = Self::zero(n, 1, ValueSpace::Vector, order);
        for j in 0..n {
            out.pieces[0].entry_mut(0, j)[j] = 1.0;
        }
        out
    }

    /// The Euler field `ℰ = v` as a linear `V`-valued 0-form.
    pub fn euler(n: usize, order: usize) -> Self {
        let mut out = Self::zero(n, 0, ValueSpace::Vector, order);
        if order == 0 {
            out.validity = Validity::Through(0);
            return out;
        }
        for i in 0..n {
            out.pieces[1].entry_mut(i, 0)[i] = 1.0;
        }
        out
    }

    /// The coordinate function `v ↦ v_p`.
    pub fn coordinate(n: usize, p: usize, order: usize) -> Self {
        let mut out = Self::zero(n, 0, ValueSpace::Scalar, order);
        if order == 0 {
            out.validity = Validity::Through(0);
            return out;
        }
        out.pieces[1].entry_mut(p, 0)[0] = 1.0;
        out
    }

    /// Constant `gl(V)`-valued 0-form.
    pub fn constant_matrix(x: &MatrixElement, order: usize) -> Self {
        let n = x.dim();
        let mut out = Self::zero(n, 0, ValueSpace::Matrix, order);
        out.pieces[0].data_mut().copy_from_slice(x.as_slice());
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn form_degree(&self) -> usize {
        self.form_degree
    }

    pub fn value_space(&self) -> ValueSpace {
        self.value
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.pieces.len() - 1
    }

    pub fn validity(&self) -> Validity {
        self.validity
    }

    /// Highest degree whose piece is exact.
    pub fn valid_through(&self) -> usize {
        self.validity.bound().min(self.order())
    }

    pub fn piece(&self, m: usize) -> &GradedCoefficient {
        &self.pieces[m]
    }

    pub fn pieces(&self) -> &[GradedCoefficient] {
        &self.pieces
    }

    pub(crate) fn piece_mut(&mut self, m: usize) -> &mut GradedCoefficient {
        &mut self.pieces[m]
    }

    pub(crate) fn set_validity(&mut self, v: Validity) {
        self.validity = v;
    }

    /// Highest nonzero piece.
    pub fn top_degree(&self) -> Option<usize> {
        self.pieces.iter().rposition(|p| !p.is_zero())
    }

    /// Lowest degree where the true series may be nonzero.
    fn low_degree(&self) -> usize {
        let v = self.valid_through();
        match self.pieces[..=v].iter().position(|p| !p.is_zero()) {
            Some(d) => d,
            None if self.validity == Validity::Exact => UNBOUNDED,
            None => v + 1,
        }
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.n == other.n && self.form_degree == other.form_degree && self.value == other.value
    }

    /// Drops pieces above `order`.
    pub fn truncated(&self, order: usize) -> Self {
        if order >= self.order() {
            return self.clone();
        }
        let dropped_nonzero = self.pieces[order + 1..].iter().any(|p| !p.is_zero());
        let validity = match self.validity {
            Validity::Exact if !dropped_nonzero => Validity::Exact,
            v => Validity::Through(v.bound().min(order)),
        };
        Self {
            n: self.n,
            form_degree: self.form_degree,
            value: self.value,
            pieces: self.pieces[..=order].to_vec(),
            validity,
        }
    }

    /// `self + c · other`, truncated to the smaller order.
    pub fn axpy(&self, c: f64, other: &Self) -> Result<Self> {
        if !self.same_shape(other) {
            return Err(Error::ValueSpace("series shapes differ"));
        }
        let order = self.order().min(other.order());
        let mut out = self.truncated(order);
        let b = other.truncated(order);
        for (p, q) in out.pieces.iter_mut().zip(&b.pieces) {
            p.axpy(c, q)?;
        }
        out.validity = out.validity.min(b.validity);
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for p in &mut out.pieces {
            p.scale_in_place(c);
        }
        out
    }

    /// Largest coefficient magnitude of piece `m`.
    pub fn piece_max_abs(&self, m: usize) -> f64 {
        self.pieces.get(m).map_or(0.0, |p| p.max_abs())
    }

    pub fn max_abs(&self) -> f64 {
        self.pieces.iter().fold(0.0, |a, p| a.max(p.max_abs()))
    }

    /// Component `p` of a `V`-valued series as a scalar series.
    pub fn value_component(&self, p: usize) -> Result<Self> {
        if self.value != ValueSpace::Vector {
            return Err(Error::ValueSpace("value_component needs a V-valued series"));
        }
        let n = self.n;
        let pieces = self
            .pieces
            .iter()
            .map(|piece| {
                let data = piece.data().iter().skip(p).step_by(n).copied().collect();
                GradedCoefficient::from_data(n, piece.sym_degree(), piece.form_degree(), ValueSpace::Scalar, data)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, form_degree: self.form_degree, value: ValueSpace::Scalar, pieces, validity: self.validity })
    }

    /// Coefficient of the basis form `e^I` (canonical key `f`) as a 0-form series.
    pub fn form_entry(&self, f: usize) -> Self {
        let w = self.value.dim(self.n);
        let pieces = self
            .pieces
            .iter()
            .map(|piece| {
                let mut out = GradedCoefficient::zeros(self.n, piece.sym_degree(), 0, self.value);
                for s in 0..piece.sym_len() {
                    out.entry_mut(s, 0)[..w].copy_from_slice(piece.entry(s, f));
                }
                out
            })
            .collect();
        Self { n: self.n, form_degree: 0, value: self.value, pieces, validity: self.validity }
    }

    /// Entry `(i, j)` of a `gl(V)`-valued series as a scalar series.
    pub fn matrix_entry(&self, i: usize, j: usize) -> Result<Self> {
        if self.value != ValueSpace::Matrix {
            return Err(Error::ValueSpace("matrix_entry needs a gl(V)-valued series"));
        }
        let n = self.n;
        let pieces = self
            .pieces
            .iter()
            .map(|piece| {
                let data = piece.data().iter().skip(i * n + j).step_by(n * n).copied().collect();
                GradedCoefficient::from_data(n, piece.sym_degree(), piece.form_degree(), ValueSpace::Scalar, data)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, form_degree: self.form_degree, value: ValueSpace::Scalar, pieces, validity: self.validity })
    }

    /// `θ ↦ g` with `θ(v)(x) = g(v) x`: a `V`-valued 1-form read as a
    /// `gl(V)`-valued 0-form.
    pub fn one_form_to_matrix(&self) -> Result<Self> {
        if self.value != ValueSpace::Vector || self.form_degree != 1 {
            return Err(Error::ValueSpace("expected a V-valued 1-form"));
        }
        let n = self.n;
        let pieces = self
            .pieces
            .iter()
            .map(|piece| {
                let mut out = GradedCoefficient::zeros(n, piece.sym_degree(), 0, ValueSpace::Matrix);
                for s in 0..piece.sym_len() {
                    for j in 0..n {
                        let col = piece.entry(s, j).to_vec();
                        let dst = out.entry_mut(s, 0);
                        for i in 0..n {
                            dst[i * n + j] = col[i];
                        }
                    }
                }
                out
            })
            .collect();
        Ok(Self { n, form_degree: 0, value: ValueSpace::Matrix, pieces, validity: self.validity })
    }

    /// Inverse of [`FormSeries::one_form_to_matrix`].
    pub fn matrix_to_one_form(&self) -> Result<Self> {
        if self.value != ValueSpace::Matrix || self.form_degree != 0 {
            return Err(Error::ValueSpace("expected a gl(V)-valued 0-form"));
        }
        let n = self.n;
        let pieces = self
            .pieces
            .iter()
            .map(|piece| {
                let mut out = GradedCoefficient::zeros(n, piece.sym_degree(), 1, ValueSpace::Vector);
                for s in 0..piece.sym_len() {
                    let m = piece.entry(s, 0).to_vec();
                    for j in 0..n {
                        let dst = out.entry_mut(s, j);
                        for i in 0..n {
                            dst[i] = m[i * n + j];
                        }
                    }
                }
                out
            })
            .collect();
        Ok(Self { n, form_degree: 1, value: ValueSpace::Vector, pieces, validity: self.validity })
    }

    /// `Σ_m η⁽ᵐ⁾(vᵐ)`, laid out `[form key][value component]`.
    pub fn eval_at(&self, v: &[f64]) -> Result<Vec<f64>> {
        let len = self.pieces[0].block_len();
        let mut out = vec![0.0; len];
        for p in &self.pieces {
            if p.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(sym_eval(p, v)?) {
                *o += x;
            }
        }
        Ok(out)
    }

    /// [`FormSeries::eval_at`] restricted to `‖v‖ ≤ radius`.
    pub fn eval_within(&self, v: &[f64], radius: f64) -> Result<Vec<f64>> {
        let norm = crate::num::norm2(v);
        if norm > radius {
            return Err(Error::Radius { norm, radius });
        }
        self.eval_at(v)
    }

    /// Pointwise value as a constant block (`m = 0`).
    pub fn eval_block(&self, v: &[f64]) -> Result<GradedCoefficient> {
        let data = self.eval_at(v)?;
        GradedCoefficient::from_data(self.n, 0, self.form_degree, self.value, data)
    }

    /// Value of a `gl(V)`-valued 0-form at `v`.
    pub fn eval_matrix(&self, v: &[f64]) -> Result<MatrixElement> {
        if self.value != ValueSpace::Matrix || self.form_degree != 0 {
            return Err(Error::ValueSpace("expected a gl(V)-valued 0-form"));
        }
        MatrixElement::from_row_major(self.n, self.eval_at(v)?)
    }

    /// Tensor component of piece `m` at the given slots, for oracles.
    pub fn component(&self, m: usize, mu: &[usize], form: &[usize]) -> Vec<f64> {
        self.pieces[m].component(mu, form)
    }
}
