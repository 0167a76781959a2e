use alloc::vec;
use alloc::vec::Vec;

use super::index::{form_count, form_rank, sort_sign, sym_count, sym_rank, FormTable, SymTable};
use crate::error::{Error, Result};
use crate::num;

/// Target space `W` of a tensor block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ValueSpace {
    Scalar,
    /// `V = ℝⁿ`
    Vector,
    /// `g = gl(V)`, row-major `n × n`
    Matrix,
}

impl ValueSpace {
    pub fn dim(self, n: usize) -> usize {
        match self {
            ValueSpace::Scalar => 1,
            ValueSpace::Vector => n,
            ValueSpace::Matrix => n * n,
        }
    }
}

/// One homogeneous block `Symᵐ V* ⊗ Λᵏ V* ⊗ W`.
///
/// Storage is dense over canonical keys: a nondecreasing multi-index `μ` of
/// length `m` and a strictly increasing form tuple `I` of length `k`. The
/// stored value is the tensor component `η(e_μ; e_I)`, so the full tensor is
/// recovered by symmetrizing the `μ` slots and antisymmetrizing the form
/// slots. Layout is `[sym key][form key][value component]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedCoefficient {
    n: usize,
    sym_degree: usize,
    form_degree: usize,
    value: ValueSpace,
    data: Vec<f64>,
}

impl GradedCoefficient {
    pub fn zeros(n: usize, sym_degree: usize, form_degree: usize, value: ValueSpace) -> Self {
        let len = sym_count(n, sym_degree) * form_count(n, form_degree) * value.dim(n);
        Self { n, sym_degree, form_degree, value, data: vec![0.0; len] }
    }

    pub fn try_zeros(n: usize, sym_degree: usize, form_degree: usize, value: ValueSpace) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("ambient dimension must be positive"));
        }
        if form_degree > n {
            return Err(Error::FormDegree { k: form_degree, n });
        }
        Ok(Self::zeros(n, sym_degree, form_degree, value))
    }

    /// Builds a block from its canonical-key data.
    pub fn from_data(n: usize, sym_degree: usize, form_degree: usize, value: ValueSpace, data: Vec<f64>) -> Result<Self> {
        let mut out = Self::try_zeros(n, sym_degree, form_degree, value)?;
        if data.len() != out.data.len() {
            return Err(Error::DimensionMismatch { expected: out.data.len(), found: data.len() });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("coefficient entries must be finite"));
        }
        out.data = data;
        Ok(out)
    }

    /// A constant (degree-0) block holding a single value of `W` (`k = 0`).
    pub fn constant(n: usize, value: ValueSpace, w: &[f64]) -> Result<Self> {
        Self::from_data(n, 0, 0, value, w.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn sym_degree(&self) -> usize {
        self.sym_degree
    }

    pub fn form_degree(&self) -> usize {
        self.form_degree
    }

    pub fn value_space(&self) -> ValueSpace {
        self.value
    }

    pub fn value_dim(&self) -> usize {
        self.value.dim(self.n)
    }

    pub fn sym_len(&self) -> usize {
        sym_count(self.n, self.sym_degree)
    }

    pub fn form_len(&self) -> usize {
        form_count(self.n, self.form_degree)
    }

    /// Length of the `[form key][value]` block stored per symmetric key.
    pub fn block_len(&self) -> usize {
        self.form_len() * self.value_dim()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn shape_matches(&self, other: &Self) -> bool {
        self.n == other.n
            && self.sym_degree == other.sym_degree
            && self.form_degree == other.form_degree
            && self.value == other.value
    }

    /// All `[form][value]` entries for symmetric key `s`.
    pub fn block(&self, s: usize) -> &[f64] {
        let b = self.block_len();
        &self.data[s * b..(s + 1) * b]
    }

    pub fn block_mut(&mut self, s: usize) -> &mut [f64] {
        let b = self.block_len();
        &mut self.data[s * b..(s + 1) * b]
    }

    /// Value stored at symmetric key `s`, form key `f`.
    pub fn entry(&self, s: usize, f: usize) -> &[f64] {
        let w = self.value_dim();
        let start = (s * self.form_len() + f) * w;
        &self.data[start..start + w]
    }

    pub fn entry_mut(&mut self, s: usize, f: usize) -> &mut [f64] {
        let w = self.value_dim();
        let start = (s * self.form_len() + f) * w;
        &mut self.data[start..start + w]
    }

    /// Tensor component for arbitrary (unsorted) slot indices, with the sign
    /// of the form permutation applied. Repeated form indices give zero.
    pub fn component(&self, mu: &[usize], form: &[usize]) -> Vec<f64> {
        assert_eq!(mu.len(), self.sym_degree);
        assert_eq!(form.len(), self.form_degree);
        let mut m = mu.to_vec();
        m.sort_unstable();
        let mut f = form.to_vec();
        match sort_sign(&mut f) {
            None => vec![0.0; self.value_dim()],
            Some(sign) => {
                let s = sym_rank(self.n, &m);
                let fk = form_rank(self.n, &f);
                self.entry(s, fk).iter().map(|x| sign * x).collect()
            }
        }
    }

    /// Polynomial (monomial) coefficients: the stored tensor component times
    /// the multinomial weight of its key.
    pub(crate) fn to_monomial(&self) -> Vec<f64> {
        let table = SymTable::new(self.n, self.sym_degree);
        let b = self.block_len();
        let mut out = self.data.clone();
        for s in 0..table.len() {
            let w = table.multinomial(s);
            for x in &mut out[s * b..(s + 1) * b] {
                *x *= w;
            }
        }
        out
    }

    pub(crate) fn from_monomial(n: usize, sym_degree: usize, form_degree: usize, value: ValueSpace, mono: Vec<f64>) -> Self {
        let table = SymTable::new(n, sym_degree);
        let mut out = Self { n, sym_degree, form_degree, value, data: mono };
        let b = out.block_len();
        for s in 0..table.len() {
            let w = table.multinomial(s);
            for x in &mut out.data[s * b..(s + 1) * b] {
                *x /= w;
            }
        }
        out
    }

    /// Full tensor over all `n^(m+k)` slot tuples (symmetric slots first).
    pub fn to_full_tensor(&self) -> Vec<f64> {
        let slots = self.sym_degree + self.form_degree;
        let w = self.value_dim();
        let total = num::powi(self.n as f64, slots) as usize;
        let mut out = Vec::with_capacity(total * w);
        let mut idx = vec![0usize; slots];
        for _ in 0..total {
            out.extend(self.component(&idx[..self.sym_degree], &idx[self.sym_degree..]));
            increment(&mut idx, self.n);
        }
        out
    }

    /// Projects a full tensor onto `Symᵐ ⊗ Λᵏ ⊗ W` (symmetrize the first `m`
    /// slots, antisymmetrize the remaining `k`) and keeps canonical keys.
    pub fn from_full_tensor(n: usize, sym_degree: usize, form_degree: usize, value: ValueSpace, full: &[f64]) -> Result<Self> {
        let mut out = Self::try_zeros(n, sym_degree, form_degree, value)?;
        let slots = sym_degree + form_degree;
        let w = value.dim(n);
        let total = num::powi(n as f64, slots) as usize;
        if full.len() != total * w {
            return Err(Error::DimensionMismatch { expected: total * w, found: full.len() });
        }
        // Averaging the symmetric slots and the antisymmetrized form slots over
        // every tuple that canonicalizes to the same key is the projection.
        let mut counts = vec![0.0f64; out.sym_len() * out.form_len()];
        let mut idx = vec![0usize; slots];
        let fl = out.form_len();
        for t in 0..total {
            let mut mu = idx[..sym_degree].to_vec();
            mu.sort_unstable();
            let mut f = idx[sym_degree..].to_vec();
            if let Some(sign) = sort_sign(&mut f) {
                let s = sym_rank(n, &mu);
                let fk = form_rank(n, &f);
                counts[s * fl + fk] += 1.0;
                let src = &full[t * w..(t + 1) * w];
                for (d, x) in out.entry_mut(s, fk).iter_mut().zip(src) {
                    *d += sign * x;
                }
            }
            increment(&mut idx, n);
        }
        for (key, &c) in counts.iter().enumerate() {
            if c > 0.0 {
                for x in &mut out.data[key * w..(key + 1) * w] {
                    *x /= c;
                }
            }
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        num::max_abs(&self.data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    pub fn scale_in_place(&mut self, c: f64) {
        for x in &mut self.data {
            *x *= c;
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.scale_in_place(c);
        out
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.axpy(1.0, other)
    }

    /// `self += c · other`
    pub fn axpy(&mut self, c: f64, other: &Self) -> Result<()> {
        if !self.shape_matches(other) {
            return Err(Error::ValueSpace("graded coefficient shapes differ"));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// Feeds the vectors `xs` (one per form slot) into a constant block
    /// (`m = 0`), returning the value in `W`.
    pub fn apply_form(&self, xs: &[&[f64]]) -> Result<Vec<f64>> {
        if self.sym_degree != 0 {
            return Err(Error::Domain("apply_form needs a pointwise (m = 0) value"));
        }
        if xs.len() != self.form_degree {
            return Err(Error::DimensionMismatch { expected: self.form_degree, found: xs.len() });
        }
        for x in xs {
            if x.len() != self.n {
                return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
            }
        }
        let table = FormTable::new(self.n, self.form_degree);
        let w = self.value_dim();
        let mut out = vec![0.0; w];
        let k = self.form_degree;
        let mut minor = vec![0.0; k * k];
        for f in 0..table.len() {
            let idx = table.indices(f);
            for (r, x) in xs.iter().enumerate() {
                for (c, &i) in idx.iter().enumerate() {
                    minor[c * k + r] = x[i as usize];
                }
            }
            let det = small_det(&minor, k);
            if det != 0.0 {
                for (o, v) in out.iter_mut().zip(self.entry(0, f)) {
                    *o += det * v;
                }
            }
        }
        Ok(out)
    }

    /// Euclidean norm of the full tensor of a single form value in `Λᵏ ⊗ W`
    /// (each canonical form key stands for `k!` ordered tuples).
    pub fn full_norm_of_block(&self, block: &[f64]) -> f64 {
        num::sqrt(num::factorial(self.form_degree) * block.iter().map(|x| x * x).sum::<f64>())
    }
}

fn increment(idx: &mut [usize], n: usize) {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return;
        }
        *slot = 0;
    }
}

pub(crate) fn small_det(a: &[f64], k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        _ => crate::linalg::MatrixElement::from_fn(k, |i, j| a[i * k + j]).det(),
    }
}
