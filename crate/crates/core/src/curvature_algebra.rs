//! Algebraic curvature spaces `K(h)`, `K¹(h)`, `K⁽ᵐ⁾(h)` and the holonomy span.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, MatrixElement};
use crate::multilinear::index::{form_rank, sym_rank, FormTable, SymTable};
use crate::multilinear::{sym_eval, GradedCoefficient, ValueSpace};

/// Relative singular-value cutoff for every rank decision in this module.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// Polynomial curvature map `S = Σ_k S⁽ᵏ⁾`, `S⁽ᵏ⁾ ∈ Symᵏ V* ⊗ Λ² V* ⊗ gl(V)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureMap {
    n: usize,
    coeffs: Vec<GradedCoefficient>,
}

impl CurvatureMap {
    /// Validates shapes and first-Bianchi membership of every coefficient.
    pub fn new(n: usize, coeffs: Vec<GradedCoefficient>, tol: f64) -> Result<Self> {
        let map = Self::new_unchecked(n, coeffs)?;
        let r = map.bianchi_residual();
        if r > tol * (1.0 + map.scale()) {
            return Err(Error::NotInK { residual: r });
        }
        Ok(map)
    }

    /// Checks shapes only; the values may leave `K(g)`.
    pub fn new_unchecked(n: usize, mut coeffs: Vec<GradedCoefficient>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter("curvature maps need dimension at least 2"));
        }
        for (k, c) in coeffs.iter().enumerate() {
            if c.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: c.dim() });
            }
            if c.sym_degree() != k || c.form_degree() != 2 || c.value_space() != ValueSpace::Matrix {
                return Err(Error::ValueSpace("curvature coefficient k must lie in Sym^k ⊗ Λ² ⊗ gl(V)"));
            }
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Ok(Self { n, coeffs })
    }

    pub fn zero(n: usize) -> Self {
        Self { n, coeffs: Vec::new() }
    }

    /// `S(x, y) z = κ (⟨y, z⟩ x − ⟨x, z⟩ y)`, constant in `v`.
    pub fn constant_curvature(n: usize, kappa: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::InvalidParameter("curvature constant must be finite"));
        }
        let mut c = GradedCoefficient::try_zeros(n, 0, 2, ValueSpace::Matrix)?;
        for p in 0..n {
            for q in p + 1..n {
                let e = c.entry_mut(0, form_rank(n, &[p, q]));
                e[p * n + q] = kappa;
                e[q * n + p] = -kappa;
            }
        }
        Self::new_unchecked(n, vec![c])
    }

    /// Constant `S` built from a Lie algebra basis `A_a`:
    /// `S(x, y) = −κ Σ_{a,b} G^{ab} ½(⟨A_a x, y⟩ − ⟨A_a y, x⟩) A_b`, with
    /// `G_ab = ½ tr(A_aᵀ A_b)`. An `so(n)` basis reproduces the sphere.
    pub fn symmetric_from_basis(n: usize, basis: &[MatrixElement], kappa: f64) -> Result<Self> {
        if basis.is_empty() {
            return Ok(Self::zero(n));
        }
        for a in basis {
            if a.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: a.dim() });
            }
        }
        let r = basis.len();
        let gram = MatrixElement::from_fn(r, |a, b| {
            0.5 * basis[a].as_slice().iter().zip(basis[b].as_slice()).map(|(x, y)| x * y).sum::<f64>()
        });
        let ginv = gram.inverse(1e-12)?;
        let mut c = GradedCoefficient::try_zeros(n, 0, 2, ValueSpace::Matrix)?;
        for p in 0..n {
            for q in p + 1..n {
                let key = form_rank(n, &[p, q]);
                for a in 0..r {
                    // ½(⟨A e_p, e_q⟩ − ⟨A e_q, e_p⟩)
                    let pair = 0.5 * (basis[a].get(q, p) - basis[a].get(p, q));
                    if pair == 0.0 {
                        continue;
                    }
                    for b in 0..r {
                        let w = -kappa * ginv.get(a, b) * pair;
                        for (o, x) in c.entry_mut(0, key).iter_mut().zip(basis[b].as_slice()) {
                            *o += w * x;
                        }
                    }
                }
            }
        }
        Self::new_unchecked(n, vec![c])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Highest degree with a nonzero coefficient (0 for the zero map).
    pub fn max_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[GradedCoefficient] {
        &self.coeffs
    }

    /// Coefficient of degree `k`, zero above the top degree.
    pub fn coeff(&self, k: usize) -> GradedCoefficient {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| GradedCoefficient::zeros(self.n, k, 2, ValueSpace::Matrix))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest stored coefficient magnitude.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.max_abs()))
    }

    /// Pointwise value `S_v ∈ Λ² V* ⊗ gl(V)` as a constant block.
    pub fn eval(&self, v: &[f64]) -> Result<GradedCoefficient> {
        let mut out = GradedCoefficient::zeros(self.n, 0, 2, ValueSpace::Matrix);
        for c in &self.coeffs {
            let val = sym_eval(c, v)?;
            for (o, x) in out.data_mut().iter_mut().zip(&val) {
                *o += x;
            }
        }
        Ok(out)
    }

    /// Largest first-Bianchi defect over all coefficient keys.
    pub fn bianchi_residual(&self) -> f64 {
        self.coeffs.iter().map(|c| km_membership(c).0).fold(0.0, f64::max)
    }

    /// Orthogonal projection of every coefficient value onto `K(g)`.
    pub fn project_onto_k(&self) -> Self {
        let proj = k_projector(self.n);
        let dim = proj.len();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let mut out = c.clone();
                for s in 0..c.sym_len() {
                    let block = c.block(s);
                    let dst = out.block_mut(s);
                    for (i, d) in dst.iter_mut().enumerate() {
                        *d = (0..dim).map(|j| proj[i][j] * block[j]).sum();
                    }
                }
                out
            })
            .collect();
        Self { n: self.n, coeffs }
    }

    /// Every generator value `S⁽ᵏ⁾_μ(e_i, e_j)`, `i < j`, as a matrix.
    pub fn generator_values(&self) -> Vec<MatrixElement> {
        let n = self.n;
        let mut out = Vec::new();
        for c in &self.coeffs {
            for s in 0..c.sym_len() {
                for f in 0..c.form_len() {
                    let e = c.entry(s, f);
                    if e.iter().any(|&x| x != 0.0) {
                        out.push(MatrixElement::from_fn(n, |i, j| e[i * n + j]));
                    }
                }
            }
        }
        out
    }
}

/// Cyclic sum `R(x,y)z + R(y,z)x + R(z,x)y` of `R_v` on every increasing
/// basis triple, laid out `[triple][component]`.
pub fn first_bianchi_residual(r: &GradedCoefficient, v: &[f64]) -> Result<Vec<f64>> {
    if r.form_degree() != 2 || r.value_space() != ValueSpace::Matrix {
        return Err(Error::ValueSpace("first Bianchi needs a gl(V)-valued 2-form"));
    }
    let n = r.dim();
    let value = sym_eval(r, v)?;
    let w = n * n;
    let at = |a: usize, b: usize| -> &[f64] {
        let k = form_rank(n, &[a, b]);
        &value[k * w..(k + 1) * w]
    };
    let triples = FormTable::new(n, 3);
    let mut out = Vec::with_capacity(triples.len() * n);
    for t in 0..triples.len() {
        let idx = triples.indices(t);
        let (a, b, c) = (idx[0] as usize, idx[1] as usize, idx[2] as usize);
        // R(e_c, e_a) = −R(e_a, e_c)
        let (rab, rbc, rac) = (at(a, b), at(b, c), at(a, c));
        for i in 0..n {
            out.push(rab[i * n + c] + rbc[i * n + a] - rac[i * n + b]);
        }
    }
    Ok(out)
}

/// Cyclic defect `φ(x)(y,z) + φ(y)(z,x) + φ(z)(x,y)` of
/// `φ ∈ V* ⊗ Λ² V* ⊗ gl(V)` (symmetric degree 1), max-norm over basis triples.
pub fn k1_residual(phi: &GradedCoefficient, tol: f64) -> Result<f64> {
    if phi.sym_degree() != 1 || phi.form_degree() != 2 || phi.value_space() != ValueSpace::Matrix {
        return Err(Error::ValueSpace("K¹ test needs an element of V* ⊗ Λ² V* ⊗ gl(V)"));
    }
    let b1 = km_membership(phi).0;
    if b1 > tol * (1.0 + phi.max_abs()) {
        return Err(Error::Precondition { what: "slot values must lie in K(g)", residual: b1 });
    }
    Ok(cyclic_k1(phi, &[]))
}

/// Cyclic defect over the last symmetric slot and the two form slots, with
/// the remaining symmetric slots fixed to `prefix`.
fn cyclic_k1(phi: &GradedCoefficient, prefix: &[usize]) -> f64 {
    let n = phi.dim();
    let w = n * n;
    let mut worst = 0.0f64;
    let mut mu = prefix.to_vec();
    mu.push(0);
    let mut comp = |x: usize, y: usize, z: usize| -> Vec<f64> {
        *mu.last_mut().expect("slot pushed above") = x;
        phi.component(&mu, &[y, z])
    };
    let triples = FormTable::new(n, 3);
    for t in 0..triples.len() {
        let idx = triples.indices(t);
        let (a, b, c) = (idx[0] as usize, idx[1] as usize, idx[2] as usize);
        let p = comp(a, b, c);
        let q = comp(b, c, a);
        let r = comp(c, a, b);
        for i in 0..w {
            worst = worst.max((p[i] + q[i] + r[i]).abs());
        }
    }
    worst
}

/// `(residual_B1, residual_B2)` for `Φ ∈ Symᵐ V* ⊗ Λ² V* ⊗ gl(V)`: the first
/// Bianchi defect over all symmetric keys, and the `K¹` cyclic defect of the
/// last symmetric slot over all keys of the remaining `m − 1` slots.
pub fn km_membership(phi: &GradedCoefficient) -> (f64, f64) {
    let n = phi.dim();
    let m = phi.sym_degree();
    let w = n * n;
    let fl = phi.form_len();
    let triples = FormTable::new(n, 3);
    let mut b1 = 0.0f64;
    for s in 0..phi.sym_len() {
        let block = phi.block(s);
        let at = |a: usize, b: usize| -> &[f64] {
            let k = form_rank(n, &[a, b]);
            &block[k * w..(k + 1) * w]
        };
        debug_assert_eq!(block.len(), fl * w);
        for t in 0..triples.len() {
            let idx = triples.indices(t);
            let (a, b, c) = (idx[0] as usize, idx[1] as usize, idx[2] as usize);
            let (rab, rbc, rac) = (at(a, b), at(b, c), at(a, c));
            for i in 0..n {
                b1 = b1.max((rab[i * n + c] + rbc[i * n + a] - rac[i * n + b]).abs());
            }
        }
    }
    let mut b2 = 0.0f64;
    if m >= 1 {
        let table = SymTable::new(n, m - 1);
        for s in 0..table.len() {
            let prefix: Vec<usize> = table.indices(s).iter().map(|&i| i as usize).collect();
            b2 = b2.max(cyclic_k1(phi, &prefix));
        }
    }
    (b1, b2)
}

/// Orthogonal projector (in canonical pair coordinates) of `Λ² V* ⊗ gl(V)`
/// onto the kernel of the first Bianchi map.
pub fn k_projector(n: usize) -> Vec<Vec<f64>> {
    let pairs = FormTable::new(n, 2);
    let triples = FormTable::new(n, 3);
    let cols = pairs.len() * n * n;
    let rows = triples.len() * n;
    let mut b = vec![0.0; rows * cols];
    for t in 0..triples.len() {
        let idx = triples.indices(t);
        let (a, bb, c) = (idx[0] as usize, idx[1] as usize, idx[2] as usize);
        for i in 0..n {
            let row = t * n + i;
            let mut put = |p: usize, q: usize, j: usize, sign: f64| {
                let col = form_rank(n, &[p, q]) * n * n + i * n + j;
                b[row * cols + col] += sign;
            };
            put(a, bb, c, 1.0);
            put(bb, c, a, 1.0);
            put(a, c, bb, -1.0);
        }
    }
    let mut proj: Vec<Vec<f64>> = (0..cols)
        .map(|i| {
            let mut r = vec![0.0; cols];
            r[i] = 1.0;
            r
        })
        .collect();
    if rows == 0 {
        return proj;
    }
    let dec = linalg::svd(&b, rows, cols);
    let rank = dec.rank(RANK_THRESHOLD);
    for v in dec.right.iter().take(rank) {
        for (i, row) in proj.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x -= v[i] * v[j];
            }
        }
    }
    proj
}

/// Basis of `K(h)` for `h = span(h_basis)`: constant curvature values in
/// `Λ² V* ⊗ h` that satisfy the first Bianchi identity.
pub fn k_basis(n: usize, h_basis: &[MatrixElement]) -> Result<Vec<GradedCoefficient>> {
    for a in h_basis {
        if a.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: a.dim() });
        }
    }
    let rows: Vec<Vec<f64>> = h_basis.iter().map(|m| m.as_slice().to_vec()).collect();
    let h = linalg::orthonormal_row_basis(&rows, n * n, RANK_THRESHOLD);
    let pairs = FormTable::new(n, 2).len();
    let params = pairs * h.len();
    let element = |coords: &[f64]| -> GradedCoefficient {
        let mut c = GradedCoefficient::zeros(n, 0, 2, ValueSpace::Matrix);
        for f in 0..pairs {
            for (b, hb) in h.iter().enumerate() {
                let x = coords[f * h.len() + b];
                for (o, y) in c.entry_mut(0, f).iter_mut().zip(hb) {
                    *o += x * y;
                }
            }
        }
        c
    };
    // columns of the Bianchi map in these coordinates
    let triples = FormTable::new(n, 3).len();
    let out_dim = triples * n;
    if out_dim == 0 {
        return Ok((0..params)
            .map(|p| {
                let mut e = vec![0.0; params];
                e[p] = 1.0;
                element(&e)
            })
            .collect());
    }
    let mut map = vec![0.0; out_dim * params];
    for p in 0..params {
        let mut e = vec![0.0; params];
        e[p] = 1.0;
        let r = first_bianchi_residual(&element(&e), &vec![0.0; n])?;
        for (i, x) in r.iter().enumerate() {
            map[i * params + p] = *x;
        }
    }
    let dec = linalg::svd(&map, out_dim, params);
    let rank = dec.rank(RANK_THRESHOLD);
    Ok(dec.right[rank..].iter().map(|v| element(v)).collect())
}

/// Basis of the span of the curvature values, with bracket-closure data.
#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyBasis {
    /// Orthonormal in the Frobenius inner product.
    pub basis: Vec<MatrixElement>,
    pub dim: usize,
    pub closed_under_bracket: bool,
    pub closure_residual: f64,
}

impl HolonomyBasis {
    /// Orthonormalizes arbitrary spanning matrices.
    pub fn from_spanning(n: usize, mats: &[MatrixElement], closure_tol: f64) -> Self {
        let rows: Vec<Vec<f64>> = mats.iter().map(|m| m.as_slice().to_vec()).collect();
        let basis: Vec<MatrixElement> = linalg::orthonormal_row_basis(&rows, n * n, RANK_THRESHOLD)
            .into_iter()
            .map(|r| MatrixElement::from_fn(n, |i, j| r[i * n + j]))
            .collect();
        let flat: Vec<Vec<f64>> = basis.iter().map(|b| b.as_slice().to_vec()).collect();
        let mut closure_residual = 0.0f64;
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let br = basis[i].commutator(&basis[j]);
                closure_residual = closure_residual.max(linalg::projection_defect(br.as_slice(), &flat));
            }
        }
        Self {
            dim: basis.len(),
            basis,
            closed_under_bracket: closure_residual <= closure_tol,
            closure_residual,
        }
    }
}

/// Span of all `S⁽ᵏ⁾_μ(e_i, e_j)`; by polynomiality this is the span of
/// `S_v(x, y)` over all points and vectors.
pub fn holonomy_span(s: &CurvatureMap, closure_tol: f64) -> HolonomyBasis {
    HolonomyBasis::from_spanning(s.dim(), &s.generator_values(), closure_tol)
}

/// Largest distance from a generator value of `S` to `span(H)`.
pub fn values_in_subalgebra(s: &CurvatureMap, h: &[MatrixElement]) -> f64 {
    let n = s.dim();
    let rows: Vec<Vec<f64>> = h.iter().map(|m| m.as_slice().to_vec()).collect();
    let basis = linalg::orthonormal_row_basis(&rows, n * n, RANK_THRESHOLD);
    s.generator_values()
        .iter()
        .map(|g| linalg::projection_defect(g.as_slice(), &basis))
        .fold(0.0, f64::max)
}

/// Symmetric key of the sorted index list, for callers assembling
/// coefficients by hand.
pub fn sym_key(n: usize, mu: &[usize]) -> usize {
    let mut m = mu.to_vec();
    m.sort_unstable();
    sym_rank(n, &m)
}
