//! Wedge products under bilinear value pairings, series inversion and the
//! curvature composition `S(a, b)`.

use alloc::vec;
use alloc::vec::Vec;

use super::{FormSeries, Validity, UNBOUNDED};
use crate::curvature_algebra::CurvatureMap;
use crate::error::{Error, Result};
use crate::linalg::{mat_mul_acc, mat_vec_acc, MatrixElement};
use crate::multilinear::index::{form_rank, sort_sign, sym_count, sym_rank_exps, FormTable, SymTable, WedgeTable};
use crate::multilinear::{GradedCoefficient, ValueSpace};

/// Bilinear map on values used to multiply two forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pairing {
    /// `gl × gl → gl`, `(X, Y) ↦ XY`.
    MatrixMultiply,
    /// `gl × V → V`, `(X, y) ↦ Xy`.
    MatrixOnVector,
    /// `ℝ × W → W`.
    Scale,
    /// A `gl`-valued 0-form acting on a `gl`-valued `k`-form through the
    /// infinitesimal representation on its form slots and value:
    /// `(A, φ) ↦ [A, φ(…)] − Σ_r φ(…, A x_r, …)`.
    RhoStar,
}

impl Pairing {
    fn output(self, left: ValueSpace, right: ValueSpace, left_k: usize) -> Result<ValueSpace> {
        use ValueSpace::*;
        match (self, left, right) {
            (Pairing::MatrixMultiply, Matrix, Matrix) => Ok(Matrix),
            (Pairing::MatrixOnVector, Matrix, Vector) => Ok(Vector),
            (Pairing::Scale, Scalar, w) => Ok(w),
            (Pairing::RhoStar, Matrix, Matrix) if left_k == 0 => Ok(Matrix),
            _ => Err(Error::ValueSpace("operands do not fit the pairing")),
        }
    }
}

/// Per-pair form bookkeeping for one product of blocks.
enum FormPlan {
    Wedge(WedgeTable),
    /// For each target key `I`: list of `(A-entry (j, i_r), source key, sign)`.
    Rho(Vec<Vec<(usize, usize, usize, f64)>>),
}

fn form_plan(n: usize, ka: usize, kb: usize, pairing: Pairing) -> FormPlan {
    if pairing != Pairing::RhoStar {
        return FormPlan::Wedge(WedgeTable::new(n, ka, kb));
    }
    let table = FormTable::new(n, kb);
    let mut plan = Vec::with_capacity(table.len());
    let mut idx = vec![0usize; kb];
    for f in 0..table.len() {
        let ii = table.indices(f);
        let mut list = Vec::new();
        for r in 0..kb {
            for j in 0..n {
                for (d, &x) in idx.iter_mut().zip(ii) {
                    *d = x as usize;
                }
                idx[r] = j;
                if let Some(sign) = sort_sign(&mut idx) {
                    list.push((j, ii[r] as usize, form_rank(n, &idx), sign));
                }
            }
        }
        plan.push(list);
    }
    FormPlan::Rho(plan)
}

/// `out += pair(a, b)` for `[form][value]` blocks.
#[allow(clippy::too_many_arguments)]
fn pair_blocks(
    n: usize,
    pairing: Pairing,
    plan: &FormPlan,
    a: &[f64],
    wa: usize,
    b: &[f64],
    wb: usize,
    out: &mut [f64],
    wo: usize,
    c: f64,
) {
    match plan {
        FormPlan::Wedge(table) => {
            for &(fa, fb, fo, sign) in &table.entries {
                let x = &a[fa * wa..(fa + 1) * wa];
                let y = &b[fb * wb..(fb + 1) * wb];
                let o = &mut out[fo * wo..(fo + 1) * wo];
                let s = c * sign;
                match pairing {
                    Pairing::MatrixMultiply => mat_mul_acc(x, y, n, s, o),
                    Pairing::MatrixOnVector => mat_vec_acc(x, y, n, s, o),
                    Pairing::Scale => {
                        let f = s * x[0];
                        if f != 0.0 {
                            for (oi, yi) in o.iter_mut().zip(y) {
                                *oi += f * yi;
                            }
                        }
                    }
                    Pairing::RhoStar => unreachable!("rho-star uses its own plan"),
                }
            }
        }
        FormPlan::Rho(plan) => {
            // a is a single matrix A; b a k-form with matrix values.
            for (fo, list) in plan.iter().enumerate() {
                let o = &mut out[fo * wo..(fo + 1) * wo];
                let y = &b[fo * wb..(fo + 1) * wb];
                // [A, Y]
                mat_mul_acc(a, y, n, c, o);
                mat_mul_acc(y, a, n, -c, o);
                for &(j, i, src, sign) in list {
                    let aji = a[j * n + i];
                    if aji == 0.0 {
                        continue;
                    }
                    let f = -c * sign * aji;
                    for (oi, yi) in o.iter_mut().zip(&b[src * wb..(src + 1) * wb]) {
                        *oi += f * yi;
                    }
                }
            }
        }
    }
}

/// Product of two homogeneous pieces: symmetric parts multiply as
/// polynomials, form parts by the shuffle wedge, values by `pairing`.
pub fn product_piece(a: &GradedCoefficient, b: &GradedCoefficient, pairing: Pairing) -> Result<GradedCoefficient> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.dim() });
    }
    let value = pairing.output(a.value_space(), b.value_space(), a.form_degree())?;
    let ka = a.form_degree();
    let kb = b.form_degree();
    let k = if pairing == Pairing::RhoStar { kb } else { ka + kb };
    let plan = form_plan(n, ka, kb, pairing);
    let mut out = Vec::new();
    accumulate_product(n, a, b, pairing, &plan, 1.0, &mut out, value, k);
    let m = a.sym_degree() + b.sym_degree();
    if out.is_empty() {
        return Ok(GradedCoefficient::zeros(n, m, k, value));
    }
    Ok(GradedCoefficient::from_monomial(n, m, k, value, out))
}

/// Adds `c · a·b` (monomial coefficients) into `out`, allocating on first use.
#[allow(clippy::too_many_arguments)]
fn accumulate_product(
    n: usize,
    a: &GradedCoefficient,
    b: &GradedCoefficient,
    pairing: Pairing,
    plan: &FormPlan,
    c: f64,
    out: &mut Vec<f64>,
    value: ValueSpace,
    k: usize,
) {
    if a.is_zero() || b.is_zero() {
        return;
    }
    let (ma, mb) = (a.sym_degree(), b.sym_degree());
    let (wa, wb, wo) = (a.value_dim(), b.value_dim(), value.dim(n));
    let fo = FormTable::new(n, k).len();
    let blo = fo * wo;
    if out.is_empty() {
        out.resize(sym_count(n, ma + mb) * blo, 0.0);
    }
    let ta = SymTable::new(n, ma);
    let tb = SymTable::new(n, mb);
    let mono_a = a.to_monomial();
    let mono_b = b.to_monomial();
    let (bla, blb) = (a.block_len(), b.block_len());
    let nonzero = |data: &[f64], len: usize, count: usize| -> Vec<usize> {
        (0..count).filter(|&s| data[s * len..(s + 1) * len].iter().any(|&x| x != 0.0)).collect()
    };
    let keys_a = nonzero(&mono_a, bla, ta.len());
    let keys_b = nonzero(&mono_b, blb, tb.len());
    let mut exps = vec![0u8; n];
    for &sa in &keys_a {
        let ea = ta.exps(sa);
        let block_a = &mono_a[sa * bla..(sa + 1) * bla];
        for &sb in &keys_b {
            for ((e, &x), &y) in exps.iter_mut().zip(ea).zip(tb.exps(sb)) {
                *e = x + y;
            }
            let so = sym_rank_exps(&exps);
            let block_b = &mono_b[sb * blb..(sb + 1) * blb];
            pair_blocks(n, pairing, plan, block_a, wa, block_b, wb, &mut out[so * blo..(so + 1) * blo], wo, c);
        }
    }
}

fn product_validity(a: &FormSeries, b: &FormSeries, order: usize) -> Validity {
    let (la, lb) = (a.low_degree(), b.low_degree());
    if la >= UNBOUNDED || lb >= UNBOUNDED {
        return Validity::Exact;
    }
    if a.validity() == Validity::Exact && b.validity() == Validity::Exact {
        let top = a.top_degree().unwrap_or(0) + b.top_degree().unwrap_or(0);
        if top <= order {
            return Validity::Exact;
        }
        return Validity::Through(order);
    }
    let va = a.validity().bound();
    let vb = b.validity().bound();
    let v = va.saturating_add(lb).min(vb.saturating_add(la));
    Validity::Through(v.min(order))
}

/// `η₁ ∧ η₂` under `pairing`, truncated to the smaller order.
///
/// With unit-weight shuffles, two `gl`-valued 1-forms give
/// `(ω∧ω)(x, y) = ω(x)ω(y) − ω(y)ω(x)`.
pub fn wedge(a: &FormSeries, b: &FormSeries, pairing: Pairing) -> Result<FormSeries> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.dim() });
    }
    let value = pairing.output(a.value_space(), b.value_space(), a.form_degree())?;
    let (ka, kb) = (a.form_degree(), b.form_degree());
    let k = if pairing == Pairing::RhoStar { kb } else { ka + kb };
    let order = a.order().min(b.order());
    let plan = form_plan(n, ka, kb, pairing);
    let mut pieces = Vec::with_capacity(order + 1);
    for d in 0..=order {
        let mut out = Vec::new();
        for i in 0..=d {
            accumulate_product(n, a.piece(i), b.piece(d - i), pairing, &plan, 1.0, &mut out, value, k);
        }
        pieces.push(if out.is_empty() {
            GradedCoefficient::zeros(n, d, k, value)
        } else {
            GradedCoefficient::from_monomial(n, d, k, value, out)
        });
    }
    Ok(FormSeries { n, form_degree: k, value, pieces, validity: product_validity(a, b, order) })
}

/// Degree-`d` piece of `a ∧ b` only.
pub(crate) fn wedge_piece(a: &FormSeries, b: &FormSeries, pairing: Pairing, d: usize) -> Result<GradedCoefficient> {
    let n = a.dim();
    let value = pairing.output(a.value_space(), b.value_space(), a.form_degree())?;
    let (ka, kb) = (a.form_degree(), b.form_degree());
    let k = if pairing == Pairing::RhoStar { kb } else { ka + kb };
    let plan = form_plan(n, ka, kb, pairing);
    let mut out = Vec::new();
    for i in 0..=d.min(a.order()) {
        if d - i <= b.order() {
            accumulate_product(n, a.piece(i), b.piece(d - i), pairing, &plan, 1.0, &mut out, value, k);
        }
    }
    Ok(if out.is_empty() {
        GradedCoefficient::zeros(n, d, k, value)
    } else {
        GradedCoefficient::from_monomial(n, d, k, value, out)
    })
}

/// Inverse of a `gl`-valued 0-form with constant term `id`, via
/// `h₀ = id`, `h_m = −Σ_{a≥1} g_a h_{m−a}`.
pub fn series_invert(g: &FormSeries, tol: f64) -> Result<FormSeries> {
    if g.value_space() != ValueSpace::Matrix || g.form_degree() != 0 {
        return Err(Error::ValueSpace("series_invert needs a gl(V)-valued 0-form"));
    }
    let n = g.dim();
    let id = MatrixElement::identity(n);
    let dev = crate::num::max_abs(&g.piece(0).data().iter().zip(id.as_slice()).map(|(a, b)| a - b).collect::<Vec<_>>());
    if dev > tol {
        return Err(Error::Precondition { what: "constant term of the gauge must be the identity", residual: dev });
    }
    let order = g.order();
    let mut h = FormSeries::constant_matrix(&id, order);
    let plan = form_plan(n, 0, 0, Pairing::MatrixMultiply);
    for m in 1..=order {
        let mut out = Vec::new();
        for a in 1..=m {
            accumulate_product(n, g.piece(a), h.piece(m - a), Pairing::MatrixMultiply, &plan, -1.0, &mut out, ValueSpace::Matrix, 0);
        }
        if !out.is_empty() {
            *h.piece_mut(m) = GradedCoefficient::from_monomial(n, m, 0, ValueSpace::Matrix, out);
        }
    }
    let validity = match g.validity() {
        Validity::Exact if g.top_degree().unwrap_or(0) == 0 => Validity::Exact,
        v => Validity::Through(v.bound().min(order)),
    };
    h.set_validity(validity);
    Ok(h)
}

/// First argument of [`curvature_contract`].
#[derive(Clone, Copy, Debug)]
pub enum ContractArg<'a> {
    /// The Euler field `ℰ` as a linear `V`-valued 0-form.
    Euler,
    Form(&'a FormSeries),
}

/// `S(a, b)` for `V`-valued forms of degree ≤ 1:
/// `c Σ_{p<q} S_pq (a^p ∧ b^q − a^q ∧ b^p)` with `S_pq = S(e_p, e_q)` and
/// `c = ½` when both arguments are 1-forms, else `1`. Hence
/// `S(θ,θ)(x, y) = S(θx, θy)`, `S(dv, dv) = S` and `S(ℰ, b)(x) = S(v, b x)`.
pub fn curvature_contract(s: &CurvatureMap, a: ContractArg<'_>, b: &FormSeries) -> Result<FormSeries> {
    let n = s.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.dim() });
    }
    if b.value_space() != ValueSpace::Vector {
        return Err(Error::ValueSpace("curvature arguments must be V-valued"));
    }
    let order = match a {
        ContractArg::Euler => b.order(),
        ContractArg::Form(f) => f.order().min(b.order()),
    };
    let a_components: Vec<FormSeries> = match a {
        ContractArg::Euler => (0..n).map(|p| FormSeries::coordinate(n, p, order)).collect(),
        ContractArg::Form(f) => {
            if f.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: f.dim() });
            }
            if f.value_space() != ValueSpace::Vector {
                return Err(Error::ValueSpace("curvature arguments must be V-valued"));
            }
            (0..n).map(|p| f.value_component(p).map(|c| c.truncated(order))).collect::<Result<_>>()?
        }
    };
    let ka = a_components[0].form_degree();
    let kb = b.form_degree();
    if ka > 1 || kb > 1 {
        return Err(Error::Domain("curvature arguments must have form degree at most 1"));
    }
    let c = if ka == 1 && kb == 1 { 0.5 } else { 1.0 };
    let b_components: Vec<FormSeries> =
        (0..n).map(|p| b.value_component(p).map(|x| x.truncated(order))).collect::<Result<_>>()?;
    let s_series = curvature_series(s, order);
    let mut total = FormSeries::zero(n, ka + kb, ValueSpace::Matrix, order);
    for p in 0..n {
        for q in p + 1..n {
            let spq = s_series.form_entry(form_rank(n, &[p, q]));
            if spq.max_abs() == 0.0 {
                continue;
            }
            let w = wedge(&a_components[p], &b_components[q], Pairing::Scale)?
                .sub(&wedge(&a_components[q], &b_components[p], Pairing::Scale)?)?
                .scaled(c);
            total = total.add(&wedge(&w, &spq, Pairing::Scale)?)?;
        }
    }
    Ok(total)
}

/// `S` as a `gl`-valued 2-form series of the given order.
pub fn curvature_series(s: &CurvatureMap, order: usize) -> FormSeries {
    let n = s.dim();
    let mut out = FormSeries::zero(n, 2, ValueSpace::Matrix, order);
    for (k, c) in s.coeffs().iter().enumerate() {
        if k <= order {
            *out.piece_mut(k) = c.clone();
        }
    }
    if s.coeffs().len() > order + 1 {
        out.set_validity(Validity::Through(order));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_wedge_omega_convention() {
        // ω = A e⁰ + B e¹
        let n = 2;
        let a = MatrixElement::from_row_major(n, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let b = MatrixElement::from_row_major(n, vec![0.0, 0.0, 1.0, 0.0]).unwrap();
        let mut omega = FormSeries::zero(n, 1, ValueSpace::Matrix, 1);
        omega.piece_mut(0).entry_mut(0, 0).copy_from_slice(a.as_slice());
        omega.piece_mut(0).entry_mut(0, 1).copy_from_slice(b.as_slice());
        let w = wedge(&omega, &omega, Pairing::MatrixMultiply).unwrap();
        assert_eq!(w.piece(0).entry(0, 0), a.commutator(&b).as_slice());
    }

    #[test]
    fn s_of_dv_dv_is_s() {
        let s = CurvatureMap::constant_curvature(3, 0.7).unwrap();
        let dv = FormSeries::dv(3, 3);
        let out = curvature_contract(&s, ContractArg::Form(&dv), &dv).unwrap();
        assert_eq!(out.piece(0), &s.coeffs()[0]);
        assert_eq!(out.validity(), Validity::Exact);
    }

    #[test]
    fn invert_geometric_series() {
        let n = 2;
        let order = 5;
        let mut g = FormSeries::constant_matrix(&MatrixElement::identity(n), order);
        for (i, x) in g.piece_mut(1).data_mut().iter_mut().enumerate() {
            *x = 0.1 * (i as f64 + 1.0);
        }
        let h = series_invert(&g, 1e-12).unwrap();
        let prod = wedge(&g, &h, Pairing::MatrixMultiply).unwrap();
        let id = FormSeries::constant_matrix(&MatrixElement::identity(n), order);
        assert!(prod.sub(&id).unwrap().max_abs() < 1e-14);
    }
}
