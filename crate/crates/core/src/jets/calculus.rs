//! Exterior derivative, Euler contraction and Lie derivative, and `I`.
//!
//! All degree-shifting operators work on monomial coefficients
//! (`c v^α e^I`), where the formulas are one-liners.

use alloc::vec;
use alloc::vec::Vec;

use super::{FormSeries, Validity};
use crate::error::{Error, Result};
use crate::multilinear::index::{form_rank, sort_sign, sym_rank_exps, FormTable, SymTable};
use crate::multilinear::{GradedCoefficient, ValueSpace};

/// `L_ℰ η`: piece `m` times `m + k`.
pub fn euler_lie(eta: &FormSeries) -> FormSeries {
    let k = eta.form_degree() as f64;
    let mut out = eta.clone();
    for (m, p) in out.pieces.iter_mut().enumerate() {
        p.scale_in_place(m as f64 + k);
    }
    out
}

/// The integration map `I`, degreewise inverse of `L_ℰ`: piece `m` divided by
/// `m + k`. On 0-forms the constant piece is dropped, so `I L_ℰ η = η − η(0)`.
pub fn integrate_i(eta: &FormSeries) -> FormSeries {
    let k = eta.form_degree();
    let mut out = eta.clone();
    for (m, p) in out.pieces.iter_mut().enumerate() {
        if m + k == 0 {
            p.scale_in_place(0.0);
        } else {
            p.scale_in_place(1.0 / (m + k) as f64);
        }
    }
    out
}

/// Rebuilds a series from per-degree monomial data (`None` = zero piece).
fn assemble(
    n: usize,
    form_degree: usize,
    value: ValueSpace,
    mono: Vec<Option<Vec<f64>>>,
    validity: Validity,
) -> FormSeries {
    let pieces = mono
        .into_iter()
        .enumerate()
        .map(|(m, data)| match data {
            Some(d) => GradedCoefficient::from_monomial(n, m, form_degree, value, d),
            None => GradedCoefficient::zeros(n, m, form_degree, value),
        })
        .collect();
    FormSeries { n, form_degree, value, pieces, validity }
}

/// Exterior derivative: `d(c v^α e^I) = Σ_j c α_j v^{α−e_j} e^j ∧ e^I`.
pub fn ext_d(eta: &FormSeries) -> FormSeries {
    let n = eta.dim();
    let k = eta.form_degree();
    let value = eta.value_space();
    let order = eta.order();
    let w = value.dim(n);
    let src_forms = FormTable::new(n, k);
    let dst_len = FormTable::new(n, k + 1).len();
    // for each source form key and j ∉ I: (j, dst key, sign)
    let mut merges: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); src_forms.len()];
    let mut buf = Vec::with_capacity(k + 1);
    for f in 0..src_forms.len() {
        for j in 0..n {
            buf.clear();
            buf.push(j);
            buf.extend(src_forms.indices(f).iter().map(|&i| i as usize));
            if let Some(sign) = sort_sign(&mut buf) {
                merges[f].push((j, form_rank(n, &buf), sign));
            }
        }
    }
    let mut mono: Vec<Option<Vec<f64>>> = vec![None; order + 1];
    for m in 1..=order {
        let piece = eta.piece(m);
        if piece.is_zero() {
            continue;
        }
        let src = piece.to_monomial();
        let table = SymTable::new(n, m);
        let dst_count = crate::multilinear::index::sym_count(n, m - 1);
        let mut out = vec![0.0; dst_count * dst_len * w];
        let mut exps = vec![0u8; n];
        for s in 0..table.len() {
            exps.copy_from_slice(table.exps(s));
            let block = &src[s * src_forms.len() * w..(s + 1) * src_forms.len() * w];
            for (f, list) in merges.iter().enumerate() {
                let val = &block[f * w..(f + 1) * w];
                if val.iter().all(|&x| x == 0.0) {
                    continue;
                }
                for &(j, dst_f, sign) in list {
                    if exps[j] == 0 {
                        continue;
                    }
                    let c = sign * exps[j] as f64;
                    exps[j] -= 1;
                    let ds = sym_rank_exps(&exps);
                    exps[j] += 1;
                    let start = (ds * dst_len + dst_f) * w;
                    for (o, x) in out[start..start + w].iter_mut().zip(val) {
                        *o += c * x;
                    }
                }
            }
        }
        mono[m - 1] = Some(out);
    }
    let validity = match eta.validity() {
        Validity::Exact => Validity::Exact,
        Validity::Through(d) => Validity::Through(d.saturating_sub(1).min(order.saturating_sub(1))),
    };
    assemble(n, k + 1, value, mono, validity)
}

/// Validity after a `+1` degree shift that drops piece `N`.
fn raised_validity(eta: &FormSeries) -> Validity {
    let order = eta.order();
    match eta.validity() {
        Validity::Exact if eta.piece(order).is_zero() => Validity::Exact,
        v => Validity::Through((v.bound().saturating_add(1)).min(order)),
    }
}

/// Interior product with the Euler field:
/// `ι_ℰ(c v^α e^I) = Σ_r (−1)^r c v^{α+e_{i_r}} e^{I∖i_r}`.
pub fn contract_euler(eta: &FormSeries) -> Result<FormSeries> {
    let n = eta.dim();
    let k = eta.form_degree();
    if k == 0 {
        return Err(Error::Domain("cannot contract a 0-form"));
    }
    let value = eta.value_space();
    let order = eta.order();
    let w = value.dim(n);
    let src_forms = FormTable::new(n, k);
    let dst_len = FormTable::new(n, k - 1).len();
    // (removed index, dst key, sign)
    let mut splits: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); src_forms.len()];
    for f in 0..src_forms.len() {
        let idx: Vec<usize> = src_forms.indices(f).iter().map(|&i| i as usize).collect();
        for r in 0..k {
            let mut rest = idx.clone();
            let i = rest.remove(r);
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            splits[f].push((i, form_rank(n, &rest), sign));
        }
    }
    let mut mono: Vec<Option<Vec<f64>>> = vec![None; order + 1];
    for m in 0..order {
        let piece = eta.piece(m);
        if piece.is_zero() {
            continue;
        }
        let src = piece.to_monomial();
        let table = SymTable::new(n, m);
        let dst_count = crate::multilinear::index::sym_count(n, m + 1);
        let mut out = vec![0.0; dst_count * dst_len * w];
        let mut exps = vec![0u8; n];
        for s in 0..table.len() {
            exps.copy_from_slice(table.exps(s));
            let block = &src[s * src_forms.len() * w..(s + 1) * src_forms.len() * w];
            for (f, list) in splits.iter().enumerate() {
                let val = &block[f * w..(f + 1) * w];
                if val.iter().all(|&x| x == 0.0) {
                    continue;
                }
                for &(i, dst_f, sign) in list {
                    exps[i] += 1;
                    let ds = sym_rank_exps(&exps);
                    exps[i] -= 1;
                    let start = (ds * dst_len + dst_f) * w;
                    for (o, x) in out[start..start + w].iter_mut().zip(val) {
                        *o += sign * x;
                    }
                }
            }
        }
        mono[m + 1] = Some(out);
    }
    Ok(assemble(n, k - 1, value, mono, raised_validity(eta)))
}

/// `η · ℰ`: a `gl(V)`-valued form applied to the point, `(η·ℰ)(…) = η(…) v`.
pub fn times_euler(eta: &FormSeries) -> Result<FormSeries> {
    if eta.value_space() != ValueSpace::Matrix {
        return Err(Error::ValueSpace("times_euler needs a gl(V)-valued series"));
    }
    let n = eta.dim();
    let k = eta.form_degree();
    let order = eta.order();
    let fl = FormTable::new(n, k).len();
    let mut mono: Vec<Option<Vec<f64>>> = vec![None; order + 1];
    for m in 0..order {
        let piece = eta.piece(m);
        if piece.is_zero() {
            continue;
        }
        let src = piece.to_monomial();
        let table = SymTable::new(n, m);
        let dst_count = crate::multilinear::index::sym_count(n, m + 1);
        let mut out = vec![0.0; dst_count * fl * n];
        let mut exps = vec![0u8; n];
        for s in 0..table.len() {
            exps.copy_from_slice(table.exps(s));
            for f in 0..fl {
                let x = &src[(s * fl + f) * n * n..(s * fl + f + 1) * n * n];
                for l in 0..n {
                    exps[l] += 1;
                    let ds = sym_rank_exps(&exps);
                    exps[l] -= 1;
                    let dst = &mut out[(ds * fl + f) * n..(ds * fl + f + 1) * n];
                    for (i, d) in dst.iter_mut().enumerate() {
                        *d += x[i * n + l];
                    }
                }
            }
        }
        mono[m + 1] = Some(out);
    }
    Ok(assemble(n, k, ValueSpace::Vector, mono, raised_validity(eta)))
}

/// Partial derivative `∂_a` of the coefficient functions; form slots and
/// values are untouched.
pub fn partial(eta: &FormSeries, a: usize) -> FormSeries {
    let n = eta.dim();
    let k = eta.form_degree();
    let value = eta.value_space();
    let order = eta.order();
    let bl = eta.piece(0).block_len();
    let mut mono: Vec<Option<Vec<f64>>> = vec![None; order + 1];
    for m in 1..=order {
        let piece = eta.piece(m);
        if piece.is_zero() {
            continue;
        }
        let src = piece.to_monomial();
        let table = SymTable::new(n, m);
        let mut out = vec![0.0; crate::multilinear::index::sym_count(n, m - 1) * bl];
        let mut exps = vec![0u8; n];
        for s in 0..table.len() {
            exps.copy_from_slice(table.exps(s));
            if exps[a] == 0 {
                continue;
            }
            let c = exps[a] as f64;
            exps[a] -= 1;
            let ds = sym_rank_exps(&exps);
            for (o, x) in out[ds * bl..(ds + 1) * bl].iter_mut().zip(&src[s * bl..(s + 1) * bl]) {
                *o += c * x;
            }
        }
        mono[m - 1] = Some(out);
    }
    let validity = match eta.validity() {
        Validity::Exact => Validity::Exact,
        Validity::Through(d) => Validity::Through(d.saturating_sub(1).min(order.saturating_sub(1))),
    };
    assemble(n, k, value, mono, validity)
}
