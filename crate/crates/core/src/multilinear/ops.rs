use alloc::vec;
use alloc::vec::Vec;

use super::coefficient::{small_det, GradedCoefficient, ValueSpace};
use super::index::{form_rank, sort_sign, sym_count, sym_rank_exps, FormTable, SymTable};
use crate::error::{Error, Result};
use crate::linalg::MatrixElement;
use crate::num;

/// Evaluates the polynomial part on the diagonal `vᵐ`:
/// `Σ_μ multinomial(μ) v^μ Q_μ`. Form slots are left open, so the result is
/// laid out as `[form key][value component]` (a plain value when `k = 0`).
pub fn sym_eval(q: &GradedCoefficient, v: &[f64]) -> Result<Vec<f64>> {
    let n = q.dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.len() });
    }
    let table = SymTable::new(n, q.sym_degree());
    let mut out = vec![0.0; q.block_len()];
    for s in 0..table.len() {
        let c = table.multinomial(s) * table.monomial(s, v);
        if c != 0.0 {
            for (o, x) in out.iter_mut().zip(q.block(s)) {
                *o += c * x;
            }
        }
    }
    Ok(out)
}

/// Sphere maximum of `‖Q(vᵐ)‖`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    /// Best value found by sampled ascent. Every sample is attained, so this
    /// is also a lower bound for the true maximum.
    pub estimate: f64,
    /// `‖Q‖` can never exceed the Euclidean norm of the full tensor.
    pub upper_bound: f64,
}

const SPHERE_SAMPLES: usize = 256;
const ASCENT_STEPS: usize = 20;
const ASCENT_STARTS: usize = 16;

/// `max_{‖v‖=1} ‖Q(vᵐ)‖_W` by projected gradient ascent from the best 16 of
/// 256 fixed quasi-uniform sphere samples.
///
/// For `k > 0` the value `Q(vᵐ) ∈ Λᵏ ⊗ W` is measured by the Euclidean norm
/// of its full antisymmetric tensor.
pub fn sym_norm(q: &GradedCoefficient) -> NormEstimate {
    let n = q.dim();
    let m = q.sym_degree();
    let k = q.form_degree();
    let fact_k = num::factorial(k);
    let upper = {
        let table = SymTable::new(n, m);
        let mut acc = 0.0;
        for s in 0..table.len() {
            let b: f64 = q.block(s).iter().map(|x| x * x).sum();
            acc += table.multinomial(s) * b;
        }
        num::sqrt(fact_k * acc)
    };
    if q.is_zero() {
        return NormEstimate { estimate: 0.0, upper_bound: 0.0 };
    }
    let eval_sq = |v: &[f64]| -> f64 {
        let val = sym_eval(q, v).expect("sample has the ambient dimension");
        fact_k * val.iter().map(|x| x * x).sum::<f64>()
    };
    if m == 0 {
        let e = num::sqrt(eval_sq(&vec![0.0; n]));
        return NormEstimate { estimate: e, upper_bound: upper.max(e) };
    }

    let table = SymTable::new(n, m);
    let mono = q.to_monomial();
    let bl = q.block_len();
    // ∇ ‖P(v)‖² = 2 Σ_c P_c(v) ∇P_c(v)
    let grad_sq = |v: &[f64]| -> Vec<f64> {
        let p = sym_eval(q, v).expect("sample has the ambient dimension");
        let mut g = vec![0.0; n];
        for s in 0..table.len() {
            let exps = table.exps(s);
            let block = &mono[s * bl..(s + 1) * bl];
            let dot: f64 = block.iter().zip(&p).map(|(a, b)| a * b).sum();
            if dot == 0.0 {
                continue;
            }
            for j in 0..n {
                if exps[j] == 0 {
                    continue;
                }
                let mut d = exps[j] as f64;
                for (l, &e) in exps.iter().enumerate() {
                    let e = if l == j { e - 1 } else { e };
                    d *= num::powi(v[l], e as usize);
                }
                g[j] += 2.0 * fact_k * d * dot;
            }
        }
        g
    };

    let mut starts: Vec<(f64, Vec<f64>)> = sphere_samples(n, SPHERE_SAMPLES).into_iter().map(|v| (eval_sq(&v), v)).collect();
    starts.sort_by(|a, b| b.0.total_cmp(&a.0));
    starts.truncate(ASCENT_STARTS);
    let mut best = 0.0f64;
    for (mut f, mut v) in starts {
        let mut step = 1.0 / (m as f64 * (1.0 + upper));
        for _ in 0..ASCENT_STEPS {
            let mut g = grad_sq(&v);
            let radial: f64 = g.iter().zip(&v).map(|(a, b)| a * b).sum();
            for (gi, vi) in g.iter_mut().zip(&v) {
                *gi -= radial * vi;
            }
            if num::norm2(&g) < 1e-15 * (1.0 + f) {
                break;
            }
            let mut improved = false;
            for _ in 0..30 {
                let mut w: Vec<f64> = v.iter().zip(&g).map(|(a, b)| a + step * b).collect();
                let nw = num::norm2(&w);
                for x in &mut w {
                    *x /= nw;
                }
                let fw = eval_sq(&w);
                if fw > f {
                    v = w;
                    f = fw;
                    step *= 2.0;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        best = best.max(f);
    }
    let estimate = num::sqrt(best);
    NormEstimate { estimate, upper_bound: upper.max(estimate) }
}

/// Deterministic quasi-uniform points on the unit sphere of `ℝⁿ`.
pub fn sphere_samples(n: usize, count: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    match n {
        0 => {}
        1 => {
            for i in 0..count {
                out.push(vec![if i % 2 == 0 { 1.0 } else { -1.0 }]);
            }
        }
        2 => {
            for i in 0..count {
                let a = 2.0 * core::f64::consts::PI * i as f64 / count as f64;
                out.push(vec![num::cos(a), num::sin(a)]);
            }
        }
        3 => {
            let golden = core::f64::consts::PI * (3.0 - num::sqrt(5.0));
            for i in 0..count {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
                let r = num::sqrt((1.0 - z * z).max(0.0));
                let a = golden * i as f64;
                out.push(vec![r * num::cos(a), r * num::sin(a), z]);
            }
        }
        _ => {
            let pairs = n.div_ceil(2);
            let bases = first_primes(2 * pairs);
            for i in 0..count {
                let mut v = Vec::with_capacity(2 * pairs);
                for p in 0..pairs {
                    let u1 = radical_inverse(i + 1, bases[2 * p]).max(1e-12);
                    let u2 = radical_inverse(i + 1, bases[2 * p + 1]);
                    let r = num::sqrt(-2.0 * num::ln(u1));
                    let a = 2.0 * core::f64::consts::PI * u2;
                    v.push(r * num::cos(a));
                    v.push(r * num::sin(a));
                }
                v.truncate(n);
                let nv = num::norm2(&v);
                if nv > 0.0 {
                    for x in &mut v {
                        *x /= nv;
                    }
                } else {
                    v[0] = 1.0;
                }
                out.push(v);
            }
        }
    }
    out
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

fn first_primes(count: usize) -> Vec<usize> {
    let mut primes = Vec::with_capacity(count);
    let mut c = 2;
    while primes.len() < count {
        if primes.iter().all(|p| c % p != 0) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

/// `ρ(T)`: precomposes every covariant slot (symmetric and form) with
/// `T⁻¹` and acts on the value by `T` (vectors) or `Ad(T)` (matrices).
pub fn rho_apply(t: &MatrixElement, phi: &GradedCoefficient, tol: f64) -> Result<GradedCoefficient> {
    let n = phi.dim();
    if t.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: t.dim() });
    }
    let tinv = t.inverse(tol)?;
    let m = phi.sym_degree();
    let k = phi.form_degree();
    let value = phi.value_space();
    let w = value.dim(n);
    let fl = phi.form_len();
    let bl = phi.block_len();

    // Symmetric slots: P(v) ↦ P(T⁻¹v), substituting v_j ↦ Σ_l (T⁻¹)_{jl} v_l.
    let table = SymTable::new(n, m);
    let mono = phi.to_monomial();
    let mut sub_mono = vec![0.0; table.len() * bl];
    for s in 0..table.len() {
        let block = &mono[s * bl..(s + 1) * bl];
        if block.iter().all(|&x| x == 0.0) {
            continue;
        }
        let mut poly = vec![1.0];
        let mut deg = 0;
        for (j, &e) in table.exps(s).iter().enumerate() {
            let row: Vec<f64> = (0..n).map(|l| tinv.get(j, l)).collect();
            for _ in 0..e {
                poly = times_linear(n, deg, &poly, &row);
                deg += 1;
            }
        }
        for (s2, &c) in poly.iter().enumerate() {
            if c != 0.0 {
                for (o, x) in sub_mono[s2 * bl..(s2 + 1) * bl].iter_mut().zip(block) {
                    *o += c * x;
                }
            }
        }
    }
    let subbed = GradedCoefficient::from_monomial(n, m, k, value, sub_mono);

    // Form slots: ω'(e_I) = Σ_J ω_J det((T⁻¹)[J, I]).
    let ftable = FormTable::new(n, k);
    let mut minors = vec![0.0; fl * fl];
    let mut buf = vec![0.0; k * k];
    for (i_key, row) in minors.chunks_mut(fl).enumerate() {
        let ii = ftable.indices(i_key);
        for (j_key, slot) in row.iter_mut().enumerate() {
            let jj = ftable.indices(j_key);
            for (r, &a) in jj.iter().enumerate() {
                for (c, &b) in ii.iter().enumerate() {
                    buf[r * k + c] = tinv.get(a as usize, b as usize);
                }
            }
            *slot = small_det(&buf, k);
        }
    }

    let mut out = GradedCoefficient::zeros(n, m, k, value);
    let mut tmp = vec![0.0; w];
    for s in 0..table.len() {
        for i_key in 0..fl {
            for t in tmp.iter_mut() {
                *t = 0.0;
            }
            for j_key in 0..fl {
                let c = minors[i_key * fl + j_key];
                if c != 0.0 {
                    for (t, x) in tmp.iter_mut().zip(subbed.entry(s, j_key)) {
                        *t += c * x;
                    }
                }
            }
            let dst = out.entry_mut(s, i_key);
            match value {
                ValueSpace::Scalar => dst.copy_from_slice(&tmp),
                ValueSpace::Vector => dst.copy_from_slice(&t.mul_vec(&tmp)),
                ValueSpace::Matrix => {
                    let x = MatrixElement::from_fn(n, |a, b| tmp[a * n + b]);
                    dst.copy_from_slice(t.mul(&x).mul(&tinv).as_slice());
                }
            }
        }
    }
    Ok(out)
}

/// Multiplies a degree-`deg` monomial-coefficient polynomial by the linear
/// form `Σ_l row_l v_l`.
fn times_linear(n: usize, deg: usize, poly: &[f64], row: &[f64]) -> Vec<f64> {
    let table = SymTable::new(n, deg);
    let mut out = vec![0.0; sym_count(n, deg + 1)];
    let mut exps = vec![0u8; n];
    for s in 0..table.len() {
        if poly[s] == 0.0 {
            continue;
        }
        exps.copy_from_slice(table.exps(s));
        for (l, &r) in row.iter().enumerate() {
            if r != 0.0 {
                exps[l] += 1;
                out[sym_rank_exps(&exps)] += poly[s] * r;
                exps[l] -= 1;
            }
        }
    }
    out
}

/// Infinitesimal action `d/dt ρ(exp(tA)) φ |_{t=0}`:
/// `[A, φ(…)] − Σ_slots φ(…, A·slot, …)` over symmetric and form slots.
pub fn rho_star(a: &MatrixElement, phi: &GradedCoefficient) -> Result<GradedCoefficient> {
    let n = phi.dim();
    if a.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.dim() });
    }
    let m = phi.sym_degree();
    let k = phi.form_degree();
    let value = phi.value_space();
    let w = value.dim(n);
    let fl = phi.form_len();
    let bl = phi.block_len();
    let table = SymTable::new(n, m);

    // Symmetric slots: P(v) ↦ −Σ_{j,l} A_{jl} v_l ∂_j P(v).
    let mono = phi.to_monomial();
    let mut dmono = vec![0.0; mono.len()];
    let mut exps = vec![0u8; n];
    for s in 0..table.len() {
        let block = &mono[s * bl..(s + 1) * bl];
        if block.iter().all(|&x| x == 0.0) {
            continue;
        }
        exps.copy_from_slice(table.exps(s));
        for j in 0..n {
            if exps[j] == 0 {
                continue;
            }
            let aj = exps[j] as f64;
            exps[j] -= 1;
            for l in 0..n {
                let c = a.get(j, l);
                if c == 0.0 {
                    continue;
                }
                exps[l] += 1;
                let dst = sym_rank_exps(&exps);
                exps[l] -= 1;
                for (o, x) in dmono[dst * bl..(dst + 1) * bl].iter_mut().zip(block) {
                    *o -= c * aj * x;
                }
            }
            exps[j] += 1;
        }
    }
    let mut out = GradedCoefficient::from_monomial(n, m, k, value, dmono);

    // Form slots: −Σ_r φ(…, A e_{i_r}, …) = −Σ_r Σ_j A_{j i_r} φ(…, e_j, …).
    let ftable = FormTable::new(n, k);
    let mut idx = vec![0usize; k];
    for i_key in 0..fl {
        let ii = ftable.indices(i_key);
        for r in 0..k {
            for j in 0..n {
                let c = a.get(j, ii[r] as usize);
                if c == 0.0 {
                    continue;
                }
                for (d, &x) in idx.iter_mut().zip(ii) {
                    *d = x as usize;
                }
                idx[r] = j;
                let Some(sign) = sort_sign(&mut idx) else { continue };
                let src = form_rank(n, &idx);
                for s in 0..table.len() {
                    let start = (s * fl + src) * w;
                    let vals: Vec<f64> = phi.data()[start..start + w].to_vec();
                    for (o, x) in out.entry_mut(s, i_key).iter_mut().zip(&vals) {
                        *o -= sign * c * x;
                    }
                }
            }
        }
    }

    // Value.
    match value {
        ValueSpace::Scalar => {}
        ValueSpace::Vector => {
            for s in 0..table.len() {
                for f in 0..fl {
                    let x = phi.entry(s, f).to_vec();
                    let ax = a.mul_vec(&x);
                    for (o, y) in out.entry_mut(s, f).iter_mut().zip(&ax) {
                        *o += y;
                    }
                }
            }
        }
        ValueSpace::Matrix => {
            for s in 0..table.len() {
                for f in 0..fl {
                    let x = MatrixElement::from_fn(n, |i, j| phi.entry(s, f)[i * n + j]);
                    let br = a.commutator(&x);
                    for (o, y) in out.entry_mut(s, f).iter_mut().zip(br.as_slice()) {
                        *o += y;
                    }
                }
            }
        }
    }
    Ok(out)
}
