//! Independent check of the series by integrating the parallel-transport ODE
//! `A′(t) = −Γ(tv)(v) A(t)` along straight rays with classical RK4.

use alloc::vec::Vec;

use crate::curvature_algebra::CurvatureMap;
use crate::error::{Error, Result};
use crate::jets::FormSeries;
use crate::linalg::MatrixElement;
use crate::multilinear::ValueSpace;
use crate::num;

#[derive(Clone, Debug, PartialEq)]
pub struct TransportConfig {
    /// RK4 steps on `[0, 1]`.
    pub steps: usize,
    /// Integration aborts once `|det A|` drops below this.
    pub degeneracy_threshold: f64,
    /// Frame-degeneracy radius estimate; points beyond half of it are refused.
    pub max_radius: Option<f64>,
}

impl Default for TransportConfig {
    fn default() -> Self {
        Self { steps: 512, degeneracy_threshold: 1e-8, max_radius: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportResult {
    pub v: Vec<f64>,
    pub steps: usize,
    /// Integrated transport `A(1)`.
    pub transport_matrix: MatrixElement,
    /// Series value `g(v)⁻¹`.
    pub gauge_matrix: MatrixElement,
    /// `max |A(1) − g(v)⁻¹|`.
    pub deviation: f64,
}

fn check_gamma(gamma: &FormSeries) -> Result<()> {
    if gamma.form_degree() != 1 || gamma.value_space() != ValueSpace::Matrix {
        return Err(Error::ValueSpace("Christoffel series must be a gl(V)-valued 1-form"));
    }
    Ok(())
}

/// `Γ(p)(v) = Σ_i v_i Γ(e_i)(p)`.
fn gamma_along(gamma: &FormSeries, p: &[f64], v: &[f64]) -> Result<MatrixElement> {
    let n = gamma.dim();
    let val = gamma.eval_at(p)?;
    Ok(MatrixElement::from_fn(n, |k, j| (0..n).map(|i| v[i] * val[i * n * n + k * n + j]).sum()))
}

/// RK4 for `A′ = −Γ(tv)(v) A` from `(t0, a0)` to `t1` in `steps` steps.
pub fn integrate_transport(
    gamma: &FormSeries,
    v: &[f64],
    t0: f64,
    t1: f64,
    a0: &MatrixElement,
    steps: usize,
    degeneracy_threshold: f64,
) -> Result<MatrixElement> {
    check_gamma(gamma)?;
    if v.len() != gamma.dim() {
        return Err(Error::DimensionMismatch { expected: gamma.dim(), found: v.len() });
    }
    if steps == 0 {
        return Err(Error::InvalidParameter("at least one integration step is needed"));
    }
    let h = (t1 - t0) / steps as f64;
    let rhs = |t: f64, a: &MatrixElement| -> Result<MatrixElement> {
        let p: Vec<f64> = v.iter().map(|x| t * x).collect();
        Ok(gamma_along(gamma, &p, v)?.mul(a).scale(-1.0))
    };
    let mut a = a0.clone();
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let k1 = rhs(t, &a)?;
        let k2 = rhs(t + 0.5 * h, &a.add(&k1.scale(0.5 * h)))?;
        let k3 = rhs(t + 0.5 * h, &a.add(&k2.scale(0.5 * h)))?;
        let k4 = rhs(t + h, &a.add(&k3.scale(h)))?;
        let incr = k1.add(&k2.scale(2.0)).add(&k3.scale(2.0)).add(&k4).scale(h / 6.0);
        a = a.add(&incr);
        let det = a.det();
        if det.abs() < degeneracy_threshold {
            return Err(Error::Degenerate { t: t + h, det });
        }
    }
    Ok(a)
}

fn check_point(v: &[f64], config: &TransportConfig) -> Result<()> {
    if config.steps < 64 {
        return Err(Error::InvalidParameter("parallel transport needs at least 64 steps"));
    }
    if let Some(r) = config.max_radius {
        let norm = num::norm2(v);
        if norm > 0.5 * r {
            return Err(Error::Radius { norm, radius: 0.5 * r });
        }
    }
    Ok(())
}

/// Integrated transport along `t ↦ tv` compared with the series `g(v)⁻¹`.
pub fn parallel_transport(gamma: &FormSeries, gauge: &FormSeries, v: &[f64], config: &TransportConfig) -> Result<TransportResult> {
    check_point(v, config)?;
    transport_unchecked(gamma, gauge, v, config.steps, config.degeneracy_threshold)
}

fn transport_unchecked(gamma: &FormSeries, gauge: &FormSeries, v: &[f64], steps: usize, thr: f64) -> Result<TransportResult> {
    let n = gamma.dim();
    let a = integrate_transport(gamma, v, 0.0, 1.0, &MatrixElement::identity(n), steps, thr)?;
    let g_inv = gauge.eval_matrix(v)?.inverse(thr)?;
    let deviation = a.sub(&g_inv).max_abs();
    Ok(TransportResult { v: v.to_vec(), steps, transport_matrix: a, gauge_matrix: g_inv, deviation })
}

/// Deviation for each step count, for measuring the integrator's order.
/// Coarse step counts are allowed here.
pub fn convergence_study(gamma: &FormSeries, gauge: &FormSeries, v: &[f64], step_counts: &[usize]) -> Result<Vec<(usize, f64)>> {
    step_counts
        .iter()
        .map(|&s| transport_unchecked(gamma, gauge, v, s, 1e-12).map(|r| (s, r.deviation)))
        .collect()
}

/// `log₂(e(s) / e(2s))` between consecutive entries of a halving study.
pub fn empirical_orders(study: &[(usize, f64)]) -> Vec<f64> {
    study.windows(2).map(|w| num::log2(w[0].1 / w[1].1)).collect()
}

/// `max |S_v(x,y) − P⁻¹ R_v(Px, Py) P|` over basis pairs, with `P` the
/// integrated transport and `R_v` the curvature series at `v`.
pub fn check_s_equals_pr(
    s: &CurvatureMap,
    gamma: &FormSeries,
    curvature: &FormSeries,
    v: &[f64],
    config: &TransportConfig,
) -> Result<f64> {
    check_point(v, config)?;
    let n = s.dim();
    let p = integrate_transport(gamma, v, 0.0, 1.0, &MatrixElement::identity(n), config.steps, config.degeneracy_threshold)?;
    let p_inv = p.inverse(config.degeneracy_threshold)?;
    let r = curvature.eval_block(v)?;
    let sv = s.eval(v)?;
    let r_at = |a: usize, b: usize| MatrixElement::from_fn(n, |i, j| r.component(&[], &[a, b])[i * n + j]);
    let r_pairs: Vec<Vec<MatrixElement>> = (0..n).map(|a| (0..n).map(|b| r_at(a, b)).collect()).collect();
    let mut worst = 0.0f64;
    for x in 0..n {
        for y in x + 1..n {
            let mut acc = MatrixElement::zeros(n);
            for a in 0..n {
                for b in 0..n {
                    let c = p.get(a, x) * p.get(b, y);
                    if c != 0.0 {
                        acc = acc.add(&r_pairs[a][b].scale(c));
                    }
                }
            }
            let rhs = p_inv.mul(&acc).mul(&p);
            let lhs = MatrixElement::from_fn(n, |i, j| sv.component(&[], &[x, y])[i * n + j]);
            worst = worst.max(lhs.sub(&rhs).max_abs());
        }
    }
    Ok(worst)
}

/// `max_t ‖Γ(tv)(v, v)‖` over `samples` equally spaced `t ∈ [0, 1]`.
pub fn geodesic_residual(gamma: &FormSeries, v: &[f64], samples: usize) -> Result<f64> {
    check_gamma(gamma)?;
    if samples < 8 {
        return Err(Error::InvalidParameter("geodesic check needs at least 8 samples"));
    }
    let mut worst = 0.0f64;
    for i in 0..samples {
        let t = i as f64 / (samples - 1) as f64;
        let p: Vec<f64> = v.iter().map(|x| t * x).collect();
        let acc = gamma_along(gamma, &p, v)?.mul_vec(v);
        worst = worst.max(num::norm2(&acc));
    }
    Ok(worst)
}
