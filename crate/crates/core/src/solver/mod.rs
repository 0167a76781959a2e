//! Coefficient recursion for `θ`, the connection and gauge built from it,
//! and every residual of the construction.

mod radius;

use alloc::vec;
use alloc::vec::Vec;

use crate::curvature_algebra::{km_membership, CurvatureMap};
use crate::error::{Error, Result};
use crate::jets::{
    contract_euler, curvature_contract, curvature_series, euler_lie, ext_d, integrate_i, partial, series_invert,
    times_euler, wedge, wedge_piece, ContractArg, FormSeries, Pairing, Validity,
};
use crate::linalg::MatrixElement;
use crate::multilinear::{GradedCoefficient, ValueSpace};

pub use radius::{radius_estimate, RadiusConfig, RadiusEstimate};

/// Knobs for [`solve`].
#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    /// Truncation order `N`.
    pub order: usize,
    /// Residual tolerance, applied relative to `1 + max |S|`.
    pub tolerance: f64,
    pub radius: RadiusConfig,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { order: 10, tolerance: 1e-10, radius: RadiusConfig::default() }
    }
}

/// Everything one run of the construction produces.
#[derive(Clone, Debug)]
pub struct SolveResult {
    pub order: usize,
    /// `V`-valued 1-form with `θ⁽⁰⁾ = dv`, `θ⁽¹⁾ = 0`.
    pub theta: FormSeries,
    /// `gl`-valued 1-form `I(S(ℰ, θ))`.
    pub omega: FormSeries,
    /// `gl`-valued 0-form with `θ = g · dv`.
    pub gauge: FormSeries,
    pub gauge_inverse: FormSeries,
    /// `gl`-valued 1-form: `Γ(e_i)_{kj} = Γ^k_{ij}`.
    pub gamma: FormSeries,
    /// `R = dΓ + Γ∧Γ`.
    pub curvature: FormSeries,
    /// Max coefficient of `dω + ω∧ω − S(θ,θ)` for degrees `0..N`.
    pub consistency_residual_per_degree: Vec<f64>,
    /// Max coefficient of `L_ℰ(dθ + ω∧θ) − (dω + ω∧ω − S(θ,θ))·ℰ` for degrees `0..N`.
    pub structure_identity_residual: f64,
    /// Max coefficient of `Γ∧dv` through degree `N − 1`.
    pub torsion_residual: f64,
    /// Max coefficient of `R − g⁻¹ S(θ,θ) g` through degree `N − 2`.
    pub curvature_gauge_residual: f64,
    /// Cyclic `K¹` defect of `(dS + (ρ₂)_*(ω)∧S)(g⁻¹)` per degree `0..=N−2`.
    pub second_bianchi_per_degree: Vec<f64>,
    pub second_bianchi_residual: f64,
    /// `1 + max |S|`, the scale applied to the tolerance.
    pub scale: f64,
    pub tolerance: f64,
    pub radius: RadiusEstimate,
}

impl SolveResult {
    fn threshold(&self) -> f64 {
        self.tolerance * self.scale
    }

    /// First degree whose consistency residual exceeds the scaled tolerance.
    pub fn first_failing_degree(&self) -> Option<usize> {
        let t = self.threshold();
        self.consistency_residual_per_degree.iter().position(|&r| r > t)
    }

    /// The consistency relation holds through degree `N − 1`.
    pub fn is_consistent(&self) -> bool {
        self.first_failing_degree().is_none()
    }

    pub fn max_consistency_residual(&self) -> f64 {
        self.consistency_residual_per_degree.iter().fold(0.0, |a, &b| a.max(b))
    }
}

/// `θ` by the recursion `(m+1)(m+2) θ⁽ᵐ⁺¹⁾ = [S(ℰ, θ) ℰ]⁽ᵐ⁺¹⁾`, which only
/// involves `θ⁽ˡ⁾` with `ℓ ≤ m − 1`.
pub fn solve_theta(s: &CurvatureMap, order: usize) -> Result<FormSeries> {
    if order < 2 {
        return Err(Error::InvalidParameter("truncation order must be at least 2"));
    }
    let n = s.dim();
    let mut theta = FormSeries::dv(n, order);
    if s.is_zero() {
        return Ok(theta);
    }
    // ι_ℰ S = Σ_q S(ℰ, e_q) e^q, so S(ℰ, θ) = Σ_q θ^q · S(ℰ, e_q).
    let x = contract_euler(&curvature_series(s, order))?;
    let columns: Vec<FormSeries> = (0..n).map(|q| x.form_entry(q)).collect();
    for m in 1..order {
        let mut y = GradedCoefficient::zeros(n, m, 1, ValueSpace::Matrix);
        for (q, col) in columns.iter().enumerate() {
            let theta_q = theta.value_component(q)?;
            y.add_assign(&wedge_piece(&theta_q, col, Pairing::Scale, m)?)?;
        }
        let mut z = times_euler_piece(y)?;
        z.scale_in_place(1.0 / ((m + 1) * (m + 2)) as f64);
        *theta.piece_mut(m + 1) = z;
    }
    theta.set_validity(Validity::Through(order));
    Ok(theta)
}

fn times_euler_piece(y: GradedCoefficient) -> Result<GradedCoefficient> {
    let m = y.sym_degree();
    let n = y.dim();
    let mut holder = FormSeries::zero(n, y.form_degree(), ValueSpace::Matrix, m + 1);
    *holder.piece_mut(m) = y;
    Ok(times_euler(&holder)?.piece(m + 1).clone())
}

/// `ω = I(S(ℰ, θ))`.
pub fn compute_omega(s: &CurvatureMap, theta: &FormSeries) -> Result<FormSeries> {
    Ok(integrate_i(&curvature_contract(s, ContractArg::Euler, theta)?))
}

/// `dω + ω∧ω − S(θ, θ)` as a series.
pub fn consistency_defect(s: &CurvatureMap, theta: &FormSeries, omega: &FormSeries) -> Result<FormSeries> {
    let f = ext_d(omega).add(&wedge(omega, omega, Pairing::MatrixMultiply)?)?;
    f.sub(&curvature_contract(s, ContractArg::Form(theta), theta)?)
}

/// Max coefficient of the consistency defect for each degree `0..N`.
pub fn consistency_residual(s: &CurvatureMap, theta: &FormSeries, omega: &FormSeries) -> Result<Vec<f64>> {
    let defect = consistency_defect(s, theta, omega)?;
    let valid = defect.valid_through().min(theta.order() - 1);
    Ok((0..=valid).map(|m| defect.piece_max_abs(m)).collect())
}

/// `g` from `θ = dv + I(ω·ℰ)` read as a `gl`-valued 0-form, checked
/// against the recursion output.
pub fn gauge_from_omega(omega: &FormSeries, theta: &FormSeries) -> Result<FormSeries> {
    let n = omega.dim();
    // `I` acts on the 1-form ω·ℰ, so the constant `dv` (the `id` of
    // `g = id + I(ω·ℰ)`) is added back by hand.
    let rebuilt = FormSeries::dv(n, omega.order()).add(&integrate_i(&times_euler(omega)?))?;
    let scale = theta.max_abs().max(1.0);
    let deviation = rebuilt.sub(theta)?.max_abs();
    if deviation > 1e-12 * scale {
        return Err(Error::Internal { what: "θ = dv + I(ω·ℰ) fails coefficient-wise", deviation });
    }
    rebuilt.one_form_to_matrix()
}

/// `Γ = g⁻¹ ω g + g⁻¹ dg`.
pub fn christoffel(omega: &FormSeries, gauge: &FormSeries, gauge_inverse: &FormSeries) -> Result<FormSeries> {
    let conj = wedge(&wedge(gauge_inverse, omega, Pairing::MatrixMultiply)?, gauge, Pairing::MatrixMultiply)?;
    conj.add(&wedge(gauge_inverse, &ext_d(gauge), Pairing::MatrixMultiply)?)
}

/// `R = dΓ + Γ∧Γ`.
pub fn curvature_of(gamma: &FormSeries) -> Result<FormSeries> {
    ext_d(gamma).add(&wedge(gamma, gamma, Pairing::MatrixMultiply)?)
}

/// `(Γ∧dv)(x, y) = Γ(x) y − Γ(y) x`.
pub fn torsion_form(gamma: &FormSeries) -> Result<FormSeries> {
    wedge(gamma, &FormSeries::dv(gamma.dim(), gamma.order()), Pairing::MatrixOnVector)
}

/// Largest coefficient over degrees `0..=through`.
fn max_through(series: &FormSeries, through: usize) -> f64 {
    (0..=through.min(series.order())).map(|m| series.piece_max_abs(m)).fold(0.0, f64::max)
}

/// Cyclic `K¹` defect of `ψ = (dS + (ρ₂)_*(ω)∧S)(g⁻¹)` for each degree `0..=N−2`.
pub fn second_bianchi_per_degree(s: &CurvatureMap, omega: &FormSeries, gauge_inverse: &FormSeries) -> Result<Vec<f64>> {
    let n = s.dim();
    let order = omega.order();
    let s_series = curvature_series(s, order);
    // φ_a = ∂_a S + (ρ₂)_*(ω(e_a)) S
    let phi: Vec<FormSeries> = (0..n)
        .map(|a| partial(&s_series, a).add(&wedge(&omega.form_entry(a), &s_series, Pairing::RhoStar)?))
        .collect::<Result<_>>()?;
    // ψ_b = φ(g⁻¹ e_b) = Σ_a (g⁻¹)_{ab} φ_a
    let mut psi = Vec::with_capacity(n);
    for b in 0..n {
        let mut acc = FormSeries::zero(n, 2, ValueSpace::Matrix, order);
        for (a, phi_a) in phi.iter().enumerate() {
            acc = acc.add(&wedge(&gauge_inverse.matrix_entry(a, b)?, phi_a, Pairing::Scale)?)?;
        }
        psi.push(acc);
    }
    let top = order.saturating_sub(2);
    let mut out = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let mut worst = 0.0f64;
        let keys = psi[0].piece(d).sym_len();
        for key in 0..keys {
            let mut elem = GradedCoefficient::zeros(n, 1, 2, ValueSpace::Matrix);
            for (b, p) in psi.iter().enumerate() {
                elem.block_mut(b).copy_from_slice(p.piece(d).block(key));
            }
            worst = worst.max(km_membership(&elem).1);
        }
        out.push(worst);
    }
    Ok(out)
}

/// Max over degrees of [`second_bianchi_per_degree`].
pub fn second_bianchi_residual(s: &CurvatureMap, omega: &FormSeries, gauge_inverse: &FormSeries) -> Result<f64> {
    Ok(second_bianchi_per_degree(s, omega, gauge_inverse)?.into_iter().fold(0.0, f64::max))
}

/// Christoffel symbols `Γ^k_{ij}(v)` laid out `[k][i][j]`.
pub fn christoffel_symbols(gamma: &FormSeries, v: &[f64]) -> Result<Vec<f64>> {
    let n = gamma.dim();
    let val = gamma.eval_at(v)?;
    let mut out = vec![0.0; n * n * n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                out[(k * n + i) * n + j] = val[i * n * n + k * n + j];
            }
        }
    }
    Ok(out)
}

/// The whole pipeline: `θ`, `ω`, `g`, `Γ`, `R`, all residuals and the
/// radius heuristics.
pub fn solve(s: &CurvatureMap, config: &SolveConfig) -> Result<SolveResult> {
    if !(config.tolerance > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive"));
    }
    let order = config.order;
    let n = s.dim();
    let theta = solve_theta(s, order)?;
    let omega = compute_omega(s, &theta)?;
    let consistency_residual_per_degree = consistency_residual(s, &theta, &omega)?;

    let defect = consistency_defect(s, &theta, &omega)?;
    let lhs = euler_lie(&ext_d(&theta).add(&wedge(&omega, &theta, Pairing::MatrixOnVector)?)?);
    let rhs = times_euler(&defect)?;
    let structure_identity_residual = max_through(&lhs.sub(&rhs)?, order - 1);

    let gauge = gauge_from_omega(&omega, &theta)?;
    let gauge_inverse = series_invert(&gauge, 1e-12)?;
    let gamma = christoffel(&omega, &gauge, &gauge_inverse)?;
    let torsion_residual = max_through(&torsion_form(&gamma)?, order - 1);
    let curvature = curvature_of(&gamma)?;

    let s_theta = curvature_contract(s, ContractArg::Form(&theta), &theta)?;
    let expected = wedge(&wedge(&gauge_inverse, &s_theta, Pairing::MatrixMultiply)?, &gauge, Pairing::MatrixMultiply)?;
    let curvature_gauge_residual = max_through(&curvature.sub(&expected)?, order - 2);

    let second_bianchi_per_degree = second_bianchi_per_degree(s, &omega, &gauge_inverse)?;
    let second_bianchi_residual = second_bianchi_per_degree.iter().fold(0.0f64, |a, &b| a.max(b));
    let radius = radius_estimate(s, &gauge, &config.radius)?;

    let result = SolveResult {
        order,
        theta,
        omega,
        gauge,
        gauge_inverse,
        gamma,
        curvature,
        consistency_residual_per_degree,
        structure_identity_residual,
        torsion_residual,
        curvature_gauge_residual,
        second_bianchi_per_degree,
        second_bianchi_residual,
        scale: 1.0 + s.scale(),
        tolerance: config.tolerance,
        radius,
    };
    if result.is_consistent() && result.torsion_residual > result.threshold() {
        return Err(Error::Internal {
            what: "torsion survives although the consistency relation holds",
            deviation: result.torsion_residual,
        });
    }
    debug_assert_eq!(result.gauge.dim(), n);
    Ok(result)
}

/// `g(v)` at a point.
pub fn gauge_at(gauge: &FormSeries, v: &[f64]) -> Result<MatrixElement> {
    gauge.eval_matrix(v)
}
