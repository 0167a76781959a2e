//! Heuristic size of the neighbourhood where the construction makes sense:
//! the majorant `s(t) = Σ ‖S⁽ᵐ⁾‖ tᵐ`, its Grönwall factor, and the first
//! radius where the truncated gauge `g` degenerates along sampled rays.

use alloc::vec::Vec;

use crate::curvature_algebra::CurvatureMap;
use crate::error::{Error, Result};
use crate::jets::FormSeries;
use crate::linalg::MatrixElement;
use crate::multilinear::{sphere_samples, sym_eval, sym_norm, ValueSpace};
use crate::num;

#[derive(Clone, Debug, PartialEq)]
pub struct RadiusConfig {
    pub rays: usize,
    pub scan_radius: f64,
    /// Grid points per ray before local refinement.
    pub scan_steps: usize,
    pub degeneracy_threshold: f64,
    /// Number of equally spaced Grönwall samples on `[0, 1]`.
    pub groenwall_samples: usize,
}

impl Default for RadiusConfig {
    fn default() -> Self {
        Self { rays: 8, scan_radius: 4.0, scan_steps: 800, degeneracy_threshold: 1e-6, groenwall_samples: 11 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadiusEstimate {
    /// Sampled estimates of `‖S⁽ᵐ⁾‖`, `m = 0..=deg S`.
    pub majorant_coeffs: Vec<f64>,
    /// Full-tensor upper bounds for the same norms.
    pub majorant_upper: Vec<f64>,
    /// `(t, ‖dv‖ exp(∫₀ᵗ s))` on `[0, 1]`, built from the upper bounds.
    /// `‖dv‖ = √n` in the full-tensor norm.
    pub groenwall_bound_at: Vec<(f64, f64)>,
    /// Smallest degeneracy parameter over all rays, if any ray degenerates.
    pub frame_degeneracy_radius: Option<f64>,
    pub rays: Vec<Vec<f64>>,
    pub per_ray: Vec<Option<f64>>,
    pub scan_radius: f64,
}

/// Majorant, Grönwall samples and frame-degeneracy scan.
///
/// The degeneracy radius is read off the truncated series of `g`, so it
/// inherits its truncation error.
pub fn radius_estimate(s: &CurvatureMap, gauge: &FormSeries, config: &RadiusConfig) -> Result<RadiusEstimate> {
    let norms: Vec<_> = s.coeffs().iter().map(sym_norm).collect();
    let majorant_coeffs: Vec<f64> = norms.iter().map(|e| e.estimate).collect();
    let majorant_upper: Vec<f64> = norms.iter().map(|e| e.upper_bound).collect();

    let samples = config.groenwall_samples.max(2);
    let start = num::sqrt(s.dim() as f64);
    let groenwall_bound_at = (0..samples)
        .map(|i| {
            let t = i as f64 / (samples - 1) as f64;
            let integral: f64 = majorant_upper
                .iter()
                .enumerate()
                .map(|(m, c)| c * num::powi(t, m + 1) / (m + 1) as f64)
                .sum();
            (t, start * num::exp(integral))
        })
        .collect();

    let n = s.dim();
    let rays = sphere_samples(n, config.rays);
    let per_ray = rays
        .iter()
        .map(|ray| degeneracy_along(gauge, ray, config))
        .collect::<Result<Vec<_>>>()?;
    let frame_degeneracy_radius = per_ray.iter().flatten().copied().reduce(f64::min);
    Ok(RadiusEstimate {
        majorant_coeffs,
        majorant_upper,
        groenwall_bound_at,
        frame_degeneracy_radius,
        rays,
        per_ray,
        scan_radius: config.scan_radius,
    })
}

/// First `t ∈ (0, R]` with `|det g(t·ray)|` below the threshold, found by a
/// grid scan refined by bisection (sign changes, threshold crossings) or
/// golden-section search (touching minima).
pub fn degeneracy_along(gauge: &FormSeries, ray: &[f64], config: &RadiusConfig) -> Result<Option<f64>> {
    if gauge.form_degree() != 0 || gauge.value_space() != ValueSpace::Matrix {
        return Err(Error::ValueSpace("expected a gl(V)-valued 0-form"));
    }
    if ray.len() != gauge.dim() {
        return Err(Error::DimensionMismatch { expected: gauge.dim(), found: ray.len() });
    }
    // g(t·ray) = Σ_m tᵐ g⁽ᵐ⁾(ray)
    let on_ray = gauge
        .pieces()
        .iter()
        .map(|p| sym_eval(p, ray))
        .collect::<Result<Vec<_>>>()?;
    let n = gauge.dim();
    let det = |t: f64| -> Result<f64> {
        let mut acc = alloc::vec![0.0; n * n];
        for block in on_ray.iter().rev() {
            for (a, b) in acc.iter_mut().zip(block) {
                *a = *a * t + b;
            }
        }
        Ok(MatrixElement::from_row_major(n, acc)?.det())
    };
    let thr = config.degeneracy_threshold;
    let steps = config.scan_steps.max(4);
    let h = config.scan_radius / steps as f64;
    let mut prev2: Option<(f64, f64)> = None;
    let mut prev = (0.0, det(0.0)?);
    for i in 1..=steps {
        let t = i as f64 * h;
        let f = det(t)?;
        if f.signum() != prev.1.signum() || f == 0.0 {
            let (mut lo, mut hi) = (prev.0, t);
            let flo = prev.1;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let fm = det(mid)?;
                if fm.signum() == flo.signum() && fm != 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        if f.abs() < thr {
            let (mut lo, mut hi) = (prev.0, t);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if det(mid)?.abs() < thr {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Some(hi));
        }
        if let Some((t0, f0)) = prev2 {
            if prev.1.abs() < f0.abs() && prev.1.abs() < f.abs() {
                let (tm, fm) = golden_min(&det, t0, t)?;
                if fm < thr {
                    return Ok(Some(tm));
                }
            }
        }
        prev2 = Some(prev);
        prev = (t, f);
    }
    Ok(None)
}

fn golden_min(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let r = 0.5 * (num::sqrt(5.0) - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?.abs();
    let mut fd = f(d)?.abs();
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?.abs();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?.abs();
        }
    }
    let t = 0.5 * (a + b);
    Ok((t, f(t)?.abs()))
}
