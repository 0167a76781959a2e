//! Report files (`torsionfree.report/v1`).

use serde::{Deserialize, Serialize};

use crate::problem::ProblemSpec;
use crate::CliError;

pub const REPORT_SCHEMA: &str = "torsionfree.report/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Consistent,
    Inconsistent,
    InvalidInput,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Consistent => 0,
            Status::InvalidInput => 1,
            Status::Inconsistent => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Consistent => "consistent",
            Status::Inconsistent => "inconsistent",
            Status::InvalidInput => "invalid-input",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReportFile {
    pub schema: String,
    /// Absent only when the problem file could not be parsed.
    pub problem: Option<ProblemSpec>,
    pub status: Status,
    pub error: Option<ErrorInfo>,
    pub input: Option<InputCheck>,
    pub residuals: Option<Residuals>,
    pub holonomy: Option<HolonomyReport>,
    pub radius: Option<RadiusReport>,
    pub transport: Option<TransportReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
    pub residual: Option<f64>,
}

/// First Bianchi check of the input values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputCheck {
    pub first_bianchi_residual: f64,
    pub projected: bool,
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub order: usize,
    pub tolerance: f64,
    /// `tolerance · (1 + max |S|)`.
    pub threshold: f64,
    pub first_failing_degree: Option<usize>,
    /// Degrees `0..N−1`.
    pub consistency_per_degree: Vec<f64>,
    pub structure_identity: f64,
    pub torsion: f64,
    pub curvature_gauge: f64,
    /// Degrees `0..N−2`; absent when the check is off.
    pub second_bianchi_per_degree: Option<Vec<f64>>,
    pub second_bianchi: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolonomyReport {
    pub dim: usize,
    /// Row-major `n×n` matrices.
    pub basis: Vec<Vec<Vec<f64>>>,
    pub closed_under_bracket: bool,
    pub closure_residual: f64,
    /// The span equals the holonomy algebra only when `S` is consistent.
    pub authoritative: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusReport {
    pub majorant_coeffs: Vec<f64>,
    pub majorant_upper: Vec<f64>,
    /// `[t, bound]` pairs.
    pub groenwall_bound_at: Vec<[f64; 2]>,
    pub frame_degeneracy_radius: Option<f64>,
    pub scan_radius: f64,
    pub rays: Vec<Vec<f64>>,
    pub per_ray: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportReport {
    pub steps: usize,
    pub samples: Vec<TransportSample>,
    pub convergence: Option<Convergence>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportSample {
    pub v: Vec<f64>,
    /// `max |A(1) − g(v)⁻¹|`.
    pub deviation: Option<f64>,
    pub s_equals_pr: Option<f64>,
    pub geodesic_residual: f64,
    /// Set when the integration was refused or degenerated.
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub v: Vec<f64>,
    pub steps: Vec<usize>,
    pub deviations: Vec<f64>,
    pub orders: Vec<f64>,
}

impl SolveReportFile {
    pub fn invalid(problem: Option<ProblemSpec>, err: &CliError) -> Self {
        Self {
            schema: REPORT_SCHEMA.to_string(),
            problem,
            status: Status::InvalidInput,
            error: Some(ErrorInfo { kind: err.kind().to_string(), message: err.to_string(), residual: err.residual() }),
            input: None,
            residuals: None,
            holonomy: None,
            radius: None,
            transport: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse { line: e.line(), column: e.column(), message: e.to_string() })
    }

    /// Every numeric field, for the finiteness invariant.
    pub fn numbers(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if let Some(p) = &self.problem {
            out.push(p.tolerance);
            out.push(p.ode.scan_radius);
        }
        if let Some(e) = &self.error {
            out.extend(e.residual);
        }
        if let Some(i) = &self.input {
            out.extend([i.first_bianchi_residual, i.scale]);
        }
        if let Some(r) = &self.residuals {
            out.extend([r.tolerance, r.threshold, r.structure_identity, r.torsion, r.curvature_gauge]);
            out.extend(&r.consistency_per_degree);
            out.extend(r.second_bianchi_per_degree.iter().flatten());
            out.extend(r.second_bianchi);
        }
        if let Some(h) = &self.holonomy {
            out.extend(h.basis.iter().flatten().flatten());
            out.push(h.closure_residual);
        }
        if let Some(r) = &self.radius {
            out.extend(&r.majorant_coeffs);
            out.extend(&r.majorant_upper);
            out.extend(r.groenwall_bound_at.iter().flatten());
            out.extend(r.frame_degeneracy_radius);
            out.push(r.scan_radius);
            out.extend(r.rays.iter().flatten());
            out.extend(r.per_ray.iter().flatten());
        }
        if let Some(t) = &self.transport {
            for s in &t.samples {
                out.extend(&s.v);
                out.extend(s.deviation);
                out.extend(s.s_equals_pr);
                out.push(s.geodesic_residual);
            }
            if let Some(c) = &t.convergence {
                out.extend(&c.v);
                out.extend(&c.deviations);
                out.extend(&c.orders);
            }
        }
        out
    }

    pub fn all_finite(&self) -> bool {
        self.numbers().iter().all(|x| x.is_finite())
    }
}
