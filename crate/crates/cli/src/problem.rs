//! Problem files (`torsionfree.problem/v1`) and their validation.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use torsionfree_core::multilinear::index::{form_rank, sym_rank};
use torsionfree_core::{CurvatureMap, GradedCoefficient, MatrixElement, ValueSpace};

use crate::CliError;

pub const PROBLEM_SCHEMA: &str = "torsionfree.problem/v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default = "problem_schema")]
    pub schema: String,
    pub dim: usize,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    pub preset: Preset,
    /// Only for `custom`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub s_coefficients: Vec<DegreeBlock>,
    /// Project custom coefficients onto `K(gl(V))` instead of rejecting them.
    #[serde(default)]
    pub project: bool,
    #[serde(default)]
    pub checks: Checks,
    #[serde(default)]
    pub ode: OdeSettings,
    #[serde(default)]
    pub output: OutputPaths,
}

fn problem_schema() -> String {
    PROBLEM_SCHEMA.to_string()
}

fn default_order() -> usize {
    10
}

fn default_tolerance() -> f64 {
    1e-10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Preset {
    Flat,
    ConstantCurvature {
        kappa: f64,
    },
    Custom,
    /// Experimental: constant `S` from a basis of a subalgebra `h ⊂ gl(V)`,
    /// each matrix given as rows.
    SymmetricFromBasis {
        #[serde(default = "one")]
        kappa: f64,
        basis: Vec<Vec<Vec<f64>>>,
    },
}

fn one() -> f64 {
    1.0
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Flat => write!(f, "flat"),
            Preset::ConstantCurvature { kappa } => write!(f, "constant_curvature({kappa})"),
            Preset::Custom => write!(f, "custom"),
            Preset::SymmetricFromBasis { kappa, basis } => {
                write!(f, "symmetric_from_basis({} generators, kappa {kappa})", basis.len())
            }
        }
    }
}

/// Homogeneous degree `k` of `S`; `entries` lists tensor components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeBlock {
    pub degree: usize,
    pub entries: Vec<Entry>,
}

/// `S⁽ᵏ⁾_μ(e_i, e_j)` for a sorted multi-index `μ` and `i < j`, as matrix
/// rows. The key `μ` stands for all of its orderings, so the polynomial is
/// `Σ_μ multinomial(μ) v^μ S_μ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub mu: Vec<usize>,
    pub pair: [usize; 2],
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Checks {
    pub consistency: bool,
    pub second_bianchi: bool,
    pub holonomy: bool,
    pub ode_verify: bool,
    pub radius: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Self { consistency: true, second_bianchi: true, holonomy: true, ode_verify: true, radius: true }
    }
}

impl Checks {
    pub const NAMES: [&'static str; 5] = ["consistency", "second_bianchi", "holonomy", "ode_verify", "radius"];

    /// Comma-separated check names, or `all` / `none`.
    pub fn parse_list(list: &str) -> Result<Self, CliError> {
        let mut out = Self { consistency: false, second_bianchi: false, holonomy: false, ode_verify: false, radius: false };
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match name {
                "all" => out = Self::default(),
                "none" => {}
                "consistency" => out.consistency = true,
                "second_bianchi" => out.second_bianchi = true,
                "holonomy" => out.holonomy = true,
                "ode_verify" => out.ode_verify = true,
                "radius" => out.radius = true,
                other => {
                    return Err(CliError::field(
                        "checks",
                        format!("unknown check `{other}` (expected one of {})", Self::NAMES.join(", ")),
                    ))
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OdeSettings {
    pub rays: usize,
    pub steps: usize,
    pub scan_radius: f64,
}

impl Default for OdeSettings {
    fn default() -> Self {
        Self { rays: 8, steps: 512, scan_radius: 4.0 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
}

impl ProblemSpec {
    pub fn new(dim: usize, preset: Preset) -> Self {
        Self {
            schema: problem_schema(),
            dim,
            order: default_order(),
            tolerance: default_tolerance(),
            preset,
            s_coefficients: Vec::new(),
            project: false,
            checks: Checks::default(),
            ode: OdeSettings::default(),
            output: OutputPaths::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse { line: e.line(), column: e.column(), message: e.to_string() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem specs always serialize")
    }

    /// Structural checks that do not need the solver.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != PROBLEM_SCHEMA {
            return Err(CliError::field("schema", format!("expected `{PROBLEM_SCHEMA}`, found `{}`", self.schema)));
        }
        if self.dim < 2 {
            return Err(CliError::field("dim", "must be at least 2"));
        }
        if self.order < 2 {
            return Err(CliError::field("order", "must be at least 2"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(CliError::field("tolerance", "must be finite and positive"));
        }
        if !self.checks.consistency {
            return Err(CliError::field("checks.consistency", "the status is decided by this check; it cannot be disabled"));
        }
        if self.ode.steps < 64 {
            return Err(CliError::field("ode.steps", "at least 64 RK4 steps are needed"));
        }
        if self.ode.rays == 0 {
            return Err(CliError::field("ode.rays", "must be positive"));
        }
        if !(self.ode.scan_radius.is_finite() && self.ode.scan_radius > 0.0) {
            return Err(CliError::field("ode.scan_radius", "must be finite and positive"));
        }
        match &self.preset {
            Preset::ConstantCurvature { kappa } if !kappa.is_finite() => {
                return Err(CliError::field("preset.kappa", "must be finite"));
            }
            Preset::SymmetricFromBasis { kappa, basis } => {
                if !kappa.is_finite() {
                    return Err(CliError::field("preset.kappa", "must be finite"));
                }
                for (b, m) in basis.iter().enumerate() {
                    self.check_matrix(m, &format!("preset.basis[{b}]"))?;
                }
            }
            _ => {}
        }
        if self.preset != Preset::Custom && !self.s_coefficients.is_empty() {
            return Err(CliError::field("s_coefficients", "only allowed with the custom preset"));
        }
        let mut seen = BTreeSet::new();
        for (bi, block) in self.s_coefficients.iter().enumerate() {
            for (ei, e) in block.entries.iter().enumerate() {
                let path = format!("s_coefficients[{bi}].entries[{ei}]");
                if e.mu.len() != block.degree {
                    return Err(CliError::field(format!("{path}.mu"), format!("needs {} indices", block.degree)));
                }
                if e.mu.windows(2).any(|w| w[0] > w[1]) || e.mu.iter().any(|&i| i >= self.dim) {
                    return Err(CliError::field(format!("{path}.mu"), "must be sorted indices below dim"));
                }
                let [i, j] = e.pair;
                if !(i < j && j < self.dim) {
                    return Err(CliError::field(format!("{path}.pair"), "needs i < j < dim"));
                }
                self.check_matrix(&e.matrix, &format!("{path}.matrix"))?;
                if !seen.insert((block.degree, e.mu.clone(), e.pair)) {
                    return Err(CliError::field(path, "duplicate (degree, mu, pair) key"));
                }
            }
        }
        Ok(())
    }

    fn check_matrix(&self, m: &[Vec<f64>], path: &str) -> Result<(), CliError> {
        let n = self.dim;
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(CliError::field(path, format!("must be {n}×{n}")));
        }
        if m.iter().flatten().any(|x| !x.is_finite()) {
            return Err(CliError::field(path, "entries must be finite"));
        }
        Ok(())
    }

    /// The curvature map before `K(gl(V))` validation.
    pub fn raw_curvature(&self) -> Result<CurvatureMap, CliError> {
        let n = self.dim;
        let core = |e: torsionfree_core::Error| CliError::field("preset", e.to_string());
        match &self.preset {
            Preset::Flat => Ok(CurvatureMap::zero(n)),
            Preset::ConstantCurvature { kappa } => CurvatureMap::constant_curvature(n, *kappa).map_err(core),
            Preset::SymmetricFromBasis { kappa, basis } => {
                let mats: Vec<MatrixElement> = basis
                    .iter()
                    .map(|rows| MatrixElement::from_row_major(n, rows.concat()))
                    .collect::<Result<_, _>>()
                    .map_err(core)?;
                CurvatureMap::symmetric_from_basis(n, &mats, *kappa).map_err(core)
            }
            Preset::Custom => {
                let top = self.s_coefficients.iter().map(|b| b.degree).max().unwrap_or(0);
                let mut coeffs: Vec<GradedCoefficient> =
                    (0..=top).map(|k| GradedCoefficient::zeros(n, k, 2, ValueSpace::Matrix)).collect();
                for block in &self.s_coefficients {
                    for e in &block.entries {
                        let dst = coeffs[block.degree].entry_mut(sym_rank(n, &e.mu), form_rank(n, &e.pair));
                        dst.copy_from_slice(&e.matrix.concat());
                    }
                }
                CurvatureMap::new_unchecked(n, coeffs).map_err(core)
            }
        }
    }
}

/// `NAME[:params]` for `--preset`.
pub fn parse_preset(text: &str) -> Result<Preset, CliError> {
    let mut parts = text.split(':');
    let name = parts.next().unwrap_or_default();
    let params: Vec<&str> = parts.collect();
    let number = |s: &str| -> Result<f64, CliError> {
        s.parse::<f64>().map_err(|_| CliError::field("preset", format!("`{s}` is not a number")))
    };
    match (name, params.as_slice()) {
        ("flat", []) => Ok(Preset::Flat),
        ("constant_curvature", [k]) => Ok(Preset::ConstantCurvature { kappa: number(k)? }),
        ("constant_curvature", []) => Ok(Preset::ConstantCurvature { kappa: 1.0 }),
        ("symmetric_from_basis", ["so"]) => Ok(Preset::SymmetricFromBasis { kappa: 1.0, basis: Vec::new() }),
        ("symmetric_from_basis", ["so", k]) => Ok(Preset::SymmetricFromBasis { kappa: number(k)?, basis: Vec::new() }),
        ("custom", []) => Err(CliError::field("preset", "custom problems need --input")),
        _ => Err(CliError::field(
            "preset",
            format!("unknown preset `{text}` (flat, constant_curvature:K, symmetric_from_basis:so[:K])"),
        )),
    }
}

/// Fills in an `so(n)` basis for `symmetric_from_basis:so` once the
/// dimension is known.
pub fn so_basis_rows(n: usize) -> Vec<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            let mut m = vec![vec![0.0; n]; n];
            m[p][q] = 1.0;
            m[q][p] = -1.0;
            out.push(m);
        }
    }
    out
}
