//! The pipeline behind one problem file.

use torsionfree_core::curvature_algebra::holonomy_span;
use torsionfree_core::multilinear::sphere_samples;
use torsionfree_core::solver::{solve, RadiusConfig};
use torsionfree_core::verify::{check_s_equals_pr, convergence_study, empirical_orders, geodesic_residual, parallel_transport};
use torsionfree_core::{CurvatureMap, SolveConfig, SolveResult, TransportConfig};

use crate::problem::ProblemSpec;
use crate::report::{
    Convergence, HolonomyReport, InputCheck, RadiusReport, Residuals, SolveReportFile, Status, TransportReport,
    TransportSample, REPORT_SCHEMA,
};
use crate::CliError;

/// At most this many rays get an ODE cross-check.
const TRANSPORT_SAMPLES: usize = 4;
/// Sample points sit at this distance from the origin, or closer when the
/// degeneracy radius is small.
const SAMPLE_RADIUS: f64 = 0.5;
const CONVERGENCE_STEPS: [usize; 7] = [1, 2, 4, 8, 16, 32, 64];
/// Deviations below this are roundoff; no order is read off them.
const CONVERGENCE_FLOOR: f64 = 1e-13;
/// Orders are read off only while the deviation stays this far above the
/// finest one, which approximates the series truncation floor.
const FLOOR_MARGIN: f64 = 10.0;
const GEODESIC_SAMPLES: usize = 32;

/// Runs every requested check. Never fails: problems end up as an
/// `invalid-input` report.
pub fn run(spec: &ProblemSpec) -> SolveReportFile {
    match try_run(spec) {
        Ok(report) if report.all_finite() => report,
        Ok(_) => SolveReportFile::invalid(Some(spec.clone()), &CliError::Invalid("non-finite value in the results".into())),
        Err((input, err)) => {
            let mut report = SolveReportFile::invalid(Some(spec.clone()), &err);
            report.input = input;
            report
        }
    }
}

type Failure = (Option<InputCheck>, CliError);

fn try_run(spec: &ProblemSpec) -> Result<SolveReportFile, Failure> {
    spec.validate().map_err(|e| (None, e))?;
    let raw = spec.raw_curvature().map_err(|e| (None, e))?;
    let (s, input) = check_input(spec, raw)?;
    let config = SolveConfig {
        order: spec.order,
        tolerance: spec.tolerance,
        radius: RadiusConfig { rays: spec.ode.rays, scan_radius: spec.ode.scan_radius, ..Default::default() },
    };
    let fail = |e: torsionfree_core::Error| (Some(input.clone()), CliError::Core(e));
    let result = solve(&s, &config).map_err(fail)?;
    let consistent = result.is_consistent();
    let threshold = spec.tolerance * result.scale;

    let residuals = Residuals {
        order: result.order,
        tolerance: spec.tolerance,
        threshold,
        first_failing_degree: result.first_failing_degree(),
        consistency_per_degree: result.consistency_residual_per_degree.clone(),
        structure_identity: result.structure_identity_residual,
        torsion: result.torsion_residual,
        curvature_gauge: result.curvature_gauge_residual,
        second_bianchi_per_degree: spec.checks.second_bianchi.then(|| result.second_bianchi_per_degree.clone()),
        second_bianchi: spec.checks.second_bianchi.then_some(result.second_bianchi_residual),
    };
    let holonomy = spec.checks.holonomy.then(|| {
        let h = holonomy_span(&s, threshold);
        HolonomyReport {
            dim: h.dim,
            basis: h.basis.iter().map(|m| m.as_slice().chunks(s.dim()).map(<[f64]>::to_vec).collect()).collect(),
            closed_under_bracket: h.closed_under_bracket,
            closure_residual: h.closure_residual,
            authoritative: consistent,
        }
    });
    let radius = spec.checks.radius.then(|| {
        let r = &result.radius;
        RadiusReport {
            majorant_coeffs: r.majorant_coeffs.clone(),
            majorant_upper: r.majorant_upper.clone(),
            groenwall_bound_at: r.groenwall_bound_at.iter().map(|&(t, b)| [t, b]).collect(),
            frame_degeneracy_radius: r.frame_degeneracy_radius,
            scan_radius: r.scan_radius,
            rays: r.rays.clone(),
            per_ray: r.per_ray.clone(),
        }
    });
    let transport = if spec.checks.ode_verify { Some(transport(spec, &s, &result).map_err(fail)?) } else { None };

    Ok(SolveReportFile {
        schema: REPORT_SCHEMA.to_string(),
        problem: Some(spec.clone()),
        status: if consistent { Status::Consistent } else { Status::Inconsistent },
        error: None,
        input: Some(input),
        residuals: Some(residuals),
        holonomy,
        radius,
        transport,
    })
}

fn check_input(spec: &ProblemSpec, raw: CurvatureMap) -> Result<(CurvatureMap, InputCheck), Failure> {
    let residual = raw.bianchi_residual();
    let scale = 1.0 + raw.scale();
    if residual <= spec.tolerance * scale {
        return Ok((raw, InputCheck { first_bianchi_residual: residual, projected: false, scale }));
    }
    let input = InputCheck { first_bianchi_residual: residual, projected: spec.project, scale };
    if !spec.project {
        return Err((Some(input), CliError::Core(torsionfree_core::Error::NotInK { residual })));
    }
    Ok((raw.project_onto_k(), input))
}

fn transport(spec: &ProblemSpec, s: &CurvatureMap, result: &SolveResult) -> torsionfree_core::Result<TransportReport> {
    let n = s.dim();
    let limit = result.radius.frame_degeneracy_radius;
    let r = limit.map_or(SAMPLE_RADIUS, |d| SAMPLE_RADIUS.min(0.25 * d));
    let config = TransportConfig { steps: spec.ode.steps, max_radius: limit, ..Default::default() };
    let mut samples = Vec::new();
    for ray in sphere_samples(n, spec.ode.rays.min(TRANSPORT_SAMPLES)) {
        let v: Vec<f64> = ray.iter().map(|x| r * x).collect();
        let geodesic = geodesic_residual(&result.gamma, &v, GEODESIC_SAMPLES)?;
        let sample = match parallel_transport(&result.gamma, &result.gauge, &v, &config) {
            Ok(t) => TransportSample {
                deviation: Some(t.deviation),
                s_equals_pr: Some(check_s_equals_pr(s, &result.gamma, &result.curvature, &v, &config)?),
                geodesic_residual: geodesic,
                note: None,
                v,
            },
            Err(e) => TransportSample { v, deviation: None, s_equals_pr: None, geodesic_residual: geodesic, note: Some(e.to_string()) },
        };
        samples.push(sample);
    }
    let convergence = match samples.first() {
        Some(first) if first.deviation.is_some() => {
            let study = convergence_study(&result.gamma, &result.gauge, &first.v, &CONVERGENCE_STEPS)?;
            let finest = study.last().map_or(0.0, |p| p.1);
            let floor = CONVERGENCE_FLOOR.max(FLOOR_MARGIN * finest);
            let above: Vec<(usize, f64)> = study.iter().copied().take_while(|&(_, d)| d > floor).collect();
            Some(Convergence {
                v: first.v.clone(),
                steps: study.iter().map(|p| p.0).collect(),
                deviations: study.iter().map(|p| p.1).collect(),
                orders: empirical_orders(&above),
            })
        }
        _ => None,
    };
    Ok(TransportReport { steps: spec.ode.steps, samples, convergence })
}
