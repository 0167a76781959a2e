use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use torsionfree::problem::so_basis_rows;
use torsionfree::{parse_preset, render_summary, run, Checks, CliError, Preset, ProblemSpec, SolveReportFile};

/// Series construction of torsion-free connections with prescribed
/// curvature map, with consistency, holonomy and ODE checks.
#[derive(Parser, Debug)]
#[command(name = "torsionfree", version)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["input", "preset"])))]
struct Args {
    /// Problem file (torsionfree.problem/v1).
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// flat | constant_curvature:K | symmetric_from_basis:so[:K]
    #[arg(long, value_name = "NAME[:PARAMS]")]
    preset: Option<String>,
    /// Dimension n (default 3 for presets).
    #[arg(long)]
    dim: Option<usize>,
    /// Truncation order N.
    #[arg(long)]
    order: Option<usize>,
    /// Relative tolerance for every pass/fail decision.
    #[arg(long)]
    tol: Option<f64>,
    /// Comma-separated: consistency, second_bianchi, holonomy, ode_verify, radius, all, none.
    #[arg(long, value_name = "LIST")]
    checks: Option<String>,
    /// Rays for the degeneracy scan.
    #[arg(long)]
    rays: Option<usize>,
    /// RK4 steps for the transport check.
    #[arg(long)]
    steps: Option<usize>,
    /// Largest ray parameter searched for frame degeneracy.
    #[arg(long)]
    scan_radius: Option<f64>,
    /// Project custom coefficients onto K(gl(V)) instead of rejecting them.
    #[arg(long)]
    project: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Print the text summary to stdout.
    #[arg(long)]
    summary: bool,
}

fn build_spec(args: &Args) -> Result<ProblemSpec, CliError> {
    let mut spec = match (&args.input, &args.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
            ProblemSpec::from_json(&text)?
        }
        (None, Some(name)) => ProblemSpec::new(args.dim.unwrap_or(3), parse_preset(name)?),
        (None, None) => unreachable!("clap requires a source"),
    };
    if let Some(d) = args.dim {
        spec.dim = d;
    }
    if let Some(o) = args.order {
        spec.order = o;
    }
    if let Some(t) = args.tol {
        spec.tolerance = t;
    }
    if let Some(c) = &args.checks {
        spec.checks = Checks::parse_list(c)?;
    }
    if let Some(r) = args.rays {
        spec.ode.rays = r;
    }
    if let Some(s) = args.steps {
        spec.ode.steps = s;
    }
    if let Some(r) = args.scan_radius {
        spec.ode.scan_radius = r;
    }
    spec.project |= args.project;
    if let Some(p) = &args.out {
        spec.output.report = Some(p.display().to_string());
    }
    if args.preset.is_some() {
        if let Preset::SymmetricFromBasis { basis, .. } = &mut spec.preset {
            *basis = so_basis_rows(spec.dim);
        }
    }
    Ok(spec)
}

fn write(path: &str, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io { path: path.to_string(), source: e })
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which would read as "inconsistent"
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let report = match build_spec(&args) {
        Ok(spec) => run(&spec),
        Err(e) => {
            eprintln!("error: {e}");
            SolveReportFile::invalid(None, &e)
        }
    };
    if let Some(e) = &report.error {
        if report.problem.is_some() {
            eprintln!("error: {}", e.message);
        }
    }
    let json = report.to_json();
    let summary = render_summary(&report);
    let outputs = report.problem.as_ref().map(|p| p.output.clone()).unwrap_or_default();
    let mut result = Ok(());
    match outputs.report.as_deref() {
        Some(path) => result = write(path, &json),
        None if !args.summary => print!("{json}"),
        None => {}
    }
    if let Some(path) = outputs.summary.as_deref() {
        result = result.and(write(path, &summary));
    }
    if args.summary {
        print!("{summary}");
    }
    if let Err(e) = result {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(report.status.exit_code() as u8)
}
