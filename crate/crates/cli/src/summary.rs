//! Plain-text rendering of a report.

use std::fmt::Write;

use crate::report::{SolveReportFile, Status};

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

/// Stable, diff-friendly text: one fact per line, fixed number formats.
pub fn render_summary(report: &SolveReportFile) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "schema: {}", report.schema);
    if let Some(p) = &report.problem {
        let _ = writeln!(w, "problem: {} dim {} order {} tolerance {}", p.preset, p.dim, p.order, sci(p.tolerance));
    }
    match (report.status, report.residuals.as_ref().and_then(|r| r.first_failing_degree)) {
        (Status::Inconsistent, Some(d)) => {
            let _ = writeln!(w, "status: inconsistent (first failing degree: {d})");
        }
        (status, _) => {
            let _ = writeln!(w, "status: {}", status.as_str());
        }
    }
    if let Some(e) = &report.error {
        let _ = writeln!(w, "error: {} ({})", e.message, e.kind);
    }
    if let Some(i) = &report.input {
        let projected = if i.projected { " (projected onto K)" } else { "" };
        let _ = writeln!(w, "input first bianchi residual: {}{projected}", sci(i.first_bianchi_residual));
    }
    if let Some(r) = &report.residuals {
        let _ = writeln!(w, "threshold: {}", sci(r.threshold));
        let _ = writeln!(w, "degree  consistency  second_bianchi");
        for (d, c) in r.consistency_per_degree.iter().enumerate() {
            let b = r.second_bianchi_per_degree.as_ref().and_then(|b| b.get(d)).map_or("-".to_string(), |x| sci(*x));
            let _ = writeln!(w, "{d:>6}  {:>11}  {b:>14}", sci(*c));
        }
        let _ = writeln!(w, "structure identity residual: {}", sci(r.structure_identity));
        let _ = writeln!(w, "torsion residual: {}", sci(r.torsion));
        let _ = writeln!(w, "curvature gauge residual: {}", sci(r.curvature_gauge));
    }
    if let Some(h) = &report.holonomy {
        let _ = writeln!(w, "hol dim: {}", h.dim);
        let _ = writeln!(
            w,
            "hol closed under bracket: {} (residual {})",
            if h.closed_under_bracket { "yes" } else { "no" },
            sci(h.closure_residual)
        );
        let _ = writeln!(w, "hol authoritative: {}", if h.authoritative { "yes" } else { "no" });
        for (i, m) in h.basis.iter().enumerate() {
            let rows: Vec<String> =
                m.iter().map(|r| r.iter().map(|x| format!("{x:>10.6}")).collect::<Vec<_>>().join(" ")).collect();
            let _ = writeln!(w, "hol basis {i}: [{}]", rows.join(" ;"));
        }
    }
    if let Some(r) = &report.radius {
        match r.frame_degeneracy_radius {
            Some(d) => {
                let _ = writeln!(w, "frame degeneracy radius: {d:.6}");
            }
            None => {
                let _ = writeln!(w, "frame degeneracy radius: none within {}", r.scan_radius);
            }
        }
        if let Some(&[t, b]) = r.groenwall_bound_at.last() {
            let _ = writeln!(w, "groenwall bound at t={t}: {}", sci(b));
        }
        let m: Vec<String> = r.majorant_upper.iter().map(|x| sci(*x)).collect();
        let _ = writeln!(w, "majorant upper bounds: [{}]", m.join(", "));
    }
    if let Some(t) = &report.transport {
        for s in &t.samples {
            let v: Vec<String> = s.v.iter().map(|x| format!("{x:.4}")).collect();
            match (s.deviation, s.s_equals_pr) {
                (Some(d), Some(p)) => {
                    let _ = writeln!(
                        w,
                        "transport at [{}]: deviation {} S=PR {} geodesic {}",
                        v.join(", "),
                        sci(d),
                        sci(p),
                        sci(s.geodesic_residual)
                    );
                }
                _ => {
                    let _ = writeln!(w, "transport at [{}]: {}", v.join(", "), s.note.as_deref().unwrap_or("skipped"));
                }
            }
        }
        if let Some(c) = &t.convergence {
            let o: Vec<String> = c.orders.iter().map(|x| format!("{x:.2}")).collect();
            let _ = writeln!(w, "rk4 empirical orders: [{}]", o.join(", "));
        }
    }
    out
}
