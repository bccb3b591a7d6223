//! Subcommand bodies; `main` only parses arguments and maps errors to exit codes.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use encircle_core::formation::FormationSpec;
use encircle_core::geometry::Angle;
use encircle_core::metrics::{metrics, MetricSeries};
use encircle_core::poly;
use encircle_core::sim::{integrate, Trajectory};
use encircle_core::spectral::{spectral_report, SpectralReport};
use encircle_core::stability::{
    origin_charpoly, routh_sign_changes, single_agent_charpoly_ia, single_agent_charpoly_ib,
    RouthTable,
};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{
    build_report, read_trajectory_csv, report_to_json, write_metrics_csv, write_trajectory_csv,
    RunReport,
};
use crate::svg::{emit_svg, Series, Style};

pub const TRAJECTORY_CSV: &str = "trajectory.csv";
pub const METRICS_CSV: &str = "metrics.csv";
pub const REPORT_JSON: &str = "report.json";
pub const TRAJECTORY_SVG: &str = "trajectory.svg";
pub const METRICS_SVG: &str = "metrics.svg";
/// Resolved configuration, needed to rebuild the report from the CSV.
pub const CONFIG_TOML: &str = "config.toml";

/// Simulates `config` and writes every output file into `out_dir`.
pub fn cmd_run(config: &RunConfig, out_dir: &Path) -> CliResult<RunReport> {
    let sim = config.to_sim_config()?;
    let traj = integrate(&sim)?;
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join(CONFIG_TOML), config.to_toml_string())?;
    write_trajectory_csv(
        &traj,
        BufWriter::new(File::create(out_dir.join(TRAJECTORY_CSV))?),
    )?;
    let m = metrics(&traj, &sim.spec);
    write_metrics_csv(&m, BufWriter::new(File::create(out_dir.join(METRICS_CSV))?))?;
    let report = build_report(&traj, &sim.spec, &sim.params)?;
    fs::write(out_dir.join(REPORT_JSON), report_to_json(&report)? + "\n")?;
    fs::write(out_dir.join(TRAJECTORY_SVG), trajectory_svg(&traj)?)?;
    fs::write(out_dir.join(METRICS_SVG), metrics_svg(&m)?)?;
    Ok(report)
}

/// Rebuilds the report of a finished run from its CSV and saved configuration.
pub fn regenerate_report(out_dir: &Path) -> CliResult<RunReport> {
    let config = RunConfig::load(&out_dir.join(CONFIG_TOML))?;
    let sim = config.to_sim_config()?;
    let traj = read_trajectory_csv(
        File::open(out_dir.join(TRAJECTORY_CSV))?,
        sim.dt,
        &sim.spec,
        &sim.params,
        &sim.target,
    )?;
    build_report(&traj, &sim.spec, &sim.params)
}

pub fn trajectory_svg(traj: &Trajectory) -> CliResult<String> {
    let n = traj.n_agents();
    let mut series: Vec<Series> = (0..n)
        .map(|i| {
            Series::new(
                format!("agent {}", i + 1),
                traj.samples
                    .iter()
                    .map(|s| (s.agents[i].p.x, s.agents[i].p.y))
                    .collect(),
            )
        })
        .collect();
    let mut target = Series::new(
        "target",
        traj.samples
            .iter()
            .map(|s| (s.target.p0.x, s.target.p0.y))
            .collect(),
    );
    target.color = Some("#000000".into());
    series.push(target);
    let style = Style {
        title: "Agent trajectories".into(),
        x_label: "x".into(),
        y_label: "y".into(),
        equal_aspect: true,
        ..Style::default()
    };
    emit_svg(&series, &style)
}

pub fn metrics_svg(m: &MetricSeries) -> CliResult<String> {
    let pair = |label: &str, values: Vec<f64>| {
        Series::new(label, m.times.iter().copied().zip(values).collect())
    };
    let series = [
        pair("max |rho - R|", MetricSeries::worst(&m.radius_error)),
        pair("max |rate - Omega|", MetricSeries::worst(&m.rate_error)),
        pair("max spacing error", MetricSeries::worst(&m.spacing_error)),
    ];
    let style = Style {
        title: "Formation errors".into(),
        x_label: "t".into(),
        ..Style::default()
    };
    emit_svg(&series, &style)
}

fn fmt_complex(z: &encircle_core::linalg::Complex64) -> String {
    if z.im.abs() < 1e-12 {
        format!("{:.10}", z.re)
    } else {
        format!("{:.10}{:+.10}i", z.re, z.im)
    }
}

fn flag(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn format_spectral_report(r: &SpectralReport) -> String {
    let n = r.laplacian.len();
    let mut s = String::new();
    let _ = writeln!(s, "N = {n}");
    let _ = writeln!(s, "d = {:?}", r.laplacian.d);
    let _ = writeln!(s, "eigenvalues of L(d):");
    for z in &r.laplacian_eigenvalues {
        let _ = writeln!(s, "  {}", fmt_complex(z));
    }
    let _ = writeln!(s, "eigenvalues of the transposed stacked matrix:");
    for z in &r.phi_eigenvalues {
        let _ = writeln!(s, "  {}", fmt_complex(z));
    }
    let two = if n % 2 == 0 {
        "2 present (N even)"
    } else {
        "2 absent (N odd)"
    };
    let _ = writeln!(s, "spectrum in [0, 2]: {}", flag(r.flags.all_in_0_2));
    let _ = writeln!(s, "spectrum real: {}", flag(r.flags.real));
    let _ = writeln!(s, "zero simple: {}", flag(r.flags.zero_simple));
    let _ = writeln!(s, "{two}: {}", flag(r.flags.two_parity));
    let _ = writeln!(
        s,
        "nonzero stacked spectrum stable: {} (margin {:.6e})",
        flag(r.nonzero_stable),
        r.stability_margin
    );
    let _ = writeln!(s, "left null vector p = {:?}", r.p);
    s
}

/// Prints the spectral report; fails when any flag does.
pub fn cmd_analyze_spectrum(spec: &FormationSpec, lambda1: f64, lambda2: f64) -> CliResult<String> {
    spec.validate()
        .map_err(|v| CliError::Config(format!("inadmissible formation: {v}")))?;
    let r = spectral_report(&spec.d, lambda1, lambda2)?;
    let text = format_spectral_report(&r);
    if r.all_pass() {
        Ok(text)
    } else {
        Err(CliError::CheckFailed(text))
    }
}

fn format_routh(table: &RouthTable, s: &mut String) {
    let degree = table.rows.len() - 1;
    for (k, row) in table.rows.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>12.6}")).collect();
        let mut tags = String::new();
        if table.epsilon_rows.contains(&k) {
            tags.push_str("  (zero pivot -> epsilon)");
        }
        if table.auxiliary_rows.contains(&k) {
            tags.push_str("  (from auxiliary polynomial)");
        }
        let _ = writeln!(s, "  s^{:<2} {}{tags}", degree - k, cells.join(" "));
    }
}

/// Single-agent characteristic polynomials with their verdicts.
pub fn cmd_stability(omega: f64, mu: f64, radius: f64, sigma: f64) -> CliResult<String> {
    let mut s = String::new();
    if omega != 0.0 {
        let c = single_agent_charpoly_ia(omega, mu, radius, sigma)?;
        let roots = poly::roots(&c)?;
        let (_, changes) = routh_sign_changes(&c)?;
        let hurwitz = c[1] * c[2] - c[0] * c[3];
        let stable = c.iter().all(|&x| x > 0.0) && hurwitz > 0.0;
        let _ = writeln!(s, "circling equilibrium (Omega = {omega}):");
        let _ = writeln!(s, "  coefficients {c:?}");
        let _ = writeln!(s, "  a1*a2 - a0*a3 = {hurwitz:.10}");
        let _ = writeln!(
            s,
            "  roots: {}",
            roots.iter().map(fmt_complex).collect::<Vec<_>>().join(", ")
        );
        let _ = writeln!(
            s,
            "  verdict: {} ({changes} RHP)",
            if stable { "stable" } else { "unstable" }
        );
    } else {
        let p = single_agent_charpoly_ib(mu, radius, sigma, Angle::ZERO)?;
        let stable = p.roots.iter().all(|z| z.re < 0.0);
        let _ = writeln!(s, "resting equilibrium (Omega = 0, beta = 0):");
        let _ = writeln!(s, "  (l + 1)(l^2 + l + {:.10})", p.gain);
        let _ = writeln!(
            s,
            "  roots: {}",
            p.roots
                .iter()
                .map(fmt_complex)
                .collect::<Vec<_>>()
                .join(", ")
        );
        let _ = writeln!(
            s,
            "  verdict: {}",
            if stable {
                "stable"
            } else {
                "not asymptotically stable"
            }
        );
    }
    let c = origin_charpoly(omega, mu, radius)?;
    let (table, changes) = routh_sign_changes(&c)?;
    let oracle = poly::count_rhp_roots(&c, 1e-9)?;
    let _ = writeln!(s, "target point (sigma = 0):");
    let _ = writeln!(s, "  coefficients {c:?}");
    format_routh(&table, &mut s);
    let verdict = if table.is_boundary() {
        format!("boundary case (imaginary-axis roots), {changes} sign changes")
    } else if changes > 0 {
        format!("unstable ({changes} RHP)")
    } else {
        "stable".to_string()
    };
    let _ = writeln!(s, "  verdict: {verdict}; root count check: {oracle} RHP");
    Ok(s)
}
