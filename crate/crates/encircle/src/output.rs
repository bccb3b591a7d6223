//! Trajectory and metric CSV files and the JSON run report.

use std::io::{Read, Write};

use encircle_core::controller::ControllerParams;
use encircle_core::formation::FormationSpec;
use encircle_core::metrics::{convergence_time, metrics, MetricSeries};
use encircle_core::sim::{derive, AgentState, Sample, Trajectory};
use encircle_core::stability::{classify_equilibrium, PolarState};
use encircle_core::target::TargetModel;
use encircle_core::Vec2;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Threshold for convergence times and the final-state classification.
pub const REPORT_TOL: f64 = 1e-2;

/// Scientific notation with 17 significant digits; parses back bit-exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_header(n: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for i in 1..=n {
        for k in ["x", "y", "vx", "vy", "rho", "alpha"] {
            h.push(format!("{k}{i}"));
        }
    }
    h.push("x0".into());
    h.push("y0".into());
    h
}

pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trajectory_header(traj.n_agents()))?;
    for s in &traj.samples {
        let mut row = vec![fmt_f64(s.t)];
        for (a, d) in s.agents.iter().zip(&s.derived) {
            for x in [a.p.x, a.p.y, a.v.x, a.v.y, d.rho, d.alpha.radians()] {
                row.push(fmt_f64(x));
            }
        }
        row.push(fmt_f64(s.target.p0.x));
        row.push(fmt_f64(s.target.p0.y));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Rebuilds a trajectory from its CSV. Target velocity and acceleration are not
/// stored, so they come from the analytic target model.
pub fn read_trajectory_csv<R: Read>(
    input: R,
    dt: f64,
    spec: &FormationSpec,
    params: &ControllerParams,
    target: &TargetModel,
) -> CliResult<Trajectory> {
    let mut r = csv::Reader::from_reader(input);
    let n = spec.len();
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != trajectory_header(n) {
        return Err(CliError::Format(format!(
            "unexpected trajectory header for {n} agents"
        )));
    }
    let mut samples = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| CliError::Format(format!("bad number {s:?}: {e}")))
            })
            .collect::<CliResult<_>>()?;
        let t = vals[0];
        let agents: Vec<AgentState> = (0..n)
            .map(|i| {
                let c = &vals[1 + 6 * i..];
                AgentState::new(Vec2::new(c[0], c[1]), Vec2::new(c[2], c[3]))
            })
            .collect();
        let ts = target.state_at(t);
        let derived = derive(&agents, &ts, spec, params)?;
        samples.push(Sample {
            step: (t / dt).round() as usize,
            t,
            agents,
            target: ts,
            derived,
        });
    }
    if samples.is_empty() {
        return Err(CliError::Format("trajectory has no rows".into()));
    }
    Ok(Trajectory { dt, samples })
}

pub fn write_metrics_csv<W: Write>(m: &MetricSeries, out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let n = m.radius_error.first().map_or(0, Vec::len);
    let mut h = vec!["t".to_string()];
    for prefix in ["radius_err", "rate_err", "spacing_err"] {
        h.extend((1..=n).map(|i| format!("{prefix}{i}")));
    }
    h.push("min_pair_distance".into());
    h.push("spacing_sum_err".into());
    w.write_record(&h)?;
    for k in 0..m.len() {
        let mut row = vec![fmt_f64(m.times[k])];
        for series in [&m.radius_error, &m.rate_error, &m.spacing_error] {
            row.extend(series[k].iter().map(|&x| fmt_f64(x)));
        }
        row.push(fmt_f64(m.min_pair_distance[k]));
        row.push(fmt_f64(m.spacing_sum_error[k]));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub n_agents: usize,
    pub t_final: f64,
    pub samples: usize,
    pub final_max_radius_error: f64,
    pub final_max_rate_error: f64,
    pub final_max_spacing_error: f64,
    /// `max_i |α̇_i|` at the last sample.
    pub final_max_abs_rate: f64,
    pub final_rho: Vec<f64>,
    pub final_alpha_rate: Vec<f64>,
    pub convergence_time_radius: Option<f64>,
    pub convergence_time_rate: Option<f64>,
    pub convergence_time_spacing: Option<f64>,
    pub min_pair_distance: f64,
    pub max_spacing_sum_error: f64,
    pub converged: bool,
    pub equilibrium_case: String,
    pub equilibrium_residual: f64,
}

pub fn build_report(
    traj: &Trajectory,
    spec: &FormationSpec,
    params: &ControllerParams,
) -> CliResult<RunReport> {
    let m = metrics(traj, spec);
    let last = traj.last();
    let ct =
        |series: &[Vec<f64>]| convergence_time(&m.times, &MetricSeries::worst(series), REPORT_TOL);
    let polar: Vec<PolarState> = last
        .agents
        .iter()
        .map(|a| PolarState::from_cartesian(a.p - last.target.p0, a.v - last.target.v0))
        .collect();
    let label = classify_equilibrium(&polar, spec, params, REPORT_TOL)?;
    let (r, q, s) = (
        m.final_max_radius_error(),
        m.final_max_rate_error(),
        m.final_max_spacing_error(),
    );
    Ok(RunReport {
        n_agents: spec.len(),
        t_final: last.t,
        samples: traj.samples.len(),
        final_max_radius_error: r,
        final_max_rate_error: q,
        final_max_spacing_error: s,
        final_max_abs_rate: last
            .derived
            .iter()
            .map(|d| d.alpha_rate.abs())
            .fold(0.0, f64::max),
        final_rho: last.derived.iter().map(|d| d.rho).collect(),
        final_alpha_rate: last.derived.iter().map(|d| d.alpha_rate).collect(),
        convergence_time_radius: ct(&m.radius_error),
        convergence_time_rate: ct(&m.rate_error),
        convergence_time_spacing: ct(&m.spacing_error),
        min_pair_distance: m.min_distance_overall(),
        max_spacing_sum_error: m
            .spacing_sum_error
            .iter()
            .fold(0.0, |a: f64, x| a.max(x.abs())),
        converged: r < REPORT_TOL && q < REPORT_TOL && s < REPORT_TOL,
        equilibrium_case: label.case.as_str().to_string(),
        equilibrium_residual: label.residual,
    })
}

pub fn report_to_json(report: &RunReport) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

pub fn report_from_json(text: &str) -> CliResult<RunReport> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use encircle_core::sim::{integrate, SimConfig};

    fn short_run() -> (SimConfig, Trajectory) {
        let spec = FormationSpec::equal_spacing(vec![0.6, 1.5, 0.6, 1.5], 1.0);
        let mut cfg = SimConfig::new(spec, TargetModel::default_moving());
        cfg.t_end = 0.5;
        cfg.dt = 0.01;
        cfg.seed = 4;
        let traj = integrate(&cfg).unwrap();
        (cfg, traj)
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, -1.0 / 3.0, std::f64::consts::TAU, 1e-300, -0.0, 12345.678] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
            let digits = s
                .split('e')
                .next()
                .unwrap()
                .chars()
                .filter(char::is_ascii_digit)
                .count();
            assert_eq!(digits, 17);
        }
    }

    #[test]
    fn csv_schema() {
        let (_, traj) = short_run();
        let mut buf = Vec::new();
        write_trajectory_csv(&traj, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first = text.lines().next().unwrap();
        assert!(first.starts_with("t,x1,y1,vx1,vy1,rho1,alpha1,x2,"));
        assert!(first.ends_with(",alpha4,x0,y0"));
        for line in text.lines() {
            assert_eq!(line.split(',').count(), 1 + 6 * 4 + 2);
        }
        assert_eq!(text.lines().count(), traj.samples.len() + 1);
    }

    #[test]
    fn report_regenerates_from_csv() {
        let (cfg, traj) = short_run();
        let report = build_report(&traj, &cfg.spec, &cfg.params).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&traj, &mut buf).unwrap();
        let back =
            read_trajectory_csv(&buf[..], cfg.dt, &cfg.spec, &cfg.params, &cfg.target).unwrap();
        for (a, b) in traj.samples.iter().zip(&back.samples) {
            assert_eq!(a.t.to_bits(), b.t.to_bits());
            assert_eq!(a.agents, b.agents, "t={}", a.t);
            assert_eq!(a.target, b.target, "t={}", a.t);
            assert_eq!(a.derived, b.derived, "t={}", a.t);
        }
        let again = build_report(&back, &cfg.spec, &cfg.params).unwrap();
        assert_eq!(report, again);
        let json = report_to_json(&report).unwrap();
        assert_eq!(report_from_json(&json).unwrap(), report);
    }

    #[test]
    fn rejects_wrong_header() {
        let (cfg, _) = short_run();
        let text = "t,x1\n0,1\n";
        assert!(
            read_trajectory_csv(text.as_bytes(), 0.01, &cfg.spec, &cfg.params, &cfg.target)
                .is_err()
        );
    }

    #[test]
    fn metrics_csv_columns() {
        let (cfg, traj) = short_run();
        let m = metrics(&traj, &cfg.spec);
        let mut buf = Vec::new();
        write_metrics_csv(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cols = text.lines().next().unwrap().split(',').count();
        assert_eq!(cols, 1 + 3 * 4 + 2);
    }
}
