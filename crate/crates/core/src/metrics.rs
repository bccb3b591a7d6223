//! Formation error series derived from a trajectory.

use alloc::vec::Vec;

use crate::formation::FormationSpec;
use crate::geometry::circular_distance;
use crate::sim::Trajectory;

/// Per-sample error series; the outer index is the sample, the inner the agent.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricSeries {
    pub times: Vec<f64>,
    /// `ρ_i − R_i`.
    pub radius_error: Vec<Vec<f64>>,
    /// `α̇_i − Ω`.
    pub rate_error: Vec<Vec<f64>>,
    /// Circular distance between `α̂_i` and `d_i`.
    pub spacing_error: Vec<Vec<f64>>,
    /// Smallest distance between any two agents.
    pub min_pair_distance: Vec<f64>,
    /// `Σ α̂_i − 2π`.
    pub spacing_sum_error: Vec<f64>,
}

pub fn metrics(traj: &Trajectory, spec: &FormationSpec) -> MetricSeries {
    let mut m = MetricSeries::default();
    for s in &traj.samples {
        m.times.push(s.t);
        m.radius_error.push(
            s.derived
                .iter()
                .zip(&spec.radii)
                .map(|(d, r)| d.rho - r)
                .collect(),
        );
        m.rate_error.push(
            s.derived
                .iter()
                .map(|d| d.alpha_rate - spec.omega)
                .collect(),
        );
        m.spacing_error.push(
            s.derived
                .iter()
                .zip(&spec.d)
                .map(|(d, &di)| circular_distance(d.alpha_hat.radians(), di))
                .collect(),
        );
        let mut min = f64::INFINITY;
        for i in 0..s.agents.len() {
            for j in i + 1..s.agents.len() {
                min = min.min((s.agents[i].p - s.agents[j].p).norm());
            }
        }
        m.min_pair_distance.push(min);
        let sum: f64 = s.derived.iter().map(|d| d.alpha_hat.radians()).sum();
        m.spacing_sum_error.push(sum - crate::math::TAU);
    }
    m
}

impl MetricSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max_i |e_i|` for each sample of a per-agent series.
    pub fn worst(series: &[Vec<f64>]) -> Vec<f64> {
        series
            .iter()
            .map(|row| row.iter().fold(0.0, |acc: f64, x| acc.max(x.abs())))
            .collect()
    }

    pub fn final_max_radius_error(&self) -> f64 {
        Self::final_worst(&self.radius_error)
    }

    pub fn final_max_rate_error(&self) -> f64 {
        Self::final_worst(&self.rate_error)
    }

    pub fn final_max_spacing_error(&self) -> f64 {
        Self::final_worst(&self.spacing_error)
    }

    pub fn min_distance_overall(&self) -> f64 {
        self.min_pair_distance
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    fn final_worst(series: &[Vec<f64>]) -> f64 {
        series.last().map_or(f64::NAN, |row| {
            row.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()))
        })
    }
}

/// First time after which `|value|` stays below `threshold` until the end, if any.
pub fn convergence_time(times: &[f64], values: &[f64], threshold: f64) -> Option<f64> {
    let mut first = None;
    for (t, v) in times.iter().zip(values).rev() {
        if v.abs() < threshold {
            first = Some(*t);
        } else {
            break;
        }
    }
    first
}
