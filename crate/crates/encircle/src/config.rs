//! TOML run configuration and its conversion to a [`SimConfig`].

use std::fmt;
use std::path::Path;

use encircle_core::controller::ControllerParams;
use encircle_core::formation::FormationSpec;
use encircle_core::math::TAU;
use encircle_core::sim::{AgentState, InitialStates, SimConfig};
use encircle_core::target::TargetModel;
use encircle_core::Vec2;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub formation: FormationSection,
    #[serde(default)]
    pub controller: ControllerSection,
    #[serde(default)]
    pub target: TargetSection,
    #[serde(default)]
    pub sim: SimSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Spacing {
    /// Only `"equal"` is accepted.
    Keyword(String),
    List(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Radii {
    Uniform(f64),
    List(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormationSection {
    /// Needed only when both `d` and `radii` are given in shorthand.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default = "default_spacing")]
    pub d: Spacing,
    pub radii: Radii,
    #[serde(default)]
    pub omega: f64,
}

fn default_spacing() -> Spacing {
    Spacing::Keyword("equal".into())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerSection {
    pub lambda1: f64,
    pub lambda2: f64,
    pub mu: f64,
    pub sigma: f64,
    pub eps_rho: f64,
}

impl Default for ControllerSection {
    fn default() -> Self {
        let p = ControllerParams::default();
        ControllerSection {
            lambda1: p.lambda1,
            lambda2: p.lambda2,
            mu: p.mu,
            sigma: p.sigma,
            eps_rho: p.eps_rho,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSection {
    Static {
        #[serde(default)]
        p0: [f64; 2],
    },
    ConstantVelocity {
        #[serde(default)]
        p0: [f64; 2],
        v0: [f64; 2],
    },
    Circular {
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
        rate: f64,
        #[serde(default)]
        phase: f64,
    },
    Sinusoidal {
        #[serde(default)]
        p0: [f64; 2],
        #[serde(default)]
        drift: [f64; 2],
        amplitude: [f64; 2],
        frequency: f64,
    },
}

impl Default for TargetSection {
    fn default() -> Self {
        TargetSection::Static { p0: [0.0, 0.0] }
    }
}

fn v2(a: [f64; 2]) -> Vec2 {
    Vec2::new(a[0], a[1])
}

impl TargetSection {
    pub fn to_model(self) -> TargetModel {
        match self {
            TargetSection::Static { p0 } => TargetModel::Static { p0: v2(p0) },
            TargetSection::ConstantVelocity { p0, v0 } => TargetModel::ConstantVelocity {
                p0: v2(p0),
                v0: v2(v0),
            },
            TargetSection::Circular {
                center,
                radius,
                rate,
                phase,
            } => TargetModel::Circular {
                center: v2(center),
                radius,
                rate,
                phase,
            },
            TargetSection::Sinusoidal {
                p0,
                drift,
                amplitude,
                frequency,
            } => TargetModel::Sinusoidal {
                p0: v2(p0),
                drift: v2(drift),
                amplitude: v2(amplitude),
                frequency,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    pub sample_every: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub v_max: f64,
    /// Explicit initial positions in label order; replaces the random draw.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<[f64; 2]>>,
    /// Explicit initial velocities; zero when positions are given without them.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub velocities: Option<Vec<[f64; 2]>>,
}

impl Default for SimSection {
    fn default() -> Self {
        SimSection {
            dt: 1e-3,
            t_end: 60.0,
            seed: 0,
            sample_every: 10,
            r_min: 0.5,
            r_max: 2.5,
            v_max: 0.5,
            positions: None,
            velocities: None,
        }
    }
}

/// Command-line overrides applied after parsing.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> CliResult<RunConfig> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("run config always serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.sim.seed = seed;
        }
        if let Some(dt) = o.dt {
            self.sim.dt = dt;
        }
        if let Some(t_end) = o.t_end {
            self.sim.t_end = t_end;
        }
    }

    pub fn spec(&self) -> CliResult<FormationSpec> {
        let f = &self.formation;
        let n = match (&f.d, &f.radii) {
            (Spacing::List(d), _) => d.len(),
            (_, Radii::List(r)) => r.len(),
            _ => f.n.ok_or_else(|| {
                CliError::Config(
                    "formation.n is required when d and radii are both shorthand".into(),
                )
            })?,
        };
        if let Some(explicit) = f.n {
            if explicit != n {
                return Err(CliError::Config(format!(
                    "formation.n = {explicit} but the lists have {n} entries"
                )));
            }
        }
        let d = match &f.d {
            Spacing::Keyword(k) if k == "equal" => vec![TAU / n as f64; n],
            Spacing::Keyword(k) => {
                return Err(CliError::Config(format!(
                    "formation.d: unknown keyword {k:?}"
                )))
            }
            Spacing::List(d) => d.clone(),
        };
        let radii = match &f.radii {
            Radii::Uniform(r) => vec![*r; n],
            Radii::List(r) => r.clone(),
        };
        let spec = FormationSpec {
            d,
            radii,
            omega: f.omega,
        };
        spec.validate()
            .map_err(|report| CliError::Config(format!("inadmissible formation: {report}")))?;
        Ok(spec)
    }

    pub fn params(&self) -> ControllerParams {
        let c = self.controller;
        ControllerParams {
            lambda1: c.lambda1,
            lambda2: c.lambda2,
            mu: c.mu,
            sigma: c.sigma,
            eps_rho: c.eps_rho,
        }
    }

    /// Parses, then validates everything the simulator will rely on.
    pub fn to_sim_config(&self) -> CliResult<SimConfig> {
        let spec = self.spec()?;
        let s = &self.sim;
        let init = match (&s.positions, &s.velocities) {
            (None, None) => InitialStates::RandomAnnulus {
                r_min: s.r_min,
                r_max: s.r_max,
                v_max: s.v_max,
            },
            (Some(p), v) => {
                let zeros = vec![[0.0, 0.0]; p.len()];
                let v = v.as_ref().unwrap_or(&zeros);
                if v.len() != p.len() {
                    return Err(CliError::Config(
                        "sim.velocities must match sim.positions in length".into(),
                    ));
                }
                InitialStates::Explicit(
                    p.iter()
                        .zip(v)
                        .map(|(&p, &v)| AgentState::new(v2(p), v2(v)))
                        .collect(),
                )
            }
            (None, Some(_)) => {
                return Err(CliError::Config(
                    "sim.velocities given without sim.positions".into(),
                ))
            }
        };
        let cfg = SimConfig {
            spec,
            params: self.params(),
            target: self.target.to_model(),
            dt: s.dt,
            t_end: s.t_end,
            seed: s.seed,
            init,
            sample_every: s.sample_every,
        };
        cfg.validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_toml_string())
    }
}
