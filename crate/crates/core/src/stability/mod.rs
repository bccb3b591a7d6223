//! Polar closed-loop residuals, the equilibrium catalog, and the single-agent
//! local stability analysis (characteristic polynomials and Routh arrays).

mod routh;

pub use routh::{routh_sign_changes, RouthTable};

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::controller::ControllerParams;
use crate::formation::{FormationSpec, RingTopology};
use crate::geometry::{circular_distance, to_polar, Angle, Vec2};
use crate::linalg::Matrix;
use crate::math::{self, FRAC_PI_2, PI};
use crate::sim::{closed_loop_derivative, AgentState};
use crate::target::TargetState;
use crate::{Error, Result};

/// Polar state of one agent relative to the target.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PolarState {
    pub rho: f64,
    pub vbar: f64,
    pub beta: Angle,
    pub alpha: Angle,
}

impl PolarState {
    pub fn from_cartesian(p_rel: Vec2, v_rel: Vec2) -> Self {
        let pc = to_polar(p_rel, v_rel);
        PolarState {
            rho: pc.rho,
            vbar: pc.vbar,
            beta: pc.beta,
            alpha: pc.alpha,
        }
    }
}

/// Right-hand side of the polar closed loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarRates {
    pub drho: f64,
    pub dvbar: f64,
    /// `None` where the heading is undefined (`v̄ = 0` or `ρ = 0`).
    pub dbeta: Option<f64>,
    /// `None` at `ρ = 0`.
    pub dalpha: Option<f64>,
}

pub fn polar_residual(state: &PolarState, gamma: f64, e: f64) -> PolarRates {
    let (rho, vbar) = (state.rho, state.vbar);
    let (sb, cb) = (
        math::sin(state.beta.radians()),
        math::cos(state.beta.radians()),
    );
    let drho = vbar * cb;
    let dvbar = rho * (e * cb + gamma * sb) - vbar;
    let dbeta = if vbar > 0.0 && rho > 0.0 {
        Some(1.0 - (rho / vbar) * (e * sb - gamma * cb) - (vbar / rho) * sb)
    } else {
        None
    };
    let dalpha = if rho > 0.0 {
        Some(vbar / rho * sb)
    } else {
        None
    };
    PolarRates {
        drho,
        dvbar,
        dbeta,
        dalpha,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EquilibriumCase {
    /// Every agent circles at `R_i` with `α̇ = Ω ≠ 0` and `α̂ = d`.
    Ia,
    /// `Ω = 0`: every agent rests at `R_i` with `α̂ = d`.
    Ib,
    /// Every agent sits on the target.
    II,
    /// `Ω ≠ 0`: one agent on the target, the rest at rest on their circles.
    IIIb11,
    /// `Ω = 0`: one agent on the target, the rest at rest on their circles, `α̂ = d`.
    IIIb10,
    /// Several agents on the target, the rest at rest on their circles.
    IIIb2,
    None,
}

impl EquilibriumCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            EquilibriumCase::Ia => "Ia",
            EquilibriumCase::Ib => "Ib",
            EquilibriumCase::II => "II",
            EquilibriumCase::IIIb11 => "IIIb11",
            EquilibriumCase::IIIb10 => "IIIb10",
            EquilibriumCase::IIIb2 => "IIIb2",
            EquilibriumCase::None => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumLabel {
    pub case: EquilibriumCase,
    /// Agents off the target and moving.
    pub v1a: Vec<usize>,
    /// Agents off the target and at rest.
    pub v1b: Vec<usize>,
    /// Agents on the target.
    pub v2: Vec<usize>,
    /// Largest deviation from the matched (or, for `None`, the desired) case.
    pub residual: f64,
}

/// Default tolerance for [`classify_equilibrium`].
pub const CLASSIFY_TOL: f64 = 1e-6;

/// Matches a joint polar state against the equilibrium catalog.
///
/// For the one-or-more-on-target cases with `Ω ≠ 0` (and for several agents on
/// target with any `Ω`) the spacings settle at values fixed by the initial
/// state, so only stationarity of the resting agents is checked there.
pub fn classify_equilibrium(
    states: &[PolarState],
    spec: &FormationSpec,
    _params: &ControllerParams,
    tol: f64,
) -> Result<EquilibriumLabel> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: "must be > 0",
        });
    }
    let n = states.len();
    if spec.len() != n {
        return Err(Error::Dimension {
            expected: spec.len(),
            got: n,
        });
    }
    let ring = RingTopology::new(n)?;
    let (mut v1a, mut v1b, mut v2) = (Vec::new(), Vec::new(), Vec::new());
    for (i, s) in states.iter().enumerate() {
        if math::sqrt(s.rho * s.rho + s.vbar * s.vbar) < tol {
            v2.push(i);
        } else if s.vbar > tol {
            v1a.push(i);
        } else {
            v1b.push(i);
        }
    }
    // agents on the target take bearing 0
    let bearing = |i: usize| {
        if v2.contains(&i) {
            0.0
        } else {
            states[i].alpha.radians()
        }
    };
    let spacing_dev = (0..n)
        .map(|i| {
            let a_hat = Angle::wrap_unchecked(bearing(ring.next(i)) - bearing(i));
            circular_distance(a_hat.radians(), spec.d[i])
        })
        .fold(0.0, f64::max);
    let radius_dev = |idx: &[usize]| {
        idx.iter()
            .map(|&i| (states[i].rho - spec.radii[i]).abs())
            .fold(0.0, f64::max)
    };
    let omega = spec.omega;

    let circling_dev = {
        let target_beta = if omega > 0.0 { FRAC_PI_2 } else { 1.5 * PI };
        (0..n)
            .map(|i| {
                let s = &states[i];
                let speed = (s.vbar - (omega * spec.radii[i]).abs()).abs();
                let heading = circular_distance(s.beta.radians(), target_beta);
                (s.rho - spec.radii[i]).abs().max(speed).max(heading)
            })
            .fold(0.0, f64::max)
            .max(spacing_dev)
    };
    let resting_dev = {
        let speed = states.iter().map(|s| s.vbar).fold(0.0, f64::max);
        radius_dev(&(0..n).collect::<Vec<_>>())
            .max(speed)
            .max(spacing_dev)
    };

    let (case, residual) = if v2.len() == n {
        let dev = states
            .iter()
            .map(|s| math::sqrt(s.rho * s.rho + s.vbar * s.vbar))
            .fold(0.0, f64::max);
        (EquilibriumCase::II, dev)
    } else if v2.is_empty() {
        if omega != 0.0 {
            if v1b.is_empty() && circling_dev < tol {
                (EquilibriumCase::Ia, circling_dev)
            } else {
                (EquilibriumCase::None, circling_dev)
            }
        } else if v1a.is_empty() && resting_dev < tol {
            (EquilibriumCase::Ib, resting_dev)
        } else {
            (EquilibriumCase::None, resting_dev)
        }
    } else {
        let on_circles = radius_dev(&v1b);
        let ok = v1a.is_empty() && on_circles < tol;
        if !ok {
            let moving = v1a.iter().map(|&i| states[i].vbar).fold(0.0, f64::max);
            (EquilibriumCase::None, on_circles.max(moving))
        } else if v2.len() > 1 {
            (EquilibriumCase::IIIb2, on_circles)
        } else if omega != 0.0 {
            (EquilibriumCase::IIIb11, on_circles)
        } else if spacing_dev < tol {
            (EquilibriumCase::IIIb10, on_circles.max(spacing_dev))
        } else {
            (EquilibriumCase::None, on_circles.max(spacing_dev))
        }
    };
    Ok(EquilibriumLabel {
        case,
        v1a,
        v1b,
        v2,
        residual,
    })
}

/// Characteristic polynomial of the single-agent polar Jacobian at the circling
/// equilibrium: `λ³ + 2λ² + [(2Ω−1)² + 1 + μR^(σ+1)]λ + μR^(σ+1)`.
pub fn single_agent_charpoly_ia(omega: f64, mu: f64, radius: f64, sigma: f64) -> Result<[f64; 4]> {
    if omega == 0.0 {
        return Err(Error::Precondition(
            "circling equilibrium needs a nonzero angular velocity",
        ));
    }
    check_mu_r(mu, radius)?;
    let k = mu * math::powf(radius, sigma + 1.0);
    let w = 2.0 * omega - 1.0;
    Ok([1.0, 2.0, w * w + 1.0 + k, k])
}

/// The resting-equilibrium characteristic polynomial in factored form
/// `(λ + 1)(λ² + λ + μR^(σ+1) cos²β)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RestingCharpoly {
    pub gain: f64,
    pub coefficients: [f64; 4],
    pub roots: [Complex64; 3],
}

pub fn single_agent_charpoly_ib(
    mu: f64,
    radius: f64,
    sigma: f64,
    beta: Angle,
) -> Result<RestingCharpoly> {
    check_mu_r(mu, radius)?;
    let c = math::cos(beta.radians());
    let k = mu * math::powf(radius, sigma + 1.0) * c * c;
    // λ² + λ + k = 0
    let disc = 1.0 - 4.0 * k;
    let (r1, r2) = if disc >= 0.0 {
        let s = math::sqrt(disc);
        (
            Complex64::new((-1.0 + s) / 2.0, 0.0),
            Complex64::new((-1.0 - s) / 2.0, 0.0),
        )
    } else {
        let s = math::sqrt(-disc);
        (
            Complex64::new(-0.5, s / 2.0),
            Complex64::new(-0.5, -s / 2.0),
        )
    };
    Ok(RestingCharpoly {
        gain: k,
        coefficients: [1.0, 2.0, 1.0 + k, k],
        roots: [Complex64::new(-1.0, 0.0), r1, r2],
    })
}

/// Characteristic polynomial of the Cartesian single-agent loop linearized at
/// the target (σ = 0): `[λ(λ+1) − μR + Ω(Ω−1)]² + (λ+Ω)²`, expanded.
pub fn origin_charpoly(omega: f64, mu: f64, radius: f64) -> Result<[f64; 5]> {
    check_mu_r(mu, radius)?;
    let mr = mu * radius;
    let c = omega * (omega - 1.0) - mr;
    Ok([
        1.0,
        2.0,
        2.0 * (omega * omega - omega - mr + 1.0),
        2.0 * (omega * omega - mr),
        c * c + omega * omega,
    ])
}

fn check_mu_r(mu: f64, radius: f64) -> Result<()> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter {
            name: "mu",
            reason: "must be > 0",
        });
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter {
            name: "R",
            reason: "must be > 0",
        });
    }
    Ok(())
}

/// Single-agent polar vector field `(ρ̇, v̄̇, β̇)` with `Γ = Ω`.
pub fn single_agent_polar_field(
    x: [f64; 3],
    omega: f64,
    mu: f64,
    radius: f64,
    sigma: f64,
) -> [f64; 3] {
    let [rho, vbar, beta] = x;
    let e = -mu * (rho - radius) * math::powf(rho, sigma) - omega * (omega - 1.0);
    let (sb, cb) = (math::sin(beta), math::cos(beta));
    [
        vbar * cb,
        rho * (e * cb + omega * sb) - vbar,
        1.0 - (rho / vbar) * (e * sb - omega * cb) - (vbar / rho) * sb,
    ]
}

/// Central-difference Jacobian of a vector field on ℝ³.
pub fn numerical_jacobian(f: impl Fn([f64; 3]) -> [f64; 3], x: [f64; 3], h: f64) -> Matrix {
    let mut j = Matrix::zeros(3, 3);
    for c in 0..3 {
        let (mut xp, mut xm) = (x, x);
        xp[c] += h;
        xm[c] -= h;
        let (fp, fm) = (f(xp), f(xm));
        for r in 0..3 {
            j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    j
}

/// `det(λI − A)` coefficients of a 3×3 matrix, highest degree first.
pub fn charpoly3(a: &Matrix) -> [f64; 4] {
    let tr = a[(0, 0)] + a[(1, 1)] + a[(2, 2)];
    let minors = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)] + a[(0, 0)] * a[(2, 2)]
        - a[(0, 2)] * a[(2, 0)]
        + a[(1, 1)] * a[(2, 2)]
        - a[(1, 2)] * a[(2, 1)];
    let det = a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
        - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
        + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)]);
    [1.0, -tr, minors, -det]
}

/// How far each agent is from uniform rotation at its desired radius, judged
/// from the Cartesian closed-loop derivative.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RotationResidual {
    pub radius: f64,
    pub radial_rate: f64,
    pub radial_accel: f64,
    pub bearing_rate: f64,
    pub bearing_accel: f64,
    pub spacing: f64,
}

impl RotationResidual {
    pub fn max(&self) -> f64 {
        [
            self.radius,
            self.radial_rate,
            self.radial_accel,
            self.bearing_rate,
            self.bearing_accel,
            self.spacing,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn rotation_residual(
    states: &[AgentState],
    target: &TargetState,
    spec: &FormationSpec,
    params: &ControllerParams,
) -> Result<Vec<RotationResidual>> {
    let deriv = closed_loop_derivative(states, target, spec, params)?;
    let ring = RingTopology::new(states.len())?;
    let bearings: Vec<f64> = states
        .iter()
        .map(|s| (s.p - target.p0).angle().radians())
        .collect();
    Ok(states
        .iter()
        .zip(&deriv)
        .enumerate()
        .map(|(i, (s, k))| {
            let p = s.p - target.p0;
            let v = s.v - target.v0;
            let a = k.dv - target.a0;
            let rho = p.norm().max(params.eps_rho);
            let pv = p.dot(v);
            let cross = p.cross(v);
            let rho2 = rho * rho;
            let spacing = Angle::wrap_unchecked(bearings[ring.next(i)] - bearings[i]);
            RotationResidual {
                radius: (p.norm() - spec.radii[i]).abs(),
                radial_rate: (pv / rho).abs(),
                radial_accel: ((v.dot(v) + p.dot(a)) / rho - pv * pv / (rho2 * rho)).abs(),
                bearing_rate: (cross / rho2 - spec.omega).abs(),
                bearing_accel: (p.cross(a) / rho2 - 2.0 * cross * pv / (rho2 * rho2)).abs(),
                spacing: circular_distance(spacing.radians(), spec.d[i]),
            }
        })
        .collect())
}
