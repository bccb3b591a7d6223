//! The distributed limit-cycle controller.
//!
//! Each agent applies
//!
//! ```text
//! u = [E  -Γ] p̄ + [-1 -1] v̄ + a0,      E = -μ(ρ - R)ρ^σ - Ω(Ω - 1),
//!     [Γ   E]     [ 1 -1]               Γ = Ω + f,
//! ```
//!
//! where `f` is the layout term coupling the agent to its two ring neighbours
//! through the angular spacings `α̂`. Only relative quantities enter, so the law
//! is rotation- and translation-equivariant and can be evaluated in the agent's
//! own Frenet–Serret frame.

use crate::formation::FormationSpec;
use crate::geometry::{rotate_into_frame, Angle, Vec2};
use crate::math;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControllerParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub mu: f64,
    pub sigma: f64,
    /// Lower clamp on `ρ` inside `ρ^σ` and `1/ρ²`.
    pub eps_rho: f64,
}

impl Default for ControllerParams {
    fn default() -> Self {
        ControllerParams {
            lambda1: 1.0,
            lambda2: 1.0,
            mu: 1.0,
            sigma: -1.0,
            eps_rho: 1e-9,
        }
    }
}

impl ControllerParams {
    /// Checks the gain signs and, given a formation, that `eps_rho ≤ min R / 100`.
    pub fn validate(&self, spec: Option<&FormationSpec>) -> Result<()> {
        let all = [
            self.lambda1,
            self.lambda2,
            self.mu,
            self.sigma,
            self.eps_rho,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("controller parameter"));
        }
        let positive = |name, x: f64| {
            if x > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: "must be > 0",
                })
            }
        };
        positive("lambda1", self.lambda1)?;
        positive("lambda2", self.lambda2)?;
        positive("mu", self.mu)?;
        positive("eps_rho", self.eps_rho)?;
        if let Some(spec) = spec {
            let min_r = spec.radii.iter().copied().fold(f64::INFINITY, f64::min);
            if self.eps_rho > min_r / 100.0 {
                return Err(Error::InvalidParameter {
                    name: "eps_rho",
                    reason: "must not exceed min R / 100",
                });
            }
        }
        Ok(())
    }
}

/// What agent `i` senses: its state relative to the target, the target's
/// acceleration, and the angular spacings shared with its two neighbours.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeObservation {
    pub p_rel: Vec2,
    pub v_rel: Vec2,
    pub a0: Vec2,
    /// Spacing from this agent to the one ahead.
    pub alpha_hat_plus: Angle,
    /// Spacing from the agent behind to this one.
    pub alpha_hat_minus: Angle,
    pub alpha_hat_plus_rate: f64,
    pub alpha_hat_minus_rate: f64,
    /// Desired spacing to the agent ahead.
    pub d_i: f64,
    /// Desired spacing from the agent behind.
    pub d_minus: f64,
}

impl RelativeObservation {
    /// The same observation with every vector expressed in a frame rotated by `frame`.
    pub fn in_frame(&self, frame: Angle) -> RelativeObservation {
        RelativeObservation {
            p_rel: rotate_into_frame(self.p_rel, frame),
            v_rel: rotate_into_frame(self.v_rel, frame),
            a0: rotate_into_frame(self.a0, frame),
            ..*self
        }
    }
}

/// Counterclockwise angle from bearing `alpha_i` to bearing `alpha_next`.
pub fn angular_distance(alpha_i: Angle, alpha_next: Angle) -> Angle {
    Angle::wrap_unchecked(alpha_next.radians() - alpha_i.radians())
}

/// Bearing rate `(x̄ v̄ʸ − ȳ v̄ˣ) / ρ²`, with `ρ` clamped below by `eps_rho`.
pub fn alpha_rate(p_rel: Vec2, v_rel: Vec2, eps_rho: f64) -> f64 {
    let rho = p_rel.norm().max(eps_rho);
    p_rel.cross(v_rel) / (rho * rho)
}

/// Radial gain `E`.
pub fn gain_e(rho: f64, radius: f64, omega: f64, params: &ControllerParams) -> f64 {
    let rho_c = rho.max(params.eps_rho);
    -params.mu * (rho_c - radius) * math::powf(rho_c, params.sigma) - omega * (omega - 1.0)
}

/// Layout term `f` driving the spacings towards `d`.
pub fn layout_f(obs: &RelativeObservation, params: &ControllerParams) -> f64 {
    let total = obs.d_i + obs.d_minus;
    let ahead =
        params.lambda1 * obs.alpha_hat_plus.radians() + params.lambda2 * obs.alpha_hat_plus_rate;
    let behind =
        params.lambda1 * obs.alpha_hat_minus.radians() + params.lambda2 * obs.alpha_hat_minus_rate;
    (obs.d_minus / total) * ahead - (obs.d_i / total) * behind
}

/// Controller output together with the gains that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlOutput {
    pub e: f64,
    pub gamma: f64,
    pub u: Vec2,
}

pub fn evaluate(
    obs: &RelativeObservation,
    radius: f64,
    omega: f64,
    params: &ControllerParams,
) -> ControlOutput {
    let e = gain_e(obs.p_rel.norm(), radius, omega, params);
    let gamma = omega + layout_f(obs, params);
    let (p, v, a) = (obs.p_rel, obs.v_rel, obs.a0);
    let u = Vec2::new(
        e * p.x - gamma * p.y - v.x - v.y + a.x,
        gamma * p.x + e * p.y + v.x - v.y + a.y,
    );
    ControlOutput { e, gamma, u }
}

/// Control input in world coordinates.
pub fn control_input(
    obs: &RelativeObservation,
    radius: f64,
    omega: f64,
    params: &ControllerParams,
) -> Vec2 {
    evaluate(obs, radius, omega, params).u
}

/// Control input computed from an observation already expressed in the agent's
/// own frame; the result is in that frame too.
///
/// Written as `E p̄ + Γ J p̄ + (J − I) v̄ + a0` with `J` the quarter turn. Every
/// operator here commutes with rotations, which is why no global heading is needed.
pub fn control_input_local(
    obs_local: &RelativeObservation,
    radius: f64,
    omega: f64,
    params: &ControllerParams,
) -> Vec2 {
    let e = gain_e(obs_local.p_rel.norm(), radius, omega, params);
    let gamma = omega + layout_f(obs_local, params);
    let p = obs_local.p_rel;
    let v = obs_local.v_rel;
    p * e + p.perp() * gamma + (v.perp() - v) + obs_local.a0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::to_polar;
    use crate::math::{FRAC_PI_2, PI, TAU};
    use crate::stability::polar_residual;
    use crate::stability::PolarState;
    use proptest::prelude::*;

    fn params() -> ControllerParams {
        ControllerParams::default()
    }

    fn at_rest_obs(p: Vec2, v: Vec2, d: f64) -> RelativeObservation {
        RelativeObservation {
            p_rel: p,
            v_rel: v,
            a0: Vec2::ZERO,
            alpha_hat_plus: Angle::wrap(d).unwrap(),
            alpha_hat_minus: Angle::wrap(d).unwrap(),
            alpha_hat_plus_rate: 0.0,
            alpha_hat_minus_rate: 0.0,
            d_i: d,
            d_minus: d,
        }
    }

    #[test]
    fn angular_distance_examples() {
        let a = |x: f64| Angle::wrap(x).unwrap();
        assert!((angular_distance(a(0.0), a(FRAC_PI_2)).radians() - FRAC_PI_2).abs() < 1e-15);
        let wrapped = angular_distance(a(1.5 * PI), a(PI / 4.0)).radians();
        assert!((wrapped - 0.75 * PI).abs() < 1e-12);
        assert_eq!(angular_distance(a(2.3), a(2.3)).radians(), 0.0);
    }

    #[test]
    fn alpha_rate_examples() {
        assert_eq!(
            alpha_rate(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), 1e-9),
            1.0
        );
        // (2·1 − 0·0) / 2² = 0.5
        assert_eq!(
            alpha_rate(Vec2::new(2.0, 0.0), Vec2::new(0.0, 1.0), 1e-9),
            0.5
        );
        assert_eq!(
            alpha_rate(Vec2::new(1.0, 0.0), Vec2::new(5.0, 0.0), 1e-9),
            0.0
        );
    }

    #[test]
    fn alpha_rate_matches_polar_form() {
        let (p, v) = (Vec2::new(0.3, -1.7), Vec2::new(2.2, 0.4));
        let pc = to_polar(p, v);
        let polar = pc.vbar / pc.rho * pc.beta.radians().sin();
        assert!((alpha_rate(p, v, 1e-9) - polar).abs() < 1e-14);
    }

    #[test]
    fn alpha_rate_guarded_at_origin() {
        assert_eq!(alpha_rate(Vec2::ZERO, Vec2::new(1.0, 1.0), 1e-9), 0.0);
        assert!(alpha_rate(Vec2::new(1e-12, 0.0), Vec2::new(0.0, 1.0), 1e-9).is_finite());
    }

    #[test]
    fn gain_e_examples() {
        let p = params();
        assert_eq!(gain_e(1.0, 1.0, 0.0, &p), 0.0);
        for omega in [-2.0, -0.2, 0.0, 0.7, 3.0] {
            assert_eq!(gain_e(1.5, 1.5, omega, &p), -omega * (omega - 1.0));
        }
        // −1·(2 − 1)·2^(−1) − 1·0 = −0.5
        assert_eq!(gain_e(2.0, 1.0, 1.0, &p), -0.5);
    }

    #[test]
    fn gain_e_finite_at_origin() {
        assert!(gain_e(0.0, 1.0, 1.0, &params()).is_finite());
    }

    #[test]
    fn layout_vanishes_at_desired_spacing() {
        let p = params();
        let mut obs = at_rest_obs(Vec2::new(1.0, 0.0), Vec2::ZERO, 1.0);
        assert_eq!(layout_f(&obs, &p), 0.0);
        obs.d_i = 0.4;
        obs.d_minus = 2.1;
        obs.alpha_hat_plus = Angle::wrap(0.4).unwrap();
        obs.alpha_hat_minus = Angle::wrap(2.1).unwrap();
        assert!(layout_f(&obs, &p).abs() < 1e-15);
    }

    #[test]
    fn layout_direct_evaluation() {
        let mut obs = at_rest_obs(Vec2::new(1.0, 0.0), Vec2::ZERO, PI);
        obs.alpha_hat_plus = Angle::wrap(PI + 0.2).unwrap();
        obs.alpha_hat_minus = Angle::wrap(PI - 0.2).unwrap();
        // ½(π + 0.2) − ½(π − 0.2) = 0.2
        assert!((layout_f(&obs, &params()) - 0.2).abs() < 1e-14);
    }

    #[test]
    fn circular_equilibrium_input_is_centripetal() {
        let p = params();
        for &(omega, r) in &[(1.0, 0.6), (0.5, 1.5), (2.0, 1.0)] {
            let obs = at_rest_obs(Vec2::new(r, 0.0), Vec2::new(0.0, omega * r), TAU / 6.0);
            let out = evaluate(&obs, r, omega, &p);
            assert_eq!(out.e, -omega * (omega - 1.0));
            assert_eq!(out.gamma, omega);
            assert!((out.u - Vec2::new(-omega * omega * r, 0.0)).norm() < 1e-14);
            let pc = to_polar(obs.p_rel, obs.v_rel);
            let state = PolarState {
                rho: pc.rho,
                vbar: pc.vbar,
                beta: pc.beta,
                alpha: pc.alpha,
            };
            let res = polar_residual(&state, out.gamma, out.e);
            assert!(res.drho.abs() < 1e-14 && res.dvbar.abs() < 1e-14);
            assert!(res.dbeta.unwrap().abs() < 1e-14);
            assert!((res.dalpha.unwrap() - omega).abs() < 1e-14);
        }
    }

    #[test]
    fn resting_equilibrium_input_is_zero() {
        let obs = at_rest_obs(Vec2::new(1.3, 0.0), Vec2::ZERO, TAU / 5.0);
        assert_eq!(control_input(&obs, 1.3, 0.0, &params()), Vec2::ZERO);
    }

    #[test]
    fn feedforward_is_additive() {
        let mut obs = at_rest_obs(Vec2::new(0.4, 1.1), Vec2::new(-0.3, 0.8), 1.0);
        obs.alpha_hat_plus_rate = 0.3;
        let base = control_input(&obs, 1.0, 0.4, &params());
        obs.a0 = Vec2::new(7.0, -3.0);
        let fed = control_input(&obs, 1.0, 0.4, &params());
        assert_eq!(fed - base, Vec2::new(7.0, -3.0));
    }

    #[test]
    fn local_frame_identity_and_equilibrium() {
        let p = params();
        let obs = at_rest_obs(Vec2::new(0.2, -1.4), Vec2::new(0.5, 0.1), 1.2);
        let g = control_input(&obs, 1.0, 0.3, &p);
        let l = control_input_local(&obs.in_frame(Angle::ZERO), 1.0, 0.3, &p);
        assert!((g - l).norm() < 1e-14);

        let (omega, r, a) = (1.0, 1.5, 2.0);
        let p_rel = Vec2::from_angle(a) * r;
        let v_rel = Vec2::from_angle(a + FRAC_PI_2) * (omega * r);
        let obs = at_rest_obs(p_rel, v_rel, TAU / 6.0);
        let frame = p_rel.angle();
        let local = control_input_local(&obs.in_frame(frame), r, omega, &p);
        assert!((local - Vec2::new(-omega * omega * r, 0.0)).norm() < 1e-12);
    }

    fn arb_obs() -> impl Strategy<Value = RelativeObservation> {
        (
            (
                -10.0f64..10.0,
                -10.0f64..10.0,
                -10.0f64..10.0,
                -10.0f64..10.0,
                -5.0f64..5.0,
                -5.0f64..5.0,
            ),
            (
                0.0f64..TAU,
                0.0f64..TAU,
                -3.0f64..3.0,
                -3.0f64..3.0,
                0.05f64..3.0,
                0.05f64..3.0,
            ),
        )
            .prop_map(|((px, py, vx, vy, ax, ay), (ap, am, rp, rm, di, dm))| {
                RelativeObservation {
                    p_rel: Vec2::new(px, py),
                    v_rel: Vec2::new(vx, vy),
                    a0: Vec2::new(ax, ay),
                    alpha_hat_plus: Angle::wrap(ap).unwrap(),
                    alpha_hat_minus: Angle::wrap(am).unwrap(),
                    alpha_hat_plus_rate: rp,
                    alpha_hat_minus_rate: rm,
                    d_i: di,
                    d_minus: dm,
                }
            })
    }

    proptest! {
        #[test]
        fn rotational_equivariance(obs in arb_obs(), frame in 0.0f64..TAU, r in 0.1f64..3.0, omega in -2.0f64..2.0) {
            let p = params();
            let frame = Angle::wrap(frame).unwrap();
            let rotated_global = rotate_into_frame(control_input(&obs, r, omega, &p), frame);
            let local = control_input_local(&obs.in_frame(frame), r, omega, &p);
            let scale = rotated_global.norm().max(1.0);
            prop_assert!((rotated_global - local).norm() <= 1e-12 * scale);
        }
    }
}
