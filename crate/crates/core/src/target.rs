//! Closed-form target trajectories.

use crate::geometry::Vec2;
use crate::math;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TargetState {
    pub p0: Vec2,
    pub v0: Vec2,
    pub a0: Vec2,
}

/// A target whose position, velocity and acceleration are known analytically
/// at any time, so `v0 = ṗ0` and `a0 = v̇0` hold exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TargetModel {
    Static {
        p0: Vec2,
    },
    ConstantVelocity {
        p0: Vec2,
        v0: Vec2,
    },
    /// Uniform circular motion about `center`.
    Circular {
        center: Vec2,
        radius: f64,
        rate: f64,
        phase: f64,
    },
    /// Drifting with `drift` while oscillating as `amplitude ⊙ sin(2π·frequency·t)`.
    Sinusoidal {
        p0: Vec2,
        drift: Vec2,
        amplitude: Vec2,
        frequency: f64,
    },
}

impl Default for TargetModel {
    fn default() -> Self {
        TargetModel::Static { p0: Vec2::ZERO }
    }
}

impl TargetModel {
    /// Constant-velocity target used for the moving-target examples.
    pub fn default_moving() -> Self {
        TargetModel::ConstantVelocity {
            p0: Vec2::ZERO,
            v0: Vec2::new(0.05, 0.03),
        }
    }

    pub fn state_at(&self, t: f64) -> TargetState {
        match *self {
            TargetModel::Static { p0 } => TargetState {
                p0,
                v0: Vec2::ZERO,
                a0: Vec2::ZERO,
            },
            TargetModel::ConstantVelocity { p0, v0 } => TargetState {
                p0: p0 + v0 * t,
                v0,
                a0: Vec2::ZERO,
            },
            TargetModel::Circular {
                center,
                radius,
                rate,
                phase,
            } => {
                let th = phase + rate * t;
                let (s, c) = (math::sin(th), math::cos(th));
                TargetState {
                    p0: center + Vec2::new(c, s) * radius,
                    v0: Vec2::new(-s, c) * (radius * rate),
                    a0: Vec2::new(c, s) * (-radius * rate * rate),
                }
            }
            TargetModel::Sinusoidal {
                p0,
                drift,
                amplitude,
                frequency,
            } => {
                let w = math::TAU * frequency;
                let (s, c) = (math::sin(w * t), math::cos(w * t));
                TargetState {
                    p0: p0 + drift * t + Vec2::new(amplitude.x * s, amplitude.y * s),
                    v0: drift + Vec2::new(amplitude.x * w * c, amplitude.y * w * c),
                    a0: Vec2::new(-amplitude.x * w * w * s, -amplitude.y * w * w * s),
                }
            }
        }
    }

    /// The same motion shifted by a constant offset.
    pub fn translated(&self, offset: Vec2) -> Self {
        match *self {
            TargetModel::Static { p0 } => TargetModel::Static { p0: p0 + offset },
            TargetModel::ConstantVelocity { p0, v0 } => TargetModel::ConstantVelocity {
                p0: p0 + offset,
                v0,
            },
            TargetModel::Circular {
                center,
                radius,
                rate,
                phase,
            } => TargetModel::Circular {
                center: center + offset,
                radius,
                rate,
                phase,
            },
            TargetModel::Sinusoidal {
                p0,
                drift,
                amplitude,
                frequency,
            } => TargetModel::Sinusoidal {
                p0: p0 + offset,
                drift,
                amplitude,
                frequency,
            },
        }
    }

    pub fn is_finite(&self) -> bool {
        match *self {
            TargetModel::Static { p0 } => p0.is_finite(),
            TargetModel::ConstantVelocity { p0, v0 } => p0.is_finite() && v0.is_finite(),
            TargetModel::Circular {
                center,
                radius,
                rate,
                phase,
            } => center.is_finite() && radius.is_finite() && rate.is_finite() && phase.is_finite(),
            TargetModel::Sinusoidal {
                p0,
                drift,
                amplitude,
                frequency,
            } => {
                p0.is_finite()
                    && drift.is_finite()
                    && amplitude.is_finite()
                    && frequency.is_finite()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn models() -> [TargetModel; 4] {
        [
            TargetModel::Static {
                p0: Vec2::new(1.0, 2.0),
            },
            TargetModel::default_moving(),
            TargetModel::Circular {
                center: Vec2::new(-1.0, 0.5),
                radius: 2.0,
                rate: 0.3,
                phase: 0.1,
            },
            TargetModel::Sinusoidal {
                p0: Vec2::ZERO,
                drift: Vec2::new(0.1, 0.0),
                amplitude: Vec2::new(0.0, 0.5),
                frequency: 0.05,
            },
        ]
    }

    // central differences of the closed form as the oracle
    #[test]
    fn derivatives_are_consistent() {
        let h = 1e-5;
        for m in models() {
            for &t in &[0.0, 1.3, 17.0] {
                let (a, b, c) = (m.state_at(t - h), m.state_at(t), m.state_at(t + h));
                let v_fd = (c.p0 - a.p0) * (0.5 / h);
                let a_fd = (c.v0 - a.v0) * (0.5 / h);
                assert!((v_fd - b.v0).norm() < 1e-8, "{m:?} velocity at {t}");
                assert!((a_fd - b.a0).norm() < 1e-8, "{m:?} acceleration at {t}");
            }
        }
    }

    #[test]
    fn translation_shifts_position_only() {
        let off = Vec2::new(3.0, -4.0);
        for m in models() {
            let (a, b) = (m.state_at(2.5), m.translated(off).state_at(2.5));
            assert!((b.p0 - a.p0 - off).norm() < 1e-12);
            assert_eq!(a.v0, b.v0);
            assert_eq!(a.a0, b.a0);
        }
    }
}
