//! Desired formation `(d, R, Ω)`, the undirected ring topology and the initial
//! labeling of agents around the target.
//!
//! Agent indices are zero-based throughout the crate: agent `i` has the ring
//! neighbours `plus(i)` (ahead, counterclockwise) and `minus(i)` (behind).

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Vec2;
use crate::math::TAU;
use crate::{Error, Result};

/// Absolute tolerance on `Σ d_i = 2π`.
pub const SPACING_SUM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RingTopology {
    n: usize,
}

impl RingTopology {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::RingTooSmall(n));
        }
        Ok(RingTopology { n })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    /// Neighbour ahead of `i`; the last agent wraps to the first.
    pub fn plus(&self, i: usize) -> Result<usize> {
        self.check(i)?;
        Ok(if i + 1 == self.n { 0 } else { i + 1 })
    }

    /// Neighbour behind `i`; the first agent wraps to the last.
    pub fn minus(&self, i: usize) -> Result<usize> {
        self.check(i)?;
        Ok(if i == 0 { self.n - 1 } else { i - 1 })
    }

    // Unchecked variants for hot loops where `i < n` is structural.
    #[inline]
    pub(crate) fn next(&self, i: usize) -> usize {
        if i + 1 == self.n {
            0
        } else {
            i + 1
        }
    }

    #[inline]
    pub(crate) fn prev(&self, i: usize) -> usize {
        if i == 0 {
            self.n - 1
        } else {
            i - 1
        }
    }

    fn check(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.n,
            });
        }
        Ok(())
    }
}

/// A prescribed general formation.
#[derive(Clone, Debug, PartialEq)]
pub struct FormationSpec {
    /// Desired counterclockwise angular spacing from agent `i` to its `plus` neighbour.
    pub d: Vec<f64>,
    /// Desired distance from agent `i` to the target.
    pub radii: Vec<f64>,
    /// Desired angular velocity around the target (rad/s, positive = counterclockwise).
    pub omega: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    TooFewAgents(usize),
    LengthMismatch { spacings: usize, radii: usize },
    NonFinite,
    NonPositiveSpacing { index: usize, value: f64 },
    NonPositiveRadius { index: usize, value: f64 },
    SpacingSum { sum: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewAgents(n) => write!(f, "N = {n} < 2"),
            Violation::LengthMismatch { spacings, radii } => {
                write!(f, "{spacings} spacings but {radii} radii")
            }
            Violation::NonFinite => write!(f, "non-finite entry in d, R or omega"),
            Violation::NonPositiveSpacing { index, value } => {
                write!(f, "d_{} = {value} <= 0", index + 1)
            }
            Violation::NonPositiveRadius { index, value } => {
                write!(f, "R_{} = {value} <= 0", index + 1)
            }
            Violation::SpacingSum { sum } => write!(f, "sum of d = {sum} != 2*pi"),
        }
    }
}

/// Every violated admissibility condition of a [`FormationSpec`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ViolationReport(pub Vec<Violation>);

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FormationSpec {
    /// Equal angular spacing `2π/N` for the given radii.
    pub fn equal_spacing(radii: Vec<f64>, omega: f64) -> Self {
        let n = radii.len();
        let d = alloc::vec![TAU / n as f64; n];
        FormationSpec { d, radii, omega }
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn topology(&self) -> Result<RingTopology> {
        RingTopology::new(self.len())
    }

    pub fn validate(&self) -> core::result::Result<(), ViolationReport> {
        let mut out = Vec::new();
        let n = self.d.len();
        if n < 2 {
            out.push(Violation::TooFewAgents(n));
        }
        if self.radii.len() != n {
            out.push(Violation::LengthMismatch {
                spacings: n,
                radii: self.radii.len(),
            });
        }
        let finite = self.omega.is_finite()
            && self
                .d
                .iter()
                .chain(self.radii.iter())
                .all(|x| x.is_finite());
        if !finite {
            out.push(Violation::NonFinite);
        }
        for (index, &value) in self.d.iter().enumerate() {
            if !(value > 0.0) {
                out.push(Violation::NonPositiveSpacing { index, value });
            }
        }
        for (index, &value) in self.radii.iter().enumerate() {
            if !(value > 0.0) {
                out.push(Violation::NonPositiveRadius { index, value });
            }
        }
        let sum: f64 = self.d.iter().sum();
        if !((sum - TAU).abs() <= SPACING_SUM_TOL) {
            out.push(Violation::SpacingSum { sum });
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(ViolationReport(out))
        }
    }

    pub fn is_admissible(&self) -> bool {
        self.validate().is_ok()
    }

    /// Bearings (relative to agent 0 at `phase`) of the desired configuration.
    pub fn desired_bearings(&self, phase: f64) -> Vec<f64> {
        let mut acc = phase;
        let mut out = Vec::with_capacity(self.len());
        for &di in &self.d {
            out.push(acc);
            acc += di;
        }
        out
    }
}

/// Orders agents around the target: counterclockwise by bearing starting at
/// angle 0, then by distance along a shared ray, then randomly (seeded) among
/// coincident agents.
///
/// Returns `order` with `order[rank] = original index`.
pub fn assign_labels(positions: &[Vec2], target: Vec2, seed: u64) -> Result<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keys = Vec::with_capacity(positions.len());
    for (i, &p) in positions.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::NonFinite("agent position"));
        }
        let rel = p - target;
        if rel == Vec2::ZERO {
            return Err(Error::AgentAtTarget(i));
        }
        keys.push((rel.angle().radians(), rel.norm(), rng.next_u64(), i));
    }
    keys.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
            .then(a.2.cmp(&b.2))
    });
    Ok(keys.into_iter().map(|k| k.3).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{FRAC_PI_2, PI};
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn neighbours_on_six_ring() {
        let ring = RingTopology::new(6).unwrap();
        assert_eq!(ring.plus(0).unwrap(), 1);
        assert_eq!(ring.plus(5).unwrap(), 0);
        assert_eq!(ring.minus(0).unwrap(), 5);
        assert_eq!(ring.minus(2).unwrap(), 1);
    }

    #[test]
    fn smallest_ring() {
        let ring = RingTopology::new(2).unwrap();
        assert_eq!(ring.plus(1).unwrap(), 0);
        assert_eq!(ring.minus(1).unwrap(), 0);
        assert!(RingTopology::new(1).is_err());
    }

    #[test]
    fn out_of_range_index() {
        let ring = RingTopology::new(6).unwrap();
        assert_eq!(ring.plus(6), Err(Error::IndexOutOfRange { index: 6, n: 6 }));
        assert!(ring.minus(17).is_err());
    }

    #[test]
    fn equal_thirds_is_admissible() {
        let spec = FormationSpec {
            d: vec![TAU / 3.0; 3],
            radii: vec![1.0; 3],
            omega: 0.5,
        };
        assert!(spec.validate().is_ok());
    }

    #[test]
    fn spacing_sum_violation() {
        let spec = FormationSpec {
            d: vec![PI; 3],
            radii: vec![1.0; 3],
            omega: 0.0,
        };
        let report = spec.validate().unwrap_err();
        assert_eq!(report.0.len(), 1);
        match report.0[0] {
            Violation::SpacingSum { sum } => assert!((sum - 3.0 * PI).abs() < 1e-12),
            ref v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn negative_radius_violation_names_the_agent() {
        let spec = FormationSpec {
            d: vec![TAU / 3.0; 3],
            radii: vec![1.0, -1.0, 1.0],
            omega: 0.0,
        };
        let report = spec.validate().unwrap_err();
        assert_eq!(
            report.0,
            vec![Violation::NonPositiveRadius {
                index: 1,
                value: -1.0
            }]
        );
        assert_eq!(std::format!("{report}"), "R_2 = -1 <= 0");
    }

    #[test]
    fn several_violations_are_all_reported() {
        let spec = FormationSpec {
            d: vec![0.0, 1.0],
            radii: vec![1.0],
            omega: f64::NAN,
        };
        let report = spec.validate().unwrap_err();
        assert_eq!(report.0.len(), 4);
    }

    #[test]
    fn labels_sorted_by_angle() {
        let pos = [
            Vec2::from_angle(FRAC_PI_2),
            Vec2::from_angle(0.0),
            Vec2::from_angle(PI),
        ];
        assert_eq!(assign_labels(&pos, Vec2::ZERO, 0).unwrap(), vec![1, 0, 2]);
    }

    #[test]
    fn labels_nearer_first_on_shared_ray() {
        let pos = [Vec2::new(2.0, 0.0), Vec2::new(1.0, 0.0)];
        assert_eq!(assign_labels(&pos, Vec2::ZERO, 7).unwrap(), vec![1, 0]);
    }

    #[test]
    fn labels_coincident_agents_reproducible() {
        let pos = [
            Vec2::new(1.0, 1.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(-1.0, 0.0),
        ];
        let a = assign_labels(&pos, Vec2::ZERO, 42).unwrap();
        let b = assign_labels(&pos, Vec2::ZERO, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[3], 3);
    }

    #[test]
    fn labels_reject_agent_on_target() {
        let pos = [Vec2::new(1.0, 0.0), Vec2::new(3.0, 4.0)];
        assert_eq!(
            assign_labels(&pos, Vec2::new(3.0, 4.0), 0),
            Err(Error::AgentAtTarget(1))
        );
    }

    proptest! {
        #[test]
        fn plus_minus_inverse(n in 2usize..64, i in 0usize..64) {
            let ring = RingTopology::new(n).unwrap();
            let i = i % n;
            prop_assert_eq!(ring.minus(ring.plus(i).unwrap()).unwrap(), i);
            prop_assert_eq!(ring.plus(ring.minus(i).unwrap()).unwrap(), i);
        }

        #[test]
        fn labels_form_a_permutation(
            pts in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..20),
            seed in any::<u64>(),
        ) {
            let pos: Vec<Vec2> = pts.iter().map(|&(x, y)| Vec2::new(x, y)).collect();
            prop_assume!(pos.iter().all(|p| *p != Vec2::ZERO));
            let mut order = assign_labels(&pos, Vec2::ZERO, seed).unwrap();
            order.sort_unstable();
            prop_assert_eq!(order, (0..pos.len()).collect::<Vec<_>>());
        }

        #[test]
        fn equal_spacing_is_admissible(
            radii in proptest::collection::vec(1e-3f64..1e3, 2..200), omega in -5.0f64..5.0,
        ) {
            prop_assert!(FormationSpec::equal_spacing(radii, omega).validate().is_ok());
        }
    }
}
