//! The three bundled scenarios.

use crate::config::RunConfig;

pub const EXAMPLE1: &str = include_str!("../configs/example1.cfg");
pub const EXAMPLE2: &str = include_str!("../configs/example2.cfg");
pub const EXAMPLE3: &str = include_str!("../configs/example3.cfg");

/// Clockwise circle of radius 1 around a static target.
pub fn example1() -> RunConfig {
    RunConfig::from_toml_str(EXAMPLE1).expect("bundled config parses")
}

/// Counterclockwise concentric circles around a moving target.
pub fn example2() -> RunConfig {
    RunConfig::from_toml_str(EXAMPLE2).expect("bundled config parses")
}

/// Right triangle held static relative to a moving target.
pub fn example3() -> RunConfig {
    RunConfig::from_toml_str(EXAMPLE3).expect("bundled config parses")
}

pub fn by_name(name: &str) -> Option<RunConfig> {
    match name {
        "example1" => Some(example1()),
        "example2" => Some(example2()),
        "example3" => Some(example3()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn bundled_configs_validate() {
        for c in [example1(), example2(), example3()] {
            c.to_sim_config().unwrap();
        }
        let s = example2().spec().unwrap();
        assert_eq!(s.radii, vec![0.6, 1.5, 0.6, 1.5, 0.6, 1.5]);
        assert_eq!(example1().spec().unwrap().omega, -0.2);
    }

    #[test]
    fn triangle_matches_geometry() {
        let (a, b, c) = ((-1.0f64, -1.0f64), (2.0f64, -1.0f64), (-1.0f64, 2.0f64));
        let mid = |p: (f64, f64), q: (f64, f64)| ((p.0 + q.0) / 2.0, (p.1 + q.1) / 2.0);
        let centroid = ((a.0 + b.0 + c.0) / 3.0, (a.1 + b.1 + c.1) / 3.0);
        let mut pts: Vec<(f64, f64)> = [a, b, c, mid(a, b), mid(b, c), mid(c, a)]
            .iter()
            .map(|p| (p.0 - centroid.0, p.1 - centroid.1))
            .collect();
        let bearing = |p: &(f64, f64)| p.1.atan2(p.0).rem_euclid(TAU);
        pts.sort_by(|p, q| bearing(p).total_cmp(&bearing(q)));
        let spec = example3().spec().unwrap();
        for i in 0..6 {
            let r = pts[i].0.hypot(pts[i].1);
            let d = (bearing(&pts[(i + 1) % 6]) - bearing(&pts[i])).rem_euclid(TAU);
            assert!((spec.radii[i] - r).abs() < 1e-15, "R_{i}");
            assert!((spec.d[i] - d).abs() < 1e-15, "d_{i}");
        }
        // right angle at the first vertex
        let (u, v) = ((b.0 - a.0, b.1 - a.1), (c.0 - a.0, c.1 - a.1));
        assert_eq!(u.0 * v.0 + u.1 * v.1, 0.0);
    }
}
