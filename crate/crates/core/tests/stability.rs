use encircle_core::controller::ControllerParams;
use encircle_core::formation::FormationSpec;
use encircle_core::geometry::Angle;
use encircle_core::linalg::Complex64;
use encircle_core::poly;
use encircle_core::sim::{derive, equilibrium_states, rk4_step, AgentState};
use encircle_core::stability::{
    classify_equilibrium, origin_charpoly, polar_residual, routh_sign_changes,
    single_agent_charpoly_ia, EquilibriumCase, PolarState, CLASSIFY_TOL,
};
use encircle_core::target::TargetModel;
use encircle_core::Vec2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, TAU};

#[test]
fn routh_agrees_with_root_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut checked, mut boundary) = (0, 0);
    for _ in 0..1000 {
        let degree = rng.gen_range(1..=6);
        // roots drawn directly keep the sample balanced between stable and unstable
        let mut roots = Vec::new();
        while roots.len() < degree {
            let re = rng.gen_range(-2.0..2.0);
            if roots.len() + 2 <= degree && rng.gen_bool(0.5) {
                let im = rng.gen_range(0.1..2.0);
                roots.push(Complex64::new(re, im));
                roots.push(Complex64::new(re, -im));
            } else {
                roots.push(Complex64::new(re, 0.0));
            }
        }
        let scale = rng.gen_range(0.5..3.0);
        let coeffs: Vec<f64> = poly::from_roots(&roots)
            .into_iter()
            .map(|c| c * scale)
            .collect();
        let (table, changes) = routh_sign_changes(&coeffs).unwrap();
        if table.is_boundary() {
            boundary += 1;
            continue;
        }
        let oracle = poly::count_rhp_roots(&coeffs, 1e-9).unwrap();
        let truth = roots.iter().filter(|z| z.re > 1e-9).count();
        assert_eq!(oracle, truth, "{coeffs:?}");
        assert_eq!(changes, truth, "{coeffs:?}");
        checked += 1;
    }
    assert!(checked > 950, "only {checked} checked, {boundary} boundary");
}

#[test]
fn random_coefficient_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    for _ in 0..1000 {
        let degree = rng.gen_range(1..=6);
        let coeffs: Vec<f64> = (0..=degree)
            .map(|k| {
                if k == 0 {
                    1.0
                } else {
                    rng.gen_range(-3.0..3.0)
                }
            })
            .collect();
        let (table, changes) = routh_sign_changes(&coeffs).unwrap();
        if table.is_flagged() {
            continue;
        }
        // roots within 1e-7 of the imaginary axis are too close to call
        let roots = poly::roots(&coeffs).unwrap();
        if roots.iter().any(|z| z.re.abs() < 1e-7) {
            continue;
        }
        assert_eq!(
            changes,
            roots.iter().filter(|z| z.re > 0.0).count(),
            "{coeffs:?}"
        );
    }
}

#[test]
fn circling_polynomial_is_hurwitz_on_grid() {
    for k in 0..40 {
        let omega = -3.0 + 6.0 * (k as f64 + 0.5) / 40.0;
        for &(mu, r, sigma) in &[
            (0.1, 0.5, -1.0),
            (1.0, 1.0, -1.0),
            (2.0, 3.0, 0.5),
            (5.0, 0.2, 2.0),
        ] {
            let c = single_agent_charpoly_ia(omega, mu, r, sigma).unwrap();
            assert!(c.iter().all(|&x| x > 0.0));
            let k_gain = mu * f64::powf(r, sigma + 1.0);
            let h = c[1] * c[2] - c[0] * c[3];
            let expected = 2.0 * (2.0 * omega - 1.0) * (2.0 * omega - 1.0) + 2.0 + k_gain;
            assert!((h - expected).abs() < 1e-12 * expected);
            let (_, changes) = routh_sign_changes(&c).unwrap();
            assert_eq!(changes, 0);
        }
    }
}

#[test]
fn origin_has_two_unstable_roots() {
    for i in 0..=20 {
        let omega = -2.0 + 0.2 * i as f64;
        for j in 1..=20 {
            let mr = 0.2 * j as f64;
            let c = origin_charpoly(omega, mr, 1.0).unwrap();
            assert_eq!(
                poly::count_rhp_roots(&c, 1e-9).unwrap(),
                2,
                "Omega={omega} muR={mr}"
            );
            let (table, changes) = routh_sign_changes(&c).unwrap();
            if !table.is_boundary() {
                assert_eq!(changes, 2, "Omega={omega} muR={mr}");
            }
        }
    }
}

fn polar_of(states: &[AgentState], target: Vec2, target_v: Vec2) -> Vec<(f64, f64, f64, f64)> {
    states
        .iter()
        .map(|s| {
            let p = PolarState::from_cartesian(s.p - target, s.v - target_v);
            (p.rho, p.vbar, p.beta.radians(), p.alpha.radians())
        })
        .collect()
}

fn angle_diff(a: f64, b: f64) -> f64 {
    (a - b + 3.0 * std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI
}

// central differences along the Cartesian closed loop against the polar equations
#[test]
fn polar_rates_match_cartesian_flow() {
    let params = ControllerParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for target in [TargetModel::default(), TargetModel::default_moving()] {
        for _ in 0..20 {
            let spec = FormationSpec::equal_spacing(
                vec![0.6, 1.5, 0.6, 1.5, 0.6, 1.5],
                rng.gen_range(-1.5..1.5),
            );
            let states: Vec<AgentState> = (0..6)
                .map(|k| {
                    let a = k as f64 * TAU / 6.0 + rng.gen_range(-0.3..0.3);
                    let r = rng.gen_range(0.5..2.0);
                    AgentState::new(
                        Vec2::from_angle(a) * r,
                        Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    )
                })
                .collect();
            let h = 1e-4;
            let fwd = rk4_step(&states, 0.0, h, &target, &spec, &params).unwrap();
            let back = rk4_step(&states, 0.0, -h, &target, &spec, &params).unwrap();
            let (tp, tm) = (target.state_at(h), target.state_at(-h));
            let pp = polar_of(&fwd, tp.p0, tp.v0);
            let pm = polar_of(&back, tm.p0, tm.v0);
            let t0 = target.state_at(0.0);
            let derived = derive(&states, &t0, &spec, &params).unwrap();
            for i in 0..6 {
                let s = PolarState::from_cartesian(states[i].p - t0.p0, states[i].v - t0.v0);
                let r = polar_residual(&s, derived[i].gamma, derived[i].e);
                let fd = [
                    (pp[i].0 - pm[i].0) / (2.0 * h),
                    (pp[i].1 - pm[i].1) / (2.0 * h),
                    angle_diff(pp[i].2, pm[i].2) / (2.0 * h),
                    angle_diff(pp[i].3, pm[i].3) / (2.0 * h),
                ];
                let exact = [r.drho, r.dvbar, r.dbeta.unwrap(), r.dalpha.unwrap()];
                for k in 0..4 {
                    let tol = 1e-5 * (1.0 + exact[k].abs());
                    assert!(
                        (fd[k] - exact[k]).abs() < tol,
                        "component {k}: {} vs {}",
                        fd[k],
                        exact[k]
                    );
                }
            }
        }
    }
}

#[test]
fn polar_residual_is_nonzero_near_circling() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for &omega in &[1.0, -0.2, 0.7] {
        let r = 1.3;
        let beta0 = if omega > 0.0 { FRAC_PI_2 } else { -FRAC_PI_2 };
        let e = -omega * (omega - 1.0);
        for _ in 0..100 {
            let mut jitter = || rng.gen_range(-1e-2..1e-2);
            let s = PolarState {
                rho: r + jitter(),
                vbar: (omega * r).abs() + jitter(),
                beta: Angle::wrap(beta0 + jitter()).unwrap(),
                alpha: Angle::ZERO,
            };
            // E follows the radius; Γ = Ω away from the layout term
            let e_here = -(s.rho - r) / s.rho + e;
            let res = polar_residual(&s, omega, e_here);
            let m = res
                .drho
                .abs()
                .max(res.dvbar.abs())
                .max(res.dbeta.unwrap().abs());
            assert!(m > 1e-6, "{s:?}: {m}");
        }
    }
}

#[test]
fn simulated_equilibria_classify() {
    let params = ControllerParams::default();
    let target = TargetModel::default_moving();
    for omega in [1.0, -0.2, 0.0] {
        let spec = FormationSpec::equal_spacing(vec![0.6, 1.5, 0.6, 1.5, 0.6, 1.5], omega);
        let ts = target.state_at(0.0);
        let states = equilibrium_states(&spec, &ts, 0.4);
        let polar: Vec<PolarState> = states
            .iter()
            .map(|s| PolarState::from_cartesian(s.p - ts.p0, s.v - ts.v0))
            .collect();
        let label = classify_equilibrium(&polar, &spec, &params, CLASSIFY_TOL).unwrap();
        let want = if omega == 0.0 {
            EquilibriumCase::Ib
        } else {
            EquilibriumCase::Ia
        };
        assert_eq!(label.case, want);
    }
}
