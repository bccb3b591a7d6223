//! Acceptance checks 1–10. Each returns a pass/fail verdict plus a short detail line.

use std::fmt;
use std::thread;

use encircle_core::controller::{
    control_input, control_input_local, ControllerParams, RelativeObservation,
};
use encircle_core::formation::FormationSpec;
use encircle_core::geometry::{circular_distance, Angle};
use encircle_core::linalg::{eigenvalues, expm, Complex64};
use encircle_core::metrics::metrics;
use encircle_core::poly;
use encircle_core::sim::{
    closed_loop_derivative, equilibrium_states, integrate, rk4_step, rk4_step_with,
    single_agent_derivative, AgentState, SimConfig,
};
use encircle_core::spectral::{
    build_laplacian, build_phi, check_laplacian_spectrum, consensus_limit,
    phi_eigenvalues_closed_form, simulate_linear_subsystem,
};
use encircle_core::stability::{
    origin_charpoly, rotation_residual, routh_sign_changes, single_agent_charpoly_ia,
    single_agent_charpoly_ib,
};
use encircle_core::target::{TargetModel, TargetState};
use encircle_core::Vec2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::examples;
use crate::output::write_trajectory_csv;

/// Final-state tolerance for the example reproductions.
pub const EXAMPLE_TOL: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{verdict}] criterion {:>2}: {} -- {}",
            self.id, self.name, self.detail
        )
    }
}

pub const CRITERIA: [u32; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

pub fn run_criterion(id: u32) -> Option<CriterionResult> {
    Some(match id {
        1 => example2_reproduction(),
        2 => example1_and_3_reproduction(),
        3 => laplacian_spectrum_suite(),
        4 => stacked_spectrum_suite(),
        5 => consensus_suite(),
        6 => equilibrium_residuals(),
        7 => single_agent_stability(),
        8 => frame_equivalence(),
        9 => integrator_order(),
        10 => structural_identities(),
        _ => return None,
    })
}

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .filter_map(|&id| run_criterion(id))
        .collect()
}

/// Admissible spacings `2π·w/Σw` with `w` uniform in `[lo, hi)`.
pub fn random_spacing(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| std::f64::consts::TAU * x / s).collect()
}

#[derive(Clone, Copy, Debug, Default)]
struct FinalErrors {
    radius: f64,
    rate: f64,
    spacing: f64,
    abs_rate: f64,
}

fn final_errors(cfg: &SimConfig) -> Result<FinalErrors, String> {
    let traj = integrate(cfg).map_err(|e| e.to_string())?;
    let m = metrics(&traj, &cfg.spec);
    Ok(FinalErrors {
        radius: m.final_max_radius_error(),
        rate: m.final_max_rate_error(),
        spacing: m.final_max_spacing_error(),
        abs_rate: traj
            .last()
            .derived
            .iter()
            .map(|d| d.alpha_rate.abs())
            .fold(0.0, f64::max),
    })
}

/// Runs an example for seeds `0..10` in parallel; sparse sampling keeps memory low.
fn seeded_runs(base: &SimConfig) -> Vec<(u64, Result<FinalErrors, String>)> {
    thread::scope(|s| {
        let handles: Vec<_> = (0..10u64)
            .map(|seed| {
                let mut cfg = base.clone();
                cfg.seed = seed;
                cfg.sample_every = 1000;
                s.spawn(move || (seed, final_errors(&cfg)))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

fn summarize(
    label: &str,
    runs: &[(u64, Result<FinalErrors, String>)],
    check_abs_rate: bool,
) -> (bool, String) {
    let mut ok = 0;
    let mut worst = FinalErrors::default();
    let mut failures = Vec::new();
    for (seed, r) in runs {
        match r {
            Ok(e) => {
                worst.radius = worst.radius.max(e.radius);
                worst.rate = worst.rate.max(e.rate);
                worst.spacing = worst.spacing.max(e.spacing);
                worst.abs_rate = worst.abs_rate.max(e.abs_rate);
                let pass = e.radius < EXAMPLE_TOL
                    && e.rate < EXAMPLE_TOL
                    && e.spacing < EXAMPLE_TOL
                    && (!check_abs_rate || e.abs_rate < EXAMPLE_TOL);
                if pass {
                    ok += 1;
                } else {
                    failures.push(format!("seed {seed}"));
                }
            }
            Err(msg) => failures.push(format!("seed {seed}: {msg}")),
        }
    }
    let mut detail = format!(
        "{label} {ok}/{} seeds; worst |rho-R| {:.2e}, |rate-Omega| {:.2e}, spacing {:.2e}",
        runs.len(),
        worst.radius,
        worst.rate,
        worst.spacing
    );
    if check_abs_rate {
        detail.push_str(&format!(", |rate| {:.2e}", worst.abs_rate));
    }
    if !failures.is_empty() {
        detail.push_str(&format!(" (failed: {})", failures.join(", ")));
    }
    (ok == runs.len(), detail)
}

fn example_base(cfg: crate::config::RunConfig) -> SimConfig {
    let mut c = cfg.to_sim_config().expect("bundled config is valid");
    c.dt = 1e-3;
    c.t_end = 60.0;
    c
}

pub fn example2_reproduction() -> CriterionResult {
    let runs = seeded_runs(&example_base(examples::example2()));
    let (passed, detail) = summarize("example 2:", &runs, false);
    CriterionResult {
        id: 1,
        name: "two concentric circles, moving target",
        passed,
        detail,
    }
}

pub fn example1_and_3_reproduction() -> CriterionResult {
    let r1 = seeded_runs(&example_base(examples::example1()));
    let r3 = seeded_runs(&example_base(examples::example3()));
    let (p1, d1) = summarize("example 1:", &r1, false);
    let (p3, d3) = summarize("example 3:", &r3, true);
    CriterionResult {
        id: 2,
        name: "clockwise circle and static right triangle",
        passed: p1 && p3,
        detail: format!("{d1}; {d3}"),
    }
}

/// 200 spacing vectors over `N = 2..=12`, shared by the spectrum suites.
fn spectrum_sample() -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a91ace);
    (0..200)
        .map(|k| random_spacing(&mut rng, 2 + k % 11, 0.1, 1.0))
        .collect()
}

pub fn laplacian_spectrum_suite() -> CriterionResult {
    let sample = spectrum_sample();
    let mut failures = Vec::new();
    let (mut lo, mut hi, mut gap) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY);
    for (k, d) in sample.iter().enumerate() {
        match build_laplacian(d).and_then(|l| check_laplacian_spectrum(&l)) {
            Ok(s) => {
                let re = s.real_parts();
                lo = lo.min(re[0]);
                hi = hi.max(re[re.len() - 1]);
                gap = gap.min(re[1]);
                if !s.flags.all() {
                    failures.push(format!("#{k} N={} {:?}", d.len(), s.flags));
                }
            }
            Err(e) => failures.push(format!("#{k}: {e}")),
        }
    }
    let passed = failures.is_empty();
    let mut detail = format!(
        "{}/{} pass; eigenvalues in [{lo:.2e}, {hi:.12}], smallest nonzero {gap:.3e}",
        sample.len() - failures.len(),
        sample.len()
    );
    if !passed {
        detail.push_str(&format!(" (failed: {})", failures.join("; ")));
    }
    CriterionResult {
        id: 3,
        name: "weighted ring Laplacian spectrum",
        passed,
        detail,
    }
}

fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Largest distance in a greedy nearest-neighbor pairing of two multisets.
fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut pool = b.to_vec();
    let mut worst = 0.0f64;
    let mut sorted = a.to_vec();
    sort_complex(&mut sorted);
    for z in sorted {
        let (k, dist) = pool
            .iter()
            .enumerate()
            .map(|(k, w)| (k, (w - z).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("pool matches in size");
        worst = worst.max(dist);
        pool.swap_remove(k);
    }
    worst
}

pub fn stacked_spectrum_suite() -> CriterionResult {
    let (l1, l2) = (1.0, 1.0);
    let sample = spectrum_sample();
    let mut failures = Vec::new();
    let (mut margin, mut worst_match) = (f64::NEG_INFINITY, 0.0f64);
    for (k, d) in sample.iter().enumerate() {
        let result = (|| -> encircle_core::Result<(usize, f64, f64)> {
            let l = build_laplacian(d)?;
            let etas: Vec<f64> = check_laplacian_spectrum(&l)?
                .eigenvalues
                .iter()
                .map(|z| z.re)
                .collect();
            let zeta = eigenvalues(&build_phi(d, l1, l2, true)?)?;
            let zeros = zeta.iter().filter(|z| z.norm() < 1e-9).count();
            let rest = zeta
                .iter()
                .filter(|z| z.norm() >= 1e-9)
                .map(|z| z.re)
                .fold(f64::NEG_INFINITY, f64::max);
            let closed: Vec<Complex64> = phi_eigenvalues_closed_form(&etas, l1, l2)
                .into_iter()
                .flat_map(|(a, b)| [a, b])
                .collect();
            Ok((zeros, rest, multiset_distance(&closed, &zeta)))
        })();
        match result {
            Ok((zeros, rest, dist)) => {
                margin = margin.max(rest);
                worst_match = worst_match.max(dist);
                if zeros != 1 || !(rest < -1e-9) || !(dist < 1e-8) {
                    failures.push(format!(
                        "#{k} N={} zeros={zeros} max Re={rest:.2e} match={dist:.2e}",
                        d.len()
                    ));
                }
            }
            Err(e) => failures.push(format!("#{k}: {e}")),
        }
    }
    let passed = failures.is_empty();
    let mut detail = format!(
        "{}/{} pass; largest nonzero Re(zeta) {margin:.3e}; closed form vs eigensolver {worst_match:.2e}",
        sample.len() - failures.len(),
        sample.len()
    );
    if !passed {
        detail.push_str(&format!(" (failed: {})", failures.join("; ")));
    }
    CriterionResult {
        id: 4,
        name: "stacked consensus matrix spectrum",
        passed,
        detail,
    }
}

pub fn consensus_suite() -> CriterionResult {
    let (l1, l2, n, dt) = (1.0, 1.0, 6, 1e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(0x4e4a);
    let checkpoints = [1.0, 5.0, 20.0];
    let mut failures = Vec::new();
    let (mut worst_final, mut worst_rate, mut worst_oracle) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..50 {
        let d = random_spacing(&mut rng, n, 1.0, 2.0);
        // zero-sum perturbations that keep every spacing positive
        let mut delta: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.3..0.3)).collect();
        let mean = delta.iter().sum::<f64>() / n as f64;
        delta.iter_mut().for_each(|x| *x -= mean);
        let mut rate: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.2..0.2)).collect();
        let mean = rate.iter().sum::<f64>() / n as f64;
        rate.iter_mut().for_each(|x| *x -= mean);
        let a0: Vec<f64> = d.iter().zip(&delta).map(|(a, b)| a + b).collect();

        let result = (|| -> encircle_core::Result<(f64, f64, f64)> {
            let (limit, _) = consensus_limit(&a0, &rate, &d)?;
            let tr = simulate_linear_subsystem(&a0, &rate, &d, l1, l2, 50.0, dt)?;
            let last = tr.alpha_hat.len() - 1;
            let fin = tr.alpha_hat[last]
                .iter()
                .zip(&d)
                .map(|(a, b)| circular_distance(*a, *b))
                .fold(0.0f64, f64::max);
            let lim = limit
                .iter()
                .zip(&d)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            let rnorm = tr.rates[last].iter().map(|x| x * x).sum::<f64>().sqrt();
            let phi = build_phi(&d, l1, l2, false)?;
            let x0: Vec<f64> = a0.iter().chain(&rate).copied().collect();
            let mut oracle = 0.0f64;
            for &t in &checkpoints {
                let idx = (t / dt).round() as usize;
                let want = expm(&phi.scaled(t))?.mul_vec(&x0);
                let got = tr.alpha_hat[idx].iter().chain(&tr.rates[idx]);
                oracle = oracle.max(
                    got.zip(&want)
                        .map(|(g, w)| (g - w).abs())
                        .fold(0.0, f64::max),
                );
            }
            Ok((fin.max(lim), rnorm, oracle))
        })();
        match result {
            Ok((fin, rnorm, oracle)) => {
                worst_final = worst_final.max(fin);
                worst_rate = worst_rate.max(rnorm);
                worst_oracle = worst_oracle.max(oracle);
                if !(fin < 1e-6 && rnorm < 1e-6 && oracle < 1e-8) {
                    failures.push(format!(
                        "#{k} final {fin:.2e} rate {rnorm:.2e} oracle {oracle:.2e}"
                    ));
                }
            }
            Err(e) => failures.push(format!("#{k}: {e}")),
        }
    }
    let passed = failures.is_empty();
    let mut detail = format!(
        "{}/50 pass; at t=50 spacing error {worst_final:.2e}, |rate| {worst_rate:.2e}; vs matrix exponential {worst_oracle:.2e}",
        50 - failures.len()
    );
    if !passed {
        detail.push_str(&format!(" (failed: {})", failures.join("; ")));
    }
    CriterionResult {
        id: 5,
        name: "spacing consensus limit",
        passed,
        detail,
    }
}

/// Largest change over one RK4 step of radius error, bearing rate and spacing.
fn one_step_drift(
    states: &[AgentState],
    spec: &FormationSpec,
    params: &ControllerParams,
    target: &TargetModel,
    dt: f64,
) -> encircle_core::Result<f64> {
    let next = rk4_step(states, 0.0, dt, target, spec, params)?;
    let r0 = rotation_residual(states, &target.state_at(0.0), spec, params)?;
    let r1 = rotation_residual(&next, &target.state_at(dt), spec, params)?;
    Ok(r0
        .iter()
        .zip(&r1)
        .map(|(a, b)| {
            b.radius
                .max(b.spacing)
                .max((b.bearing_rate - a.bearing_rate).abs())
                .max(b.radial_rate)
        })
        .fold(0.0, f64::max))
}

pub fn equilibrium_residuals() -> CriterionResult {
    let params = ControllerParams::default();
    let moving = TargetModel::default_moving();
    let cases: Vec<(&str, FormationSpec, TargetModel)> = vec![
        (
            "Omega=1",
            examples::example2().spec().expect("valid"),
            moving,
        ),
        (
            "Omega=-0.2",
            examples::example1().spec().expect("valid"),
            TargetModel::default(),
        ),
        (
            "Omega=-0.2 moving",
            examples::example1().spec().expect("valid"),
            moving,
        ),
        (
            "Omega=0",
            examples::example3().spec().expect("valid"),
            moving,
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0xe9);
    let mut failures = Vec::new();
    let (mut worst_eq, mut min_perturbed) = (0.0f64, f64::INFINITY);
    for (label, spec, target) in &cases {
        let ts = target.state_at(0.0);
        let states = equilibrium_states(spec, &ts, 0.3);
        let res = rotation_residual(&states, &ts, spec, &params)
            .and_then(|r| Ok((r, one_step_drift(&states, spec, &params, target, 1e-3)?)));
        match res {
            Ok((r, drift)) => {
                let eq = r.iter().map(|x| x.max()).fold(0.0, f64::max).max(drift);
                worst_eq = worst_eq.max(eq);
                if !(eq < 1e-10) {
                    failures.push(format!("{label}: equilibrium residual {eq:.2e}"));
                }
            }
            Err(e) => failures.push(format!("{label}: {e}")),
        }
        for _ in 0..20 {
            let perturbed: Vec<AgentState> = states
                .iter()
                .map(|s| {
                    let dp = Vec2::from_angle(rng.gen_range(0.0..std::f64::consts::TAU)) * 1e-2;
                    let dv = Vec2::from_angle(rng.gen_range(0.0..std::f64::consts::TAU)) * 1e-2;
                    AgentState::new(s.p + dp, s.v + dv)
                })
                .collect();
            match rotation_residual(&perturbed, &ts, spec, &params) {
                Ok(r) => {
                    let m = r.iter().map(|x| x.max()).fold(0.0, f64::max);
                    min_perturbed = min_perturbed.min(m);
                    if !(m > 1e-4) {
                        failures.push(format!("{label}: perturbed residual only {m:.2e}"));
                    }
                }
                Err(e) => failures.push(format!("{label}: {e}")),
            }
        }
    }
    let passed = failures.is_empty();
    let mut detail = format!(
        "equilibrium residual (incl. one RK4 step) {worst_eq:.2e}; smallest residual after 1e-2 perturbation {min_perturbed:.2e}"
    );
    if !passed {
        detail.push_str(&format!(" (failed: {})", failures.join("; ")));
    }
    CriterionResult {
        id: 6,
        name: "equilibrium residuals",
        passed,
        detail,
    }
}

pub fn single_agent_stability() -> CriterionResult {
    let omegas: Vec<f64> = (0..20)
        .map(|k| -2.0 + 4.0 * (k as f64 + 0.5) / 20.0)
        .collect();
    let gains: Vec<f64> = (0..20).map(|j| 0.2 * (j as f64 + 1.0)).collect();
    let mut failures = Vec::new();

    // (a) circling equilibrium
    let mut worst_hurwitz = f64::INFINITY;
    let mut max_re_a = f64::NEG_INFINITY;
    for &w in &omegas {
        for &k in &gains {
            let r =
                single_agent_charpoly_ia(w, k, 1.0, 0.0).and_then(|c| Ok((c, poly::roots(&c)?)));
            match r {
                Ok((c, roots)) => {
                    let h = c[1] * c[2] - c[0] * c[3];
                    worst_hurwitz = worst_hurwitz.min(h);
                    let re = roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
                    max_re_a = max_re_a.max(re);
                    if !(c.iter().all(|&x| x > 0.0) && h > 0.0 && re < -1e-9) {
                        failures.push(format!("Ia at Omega={w}, K={k}"));
                    }
                }
                Err(e) => failures.push(format!("Ia at Omega={w}, K={k}: {e}")),
            }
        }
    }

    // (b) resting equilibrium, heading 0
    let mut max_re_b = f64::NEG_INFINITY;
    for &k in &gains {
        match single_agent_charpoly_ib(k, 1.0, 0.0, Angle::ZERO) {
            Ok(p) => {
                let re = p
                    .roots
                    .iter()
                    .map(|z| z.re)
                    .fold(f64::NEG_INFINITY, f64::max);
                max_re_b = max_re_b.max(re);
                if !(re < -1e-9) {
                    failures.push(format!("Ib at K={k}: max Re {re:.2e}"));
                }
            }
            Err(e) => failures.push(format!("Ib at K={k}: {e}")),
        }
    }

    // (c) the target itself, sigma = 0
    let (mut checked, mut boundary, mut eps_rows) = (0, Vec::new(), 0);
    let mut origin_grid: Vec<(f64, f64)> = omegas
        .iter()
        .flat_map(|&w| gains.iter().map(move |&k| (w, k)))
        .collect();
    origin_grid.push((1.0, 1.0));
    for (w, k) in origin_grid {
        let r = origin_charpoly(w, k, 1.0)
            .and_then(|c| Ok((routh_sign_changes(&c)?, poly::count_rhp_roots(&c, 1e-9)?)));
        match r {
            Ok(((table, changes), oracle)) => {
                if table.is_boundary() {
                    boundary.push(format!("({w}, {k})"));
                    continue;
                }
                checked += 1;
                if table.used_epsilon() {
                    eps_rows += 1;
                }
                if changes != 2 || oracle != 2 {
                    failures.push(format!(
                        "origin at Omega={w}, muR={k}: Routh {changes}, roots {oracle}"
                    ));
                }
            }
            Err(e) => failures.push(format!("origin at Omega={w}, muR={k}: {e}")),
        }
    }

    let passed = failures.is_empty();
    let mut detail = format!(
        "(a) 400 points, min a1a2-a0a3 {worst_hurwitz:.3}, max Re {max_re_a:.3e}; (b) max Re {max_re_b:.3e}; \
         (c) {checked} points with 2 RHP roots by Routh and roots ({eps_rows} via epsilon pivot), boundary excluded: {}",
        if boundary.is_empty() { "none".to_string() } else { boundary.join(" ") }
    );
    if !passed {
        detail.push_str(&format!(" (failed: {})", failures.join("; ")));
    }
    CriterionResult {
        id: 7,
        name: "single-agent local stability",
        passed,
        detail,
    }
}

pub fn frame_equivalence() -> CriterionResult {
    let params = ControllerParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xf4a3e);
    let (mut worst_rot, mut worst_trans) = (0.0f64, 0.0f64);
    let tau = std::f64::consts::TAU;
    for _ in 0..1000 {
        let mut v = || Vec2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let (p, vel, a0) = (v(), v(), v());
        let obs = RelativeObservation {
            p_rel: p,
            v_rel: vel,
            a0,
            alpha_hat_plus: Angle::wrap(rng.gen_range(0.0..tau)).expect("finite"),
            alpha_hat_minus: Angle::wrap(rng.gen_range(0.0..tau)).expect("finite"),
            alpha_hat_plus_rate: rng.gen_range(-2.0..2.0),
            alpha_hat_minus_rate: rng.gen_range(-2.0..2.0),
            d_i: rng.gen_range(0.1..3.0),
            d_minus: rng.gen_range(0.1..3.0),
        };
        let (radius, omega) = (rng.gen_range(0.2..3.0), rng.gen_range(-2.0..2.0));
        let world = control_input(&obs, radius, omega, &params);
        let frame = p.angle();
        let local = control_input_local(&obs.in_frame(frame), radius, omega, &params);
        let back = local.rotated(frame.radians());
        worst_rot = worst_rot.max((back - world).norm() / world.norm().max(1.0));
    }

    let spec = examples::example2().spec().expect("valid");
    for _ in 0..1000 {
        let states: Vec<AgentState> = (0..6)
            .map(|k| {
                let a = k as f64 * tau / 6.0 + rng.gen_range(-0.4..0.4);
                let r = rng.gen_range(0.3..2.5);
                let v = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                AgentState::new(Vec2::from_angle(a) * r, v)
            })
            .collect();
        let target = TargetState {
            p0: Vec2::ZERO,
            v0: Vec2::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
            a0: Vec2::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
        };
        let offset = Vec2::from_angle(rng.gen_range(0.0..tau)) * rng.gen_range(0.0..1e3);
        let shifted: Vec<AgentState> = states
            .iter()
            .map(|s| AgentState::new(s.p + offset, s.v))
            .collect();
        let shifted_target = TargetState {
            p0: target.p0 + offset,
            ..target
        };
        let base = closed_loop_derivative(&states, &target, &spec, &params);
        let moved = closed_loop_derivative(&shifted, &shifted_target, &spec, &params);
        match (base, moved) {
            (Ok(a), Ok(b)) => {
                for (x, y) in a.iter().zip(&b) {
                    worst_trans = worst_trans.max((x.dv - y.dv).norm());
                }
            }
            _ => worst_trans = f64::INFINITY,
        }
    }
    let passed = worst_rot < 1e-12 && worst_trans < 1e-9;
    CriterionResult {
        id: 8,
        name: "frame equivalence",
        passed,
        detail: format!(
            "local-frame vs world input {worst_rot:.2e} (relative, 1000 observations); translation up to 1e3 {worst_trans:.2e}"
        ),
    }
}

/// Global error at `t_end` of the lone-agent loop for a given step.
fn single_agent_final(dt: f64, t_end: f64) -> encircle_core::Result<AgentState> {
    let params = ControllerParams::default();
    let target = TargetModel::Circular {
        center: Vec2::ZERO,
        radius: 0.5,
        rate: 0.4,
        phase: 0.0,
    };
    let (radius, omega) = (1.2, 0.8);
    let steps = (t_end / dt).round() as usize;
    let mut x = vec![AgentState::new(Vec2::new(2.5, -1.0), Vec2::new(-0.7, 1.1))];
    for k in 0..steps {
        let t = k as f64 * dt;
        x = rk4_step_with(&x, t, dt, |s, time| {
            Ok(vec![single_agent_derivative(
                &s[0],
                &target.state_at(time),
                radius,
                omega,
                &params,
            )])
        })?;
    }
    Ok(x[0])
}

pub fn integrator_order() -> CriterionResult {
    let t_end = 4.0;
    let r = (|| -> encircle_core::Result<(f64, f64)> {
        let reference = single_agent_final(2e-3 / 8.0, t_end)?;
        let err = |s: AgentState| (s.p - reference.p).norm().max((s.v - reference.v).norm());
        Ok((
            err(single_agent_final(4e-3, t_end)?),
            err(single_agent_final(2e-3, t_end)?),
        ))
    })();
    match r {
        Ok((coarse, fine)) => {
            let ratio = coarse / fine;
            // dt⁴ scaling means a ratio of 16, within a factor of 2
            let passed = (8.0..=32.0).contains(&ratio);
            CriterionResult {
                id: 9,
                name: "RK4 convergence order",
                passed,
                detail: format!(
                    "error {coarse:.3e} at dt=4e-3, {fine:.3e} at dt=2e-3, ratio {ratio:.2} (observed order {:.2})",
                    ratio.log2()
                ),
            }
        }
        Err(e) => CriterionResult {
            id: 9,
            name: "RK4 convergence order",
            passed: false,
            detail: e.to_string(),
        },
    }
}

pub fn structural_identities() -> CriterionResult {
    let mut cfg = example_base(examples::example2());
    cfg.sample_every = 1;
    cfg.t_end = 20.0;
    cfg.seed = 3;
    let csv_bytes = |c: &SimConfig| -> Result<(Vec<u8>, f64, usize), String> {
        let traj = integrate(c).map_err(|e| e.to_string())?;
        let m = metrics(&traj, &c.spec);
        let worst = m
            .spacing_sum_error
            .iter()
            .fold(0.0f64, |a, x| a.max(x.abs()));
        let mut buf = Vec::new();
        write_trajectory_csv(&traj, &mut buf).map_err(|e| e.to_string())?;
        Ok((buf, worst, traj.samples.len()))
    };
    let first = csv_bytes(&cfg);
    let second = csv_bytes(&cfg);
    match (first, second) {
        (Ok((a, sum_err, samples)), Ok((b, _, _))) => {
            let identical = a == b;
            let passed = identical && sum_err < 1e-9;
            CriterionResult {
                id: 10,
                name: "spacing sum and determinism",
                passed,
                detail: format!(
                    "max |sum(alpha_hat) - 2pi| over {samples} steps {sum_err:.2e}; repeated run CSV byte-identical: {identical} ({} bytes)",
                    a.len()
                ),
            }
        }
        (Err(e), _) | (_, Err(e)) => CriterionResult {
            id: 10,
            name: "spacing sum and determinism",
            passed: false,
            detail: e,
        },
    }
}
