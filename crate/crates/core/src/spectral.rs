//! The angular-spacing subsystem: the weighted ring Laplacian `L(d)`, the stacked
//! consensus matrices, their spectra, and the consensus limit.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::{eigenvalues, Matrix};
use crate::math::{self, TAU};
use crate::{Error, Result};

/// Tolerance on the structural sums `Σα̂ = 2π` and `Σα̂̇ = 0`.
pub const SUM_TOL: f64 = 1e-9;
/// Spectrum checks: bounds slack and the zero-simplicity threshold (relative to
/// the spectral radius).
pub const SPECTRUM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SpacingLaplacian {
    pub d: Vec<f64>,
    pub matrix: Matrix,
}

impl SpacingLaplacian {
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }
}

/// `L(d)` on the ring. `L·d = 0` and `1ᵀL = 0`; `diag(d)⁻¹ L diag(d) = Lᵀ`.
pub fn build_laplacian(d: &[f64]) -> Result<SpacingLaplacian> {
    let n = d.len();
    if n < 2 {
        return Err(Error::RingTooSmall(n));
    }
    for (index, &value) in d.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite("spacing"));
        }
        if value <= 0.0 {
            return Err(Error::NonPositiveSpacing { index, value });
        }
    }
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        let (ip, im) = ((i + 1) % n, (i + n - 1) % n);
        m[(i, i)] = d[ip] / (d[ip] + d[i]) + d[im] / (d[i] + d[im]);
        // for n = 2 both neighbors coincide and the two terms add up
        m[(i, ip)] -= d[i] / (d[ip] + d[i]);
        m[(i, im)] -= d[i] / (d[i] + d[im]);
    }
    Ok(SpacingLaplacian {
        d: d.to_vec(),
        matrix: m,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpectrumFlags {
    pub all_in_0_2: bool,
    pub zero_simple: bool,
    /// Eigenvalue 2 is present exactly when `n` is even.
    pub two_parity: bool,
    pub real: bool,
}

impl SpectrumFlags {
    pub fn all(&self) -> bool {
        self.all_in_0_2 && self.zero_simple && self.two_parity && self.real
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianSpectrum {
    /// Sorted ascending by real part.
    pub eigenvalues: Vec<Complex64>,
    pub flags: SpectrumFlags,
}

impl LaplacianSpectrum {
    pub fn real_parts(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }
}

pub fn check_laplacian_spectrum(l: &SpacingLaplacian) -> Result<LaplacianSpectrum> {
    let mut ev = eigenvalues(&l.matrix)?;
    sort_by_real(&mut ev);
    let n = ev.len();
    let radius = ev.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let real = ev.iter().all(|z| z.im.abs() <= SPECTRUM_TOL * radius);
    let all_in_0_2 = ev[0].re >= -SPECTRUM_TOL && ev[n - 1].re <= 2.0 + SPECTRUM_TOL;
    let zero_simple = ev[0].norm() <= SPECTRUM_TOL * radius && ev[1].re > SPECTRUM_TOL * radius;
    let has_two = ev
        .iter()
        .any(|z| (z - Complex64::new(2.0, 0.0)).norm() <= SPECTRUM_TOL);
    Ok(LaplacianSpectrum {
        eigenvalues: ev,
        flags: SpectrumFlags {
            all_in_0_2,
            zero_simple,
            two_parity: has_two == (n % 2 == 0),
            real,
        },
    })
}

fn sort_by_real(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// `[[0, I], [−λ1 L, −λ2 L − I]]`, with `Lᵀ` in place of `L` when `transposed`.
pub fn build_phi(d: &[f64], lambda1: f64, lambda2: f64, transposed: bool) -> Result<Matrix> {
    if !(lambda1 > 0.0) || !(lambda2 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            reason: "gains must be > 0",
        });
    }
    let l = build_laplacian(d)?.matrix;
    let l = if transposed { l.transpose() } else { l };
    Ok(stack(&l, lambda1, lambda2))
}

fn stack(l: &Matrix, lambda1: f64, lambda2: f64) -> Matrix {
    let n = l.rows();
    let mut phi = Matrix::zeros(2 * n, 2 * n);
    phi.set_block(0, n, &Matrix::identity(n));
    phi.set_block(n, 0, &l.scaled(-lambda1));
    phi.set_block(n, n, &(&l.scaled(-lambda2) - &Matrix::identity(n)));
    phi
}

/// `ζ = [−(λ2η + 1) ± √((λ2η + 1)² − 4λ1η)] / 2` for each `η`, in `(+, −)` order.
pub fn phi_eigenvalues_closed_form(
    etas: &[f64],
    lambda1: f64,
    lambda2: f64,
) -> Vec<(Complex64, Complex64)> {
    etas.iter()
        .map(|&eta| {
            let b = lambda2 * eta + 1.0;
            let disc = Complex64::new(b * b - 4.0 * lambda1 * eta, 0.0).sqrt();
            ((disc - b) / 2.0, (-disc - b) / 2.0)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    pub laplacian: SpacingLaplacian,
    pub laplacian_eigenvalues: Vec<Complex64>,
    /// Eigenvalues of the transposed stacked matrix, sorted ascending by real part.
    pub phi_eigenvalues: Vec<Complex64>,
    pub flags: SpectrumFlags,
    /// Every eigenvalue of the stacked matrix but one simple zero has negative real part.
    pub nonzero_stable: bool,
    /// Largest real part among the non-zero stacked eigenvalues (negative when stable).
    pub stability_margin: f64,
    /// Left null vector of the transposed stacked system, normalized to sum 1.
    pub p: Vec<f64>,
}

impl SpectralReport {
    pub fn all_pass(&self) -> bool {
        self.flags.all() && self.nonzero_stable
    }
}

pub fn spectral_report(d: &[f64], lambda1: f64, lambda2: f64) -> Result<SpectralReport> {
    let laplacian = build_laplacian(d)?;
    let spectrum = check_laplacian_spectrum(&laplacian)?;
    let mut phi_ev = eigenvalues(&build_phi(d, lambda1, lambda2, true)?)?;
    sort_by_real(&mut phi_ev);
    // the eigenvalue closest to zero is the consensus direction
    let zero_idx = (0..phi_ev.len())
        .min_by(|&a, &b| phi_ev[a].norm().total_cmp(&phi_ev[b].norm()))
        .unwrap_or(0);
    let radius = phi_ev.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let margin = phi_ev
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != zero_idx)
        .map(|(_, z)| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let nonzero_stable =
        phi_ev[zero_idx].norm() <= SPECTRUM_TOL * radius && margin < -SPECTRUM_TOL * radius;
    let p = left_null_vector(&laplacian)?;
    Ok(SpectralReport {
        laplacian,
        laplacian_eigenvalues: spectrum.eigenvalues,
        phi_eigenvalues: phi_ev,
        flags: spectrum.flags,
        nonzero_stable,
        stability_margin: margin,
        p,
    })
}

/// Null vector of `Lᵀᵀ = L` normalized to `Σp = 1`; analytically `d / Σd`.
fn left_null_vector(l: &SpacingLaplacian) -> Result<Vec<f64>> {
    let n = l.len();
    let mut a = l.matrix.clone();
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut rhs = Matrix::zeros(n, 1);
    rhs[(n - 1, 0)] = 1.0;
    let x = a.solve(&rhs)?;
    Ok((0..n).map(|i| x[(i, 0)]).collect())
}

fn check_sums(alpha_hat0: &[f64], rate0: &[f64], d: &[f64]) -> Result<()> {
    if alpha_hat0.len() != d.len() {
        return Err(Error::Dimension {
            expected: d.len(),
            got: alpha_hat0.len(),
        });
    }
    if rate0.len() != d.len() {
        return Err(Error::Dimension {
            expected: d.len(),
            got: rate0.len(),
        });
    }
    if alpha_hat0.iter().chain(rate0).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("spacing state"));
    }
    if (alpha_hat0.iter().sum::<f64>() - TAU).abs() > SUM_TOL {
        return Err(Error::Precondition("spacings must sum to 2π"));
    }
    if rate0.iter().sum::<f64>().abs() > SUM_TOL {
        return Err(Error::Precondition("spacing rates must sum to 0"));
    }
    Ok(())
}

/// Predicted limit of `(α̂, α̂̇)` under the linear spacing dynamics.
pub fn consensus_limit(
    alpha_hat0: &[f64],
    rate0: &[f64],
    d: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_sums(alpha_hat0, rate0, d)?;
    build_laplacian(d)?;
    if (d.iter().sum::<f64>() - TAU).abs() > SUM_TOL {
        return Err(Error::Precondition("desired spacings must sum to 2π"));
    }
    // δ = D⁻¹α̂ tends to 1·pᵀ(δ0 + ξ0) with p = d/2π, so α̂ tends to d·Σ(α̂0 + α̂̇0)/2π
    let mass: f64 = alpha_hat0
        .iter()
        .zip(rate0)
        .map(|(a, r)| a + r)
        .sum::<f64>()
        / TAU;
    Ok((d.iter().map(|di| di * mass).collect(), vec![0.0; d.len()]))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearTrajectory {
    pub times: Vec<f64>,
    pub alpha_hat: Vec<Vec<f64>>,
    pub rates: Vec<Vec<f64>>,
}

/// RK4 integration of `α̂̈ = −L(λ1 α̂ + λ2 α̂̇) − α̂̇`, recording every step.
pub fn simulate_linear_subsystem(
    alpha_hat0: &[f64],
    rate0: &[f64],
    d: &[f64],
    lambda1: f64,
    lambda2: f64,
    t_end: f64,
    dt: f64,
) -> Result<LinearTrajectory> {
    check_sums(alpha_hat0, rate0, d)?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: "must be finite and > 0",
        });
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t_end",
            reason: "must be finite and >= 0",
        });
    }
    let phi = build_phi(d, lambda1, lambda2, false)?;
    let n = d.len();
    let steps = math::ceil(t_end / dt - 1e-9) as usize;
    let mut x: Vec<f64> = alpha_hat0.iter().chain(rate0).copied().collect();
    let mut out = LinearTrajectory::default();
    let mut push = |t: f64, x: &[f64]| {
        out.times.push(t);
        out.alpha_hat.push(x[..n].to_vec());
        out.rates.push(x[n..].to_vec());
    };
    push(0.0, &x);
    let axpy = |x: &[f64], k: &[f64], h: f64| -> Vec<f64> {
        x.iter().zip(k).map(|(a, b)| a + h * b).collect()
    };
    for step in 1..=steps {
        let k1 = phi.mul_vec(&x);
        let k2 = phi.mul_vec(&axpy(&x, &k1, dt / 2.0));
        let k3 = phi.mul_vec(&axpy(&x, &k2, dt / 2.0));
        let k4 = phi.mul_vec(&axpy(&x, &k3, dt));
        for j in 0..2 * n {
            x[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if let Some(agent) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::Diverged {
                step,
                agent: agent % n,
            });
        }
        push(step as f64 * dt, &x);
    }
    Ok(out)
}
