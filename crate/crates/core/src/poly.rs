//! Real polynomials with coefficients stored highest degree first:
//! `[a0, a1, …, an]` means `a0·xⁿ + a1·xⁿ⁻¹ + … + an`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::{eigenvalues, Matrix};
use crate::{Error, Result};

/// Roots as eigenvalues of the companion matrix.
pub fn roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let lead = *coeffs
        .first()
        .ok_or(Error::Precondition("empty polynomial"))?;
    if lead == 0.0 {
        return Err(Error::Precondition("leading coefficient must be nonzero"));
    }
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let companion = Matrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -coeffs[j + 1] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    eigenvalues(&companion)
}

/// Monic polynomial with the given roots; complex roots must come in conjugate
/// pairs for the imaginary parts to cancel.
pub fn from_roots(roots: &[Complex64]) -> Vec<f64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (k, &ck) in c.iter().enumerate() {
            next[k] += ck;
            next[k + 1] -= ck * r;
        }
        c = next;
    }
    c.into_iter().map(|z| z.re).collect()
}

pub fn eval(coeffs: &[f64], x: Complex64) -> Complex64 {
    coeffs
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a)
}

/// Number of roots with real part above `tol`.
pub fn count_rhp_roots(coeffs: &[f64], tol: f64) -> Result<usize> {
    Ok(roots(coeffs)?.iter().filter(|z| z.re > tol).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_cubic() {
        // (x + 1)(x² + x + 1)
        let mut r = roots(&[1.0, 2.0, 2.0, 1.0]).unwrap();
        r.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        let h = 3f64.sqrt() / 2.0;
        assert!((r[0] - Complex64::new(-0.5, -h)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((r[2] - Complex64::new(-0.5, h)).norm() < 1e-12);
    }

    #[test]
    fn from_roots_round_trip() {
        let rs = [
            Complex64::new(2.0, 0.0),
            Complex64::new(-1.0, 3.0),
            Complex64::new(-1.0, -3.0),
        ];
        let c = from_roots(&rs);
        assert_eq!(c, vec![1.0, 0.0, 6.0, -20.0]);
        for r in rs {
            assert!(eval(&c, r).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_zero_leading() {
        assert!(roots(&[0.0, 1.0]).is_err());
        assert!(roots(&[]).is_err());
        assert!(roots(&[3.0]).unwrap().is_empty());
    }
}
