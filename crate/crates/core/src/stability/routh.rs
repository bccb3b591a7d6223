//! Routh array and the first-column sign-change count.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Relative size below which a first-column pivot counts as zero.
const ZERO_PIVOT_TOL: f64 = 1e-13;
/// Replacement for a zero pivot, relative to the largest coefficient.
const EPSILON_PIVOT: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct RouthTable {
    /// Row `k` holds the coefficients of the `s^(n-k)` line.
    pub rows: Vec<Vec<f64>>,
    /// Rows whose zero pivot was replaced by a small positive epsilon.
    pub epsilon_rows: Vec<usize>,
    /// Rows that vanished entirely and were rebuilt from the derivative of the
    /// auxiliary polynomial; this signals roots symmetric about the origin,
    /// typically on the imaginary axis.
    pub auxiliary_rows: Vec<usize>,
}

impl RouthTable {
    pub fn first_column(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r[0]).collect()
    }

    /// An all-zero row was met; the sign count excludes imaginary-axis roots.
    pub fn is_boundary(&self) -> bool {
        !self.auxiliary_rows.is_empty()
    }

    pub fn used_epsilon(&self) -> bool {
        !self.epsilon_rows.is_empty()
    }

    pub fn is_flagged(&self) -> bool {
        self.is_boundary() || self.used_epsilon()
    }
}

/// Builds the Routh array of `coeffs` (highest degree first) and counts the sign
/// changes in its first column, which equals the number of open right-half-plane
/// roots when no row is flagged.
pub fn routh_sign_changes(coeffs: &[f64]) -> Result<(RouthTable, usize)> {
    let lead = *coeffs
        .first()
        .ok_or(Error::Precondition("empty polynomial"))?;
    if lead == 0.0 {
        return Err(Error::Precondition("leading coefficient must be nonzero"));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("polynomial coefficient"));
    }
    let degree = coeffs.len() - 1;
    let width = degree / 2 + 1;
    let scale = coeffs.iter().fold(0.0, |m: f64, c| m.max(c.abs()));
    let mut table = RouthTable {
        rows: Vec::with_capacity(degree + 1),
        epsilon_rows: Vec::new(),
        auxiliary_rows: Vec::new(),
    };

    let line = |start: usize| -> Vec<f64> {
        let mut r: Vec<f64> = coeffs.iter().skip(start).step_by(2).copied().collect();
        r.resize(width, 0.0);
        r
    };
    table.rows.push(line(0));
    if degree == 0 {
        return Ok((table, 0));
    }
    table.rows.push(line(1));

    for k in 1..=degree {
        if k >= 2 {
            let (above, prev) = (&table.rows[k - 2], &table.rows[k - 1]);
            let pivot = prev[0];
            let mut row = vec![0.0; width];
            for j in 0..width - 1 {
                row[j] = (pivot * above[j + 1] - above[0] * prev[j + 1]) / pivot;
            }
            table.rows.push(row);
        }
        let row_scale = table.rows[k].iter().fold(0.0, |m: f64, c| m.max(c.abs()));
        let ref_scale = table.rows[k - 1]
            .iter()
            .fold(0.0, |m: f64, c| m.max(c.abs()))
            .max(f64::MIN_POSITIVE);
        if row_scale <= ZERO_PIVOT_TOL * ref_scale {
            // all-zero row: differentiate the auxiliary polynomial of the row above
            let aux_degree = degree - (k - 1);
            let above = table.rows[k - 1].clone();
            let row = &mut table.rows[k];
            for j in 0..width {
                let power = aux_degree as i64 - 2 * j as i64;
                row[j] = if power > 0 {
                    above[j] * power as f64
                } else {
                    0.0
                };
            }
            table.auxiliary_rows.push(k);
        }
        let row_scale = table.rows[k].iter().fold(0.0, |m: f64, c| m.max(c.abs()));
        if table.rows[k][0].abs() <= ZERO_PIVOT_TOL * row_scale.max(ref_scale) {
            table.rows[k][0] = EPSILON_PIVOT * scale;
            table.epsilon_rows.push(k);
        }
    }
    let changes = table
        .first_column()
        .windows(2)
        .filter(|w| (w[0] > 0.0) != (w[1] > 0.0))
        .count();
    Ok((table, changes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_cubic() {
        let (t, n) = routh_sign_changes(&[1.0, 2.0, 3.0, 1.0]).unwrap();
        assert_eq!(n, 0);
        assert!(!t.is_flagged());
        // s^1 row: (2·3 − 1·1)/2 = 2.5
        assert_eq!(t.first_column(), vec![1.0, 2.0, 2.5, 1.0]);
    }

    #[test]
    fn first_order() {
        let (t, n) = routh_sign_changes(&[1.0, 1.0]).unwrap();
        assert_eq!(n, 0);
        assert_eq!(t.rows.len(), 2);
    }

    #[test]
    fn origin_quartic_with_zero_pivot() {
        // λ⁴ + 2λ³ + 2: the s² pivot vanishes and is replaced by ε
        let (t, n) = routh_sign_changes(&[1.0, 2.0, 0.0, 0.0, 2.0]).unwrap();
        assert_eq!(n, 2);
        assert_eq!(t.epsilon_rows, vec![2]);
        assert!(!t.is_boundary());
    }

    #[test]
    fn unstable_quadratic() {
        // (λ − 1)(λ + 2) = λ² + λ − 2
        let (_, n) = routh_sign_changes(&[1.0, 1.0, -2.0]).unwrap();
        assert_eq!(n, 1);
    }

    #[test]
    fn imaginary_axis_pair_is_boundary() {
        // (λ² + 4)(λ + 1) = λ³ + λ² + 4λ + 4
        let (t, n) = routh_sign_changes(&[1.0, 1.0, 4.0, 4.0]).unwrap();
        assert!(t.is_boundary());
        assert_eq!(n, 0);
        // (λ² + 1)(λ² − 3λ + 2): two RHP roots plus an imaginary pair
        let c = crate::poly::from_roots(&[
            num_complex::Complex64::new(0.0, 1.0),
            num_complex::Complex64::new(0.0, -1.0),
            num_complex::Complex64::new(1.0, 0.0),
            num_complex::Complex64::new(2.0, 0.0),
        ]);
        let (_, n) = routh_sign_changes(&c).unwrap();
        assert_eq!(n, 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(routh_sign_changes(&[]).is_err());
        assert!(routh_sign_changes(&[0.0, 1.0]).is_err());
        assert!(routh_sign_changes(&[1.0, f64::NAN]).is_err());
    }
}
