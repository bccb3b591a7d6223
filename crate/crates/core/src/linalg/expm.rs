//! Matrix exponential by scaling and squaring around a degree-13 Padé approximant.

use super::Matrix;
use crate::math;
use crate::{Error, Result};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// 1-norm bound below which the [13/13] approximant is accurate to unit roundoff
const THETA13: f64 = 5.371920351148152;

pub fn expm(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::Dimension {
            expected: a.rows(),
            got: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix entry"));
    }
    let n = a.rows();
    let norm = a.norm1();
    let squarings = if norm > THETA13 {
        math::ceil(math::log2(norm / THETA13)).max(0.0) as i32
    } else {
        0
    };
    let a = a.scaled(math::powf(2.0, -(squarings as f64)));
    let b = &PADE13;
    let ident = Matrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let lin = |c6: f64, c4: f64, c2: f64, c0: f64| -> Matrix {
        let mut m = a6.scaled(c6);
        m = &m + &a4.scaled(c4);
        m = &m + &a2.scaled(c2);
        &m + &ident.scaled(c0)
    };
    let inner_u = &a6 * &lin(b[13], b[11], b[9], 0.0);
    let u = &a * &(&inner_u + &lin(b[7], b[5], b[3], b[1]));
    let inner_v = &a6 * &lin(b[12], b[10], b[8], 0.0);
    let v = &inner_v + &lin(b[6], b[4], b[2], b[0]);

    let mut r = (&v - &u).solve(&(&v + &u))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}
