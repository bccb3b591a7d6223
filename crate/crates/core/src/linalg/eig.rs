//! Eigenvalues of a general real matrix: balancing, reduction to upper
//! Hessenberg form by stabilized elimination, then the Francis double-shift QR
//! iteration. Eigenvalues only; no vectors are accumulated.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::Matrix;
use crate::math;
use crate::{Error, Result};

const MAX_ITERATIONS: usize = 60;

/// One-based square work array, so the loops below read like the textbook recurrences.
struct Work {
    n: usize,
    a: Vec<f64>,
}

impl Work {
    fn new(m: &Matrix) -> Self {
        let n = m.rows();
        let mut a = vec![0.0; (n + 1) * (n + 1)];
        for i in 0..n {
            for j in 0..n {
                a[(i + 1) * (n + 1) + j + 1] = m[(i, j)];
            }
        }
        Work { n, a }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * (self.n + 1) + j]
    }

    #[inline]
    fn at(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[i * (self.n + 1) + j]
    }
}

/// All eigenvalues of a square matrix, in no particular order.
pub fn eigenvalues(m: &Matrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::Dimension {
            expected: m.rows(),
            got: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("matrix entry"));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut w = Work::new(m);
    balance(&mut w);
    to_hessenberg(&mut w);
    hqr(&mut w)
}

fn balance(w: &mut Work) {
    const RADIX: f64 = 2.0;
    let n = w.n;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let (mut c, mut r) = (0.0, 0.0);
            for j in 1..=n {
                if j != i {
                    c += w.get(j, i).abs();
                    r += w.get(i, j).abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        *w.at(i, j) *= g;
                    }
                    for j in 1..=n {
                        *w.at(j, i) *= f;
                    }
                }
            }
        }
    }
}

fn to_hessenberg(w: &mut Work) {
    let n = w.n;
    for m in 2..n {
        let mut x = 0.0f64;
        let mut i = m;
        for j in m..=n {
            if w.get(j, m - 1).abs() > x.abs() {
                x = w.get(j, m - 1);
                i = j;
            }
        }
        if i != m {
            for j in m - 1..=n {
                let (a, b) = (w.get(i, j), w.get(m, j));
                *w.at(i, j) = b;
                *w.at(m, j) = a;
            }
            for j in 1..=n {
                let (a, b) = (w.get(j, i), w.get(j, m));
                *w.at(j, i) = b;
                *w.at(j, m) = a;
            }
        }
        if x != 0.0 {
            for i in m + 1..=n {
                let mut y = w.get(i, m - 1);
                if y != 0.0 {
                    y /= x;
                    *w.at(i, m - 1) = y;
                    for j in m..=n {
                        let v = w.get(m, j);
                        *w.at(i, j) -= y * v;
                    }
                    for j in 1..=n {
                        let v = w.get(j, i);
                        *w.at(j, m) += y * v;
                    }
                }
            }
        }
    }
    // drop the elimination multipliers stored below the subdiagonal
    for i in 1..=n {
        for j in 1..i.saturating_sub(1) {
            *w.at(i, j) = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

#[allow(clippy::many_single_char_names)]
fn hqr(w: &mut Work) -> Result<Vec<Complex64>> {
    let n = w.n;
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += w.get(i, j).abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    #[allow(unused_assignments)]
    let (mut p, mut q, mut r) = (0.0f64, 0.0f64, 0.0f64);
    let (mut x, mut y, mut z);
    let mut ww;
    while nn >= 1 {
        let mut its = 0;
        loop {
            // look for a single small subdiagonal element
            let mut l = nn;
            while l >= 2 {
                let mut s = w.get(l - 1, l - 1).abs() + w.get(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if w.get(l, l - 1).abs() + s == s {
                    *w.at(l, l - 1) = 0.0;
                    break;
                }
                l -= 1;
            }
            x = w.get(nn, nn);
            if l == nn {
                // one root found
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            y = w.get(nn - 1, nn - 1);
            ww = w.get(nn, nn - 1) * w.get(nn - 1, nn);
            if l + 1 == nn {
                // two roots found
                p = 0.5 * (y - x);
                q = p * p + ww;
                z = math::sqrt(q.abs());
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if z != 0.0 {
                        wr[nn] = x - ww / z;
                    }
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn = nn.saturating_sub(2);
                break;
            }
            if its == MAX_ITERATIONS {
                return Err(Error::NoConvergence);
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                t += x;
                for i in 1..=nn {
                    *w.at(i, i) -= x;
                }
                let s = w.get(nn, nn - 1).abs() + w.get(nn - 1, nn - 2).abs();
                x = 0.75 * s;
                y = x;
                ww = -0.4375 * s * s;
            }
            its += 1;
            // look for two consecutive small subdiagonal elements
            let mut m = nn - 2;
            loop {
                z = w.get(m, m);
                r = x - z;
                let s = y - z;
                p = (r * s - ww) / w.get(m + 1, m) + w.get(m, m + 1);
                q = w.get(m + 1, m + 1) - z - r - s;
                r = w.get(m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = w.get(m, m - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (w.get(m - 1, m - 1).abs() + z.abs() + w.get(m + 1, m + 1).abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                *w.at(i, i - 2) = 0.0;
                if i != m + 2 {
                    *w.at(i, i - 3) = 0.0;
                }
            }
            // double QR step on rows l..nn and columns m..nn
            let mut k = m;
            while k < nn {
                if k != m {
                    p = w.get(k, k - 1);
                    q = w.get(k + 1, k - 1);
                    r = 0.0;
                    if k != nn - 1 {
                        r = w.get(k + 2, k - 1);
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign(math::sqrt(p * p + q * q + r * r), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            *w.at(k, k - 1) = -w.get(k, k - 1);
                        }
                    } else {
                        *w.at(k, k - 1) = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        p = w.get(k, j) + q * w.get(k + 1, j);
                        if k != nn - 1 {
                            p += r * w.get(k + 2, j);
                            *w.at(k + 2, j) -= p * z;
                        }
                        *w.at(k + 1, j) -= p * y;
                        *w.at(k, j) -= p * x;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        p = x * w.get(i, k) + y * w.get(i, k + 1);
                        if k != nn - 1 {
                            p += z * w.get(i, k + 2);
                            *w.at(i, k + 2) -= p * r;
                        }
                        *w.at(i, k + 1) -= p * q;
                        *w.at(i, k) -= p;
                    }
                }
                k += 1;
            }
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}
