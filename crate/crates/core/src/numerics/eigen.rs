use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Eigenvalues of a small dense complex matrix.
///
/// Householder reduction to upper Hessenberg form, then single-shift complex
/// QR sweeps (Wilkinson shift, Givens rotations) with deflation on small
/// subdiagonal entries. Eigenvalues come back in deflation order, which is
/// not sorted in any meaningful way.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !m.is_finite() {
        return Err(Error::InvalidParameter {
            name: "matrix",
            reason: "non-finite entry".into(),
        });
    }
    let n = m.dim();
    let mut h = hessenberg(m);
    let budget = 100 * n * n;
    let mut eig = Vec::with_capacity(n);
    let mut hi = n;
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;

    while hi > 0 {
        if hi == 1 {
            eig.push(h[(0, 0)]);
            break;
        }
        let lo = active_block_start(&h, hi);
        if lo == hi - 1 {
            eig.push(h[(hi - 1, hi - 1)]);
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        sweeps += 1;
        since_deflation += 1;
        if sweeps > budget {
            return Err(Error::NoConvergence { iterations: budget });
        }
        let shift = if since_deflation % 11 == 10 {
            // Ad hoc exceptional shift to break symmetric stalls.
            h[(hi - 1, hi - 1)] + Complex64::new(0.75, 0.4) * h[(hi - 1, hi - 2)].norm()
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_sweep(&mut h, lo, hi, shift);
    }
    Ok(eig)
}

fn active_block_start(h: &ComplexMatrix, hi: usize) -> usize {
    let mut l = hi - 1;
    while l > 0 {
        let sub = h[(l, l - 1)].norm();
        let mut scale = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
        if scale == 0.0 {
            scale = h.norm();
        }
        if sub <= f64::EPSILON * scale {
            return l;
        }
        l -= 1;
    }
    0
}

fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> Complex64 {
    let a = h[(hi - 2, hi - 2)];
    let b = h[(hi - 2, hi - 1)];
    let c = h[(hi - 1, hi - 2)];
    let d = h[(hi - 1, hi - 1)];
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let mu1 = mean + disc;
    let mu2 = mean - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` mapping `(x, y)` onto `(r, 0)`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

fn qr_sweep(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: Complex64) {
    for k in lo..hi {
        h[(k, k)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi - 1 {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        rotations.push((c, s));
    }
    for (offset, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + offset;
        let last = (k + 2).min(hi - 1);
        for i in lo..=last {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s.conj();
            h[(i, k + 1)] = -x * s + y * c;
        }
    }
    for k in lo..hi {
        h[(k, k)] += shift;
    }
}

fn hessenberg(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.dim();
    let mut a = m.clone();
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        // A <- (I - 2 v v^H) A
        for j in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt.conj() * a[(k + 1 + t, j)])
                .sum();
            for (t, vt) in v.iter().enumerate() {
                a[(k + 1 + t, j)] -= *vt * dot * 2.0;
            }
        }
        // A <- A (I - 2 v v^H)
        for i in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| a[(i, k + 1 + t)] * *vt)
                .sum();
            for (t, vt) in v.iter().enumerate() {
                a[(i, k + 1 + t)] -= dot * vt.conj() * 2.0;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    a
}
