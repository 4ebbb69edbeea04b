//! Output covariance matrix and logarithmic negativity.
//!
//! Quadratures are `X_j = (d_j + d_j^dag)/sqrt2`, `Y_j = (d_j - d_j^dag)/(i sqrt2)`
//! in the order `(X_w, Y_w, X_o, Y_o)`; the vacuum covariance matrix is `I/2`.

use num_complex::Complex64;

use crate::dynamics::{drift_matrix, stability};
use crate::error::{Error, Result};
use crate::params::{DerivedParams, PhysicalParams, ThermalOccupations};
use crate::spectra::Sidebands;

/// Slack allowed below the uncertainty bound of 1/2.
pub const PHYSICALITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    pub entries: [[f64; 4]; 4],
    pub omega: f64,
}

type Block = [[f64; 2]; 2];

fn det2(m: &Block) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

impl CovarianceMatrix {
    pub fn vacuum(omega: f64) -> Self {
        let mut entries = [[0.0; 4]; 4];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = 0.5;
        }
        Self { entries, omega }
    }

    fn block(&self, r: usize, c: usize) -> Block {
        let e = &self.entries;
        [[e[r][c], e[r][c + 1]], [e[r + 1][c], e[r + 1][c + 1]]]
    }

    /// Microwave block `A`.
    pub fn a(&self) -> Block {
        self.block(0, 0)
    }

    /// Optical block `B`.
    pub fn b(&self) -> Block {
        self.block(2, 2)
    }

    /// Correlation block `C`.
    pub fn c(&self) -> Block {
        self.block(0, 2)
    }

    pub fn determinant(&self) -> f64 {
        let mut m = self.entries;
        let mut det = 1.0;
        for k in 0..4 {
            let p = (k..4)
                .max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))
                .unwrap_or(k);
            if m[p][k] == 0.0 {
                return 0.0;
            }
            if p != k {
                m.swap(p, k);
                det = -det;
            }
            det *= m[k][k];
            for i in k + 1..4 {
                let f = m[i][k] / m[k][k];
                for j in k..4 {
                    m[i][j] -= f * m[k][j];
                }
            }
        }
        det
    }

    /// Symplectic eigenvalues `(nu_-, nu_+)` of the matrix itself.
    pub fn symplectic_eigenvalues(&self) -> (f64, f64) {
        let delta = det2(&self.a()) + det2(&self.b()) + 2.0 * det2(&self.c());
        symplectic_pair(delta, self.determinant())
    }

    /// Partial transpose on the optical mode (`Y_o -> -Y_o`).
    pub fn partial_transpose(&self) -> Self {
        let mut out = *self;
        for i in 0..4 {
            out.entries[i][3] = -out.entries[i][3];
            out.entries[3][i] = -out.entries[3][i];
        }
        out
    }

    /// Rotates one mode's quadratures by `phi` (local phase shift).
    pub fn rotate_mode(&self, optical: bool, phi: f64) -> Self {
        let off = if optical { 2 } else { 0 };
        let (s, c) = phi.sin_cos();
        let mut r = [[0.0; 4]; 4];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        r[off][off] = c;
        r[off][off + 1] = -s;
        r[off + 1][off] = s;
        r[off + 1][off + 1] = c;
        let v = &self.entries;
        let mut out = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = (0..4)
                    .flat_map(|k| (0..4).map(move |l| (k, l)))
                    .map(|(k, l)| r[i][k] * v[k][l] * r[j][l])
                    .sum();
            }
        }
        Self {
            entries: out,
            omega: self.omega,
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..4).all(|i| (0..4).all(|j| (self.entries[i][j] - self.entries[j][i]).abs() <= tol))
    }
}

fn symplectic_pair(invariant: f64, det: f64) -> (f64, f64) {
    let mut disc = invariant * invariant - 4.0 * det;
    // Below this the two roots are not resolvable in f64; taking the midpoint
    // keeps degenerate (pure-state) spectra exact.
    if disc.abs() <= 16.0 * f64::EPSILON * invariant * invariant || (disc < 0.0 && disc > -1e-12) {
        disc = 0.0;
    }
    let root = disc.max(0.0).sqrt();
    let plus_sq = (invariant + root) / 2.0;
    // nu_-^2 nu_+^2 = det, which avoids the cancellation in (invariant - root).
    let minus_sq = if plus_sq > 0.0 { det / plus_sq } else { 0.0 };
    (minus_sq.max(0.0).sqrt(), plus_sq.sqrt())
}

/// Hermitian spectral matrix `V(w)_ij = 1/2 <u_i u_j^dag + u_j^dag u_i>` with
/// the `delta(w + w')` stripped.
pub fn spectral_matrix(sidebands: &Sidebands, thermal: &ThermalOccupations) -> [[Complex64; 4]; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let dw = sidebands.plus.a;
    let dw_dag = sidebands.microwave_dagger();
    let d_o = sidebands.plus.b;
    let do_dag = sidebands.optical_dagger();
    let i = Complex64::new(0.0, 1.0);
    let rows: [[Complex64; 6]; 4] = [
        std::array::from_fn(|k| (dw[k] + dw_dag[k]) * s),
        std::array::from_fn(|k| (dw[k] - dw_dag[k]) * s / i),
        std::array::from_fn(|k| (d_o[k] + do_dag[k]) * s),
        std::array::from_fn(|k| (d_o[k] - do_dag[k]) * s / i),
    ];
    let n = [thermal.microwave, thermal.optical, thermal.mechanical];
    // <in_k in_k^dag> + <in_k^dag in_k> = 2 n_k + 1 for every input.
    let weight: [f64; 6] = std::array::from_fn(|k| n[k / 2] + 0.5);
    let mut v = [[Complex64::new(0.0, 0.0); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            v[a][b] = (0..6).map(|k| rows[a][k] * rows[b][k].conj() * weight[k]).sum();
        }
    }
    v
}

/// Real symmetric covariance matrix from precomputed sideband coefficients:
/// the real part of the spectral matrix, i.e. `(V(w) + V(-w))/2`.
pub fn covariance_from_sidebands(sidebands: &Sidebands, thermal: &ThermalOccupations) -> CovarianceMatrix {
    let v = spectral_matrix(sidebands, thermal);
    let mut entries = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            entries[i][j] = 0.5 * (v[i][j].re + v[j][i].re);
        }
    }
    CovarianceMatrix {
        entries,
        omega: sidebands.omega(),
    }
}

/// Covariance matrix of the two output fields at `omega`; rejects unstable points.
pub fn covariance_matrix(p: &PhysicalParams, d: &DerivedParams, omega: f64) -> Result<CovarianceMatrix> {
    let report = stability(&drift_matrix(p, d))?;
    if !report.stable {
        return Err(Error::Unstable {
            max_real_part: report.max_real_part,
        });
    }
    let sidebands = Sidebands::evaluate(p, d, omega)?;
    Ok(covariance_from_sidebands(&sidebands, &d.thermal))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementResult {
    /// Smallest symplectic eigenvalue of the partially transposed matrix.
    pub eta_minus: f64,
    pub log_negativity: f64,
}

pub fn log_negativity(v: &CovarianceMatrix) -> Result<EntanglementResult> {
    let (nu_minus, _) = v.symplectic_eigenvalues();
    if nu_minus < 0.5 - PHYSICALITY_TOLERANCE {
        return Err(Error::Unphysical { nu: nu_minus });
    }
    let sigma = det2(&v.a()) + det2(&v.b()) - 2.0 * det2(&v.c());
    let (eta_minus, _) = symplectic_pair(sigma, v.determinant());
    Ok(EntanglementResult {
        eta_minus,
        log_negativity: (-(2.0 * eta_minus).ln()).max(0.0),
    })
}
