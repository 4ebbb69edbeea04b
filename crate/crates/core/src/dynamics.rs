//! Classical steady state, the linearised drift matrix and its stability,
//! and the squeezed-frame couplings.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{eigenvalues, ComplexMatrix};
use crate::params::{DerivedParams, PhysicalParams};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative tolerance for the stability threshold, in units of `omega_m`.
pub const STABILITY_TOLERANCE: f64 = 1e-6;

/// Steady-state intracavity amplitudes `(alpha_w, alpha_o)`.
///
/// The mechanical frequency shift is not solved self-consistently; the
/// amplitudes are the closed forms with the OPA included in the optical one.
pub fn steady_state(
    p: &PhysicalParams,
    drive_w: f64,
    drive_o: f64,
) -> Result<(Complex64, Complex64)> {
    let alpha_w = Complex64::new(drive_w, 0.0) / Complex64::new(p.kappa_w, p.delta_w);
    let g = p.opa_gain;
    let base = p.kappa_o * p.kappa_o + p.delta_o * p.delta_o;
    let denom = base - 4.0 * g * g;
    if denom.abs() <= 1e-12 * base {
        return Err(Error::ParametricPole);
    }
    let numer = Complex64::new(p.kappa_o, -p.delta_o) + Complex64::from_polar(2.0 * g, p.opa_phase);
    Ok((alpha_w, numer * drive_o / denom))
}

/// Coefficient matrix of the linearised fluctuations, ordered as
/// `(a_w, a_w^dag, a_o, a_o^dag, b, b^dag)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix {
    entries: ComplexMatrix,
    omega_m: f64,
}

impl DriftMatrix {
    pub fn entries(&self) -> &ComplexMatrix {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    /// Mechanical frequency the stability tolerance is scaled by.
    pub fn omega_m(&self) -> f64 {
        self.omega_m
    }

    /// Operator-conjugation involution: swap each (a, a^dag) pair in both
    /// rows and columns, then conjugate every entry.
    pub fn conjugation_involution(&self) -> DriftMatrix {
        let partner = |i: usize| i ^ 1;
        let mut out = self.entries.clone();
        for i in 0..6 {
            for j in 0..6 {
                out[(i, j)] = self.entries[(partner(i), partner(j))].conj();
            }
        }
        DriftMatrix {
            entries: out,
            omega_m: self.omega_m,
        }
    }
}

pub fn drift_matrix(p: &PhysicalParams, d: &DerivedParams) -> DriftMatrix {
    let gw = d.g_w_eff;
    let go = d.g_o_eff;
    let gm = p.gamma_m();
    let opa = Complex64::from_polar(2.0 * p.opa_gain, p.opa_phase);
    let z = Complex64::new(0.0, 0.0);
    let rows = [
        [Complex64::new(-p.kappa_w, -p.delta_w), z, z, z, I * gw, I * gw],
        [z, Complex64::new(-p.kappa_w, p.delta_w), z, z, -I * gw.conj(), -I * gw.conj()],
        [z, z, Complex64::new(-p.kappa_o, -p.delta_o), opa, I * go, I * go],
        [z, z, opa.conj(), Complex64::new(-p.kappa_o, p.delta_o), -I * go.conj(), -I * go.conj()],
        [I * gw.conj(), I * gw, I * go.conj(), I * go, Complex64::new(-gm, -p.omega_m), z],
        [-I * gw.conj(), -I * gw, -I * go.conj(), -I * go, z, Complex64::new(-gm, p.omega_m)],
    ];
    DriftMatrix {
        entries: ComplexMatrix::from_rows(&rows).expect("6x6 is within the supported range"),
        omega_m: p.omega_m,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub eigenvalues: Vec<Complex64>,
    pub max_real_part: f64,
    pub stable: bool,
}

/// Stable iff every eigenvalue has real part below `-1e-6 omega_m`.
pub fn stability(drift: &DriftMatrix) -> Result<StabilityReport> {
    let eigenvalues = eigenvalues(drift.entries())?;
    let max_real_part = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(StabilityReport {
        stable: max_real_part < -STABILITY_TOLERANCE * drift.omega_m(),
        eigenvalues,
        max_real_part,
    })
}

/// Convenience: derive, build the drift matrix and classify.
pub fn check_stability(p: &PhysicalParams) -> Result<StabilityReport> {
    let d = crate::params::derive(p)?;
    stability(&drift_matrix(p, &d))
}

/// Couplings after the squeezing transformation that removes the OPA term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedFrame {
    pub r: f64,
    pub delta_o_prime: f64,
    /// Enhanced radiation-pressure coupling.
    pub g_os: f64,
    /// Parametric-amplification coupling.
    pub g_op: f64,
}

pub fn squeezed_frame(p: &PhysicalParams) -> Result<SqueezedFrame> {
    let delta = p.delta_o;
    let g = p.opa_gain;
    if !(g >= 0.0 && delta > 2.0 * g) {
        return Err(Error::SqueezingUndefined {
            delta_o: delta,
            two_g: 2.0 * g,
        });
    }
    let r = 0.25 * ((delta + 2.0 * g) / (delta - 2.0 * g)).ln();
    let root = (delta * delta - 4.0 * g * g).sqrt();
    Ok(SqueezedFrame {
        r,
        delta_o_prime: delta * (2.0 * r).cosh() - 2.0 * g * (2.0 * r).sinh(),
        g_os: p.g_o * delta / root,
        g_op: p.g_o * g / root,
    })
}
