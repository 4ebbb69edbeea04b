//! Reference implementations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use qi_opa::spectra::{dagger_coefficients, transfer_matrix_numeric};
use qi_opa::{derive, DerivedParams, PhysicalParams};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// erfc from the all-positive series `erf(x) = 2/sqrt(pi) e^{-x^2} sum 2^n x^{2n+1} / (2n+1)!!`
/// below 2 and the Laplace continued fraction above.
pub fn erfc_reference(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc_reference(-x);
    }
    if x < 2.0 {
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        while term > 1e-18 * sum {
            n += 1.0;
            term *= 2.0 * x * x / (2.0 * n + 1.0);
            sum += term;
        }
        1.0 - FRAC_2_SQRT_PI * (-x * x).exp() * sum
    } else {
        // erfc(x) = e^{-x^2}/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), evaluated bottom-up.
        let mut tail = x;
        for k in (1..200).rev() {
            tail = x + (k as f64 / 2.0) / tail;
        }
        0.5 * FRAC_2_SQRT_PI * (-x * x).exp() / tail
    }
}

/// Relative difference against the larger magnitude; exact zeros agree.
pub fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Reference parameters with the OPA set to `g * kappa_o` at phase `theta`.
pub fn point(g: f64, theta: f64) -> (PhysicalParams, DerivedParams) {
    let base = PhysicalParams::default();
    let p = PhysicalParams {
        opa_gain: g * base.kappa_o,
        opa_phase: theta,
        ..base
    };
    (p, derive(&p).unwrap())
}

/// Input groups by bath: microwave, optical (transmitter and receiver),
/// mechanical (transmitter and receiver), background.
pub const GROUPS: [&[usize]; 4] = [&[0, 1], &[2, 3, 8, 9], &[4, 5, 10, 11], &[6, 7]];

/// The receiver output `d_eta,o` and the idler `d_o` as combinations of the
/// twelve independent inputs: the six transmitter inputs, the background
/// `a_B, a_B^dag`, and the receiver's own `a_o,in, a_o,in^dag, b_in, b_in^dag`.
/// Odd indices are creation operators.
pub struct ReceiverOracle {
    pub reflected: [Complex64; 12],
    pub idler: [Complex64; 12],
    /// `<x x^dag>`-type weights, `n + 1` for creation inputs and `n` otherwise.
    pub weight: [f64; 12],
}

impl ReceiverOracle {
    pub fn new(p: &PhysicalParams, d: &DerivedParams, omega: f64, eta: f64, n_b: f64) -> Self {
        let here = transfer_matrix_numeric(p, d, omega).unwrap();
        let there = transfer_matrix_numeric(p, d, -omega).unwrap();
        let a_dag = dagger_coefficients(&there.a);
        let b = here.b;
        let t = d.thermal;
        let n = [
            t.microwave, t.microwave, t.optical, t.optical, t.mechanical, t.mechanical,
            n_b, n_b, t.optical, t.optical, t.mechanical, t.mechanical,
        ];
        let zero = Complex64::new(0.0, 0.0);
        let mut reflected = [zero; 12];
        let mut idler = [zero; 12];
        for k in 0..6 {
            reflected[k] = eta.sqrt() * (b[0] * here.a[k] + b[1] * a_dag[k]);
            idler[k] = b[k];
        }
        reflected[6] = (1.0 - eta).sqrt() * b[0];
        reflected[7] = (1.0 - eta).sqrt() * b[1];
        reflected[8..12].copy_from_slice(&b[2..6]);
        Self {
            reflected,
            idler,
            weight: std::array::from_fn(|k| n[k] + (k % 2) as f64),
        }
    }

    /// Beam-splitter port `(d_eta,o + sign d_o)/sqrt2`.
    pub fn port(&self, sign: f64) -> [Complex64; 12] {
        std::array::from_fn(|k| (self.reflected[k] + sign * self.idler[k]) * std::f64::consts::FRAC_1_SQRT_2)
    }

    fn occupation(&self, c: &[Complex64; 12]) -> f64 {
        (0..12).map(|k| c[k].norm_sqr() * self.weight[k]).sum()
    }

    pub fn counts(&self, sign: f64) -> f64 {
        self.occupation(&self.port(sign))
    }

    /// Fourth moment by Gaussian factorisation.
    pub fn variance(&self) -> f64 {
        let plus = self.port(1.0);
        let minus = self.port(-1.0);
        let n_plus = self.occupation(&plus);
        let n_minus = self.occupation(&minus);
        let cross: Complex64 = (0..12).map(|k| plus[k].conj() * minus[k] * self.weight[k]).sum();
        n_plus * (n_plus + 1.0) + n_minus * (n_minus + 1.0) - 2.0 * cross.norm_sqr()
    }

    /// Bath-occupation coefficients (`D`) and vacuum parts (`F`) of `2 N_sign`.
    pub fn count_coefficients(&self, sign: f64) -> ([f64; 4], [f64; 4]) {
        let c: [Complex64; 12] = std::array::from_fn(|k| self.reflected[k] + sign * self.idler[k]);
        Self::grouped(&c)
    }

    /// Bath-occupation coefficients (`K`) and vacuum parts (`T`) of `<d_eta,o^dag d_eta,o>`.
    pub fn reflected_coefficients(&self) -> ([f64; 4], [f64; 4]) {
        Self::grouped(&self.reflected)
    }

    fn grouped(c: &[Complex64; 12]) -> ([f64; 4], [f64; 4]) {
        let mut occ = [0.0; 4];
        let mut vac = [0.0; 4];
        for (q, group) in GROUPS.iter().enumerate() {
            for &k in *group {
                occ[q] += c[k].norm_sqr();
                if k % 2 == 1 {
                    vac[q] += c[k].norm_sqr();
                }
            }
        }
        (occ, vac)
    }
}
