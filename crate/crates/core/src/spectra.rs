//! Frequency-domain output fields.
//!
//! With `O(w) = (2 pi)^{-1/2} \int dt O(t) e^{i w t}` the output fields are
//! linear in the six input noise operators at the same frequency,
//!
//! ```text
//! d_w(w) = A1 a_w,in + A2 a_w,in^dag + A3 a_o,in + A4 a_o,in^dag + A5 b_in + A6 b_in^dag
//! d_o(w) = B1 a_w,in + ...                                         + B6 b_in^dag
//! ```
//!
//! where `X^dag(w)` denotes the transform of `X^dag(t)`, i.e. `[X(-w)]^dag`.
//! [`output_coefficients`] evaluates the closed forms; [`transfer_matrix_numeric`]
//! solves the 6x6 linear system directly and is the reference it is checked
//! against.

use num_complex::Complex64;

use crate::dynamics::drift_matrix;
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::params::{DerivedParams, PhysicalParams, ThermalOccupations};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Input operator basis, in coefficient order.
pub const INPUT_LABELS: [&str; 6] = ["a_w,in", "a_w,in^dag", "a_o,in", "a_o,in^dag", "b_in", "b_in^dag"];

/// Transfer coefficients of the two output fields at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputCoefficients {
    pub omega: f64,
    /// Microwave output, `A1..A6`.
    pub a: [Complex64; 6],
    /// Optical output, `B1..B6`.
    pub b: [Complex64; 6],
}

impl OutputCoefficients {
    /// Coefficient `k` (0-based) of either output, `A` for `microwave`.
    pub fn get(&self, microwave: bool, k: usize) -> Complex64 {
        if microwave {
            self.a[k]
        } else {
            self.b[k]
        }
    }
}

/// Coefficients of `X^dag(w)` in the input basis at `w`, given the
/// coefficients of `X` at `-w`: conjugate and swap every (a, a^dag) pair.
pub fn dagger_coefficients(at_minus_omega: &[Complex64; 6]) -> [Complex64; 6] {
    std::array::from_fn(|k| at_minus_omega[k ^ 1].conj())
}

/// Coefficients at `+omega` and `-omega`, which is everything the
/// second-order moments at `omega` need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sidebands {
    pub plus: OutputCoefficients,
    pub minus: OutputCoefficients,
}

impl Sidebands {
    pub fn evaluate(p: &PhysicalParams, d: &DerivedParams, omega: f64) -> Result<Self> {
        Ok(Self {
            plus: output_coefficients(p, d, omega)?,
            minus: output_coefficients(p, d, -omega)?,
        })
    }

    pub fn evaluate_numeric(p: &PhysicalParams, d: &DerivedParams, omega: f64) -> Result<Self> {
        Ok(Self {
            plus: transfer_matrix_numeric(p, d, omega)?,
            minus: transfer_matrix_numeric(p, d, -omega)?,
        })
    }

    pub fn omega(&self) -> f64 {
        self.plus.omega
    }

    /// `d_w^dag(omega)` in the input basis at `omega`.
    pub fn microwave_dagger(&self) -> [Complex64; 6] {
        dagger_coefficients(&self.minus.a)
    }

    pub fn optical_dagger(&self) -> [Complex64; 6] {
        dagger_coefficients(&self.minus.b)
    }
}

fn nonzero(z: Complex64, scale: f64, which: &'static str, omega: f64) -> Result<Complex64> {
    if z.norm() <= 1e-14 * scale || !z.re.is_finite() || !z.im.is_finite() {
        Err(Error::Pole { which, omega })
    } else {
        Ok(z)
    }
}

/// Closed-form transfer coefficients.
///
/// `u` carries `-2iw_m [2G(g_o'^2 e^{-i th} - g_o'^{*2} e^{i th}) - 2i D_o |g_o'|^2] / (D_o^- D_o^+ - 4G^2)`;
/// the minus sign on the detuning term is what the direct solve of the
/// linearised equations gives.
pub fn output_coefficients(
    p: &PhysicalParams,
    d: &DerivedParams,
    omega: f64,
) -> Result<OutputCoefficients> {
    let (kw, ko, gm, wm) = (p.kappa_w, p.kappa_o, p.gamma_m(), p.omega_m);
    let g = p.opa_gain;
    let gw = d.g_w_eff;
    let go = d.g_o_eff;
    let e_plus = Complex64::from_polar(1.0, p.opa_phase);
    let e_minus = e_plus.conj();
    let scale = wm.max(omega.abs());

    let dw_m = nonzero(Complex64::new(-kw, omega - p.delta_w), scale, "Delta_w^-", omega)?;
    let dw_p = nonzero(Complex64::new(-kw, omega + p.delta_w), scale, "Delta_w^+", omega)?;
    let do_m = Complex64::new(-ko, omega - p.delta_o);
    let do_p = Complex64::new(-ko, omega + p.delta_o);
    let dm_m = Complex64::new(-gm, omega - wm);
    let dm_p = Complex64::new(-gm, omega + wm);
    let den = nonzero(do_m * do_p - 4.0 * g * g, scale * scale, "Delta_o^- Delta_o^+ - 4G^2", omega)?;

    let u = -2.0 * I * wm
        * (2.0 * g * (go * go * e_minus - go.conj() * go.conj() * e_plus)
            - 2.0 * I * p.delta_o * go.norm_sqr())
        / den
        - 4.0 * wm * p.delta_w * gw.norm_sqr() / (dw_m * dw_p)
        + dm_m * dm_p;
    let u = nonzero(u, scale * scale, "u", omega)?;

    let sq_wo = (kw * ko).sqrt();
    let sq_wm = (kw * gm).sqrt();
    let sq_om = (ko * gm).sqrt();
    let four_i_wm = 4.0 * I * wm;
    // Optical response to the mechanical quadrature, shared by B3..B6.
    let opt = 2.0 * g * e_plus * go.conj() + do_p * go;

    let a = [
        four_i_wm * gw.norm_sqr() * kw / (dw_m * dw_m) / u - 2.0 * kw / dw_m - 1.0,
        four_i_wm * gw * gw * kw / (dw_m * dw_p) / u,
        -four_i_wm * sq_wo * (2.0 * g * e_minus * go * gw - do_p * go.conj() * gw) / (dw_m * den) / u,
        -four_i_wm * sq_wo * (2.0 * g * e_plus * go.conj() * gw - do_m * go * gw) / (dw_m * den) / u,
        2.0 * I * gw * sq_wm * dm_p / dw_m / u,
        2.0 * I * gw * sq_wm * dm_m / dw_m / u,
    ];
    let b = [
        four_i_wm * sq_wo * (2.0 * g * e_plus * go.conj() * gw.conj() + do_p * go * gw.conj())
            / (dw_m * den)
            / u,
        four_i_wm * sq_wo * (2.0 * g * e_plus * go.conj() * gw + do_p * go * gw) / (dw_p * den) / u,
        -four_i_wm * ko * opt * (2.0 * g * e_minus * go - do_p * go.conj()) / (den * den) / u
            - 2.0 * ko * do_p / den
            - 1.0,
        -four_i_wm * ko * opt * (2.0 * g * e_plus * go.conj() - do_m * go) / (den * den) / u
            + 4.0 * ko * g * e_plus / den,
        2.0 * I * sq_om * dm_p * opt / den / u,
        2.0 * I * sq_om * dm_m * opt / den / u,
    ];
    Ok(OutputCoefficients { omega, a, b })
}

/// Transfer coefficients from a direct solve of `f(w) = -(L + i w)^{-1} zeta(w)`
/// followed by `d_j = sqrt(2 kappa_j) a_j - a_j,in`.
pub fn transfer_matrix_numeric(
    p: &PhysicalParams,
    d: &DerivedParams,
    omega: f64,
) -> Result<OutputCoefficients> {
    let lambda = drift_matrix(p, d);
    let system = lambda.entries().shifted(Complex64::new(0.0, omega));
    let rates = [p.kappa_w, p.kappa_w, p.kappa_o, p.kappa_o, p.gamma_m(), p.gamma_m()];
    let noise = ComplexMatrix::from_diagonal(&rates.map(|k| Complex64::new((2.0 * k).sqrt(), 0.0)))?;
    let response = system.solve(&noise)?;
    let out_w = (2.0 * p.kappa_w).sqrt();
    let out_o = (2.0 * p.kappa_o).sqrt();
    let mut a: [Complex64; 6] = std::array::from_fn(|k| -out_w * response[(0, k)]);
    let mut b: [Complex64; 6] = std::array::from_fn(|k| -out_o * response[(2, k)]);
    a[0] -= 1.0;
    b[2] -= 1.0;
    Ok(OutputCoefficients { omega, a, b })
}

/// One coefficient where the closed form and the direct solve disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy {
    /// `"A3"`, `"B6"`, ...
    pub coefficient: String,
    pub analytic: Complex64,
    pub numeric: Complex64,
    pub relative_error: f64,
}

pub fn relative_error(x: Complex64, reference: Complex64) -> f64 {
    let scale = x.norm().max(reference.norm());
    if scale == 0.0 {
        0.0
    } else {
        (x - reference).norm() / scale
    }
}

/// Compares every closed-form coefficient against the direct solve.
pub fn cross_check(
    p: &PhysicalParams,
    d: &DerivedParams,
    omega: f64,
    tolerance: f64,
) -> Result<Vec<Discrepancy>> {
    let analytic = output_coefficients(p, d, omega)?;
    let numeric = transfer_matrix_numeric(p, d, omega)?;
    let mut out = Vec::new();
    for (label, xs, ys) in [("A", &analytic.a, &numeric.a), ("B", &analytic.b, &numeric.b)] {
        for k in 0..6 {
            let err = relative_error(xs[k], ys[k]);
            if !(err <= tolerance) {
                out.push(Discrepancy {
                    coefficient: format!("{label}{}", k + 1),
                    analytic: xs[k],
                    numeric: ys[k],
                    relative_error: err,
                });
            }
        }
    }
    Ok(out)
}

/// Output photon numbers at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonNumbers {
    /// `n(o|w) = (|B1|^2 + |B2|^2) n_w + |B2|^2`.
    pub n_o_given_w: f64,
    /// `n(w|o) = (|A3|^2 + |A4|^2) n_o + |A4|^2`.
    pub n_w_given_o: f64,
    /// `<d_w^dag d_w>`, the transmitted microwave photon number.
    pub n_w_out: f64,
}

/// `sum_k |c_k|^2 (n_k + [k is a creation operator])` over the six inputs.
pub fn output_occupation(coeffs: &[Complex64; 6], thermal: &ThermalOccupations) -> f64 {
    let n = [thermal.microwave, thermal.optical, thermal.mechanical];
    (0..3)
        .map(|pair| {
            let ann = coeffs[2 * pair].norm_sqr();
            let cre = coeffs[2 * pair + 1].norm_sqr();
            (ann + cre) * n[pair] + cre
        })
        .sum()
}

pub fn photon_numbers(coeffs: &OutputCoefficients, thermal: &ThermalOccupations) -> PhotonNumbers {
    let (a, b) = (&coeffs.a, &coeffs.b);
    PhotonNumbers {
        n_o_given_w: (b[0].norm_sqr() + b[1].norm_sqr()) * thermal.microwave + b[1].norm_sqr(),
        n_w_given_o: (a[2].norm_sqr() + a[3].norm_sqr()) * thermal.optical + a[3].norm_sqr(),
        n_w_out: output_occupation(a, thermal),
    }
}
