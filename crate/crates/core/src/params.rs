//! Physical inputs and the quantities derived from them.

use num_complex::Complex64;

use crate::constants::{C, HBAR, K_B, TWO_PI};
use crate::dynamics;
use crate::error::{Error, Result};

/// User-facing inputs. Every frequency and rate is in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Mechanical resonance.
    pub omega_m: f64,
    /// Microwave cavity resonance.
    pub omega_w: f64,
    /// Optical wavelength, m.
    pub lambda_o: f64,
    /// Mechanical quality factor, `omega_m / gamma_m`.
    pub q_m: f64,
    pub kappa_w: f64,
    pub kappa_o: f64,
    pub delta_w: f64,
    pub delta_o: f64,
    /// Single-photon microwave coupling.
    pub g_w: f64,
    /// Single-photon optical coupling.
    pub g_o: f64,
    /// Drive powers, W.
    pub power_w: f64,
    pub power_o: f64,
    /// OPA nonlinear gain `G`.
    pub opa_gain: f64,
    /// OPA pump phase, rad, kept in `[0, 2pi)` by [`PhysicalParams::validated`].
    pub opa_phase: f64,
    /// Bath temperature, K.
    pub temperature: f64,
}

impl Default for PhysicalParams {
    /// Reference operating point: a 10 MHz mechanical mode at 30 mK between a
    /// 10 GHz microwave cavity (red sideband) and a 1064 nm optical cavity
    /// (blue sideband), OPA off.
    fn default() -> Self {
        let omega_m = TWO_PI * 10e6;
        Self {
            omega_m,
            omega_w: TWO_PI * 10e9,
            lambda_o: 1064e-9,
            q_m: 30e3,
            kappa_w: 0.24 * omega_m,
            kappa_o: 0.2 * omega_m,
            delta_w: -omega_m,
            delta_o: omega_m,
            g_w: TWO_PI * 0.327,
            g_o: TWO_PI * 115.512,
            power_w: 1e-3,
            power_o: 10e-3,
            opa_gain: 0.0,
            opa_phase: 0.0,
            temperature: 30e-3,
        }
    }
}

impl PhysicalParams {
    pub fn omega_o(&self) -> f64 {
        TWO_PI * C / self.lambda_o
    }

    pub fn gamma_m(&self) -> f64 {
        self.omega_m / self.q_m
    }

    /// Drive frequency `omega_j - delta_j` of the microwave cavity.
    pub fn drive_frequency_w(&self) -> f64 {
        self.omega_w - self.delta_w
    }

    pub fn drive_frequency_o(&self) -> f64 {
        self.omega_o() - self.delta_o
    }

    /// Checks the invariants and returns a copy with the phase reduced to `[0, 2pi)`.
    pub fn validated(&self) -> Result<Self> {
        let positive = [
            ("omega_m", self.omega_m),
            ("omega_w", self.omega_w),
            ("lambda_o", self.lambda_o),
            ("q_m", self.q_m),
            ("kappa_w", self.kappa_w),
            ("kappa_o", self.kappa_o),
            ("power_w", self.power_w),
            ("power_o", self.power_o),
            ("temperature", self.temperature),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and > 0, got {value}"),
                });
            }
        }
        let finite = [
            ("delta_w", self.delta_w),
            ("delta_o", self.delta_o),
            ("g_w", self.g_w),
            ("g_o", self.g_o),
            ("opa_phase", self.opa_phase),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite, got {value}"),
                });
            }
        }
        if !(self.opa_gain.is_finite() && self.opa_gain >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "opa_gain",
                reason: format!("must be finite and >= 0, got {}", self.opa_gain),
            });
        }
        let mut out = *self;
        out.opa_phase = self.opa_phase.rem_euclid(TWO_PI);
        if out.opa_phase >= TWO_PI {
            out.opa_phase = 0.0;
        }
        Ok(out)
    }
}

/// Mean thermal occupations of the three input baths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalOccupations {
    pub microwave: f64,
    pub optical: f64,
    pub mechanical: f64,
}

impl ThermalOccupations {
    pub const VACUUM: Self = Self {
        microwave: 0.0,
        optical: 0.0,
        mechanical: 0.0,
    };
}

/// Quantities computed from [`PhysicalParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub drive_w: f64,
    pub drive_o: f64,
    pub alpha_w: Complex64,
    pub alpha_o: Complex64,
    /// Effective couplings `alpha_j * g_j`.
    pub g_w_eff: Complex64,
    pub g_o_eff: Complex64,
    pub thermal: ThermalOccupations,
}

/// Bose-Einstein occupation `1 / (exp(hbar omega / k_B T) - 1)`.
pub fn planck_occupation(omega: f64, temperature: f64) -> f64 {
    let x = HBAR * omega / (K_B * temperature);
    1.0 / x.exp_m1()
}

/// Cavity drive strength `sqrt(2 P kappa / (hbar omega_d))`.
pub fn drive_strength(power: f64, kappa: f64, drive_frequency: f64) -> f64 {
    (2.0 * power * kappa / (HBAR * drive_frequency)).sqrt()
}

pub fn derive(params: &PhysicalParams) -> Result<DerivedParams> {
    let p = params.validated()?;
    let wd_w = p.drive_frequency_w();
    if wd_w <= 0.0 {
        return Err(Error::UnphysicalDrive {
            cavity: "microwave",
            value: wd_w,
        });
    }
    let wd_o = p.drive_frequency_o();
    if wd_o <= 0.0 {
        return Err(Error::UnphysicalDrive {
            cavity: "optical",
            value: wd_o,
        });
    }
    let drive_w = drive_strength(p.power_w, p.kappa_w, wd_w);
    let drive_o = drive_strength(p.power_o, p.kappa_o, wd_o);
    let (alpha_w, alpha_o) = dynamics::steady_state(&p, drive_w, drive_o)?;
    Ok(DerivedParams {
        drive_w,
        drive_o,
        alpha_w,
        alpha_o,
        g_w_eff: alpha_w * p.g_w,
        g_o_eff: alpha_o * p.g_o,
        thermal: ThermalOccupations {
            microwave: planck_occupation(p.omega_w, p.temperature),
            optical: planck_occupation(p.omega_o(), p.temperature),
            mechanical: planck_occupation(p.omega_m, p.temperature),
        },
    })
}
