//! Quantum-illumination receiver statistics.
//!
//! The receiver converter sees `a_R = a_B` (target absent, H0) or
//! `a_R = sqrt(eta) d_w + sqrt(1 - eta) a_B` (target present, H1); its optical
//! output `d_eta,o` is mixed with the retained idler `d_o` on a balanced beam
//! splitter, `a_+- = (d_eta,o +- d_o)/sqrt2`, and the two photon counts are
//! differenced. The background occupation `n_B` is taken to be the same under
//! both hypotheses.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::dynamics::{drift_matrix, stability};
use crate::error::{Error, Result};
use crate::numerics::{erfc, log10_erfc};
use crate::params::{DerivedParams, PhysicalParams, ThermalOccupations};
use crate::spectra::{output_occupation, photon_numbers, Sidebands};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    /// Effective round-trip reflectivity, in `[0, 1)`.
    pub eta: f64,
    /// Number of independent signal-idler mode pairs.
    pub mode_pairs: u64,
    /// Background thermal photon number.
    pub n_background: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            eta: 0.07,
            mode_pairs: 1_000_000,
            n_background: 610.0,
        }
    }
}

impl ScenarioParams {
    pub fn validated(&self) -> Result<Self> {
        if !(0.0..1.0).contains(&self.eta) {
            return Err(Error::InvalidParameter {
                name: "eta",
                reason: format!("must lie in [0, 1), got {}", self.eta),
            });
        }
        if self.mode_pairs == 0 {
            return Err(Error::InvalidParameter {
                name: "M",
                reason: "must be at least 1".into(),
            });
        }
        if !(self.n_background.is_finite() && self.n_background >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "n_B",
                reason: format!("must be finite and >= 0, got {}", self.n_background),
            });
        }
        Ok(*self)
    }

    fn with_eta(&self, eta: f64) -> Self {
        Self { eta, ..*self }
    }
}

/// How the error probability is obtained from the SNR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorModel {
    /// `P = erfc(SNR / 8) / 2`.
    #[default]
    AsPrinted,
    /// `P = erfc(sqrt(SNR / 8)) / 2`.
    SqrtForm,
}

impl ErrorModel {
    fn argument(self, snr: f64) -> f64 {
        match self {
            ErrorModel::AsPrinted => snr / 8.0,
            ErrorModel::SqrtForm => (snr / 8.0).sqrt(),
        }
    }

    /// `(P, log10 P)` for a given SNR.
    pub fn error_probability(self, snr: f64) -> (f64, f64) {
        let x = self.argument(snr);
        (0.5 * erfc(x), log10_erfc(x) - std::f64::consts::LOG10_2)
    }
}

impl fmt::Display for ErrorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorModel::AsPrinted => "as-printed",
            ErrorModel::SqrtForm => "sqrt-form",
        })
    }
}

impl FromStr for ErrorModel {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "as-printed" => Ok(ErrorModel::AsPrinted),
            "sqrt-form" => Ok(ErrorModel::SqrtForm),
            other => Err(format!("unknown error model `{other}` (expected as-printed or sqrt-form)")),
        }
    }
}

/// Which beam-splitter output port.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Port {
    Plus,
    Minus,
}

impl Port {
    fn sign(self) -> f64 {
        match self {
            Port::Plus => 1.0,
            Port::Minus => -1.0,
        }
    }
}

/// `<N_eta,+->  = (D1 n_w + D2 n_o + D3 n_b + D4 n_B + F1 + F2 + F3 + F4) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountCoefficients {
    pub d: [f64; 4],
    pub f: [f64; 4],
}

/// `<d_eta,o^dag d_eta,o> = K1 n_w + K2 n_o + K3 n_b + K4 n_B + T1 + T2 + T3 + T4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectedCoefficients {
    pub k: [f64; 4],
    pub t: [f64; 4],
}

fn occupations(thermal: &ThermalOccupations, n_background: f64) -> [f64; 4] {
    [thermal.microwave, thermal.optical, thermal.mechanical, n_background]
}

fn weighted(coeffs: &[f64; 4], vacuum: &[f64; 4], n: &[f64; 4]) -> f64 {
    (0..4).map(|q| coeffs[q] * n[q]).sum::<f64>() + vacuum.iter().sum::<f64>()
}

/// Transmitter-input coefficients of the reflected field through the
/// receiver, without the `sqrt(eta)`: `B1 A_k(w) + B2 [d_w^dag]_k`.
fn reflected_transfer(sb: &Sidebands) -> [Complex64; 6] {
    let b = &sb.plus.b;
    let a = &sb.plus.a;
    let a_dag = sb.microwave_dagger();
    std::array::from_fn(|k| b[0] * a[k] + b[1] * a_dag[k])
}

/// `D` and `F` for one port at reflectivity `eta` (`eta = 0` gives H0).
pub fn count_coefficients(sb: &Sidebands, eta: f64, port: Port) -> CountCoefficients {
    let b = &sb.plus.b;
    let mixed = reflected_transfer(sb);
    let root_eta = eta.sqrt();
    let s = port.sign();
    let mut d = [0.0; 4];
    let mut f = [0.0; 4];
    for q in 0..3 {
        let (i, j) = (2 * q, 2 * q + 1);
        let ann = root_eta * mixed[i] + s * b[i];
        let cre = root_eta * mixed[j] + s * b[j];
        // The receiver's own optical and mechanical noise enter d_eta,o directly.
        let (own, own_cre) = if q == 0 {
            (0.0, 0.0)
        } else {
            (b[i].norm_sqr() + b[j].norm_sqr(), b[j].norm_sqr())
        };
        d[q] = cre.norm_sqr() + ann.norm_sqr() + own;
        f[q] = cre.norm_sqr() + own_cre;
    }
    d[3] = (1.0 - eta) * (b[0].norm_sqr() + b[1].norm_sqr());
    f[3] = (1.0 - eta) * b[1].norm_sqr();
    CountCoefficients { d, f }
}

pub fn reflected_coefficients(sb: &Sidebands, eta: f64) -> ReflectedCoefficients {
    let b = &sb.plus.b;
    let mixed = reflected_transfer(sb);
    let mut k = [0.0; 4];
    let mut t = [0.0; 4];
    for q in 0..3 {
        let (i, j) = (2 * q, 2 * q + 1);
        let (own, own_cre) = if q == 0 {
            (0.0, 0.0)
        } else {
            (b[i].norm_sqr() + b[j].norm_sqr(), b[j].norm_sqr())
        };
        k[q] = eta * (mixed[j].norm_sqr() + mixed[i].norm_sqr()) + own;
        t[q] = eta * mixed[j].norm_sqr() + own_cre;
    }
    k[3] = (1.0 - eta) * (b[0].norm_sqr() + b[1].norm_sqr());
    t[3] = (1.0 - eta) * b[1].norm_sqr();
    ReflectedCoefficients { k, t }
}

/// `<d_o^dag d_eta,o>`: the idler-return correlation that the counts difference measures.
pub fn idler_return_correlation(sb: &Sidebands, eta: f64, thermal: &ThermalOccupations) -> Complex64 {
    let b = &sb.plus.b;
    let mixed = reflected_transfer(sb);
    let n = [thermal.microwave, thermal.optical, thermal.mechanical];
    let sum: Complex64 = (0..6)
        .map(|k| b[k].conj() * mixed[k] * (n[k / 2] + (k % 2) as f64))
        .sum();
    sum * eta.sqrt()
}

/// Counts and intermediate quantities under one hypothesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisStats {
    pub n_plus: f64,
    pub n_minus: f64,
    pub plus_terms: CountCoefficients,
    pub minus_terms: CountCoefficients,
    pub reflected_terms: ReflectedCoefficients,
    /// `<d_eta,o^dag d_eta,o>`.
    pub n_reflected: f64,
    /// `<d_o^dag d_eta,o>`.
    pub correlation: Complex64,
    /// `<(dN_+ - dN_-)^2>`.
    pub variance: f64,
}

impl HypothesisStats {
    pub fn counts_difference(&self) -> f64 {
        self.n_plus - self.n_minus
    }
}

fn hypothesis(
    sb: &Sidebands,
    thermal: &ThermalOccupations,
    eta: f64,
    n_background: f64,
    n_idler: f64,
    label: &'static str,
) -> Result<HypothesisStats> {
    let n = occupations(thermal, n_background);
    let plus_terms = count_coefficients(sb, eta, Port::Plus);
    let minus_terms = count_coefficients(sb, eta, Port::Minus);
    let n_plus = 0.5 * weighted(&plus_terms.d, &plus_terms.f, &n);
    let n_minus = 0.5 * weighted(&minus_terms.d, &minus_terms.f, &n);
    let reflected_terms = reflected_coefficients(sb, eta);
    let n_reflected = weighted(&reflected_terms.k, &reflected_terms.t, &n);
    let correlation = idler_return_correlation(sb, eta, thermal);
    // Gaussian factorisation of <(dN_+ - dN_-)^2> for phase-insensitive
    // frequency modes: N+(N+ + 1) + N-(N- + 1) - 2|<a_+^dag a_->|^2, where
    // <a_+^dag a_-> = (n_reflected - n_idler)/2 + i Im<d_o^dag d_eta,o>.
    let variance = n_plus * (n_plus + 1.0) + n_minus * (n_minus + 1.0)
        - 0.5 * (n_reflected - n_idler).powi(2)
        - 2.0 * correlation.im.powi(2);
    if variance < 0.0 {
        return Err(Error::NegativeVariance {
            hypothesis: label,
            value: variance,
        });
    }
    Ok(HypothesisStats {
        n_plus,
        n_minus,
        plus_terms,
        minus_terms,
        reflected_terms,
        n_reflected,
        correlation,
        variance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionStats {
    pub h0: HypothesisStats,
    pub h1: HypothesisStats,
    /// `<d_o^dag d_o>` of the retained idler.
    pub n_idler: f64,
    pub snr: f64,
    pub p_err: f64,
    pub log10_p_err: f64,
}

impl DetectionStats {
    pub fn var_h0(&self) -> f64 {
        self.h0.variance
    }

    pub fn var_h1(&self) -> f64 {
        self.h1.variance
    }
}

/// Full receiver statistics from precomputed sidebands (no stability check).
pub fn detection_from_sidebands(
    sb: &Sidebands,
    thermal: &ThermalOccupations,
    scenario: &ScenarioParams,
    model: ErrorModel,
) -> Result<DetectionStats> {
    let s = scenario.validated()?;
    let n_idler = output_occupation(&sb.plus.b, thermal);
    let h0 = hypothesis(sb, thermal, 0.0, s.n_background, n_idler, "H0")?;
    let h1 = hypothesis(sb, thermal, s.eta, s.n_background, n_idler, "H1")?;
    let signal = h1.counts_difference() - h0.counts_difference();
    let numerator = 4.0 * s.mode_pairs as f64 * signal * signal;
    let denominator = (h0.variance.sqrt() + h1.variance.sqrt()).powi(2);
    let snr = if denominator > 0.0 {
        numerator / denominator
    } else if numerator == 0.0 {
        0.0
    } else {
        return Err(Error::Degenerate);
    };
    let (p_err, log10_p_err) = model.error_probability(snr);
    Ok(DetectionStats {
        h0,
        h1,
        n_idler,
        snr,
        p_err,
        log10_p_err,
    })
}

fn stable_sidebands(p: &PhysicalParams, d: &DerivedParams, omega: f64) -> Result<Sidebands> {
    let report = stability(&drift_matrix(p, d))?;
    if !report.stable {
        return Err(Error::Unstable {
            max_real_part: report.max_real_part,
        });
    }
    Sidebands::evaluate(p, d, omega)
}

/// Mean port counts `(N_+, N_-)` under H0 and H1.
pub fn detector_counts(
    p: &PhysicalParams,
    d: &DerivedParams,
    omega: f64,
    scenario: &ScenarioParams,
) -> Result<((f64, f64), (f64, f64))> {
    let stats = evaluate(p, d, omega, scenario, ErrorModel::AsPrinted)?;
    Ok((
        (stats.h0.n_plus, stats.h0.n_minus),
        (stats.h1.n_plus, stats.h1.n_minus),
    ))
}

/// Counts-difference variances `(var_H0, var_H1)`.
pub fn count_variance(
    p: &PhysicalParams,
    d: &DerivedParams,
    omega: f64,
    scenario: &ScenarioParams,
) -> Result<(f64, f64)> {
    let stats = evaluate(p, d, omega, scenario, ErrorModel::AsPrinted)?;
    Ok((stats.var_h0(), stats.var_h1()))
}

/// `(SNR, P)` for the chosen error model.
pub fn snr_and_error(
    p: &PhysicalParams,
    d: &DerivedParams,
    omega: f64,
    scenario: &ScenarioParams,
    model: ErrorModel,
) -> Result<(f64, f64)> {
    let stats = evaluate(p, d, omega, scenario, model)?;
    Ok((stats.snr, stats.p_err))
}

pub fn evaluate(
    p: &PhysicalParams,
    d: &DerivedParams,
    omega: f64,
    scenario: &ScenarioParams,
    model: ErrorModel,
) -> Result<DetectionStats> {
    let sb = stable_sidebands(p, d, omega)?;
    detection_from_sidebands(&sb, &d.thermal, scenario, model)
}

/// Conventional coherent-state radar with the same transmitted photon number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentBenchmark {
    pub n_transmitted: f64,
    pub snr: f64,
    pub p_err: f64,
    pub log10_p_err: f64,
}

pub fn coherent_from_transmitted(n_w: f64, scenario: &ScenarioParams, model: ErrorModel) -> Result<CoherentBenchmark> {
    let s = scenario.validated()?;
    let snr = 4.0 * s.eta * s.mode_pairs as f64 * n_w / (2.0 * s.n_background + 1.0);
    let (p_err, log10_p_err) = model.error_probability(snr);
    Ok(CoherentBenchmark {
        n_transmitted: n_w,
        snr,
        p_err,
        log10_p_err,
    })
}

pub fn coherent_benchmark(
    p: &PhysicalParams,
    d: &DerivedParams,
    omega: f64,
    scenario: &ScenarioParams,
    model: ErrorModel,
) -> Result<CoherentBenchmark> {
    let sb = stable_sidebands(p, d, omega)?;
    let n_w = photon_numbers(&sb.plus, &d.thermal).n_w_out;
    coherent_from_transmitted(n_w, scenario, model)
}

impl ScenarioParams {
    /// The same scenario with the target removed.
    pub fn without_target(&self) -> Self {
        self.with_eta(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::derive;
    use std::f64::consts::PI;

    fn point(g_over_kappa: f64) -> (PhysicalParams, DerivedParams) {
        let base = PhysicalParams::default();
        let p = PhysicalParams {
            opa_gain: g_over_kappa * base.kappa_o,
            opa_phase: 0.62 * PI,
            ..base
        };
        (p, derive(&p).unwrap())
    }

    fn vacuum_uncoupled() -> DerivedParams {
        let z = Complex64::new(0.0, 0.0);
        DerivedParams {
            drive_w: 0.0,
            drive_o: 0.0,
            alpha_w: z,
            alpha_o: z,
            g_w_eff: z,
            g_o_eff: z,
            thermal: ThermalOccupations::VACUUM,
        }
    }

    #[test]
    fn no_target_means_indistinguishable() {
        let (p, d) = point(1.0);
        let s = ScenarioParams::default().without_target();
        let stats = evaluate(&p, &d, p.omega_m, &s, ErrorModel::AsPrinted).unwrap();
        assert_eq!(stats.h0, stats.h1);
        assert_eq!(stats.snr, 0.0);
        assert_eq!(stats.p_err, 0.5);
        let c = coherent_benchmark(&p, &d, p.omega_m, &s, ErrorModel::AsPrinted).unwrap();
        assert_eq!(c.snr, 0.0);
        assert_eq!(c.p_err, 0.5);
    }

    #[test]
    fn vacuum_everywhere_has_no_photons() {
        let p = PhysicalParams::default();
        let d = vacuum_uncoupled();
        let s = ScenarioParams {
            eta: 0.3,
            mode_pairs: 10,
            n_background: 0.0,
        };
        let stats = evaluate(&p, &d, p.omega_m, &s, ErrorModel::AsPrinted).unwrap();
        for h in [&stats.h0, &stats.h1] {
            assert!(h.n_plus.abs() < 1e-15 && h.n_minus.abs() < 1e-15);
            assert!(h.variance.abs() < 1e-14);
        }
        assert_eq!(stats.snr, 0.0);
        let c = coherent_benchmark(&p, &d, p.omega_m, &s, ErrorModel::AsPrinted).unwrap();
        assert_eq!(c.n_transmitted, 0.0);
        assert_eq!(c.snr, 0.0);
    }

    #[test]
    fn snr_is_linear_in_mode_pairs() {
        let (p, d) = point(0.5);
        let s1 = ScenarioParams {
            eta: 0.05,
            mode_pairs: 1000,
            n_background: 610.0,
        };
        let s2 = ScenarioParams { mode_pairs: 2000, ..s1 };
        let a = evaluate(&p, &d, 1.02 * p.omega_m, &s1, ErrorModel::AsPrinted).unwrap();
        let b = evaluate(&p, &d, 1.02 * p.omega_m, &s2, ErrorModel::AsPrinted).unwrap();
        assert_eq!(b.snr, 2.0 * a.snr);
    }

    #[test]
    fn swapping_ports_keeps_snr() {
        let (p, d) = point(1.0);
        let sb = Sidebands::evaluate(&p, &d, p.omega_m).unwrap();
        let plus = count_coefficients(&sb, 0.07, Port::Plus);
        let minus = count_coefficients(&sb, 0.07, Port::Minus);
        // Swapping ports flips the sign of every cross term only.
        let plus0 = count_coefficients(&sb, 0.0, Port::Plus);
        let minus0 = count_coefficients(&sb, 0.0, Port::Minus);
        let n = occupations(&d.thermal, 610.0);
        let diff = |a: &CountCoefficients, b: &CountCoefficients| {
            0.5 * (weighted(&a.d, &a.f, &n) - weighted(&b.d, &b.f, &n))
        };
        let forward = diff(&plus, &minus) - diff(&plus0, &minus0);
        let swapped = diff(&minus, &plus) - diff(&minus0, &plus0);
        assert!((forward + swapped).abs() <= 1e-12 * forward.abs());
        assert_eq!(forward.powi(2), swapped.powi(2));
    }

    #[test]
    fn counts_difference_is_twice_real_correlation() {
        let (p, d) = point(1.7);
        let s = ScenarioParams::default();
        let stats = evaluate(&p, &d, p.omega_m, &s, ErrorModel::AsPrinted).unwrap();
        let expected = 2.0 * stats.h1.correlation.re;
        assert!((stats.h1.counts_difference() - expected).abs() <= 1e-9 * expected.abs());
        assert_eq!(stats.h0.correlation, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn error_probability_falls_with_snr() {
        for model in [ErrorModel::AsPrinted, ErrorModel::SqrtForm] {
            let mut last = model.error_probability(0.0);
            assert_eq!(last.0, 0.5);
            for snr in [0.5, 3.0, 40.0, 400.0, 4000.0] {
                let next = model.error_probability(snr);
                assert!(next.1 < last.1, "{model} {snr}");
                assert!(next.0 <= last.0);
                last = next;
            }
        }
    }

    #[test]
    fn error_model_round_trips_through_text() {
        for m in [ErrorModel::AsPrinted, ErrorModel::SqrtForm] {
            assert_eq!(m.to_string().parse::<ErrorModel>().unwrap(), m);
        }
        assert!("banana".parse::<ErrorModel>().is_err());
    }

    #[test]
    fn scenario_validation() {
        let bad = [
            ScenarioParams { eta: 1.0, ..Default::default() },
            ScenarioParams { eta: -0.1, ..Default::default() },
            ScenarioParams { mode_pairs: 0, ..Default::default() },
            ScenarioParams { n_background: f64::NAN, ..Default::default() },
        ];
        for s in bad {
            assert!(s.validated().is_err(), "{s:?}");
        }
    }

    #[test]
    fn near_zero_reflectivity_is_continuous() {
        let (p, d) = point(1.0);
        let s = ScenarioParams { eta: 1e-8, ..Default::default() };
        let stats = evaluate(&p, &d, p.omega_m, &s, ErrorModel::AsPrinted).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        assert!(rel(stats.h1.n_plus, stats.h0.n_plus) < 1e-6);
        assert!(rel(stats.h1.n_minus, stats.h0.n_minus) < 1e-6);
        assert!(rel(stats.h1.variance, stats.h0.variance) < 1e-6);
        assert!(rel(stats.h1.n_reflected, stats.h0.n_reflected) < 1e-6);
    }
}
