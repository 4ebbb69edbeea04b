use std::f64::consts::{LN_10, PI};

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `log10(erfc(x))`, finite for every finite `x`.
///
/// Above `x = 8` the asymptotic series
/// `erfc(x) ~ exp(-x^2) / (x sqrt(pi)) * sum_n (-1)^n (2n-1)!! / (2x^2)^n`
/// is summed in log space, so tails that underflow f64 still carry a value.
pub fn log10_erfc(x: f64) -> f64 {
    if x <= 8.0 {
        return erfc(x).log10();
    }
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..60 {
        let next = -term * (2 * n - 1) as f64 * inv;
        if next.abs() >= term.abs() || next.abs() < 1e-18 {
            break;
        }
        sum += next;
        term = next;
    }
    (-x * x - (x * PI.sqrt()).ln() + sum.ln()) / LN_10
}
