//! Physical constants (CODATA 2018 exact/recommended values), pinned so
//! every run is bit-reproducible.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;

pub const TWO_PI: f64 = std::f64::consts::TAU;
