//! Stationary quantum statistics of a two-cavity electro-optomechanical
//! converter with an optical parametric amplifier in the optical cavity, and
//! the microwave quantum-illumination detection figures built on them.
//!
//! The pipeline is: [`params::derive`] the steady state from the physical
//! inputs, check [`dynamics::stability`] of the linearised drift matrix,
//! evaluate the output transfer coefficients in [`spectra`], and from those
//! the output covariance matrix and logarithmic negativity ([`gaussian`]) or
//! the receiver photon-count statistics ([`detection`]). [`cli`] drives
//! parameter sweeps and figure datasets.

pub mod cli;
pub mod constants;
pub mod detection;
pub mod dynamics;
pub mod error;
pub mod gaussian;
pub mod numerics;
pub mod params;
pub mod spectra;

pub use error::{Error, Result};
pub use params::{derive, DerivedParams, PhysicalParams, ThermalOccupations};
