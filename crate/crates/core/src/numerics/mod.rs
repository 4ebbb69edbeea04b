//! Small dense complex linear algebra and special functions.

mod eigen;
mod matrix;
mod special;

pub use eigen::eigenvalues;
pub use matrix::{ComplexMatrix, MAX_DIM};
pub use special::{erfc, log10_erfc};

pub use num_complex::Complex64;
