use thiserror::Error;

/// Errors raised by the physics and numerics layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("drive frequency of the {cavity} cavity is not positive ({value:e} rad/s)")]
    UnphysicalDrive { cavity: &'static str, value: f64 },

    #[error("parametric pole: kappa_o^2 + delta_o^2 = 4 G^2, steady-state amplitude diverges")]
    ParametricPole,

    #[error("squeezing transformation undefined: delta_o = {delta_o:e} <= 2G = {two_g:e}")]
    SqueezingUndefined { delta_o: f64, two_g: f64 },

    #[error("denominator `{which}` vanishes at omega = {omega:e} rad/s")]
    Pole { which: &'static str, omega: f64 },

    #[error("singular matrix in linear solve")]
    Singular,

    #[error("eigenvalue iteration did not converge within {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("matrix dimension {0} outside supported range 1..=8")]
    Dimension(usize),

    #[error("parameter point is unstable (max Re eigenvalue {max_real_part:e} rad/s)")]
    Unstable { max_real_part: f64 },

    #[error("unphysical covariance matrix: symplectic eigenvalue {nu:e} < 1/2")]
    Unphysical { nu: f64 },

    #[error("negative photon-count variance {value:e} under {hypothesis}")]
    NegativeVariance { hypothesis: &'static str, value: f64 },

    #[error("degenerate detection statistics: both variances vanish with a nonzero signal")]
    Degenerate,
}

impl Error {
    /// True for failures of the numerical machinery itself, as opposed to
    /// parameter points outside the physical domain.
    pub fn is_numeric_failure(&self) -> bool {
        matches!(
            self,
            Error::Singular | Error::NoConvergence { .. } | Error::Dimension(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
