use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |a - a^dagger| = {deviation:e})")]
    NonHermitianInput { deviation: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("eigensolver did not converge for eigenvalue {index}")]
    EigenNoConvergence { index: usize },

    #[error("site {site} out of range for a chain of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("temperature must be finite and strictly positive, got {0}")]
    NonPositiveTemperature(f64),

    #[error("not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("operator is not unitary (||U^dagger U - I||_F = {deviation:e})")]
    NonUnitaryOperator { deviation: f64 },

    #[error("unknown sweep parameter `{0}`")]
    UnknownParameter(String),

    #[error("numerical blowup at t = {time}: {reason}")]
    NumericalBlowup { time: f64, reason: String },

    #[error("peak value {value} at N = {size} is not positive")]
    NonPositivePeak { size: u32, value: f64 },

    #[error("singular Jacobian in power-law fit")]
    SingularJacobian,

    #[error("power-law fit did not converge within {0} iterations")]
    NoConvergence(usize),
}
