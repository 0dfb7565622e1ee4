use thiserror::Error;

use crate::ground_state::GroundStateReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0}: expected 1, 2 or 3")]
    UnsupportedDimension(usize),
    #[error("truncation radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("grid needs at least 3 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("field length {actual} does not match grid node count {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("field contains non-finite values")]
    NonFinite,
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("operation requires {0}")]
    GridKindRequired(&'static str),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("invalid couplings: {0}")]
    InvalidCouplings(String),
    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),
    #[error("shooting bracket not found for initial heights in [{lo}, {hi}]")]
    ShootingBracket { lo: f64, hi: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("zero input pair")]
    ZeroPair,
    #[error("projection degenerate: quadratic part {quadratic:.6e}, p-homogeneous part {nonlinear:.6e}")]
    DegenerateDirection { quadratic: f64, nonlinear: f64 },
    #[error("max_iter exceeded after {} iterations (gradient sup-norm {:.3e})", .0.iterations, .0.grad_sup)]
    MaxIterExceeded(Box<GroundStateReport>),
    #[error("descent stalled after {} iterations (gradient sup-norm {:.3e})", .0.iterations, .0.grad_sup)]
    Stalled(Box<GroundStateReport>),
    #[error("synchronized ansatz: {0}")]
    SynchronizedAnsatz(String),
    #[error("wrong branch: {0}")]
    WrongBranch(String),
    #[error("weight degenerate: w² vanishes on every interior node")]
    WeightDegenerate,
    #[error("eigenvalue computation failed: {0}")]
    Eigen(String),
    #[error("translation by {shift} exceeds grid support")]
    TranslationOutOfSupport { shift: f64 },
    #[error("perturbation too large: max relative sup-norm ratio {0} must be < 1")]
    PerturbationTooLarge(f64),
    #[error("invalid κ₀ list: {0}")]
    InvalidKappaList(String),
    #[error("continuation failed at κ₀ index {index} (κ₀ = {kappa0}): {source}")]
    Continuation {
        index: usize,
        kappa0: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("invalid ground state: {0}")]
    InvalidGroundState(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for errors caused by inadmissible input rather than a numerical failure.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::UnsupportedDimension(_)
            | Error::InvalidRadius(_)
            | Error::TooFewNodes(_)
            | Error::LengthMismatch { .. }
            | Error::NonFinite
            | Error::GridMismatch
            | Error::GridKindRequired(_)
            | Error::InvalidTolerance(_)
            | Error::InvalidCouplings(_)
            | Error::InvalidPerturbation(_)
            | Error::SynchronizedAnsatz(_)
            | Error::WrongBranch(_)
            | Error::PerturbationTooLarge(_)
            | Error::InvalidKappaList(_)
            | Error::InvalidArgument(_) => true,
            Error::Continuation { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}
