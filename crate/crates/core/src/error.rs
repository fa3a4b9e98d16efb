use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported problem `{0}`")]
    UnsupportedProblem(String),

    #[error("invalid dimension for `{problem}`: d = {dim}, need at least {min}")]
    InvalidDimension {
        problem: String,
        dim: usize,
        min: usize,
    },

    #[error("decision variable {index} = {value} lies outside [{lower}, {upper}]")]
    BoundsViolation {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("kernel matrix not positive definite after jitter {jitter:e}")]
    IllConditioned { jitter: f64 },

    #[error("exact hypervolume supports 2 or 3 objectives, got {0}")]
    UnsupportedDimension(usize),

    #[error("iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn at_iteration(self, iteration: usize) -> Self {
        Error::Iteration {
            iteration,
            source: Box::new(self),
        }
    }
}
