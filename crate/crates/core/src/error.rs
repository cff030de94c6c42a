use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("node index ({i}, {j}) out of range for a {nx}x{nz} grid")]
    NodeOutOfRange {
        i: usize,
        j: usize,
        nx: usize,
        nz: usize,
    },

    #[error("point (x={x}, z={z}) lies outside the grid hull")]
    OutsideHull { x: f64, z: f64 },

    #[error("Picard iteration did not converge after {iterations} passes (last update {residual:e})")]
    PicardDiverged { iterations: usize, residual: f64 },

    #[error("Krylov solve did not converge after {iterations} iterations (relative residual {residual:e})")]
    KrylovDiverged { iterations: usize, residual: f64 },

    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),

    #[error("step {step} failed in the {equation} equation: {source}")]
    StepFailed {
        step: usize,
        equation: Equation,
        #[source]
        source: Box<Error>,
    },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("malformed field file: {0}")]
    Format(String),

    #[error("i/o: {0}")]
    Io(String),
}

/// Which of the three coupled equations a failure came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equation {
    /// `u1 = ln a`
    LogA,
    /// `u2 = b`
    B,
    /// `u3 = c`
    C,
}

impl std::fmt::Display for Equation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Equation::LogA => "u1 (ln a)",
            Equation::B => "u2 (b)",
            Equation::C => "u3 (c)",
        })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn at_step(self, step: usize, equation: Equation) -> Self {
        Error::StepFailed {
            step,
            equation,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
