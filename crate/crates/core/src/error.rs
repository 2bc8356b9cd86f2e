use thiserror::Error;

/// Errors raised by the integrators, solvers and experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// `∂H/∂S` (or `∂L/∂S`, `D_S L_d`) vanished: the temperature is zero.
    #[error("temperature vanishes at the evaluation point (dH/dS = {0})")]
    ZeroTemperature(f64),

    /// The flat map of an (ω, η) pair is not invertible.
    #[error("structure is degenerate: flat map is singular")]
    DegenerateStructure,

    #[error("singular {0} matrix")]
    Singular(&'static str),

    #[error("newton did not converge after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("state outside the domain of {system}: {reason}")]
    Domain { system: String, reason: String },

    #[error("step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("step size underflow at t = {0}")]
    StepSizeUnderflow(f64),

    #[error("discrete path violates the entropy constraint at index {index} (residual {residual:e})")]
    PathConstraint { index: usize, residual: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown system `{0}`")]
    UnknownSystem(String),

    #[error("mode `{mode}` is unavailable for {system}")]
    ModeUnavailable { mode: String, system: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Error {
        match self {
            e @ Error::Step { .. } => e,
            e => Error::Step {
                step,
                source: Box::new(e),
            },
        }
    }

    /// Step index carried by the error, if any.
    pub fn step(&self) -> Option<usize> {
        match self {
            Error::Step { step, .. } => Some(*step),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
