use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("truncation error: {0}")]
    Truncation(String),

    #[error("basis not converged: relative energy shift {shift:.3e} at basis size {basis_size}")]
    NotConverged { basis_size: usize, shift: f64 },

    #[error("level index {index} out of range for {n_keep} kept levels")]
    LevelOutOfRange { index: usize, n_keep: usize },

    #[error("ambiguous labeling: dressed state {dressed} has best overlap {overlap:.3} with |{k}{l}>")]
    AmbiguousLabel { dressed: usize, k: usize, l: usize, overlap: f64 },

    #[error("label |{0}{1}> does not resolve to a dressed state")]
    UnresolvedLabel(usize, usize),

    #[error("coupling element ratio {ratio:.3} violates the weak-coupling limit (hard limit {limit})")]
    CouplingLimit { ratio: f64, limit: f64 },

    #[error("time {t} ns outside the pulse window [0, {t_g}] ns")]
    OutsidePulse { t: f64, t_g: f64 },

    #[error("time step {step} ns does not resolve the carrier (max {max_step} ns)")]
    StepTooLarge { step: f64, max_step: f64 },

    #[error("norm defect {defect:.3e} in evolved column {column} exceeds tolerance")]
    NormDefect { column: usize, defect: f64 },

    #[error("diagonal element |U_c[{index},{index}]| = {magnitude:.3e} too small to define a phase")]
    IllDefinedPhase { index: usize, magnitude: f64 },

    #[error("optimizer failed: {0}")]
    Optimizer(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// Numeric failures (non-convergence, labeling, integrator) as opposed to
    /// bad input or optimizer failure.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. }
                | Error::AmbiguousLabel { .. }
                | Error::UnresolvedLabel(..)
                | Error::NormDefect { .. }
                | Error::IllDefinedPhase { .. }
                | Error::Truncation(_)
        )
    }
}
