//! Error types shared across the solver.

use thiserror::Error;

/// Per-element diagnostic row attached to a numerical failure.
#[derive(Debug, Clone)]
pub struct ElementDiagnostic {
    pub levels: Vec<u8>,
    pub translations: Vec<u32>,
    pub max_abs_hamiltonian: f64,
    pub max_abs_gradient: f64,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("dimension index {dim} out of range for d = {d}")]
    DimensionOutOfRange { dim: usize, d: usize },

    #[error("unsupported polynomial degree {degree} (supported range {min}..={max})")]
    UnsupportedDegree { degree: usize, min: usize, max: usize },

    #[error("basis family mismatch: expected {expected}, got {got}")]
    BasisFamilyMismatch { expected: &'static str, got: &'static str },

    #[error("element (l={levels:?}, j={translations:?}) is not active")]
    InactiveElement { levels: Vec<u8>, translations: Vec<u32> },

    #[error("point-value table is missing entries for an active element")]
    MissingPointValues,

    #[error("function returned a non-finite value at {point:?} during quadrature")]
    NonFiniteSample { point: Vec<f64> },

    #[error("non-finite state detected at t = {t}")]
    NumericalFailure { t: f64, diagnostics: Vec<ElementDiagnostic> },

    #[error("root solve for the characteristic equation did not converge at x = {at:?}, t = {t}")]
    CharacteristicsDiverged { at: Vec<f64>, t: f64 },

    #[error("no closed-form solution available for case `{case}`")]
    NoExactSolution { case: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("convergence rates need errors > 0 and at least two rows")]
    InvalidRateInput,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SolverError>;
