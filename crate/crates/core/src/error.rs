use thiserror::Error;

use crate::feasibility::Decision;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("trace is {trace}, expected 1 (residual {:e})", (trace - 1.0).abs())]
    NotTraceOne { trace: f64 },

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("vector is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("traces differ: {lhs} vs {rhs}")]
    TraceMismatch { lhs: f64, rhs: f64 },

    #[error("operator system has dimension {found}, caller asserted {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("input states span an operator system of dimension {dim}, need 3")]
    DegenerateInputSpan { dim: usize },

    #[error("map is not completely positive and trace preserving: {reason}")]
    NotCptp { reason: String },

    #[error("no unital channel exists for this instance")]
    InfeasibleInstance(Box<Decision>),

    #[error("{name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("rejection sampling gave up after {draws} draws")]
    RejectionExhausted { draws: usize },

    #[error("channel search found no channel (best residual {best_residual:e})")]
    NotFound { best_residual: f64 },
}
