use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::geom::{Point, Scalar, Violation};

/// Coarse classification used by front ends to pick exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Precondition,
    Convergence,
    Internal,
    Parse,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value:?} outside the domain [{lo:?}, {hi:?}]")]
    Domain { value: Box<Scalar>, lo: Box<Scalar>, hi: Box<Scalar> },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("precondition violated: {reason}")]
    Precondition { reason: String, witness: Option<Scalar> },

    #[error("function is not in class U ({} violating level(s))", violations.len())]
    NotInClassU { violations: Vec<Violation> },

    #[error("curve is not interior to the open unit square (witness parameter {t:?})")]
    NonInteriorCurve { t: Scalar },

    #[error("f exceeds the identity at t = {t:?}")]
    AboveIdentity { t: Scalar },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("refinement did not converge after {iterations} iteration(s); best residual {best_residual}")]
    Convergence { iterations: usize, best_residual: f64 },

    #[error("internal invariant failed: {reason}")]
    Internal { reason: String, at: Option<Box<Point>> },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_) => ErrorKind::Parse,
            Error::Convergence { .. } => ErrorKind::Convergence,
            Error::Internal { .. } => ErrorKind::Internal,
            _ => ErrorKind::Precondition,
        }
    }

    /// Short stable name for machine-readable reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "Domain",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Parse(_) => "Parse",
            Error::Infeasible(_) => "Infeasible",
            Error::Precondition { .. } => "Precondition",
            Error::NotInClassU { .. } => "NotInClassU",
            Error::NonInteriorCurve { .. } => "NonInteriorCurve",
            Error::AboveIdentity { .. } => "AboveIdentity",
            Error::Unsupported(_) => "Unsupported",
            Error::Convergence { .. } => "Convergence",
            Error::Internal { .. } => "Internal",
        }
    }

    pub(crate) fn precondition(reason: impl Into<String>) -> Self {
        Error::Precondition { reason: reason.into(), witness: None }
    }

    pub(crate) fn internal(reason: impl Into<String>) -> Self {
        Error::Internal { reason: reason.into(), at: None }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
