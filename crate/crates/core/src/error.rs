use alloc::string::String;
use core::fmt;

use crate::lp::FractionalSolution;

/// Errors produced by the scheduling core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The instance violates a structural invariant (dimensions, signs).
    InvalidInstance(String),
    /// A schedule is inconsistent with itself or with the instance it is evaluated on.
    InvalidSchedule(String),
    /// A caller-supplied argument is outside the operation's domain.
    InvalidArgument(String),
    /// The linear program has no feasible point.
    Infeasible,
    /// The linear program is unbounded below.
    Unbounded,
    /// The simplex iteration cap was hit. Carries the best primal-feasible point, if one was reached.
    IterationLimit {
        iterations: usize,
        incumbent: Option<alloc::boxed::Box<FractionalSolution>>,
    },
    /// An exhaustive search would exceed its size guard.
    TooLarge(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInstance(msg) => write!(f, "invalid instance: {msg}"),
            Error::InvalidSchedule(msg) => write!(f, "invalid schedule: {msg}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Infeasible => f.write_str("linear program is infeasible"),
            Error::Unbounded => f.write_str("linear program is unbounded"),
            Error::IterationLimit { iterations, incumbent } => write!(
                f,
                "simplex iteration limit reached after {iterations} iterations ({} incumbent)",
                if incumbent.is_some() { "with" } else { "without" }
            ),
            Error::TooLarge(msg) => write!(f, "search space too large: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
