// SPDX-License-Identifier: MIT OR Apache-2.0

use std::fmt;

/// Errors surfaced by the model, detector, kernel, and estimation layers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violated its domain (e.g. |lambda| >= 1, threshold <= 0).
    InvalidParameter { what: &'static str, value: f64 },
    /// A detection statistic left the representable range at the given step.
    NumericRange { step: u64, value: f64 },
    /// The likelihood ratio at this conditioning point does not depend on the
    /// incoming observation, so the requested direction is degenerate.
    DegenerateDirection { x1: f64 },
    /// One or more replications hit the censoring cap; reporting a mean would
    /// bias it downward, so the estimate fails closed.
    Censored {
        censored: u64,
        replications: u64,
        max_steps: u64,
    },
    /// The conditional acceptance rate is too small for rejection sampling.
    InfeasibleConditioning { k: u64, draws: u64, accepted: u64 },
    /// An iterative scheme exhausted its budget before meeting its target.
    NonConvergence { what: &'static str, budget: u64 },
    /// The requested quantity is not defined for this configuration.
    UnsupportedConfiguration { what: &'static str },
    /// The KL number is zero: the change is undetectable and first-order
    /// delay is undefined.
    UndefinedDetectability,
    /// A least-squares grid was too small or too narrow to fit.
    DegenerateGrid { what: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidParameter { what, value } => {
                write!(f, "invalid parameter: {what} (got {value})")
            }
            Self::NumericRange { step, value } => {
                write!(
                    f,
                    "detection statistic out of range at step {step}: {value}"
                )
            }
            Self::DegenerateDirection { x1 } => {
                write!(
                    f,
                    "degenerate direction at x1 = {x1}: likelihood ratio does not depend on the new observation"
                )
            }
            Self::Censored {
                censored,
                replications,
                max_steps,
            } => {
                write!(
                    f,
                    "{censored} of {replications} replications censored at {max_steps} steps; \
                     enable lower-bound mode to keep a biased-low estimate"
                )
            }
            Self::InfeasibleConditioning { k, draws, accepted } => {
                write!(
                    f,
                    "conditioning on T > {k} infeasible: {accepted} of {draws} probe runs accepted"
                )
            }
            Self::NonConvergence { what, budget } => {
                write!(f, "{what} did not converge within budget {budget}")
            }
            Self::UnsupportedConfiguration { what } => {
                write!(f, "unsupported configuration: {what}")
            }
            Self::UndefinedDetectability => {
                write!(f, "KL number is zero: change undetectable, delay undefined")
            }
            Self::DegenerateGrid { what } => write!(f, "degenerate grid: {what}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
