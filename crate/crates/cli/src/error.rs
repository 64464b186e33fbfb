// SPDX-License-Identifier: MIT OR Apache-2.0

//! CLI error surface with machine-readable codes: every failure class maps
//! to a distinct exit status and a stable `error[name]` prefix on stderr.

use std::fmt;

use arcpd_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    /// Configuration or argument problems.
    Validation(String),
    /// A statistical check ran to completion and found violations.
    CheckFailed(String),
    /// Filesystem problems reading configs or writing outputs.
    Io(String),
    /// Errors propagated from the estimation engine.
    Core(CoreError),
}

impl CliError {
    /// Stable machine-readable code name.
    pub fn code_name(&self) -> &'static str {
        match self {
            Self::Validation(_) => "validation",
            Self::CheckFailed(_) => "check-failed",
            Self::Io(_) => "io",
            Self::Core(e) => match e {
                CoreError::InvalidParameter { .. } | CoreError::DegenerateGrid { .. } => {
                    "validation"
                }
                CoreError::NumericRange { .. } => "numeric-range",
                CoreError::DegenerateDirection { .. } => "degenerate-direction",
                CoreError::Censored { .. } => "censoring",
                CoreError::InfeasibleConditioning { .. } => "infeasible-conditioning",
                CoreError::NonConvergence { .. } => "non-convergence",
                CoreError::UnsupportedConfiguration { .. } => "unsupported-configuration",
                CoreError::UndefinedDetectability => "undefined-detectability",
            },
        }
    }

    /// Process exit status.
    pub fn exit_code(&self) -> i32 {
        match self.code_name() {
            "check-failed" => 1,
            "validation" => 2,
            "censoring" => 3,
            "non-convergence" => 4,
            "numeric-range" => 5,
            "infeasible-conditioning" => 6,
            "degenerate-direction" => 7,
            "unsupported-configuration" => 8,
            "undefined-detectability" => 9,
            "io" => 10,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Validation(m) | Self::CheckFailed(m) | Self::Io(m) => f.write_str(m),
            Self::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        Self::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}
