//! Front end for `semibound`: run configurations, the task runner and the
//! SVG chart writer.

pub mod config;
pub mod plot;
pub mod runner;

pub use config::{Grid, OperatorSource, RunConfig, SplitWeight, Task};
pub use runner::{run, RunReport, SummaryRow};

use semibound_core::{Error, ErrorKind};

/// Exit statuses.
pub const EXIT_DOMINATION: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_HYPOTHESIS: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_INPUT,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Input => EXIT_INPUT,
                ErrorKind::Hypothesis => EXIT_HYPOTHESIS,
                ErrorKind::Numeric => EXIT_NUMERIC,
            },
        }
    }

    /// Message without the variant prefix.
    pub fn detail(&self) -> String {
        match self {
            CliError::Config(s) => s.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }

    /// One-line diagnostic; hypothesis failures name the hypothesis.
    pub fn report(&self) -> String {
        match self {
            CliError::Core(e) if e.kind() == ErrorKind::Hypothesis => {
                format!("hypothesis violated ({}): {e}", hypothesis_name(e))
            }
            _ => format!("error: {self}"),
        }
    }
}

/// The assumption an error of kind [`ErrorKind::Hypothesis`] refutes.
pub fn hypothesis_name(e: &Error) -> &'static str {
    match e {
        Error::SpectrumInHalfPlane { .. } | Error::Singular { .. } | Error::Divergence { .. } => {
            "omega above the growth abscissa: the resolvent is bounded on Re z >= omega"
        }
        Error::Conditioning(_) => "the contour separates the spectrum with a margin",
        Error::Domain(_) => "parameters inside the domain of the estimate",
        Error::Hypothesis(_) => "hypotheses of the selected estimate",
        _ => "none",
    }
}
