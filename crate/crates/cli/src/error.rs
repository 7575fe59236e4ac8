use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad or missing configuration, including inputs the library rejects.
    #[error("config error: {0}")]
    Config(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Budget(_) => 3,
        })
    }
}

impl From<mixlit::Error> for CliError {
    fn from(e: mixlit::Error) -> Self {
        if e.is_budget() {
            CliError::Budget(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

macro_rules! via_library_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                mixlit::Error::from(e).into()
            }
        }
    )*};
}

via_library_error!(
    mixlit::arith::ArithError,
    mixlit::pseudo_norm::SequenceError,
    mixlit::psi::PsiError,
    mixlit::criteria::CriteriaError,
    mixlit::approx::ApproxError,
    mixlit::measure::MeasureError
);
