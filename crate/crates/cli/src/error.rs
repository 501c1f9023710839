use cycpair::dga::MfError;
use cycpair::poly::MilnorError;
use cycpair::segal::corollary::CorollaryError;
use cycpair::segal::cycles::SegalError;
use cycpair::trace::RetractError;

/// Errors that end a command before a report exists.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl From<MfError> for CliError {
    fn from(e: MfError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<MilnorError> for CliError {
    fn from(e: MilnorError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<RetractError> for CliError {
    fn from(e: RetractError) -> Self {
        CliError::Resource(e.to_string())
    }
}

impl From<SegalError> for CliError {
    fn from(e: SegalError) -> Self {
        CliError::Resource(e.to_string())
    }
}

/// Setup errors of the corollary pipeline; verdict errors are reported instead.
pub fn corollary_setup_error(e: &CorollaryError) -> Option<CliError> {
    match e {
        CorollaryError::Mf(e) => Some(e.clone().into()),
        CorollaryError::Milnor(e) => Some(e.clone().into()),
        CorollaryError::Retract(_) | CorollaryError::Segal(_) | CorollaryError::LiftFailed { .. } => {
            Some(CliError::Resource(e.to_string()))
        }
        _ => None,
    }
}
