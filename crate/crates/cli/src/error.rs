use holv_core::io::IoError;
use holv_core::pcp::PcpError;
use holv_core::poly::PolyError;
use holv_core::sim::SimError;
use holv_core::ModelError;
use thiserror::Error;

/// Failures grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input.
    #[error("{0}")]
    Input(String),
    /// The requested method does not apply to this input.
    #[error("{0}")]
    Inapplicable(String),
    /// A numerical procedure failed.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Inapplicable(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::Uncertified => CliError::Inapplicable("uncertified: no shared S-certificate".into()),
            PolyError::NotMTensor { .. } | PolyError::CertificateViolated { .. } => CliError::Inapplicable(e.to_string()),
            PolyError::InnerSolve { .. } | PolyError::NoConvergence { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<PcpError> for CliError {
    fn from(e: PcpError) -> Self {
        match e {
            PcpError::NotGeneralizedSdd { .. } | PcpError::NonNegativeQ => CliError::Inapplicable(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::WrongScenario { .. } | ModelError::NotHyperbolic(_) => CliError::Inapplicable(e.to_string()),
            ModelError::SingularLinearPart | ModelError::NotEquilibrium { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Model(m) => m.into(),
            SimError::BadInitialState | SimError::BadHorizon => CliError::Input(e.to_string()),
            SimError::NonFinite { .. } | SimError::NotConverged => CliError::Numerical(e.to_string()),
        }
    }
}
